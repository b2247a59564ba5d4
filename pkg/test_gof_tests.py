"""
Tests for the goodness-of-fit helpers.
"""

import math
from fractions import Fraction

import pytest

from exact_laws import ExactDistribution
from gof_tests import (chi_square_gof, chi_square_two_sample, counts_over, ks_two_sample, mean_and_stderr,
                       tv_distance, wilson_interval)
from golf_errors import DegenerateInputError


def test_perfect_fit():
    result = chi_square_gof([50, 50], [0.5, 0.5])
    assert result.statistic == 0.0
    assert result.dof == 1
    assert not result.reject_at_1pct


def test_gross_misfit_is_rejected():
    result = chi_square_gof([90, 10], [0.5, 0.5])
    assert result.statistic == pytest.approx(64.0)
    assert result.reject_at_1pct
    assert result.to_json_dict() == {"statistic": result.statistic, "dof": 1, "reject_at_1pct": True}


def test_small_categories_are_pooled():
    result = chi_square_gof([100, 3, 2], [0.95, 0.03, 0.02])
    assert result.dof == 1


def test_bad_probabilities():
    with pytest.raises(DegenerateInputError):
        chi_square_gof([1, 2], [0.5, 0.6])
    with pytest.raises(DegenerateInputError):
        chi_square_gof([1, 2, 3], [0.5, 0.5])
    with pytest.raises(DegenerateInputError):
        chi_square_gof([0, 0], [0.5, 0.5])


def test_two_sample_tests():
    same = chi_square_two_sample([40, 60, 20], [40, 60, 20])
    assert same.statistic == pytest.approx(0.0)
    assert not same.reject_at_1pct
    apart = chi_square_two_sample([90, 10], [10, 90])
    assert apart.reject_at_1pct
    ks = ks_two_sample([0.1, 0.2, 0.3, 0.4], [0.1, 0.2, 0.3, 0.4])
    assert ks.statistic == 0.0
    assert not ks.reject_at_1pct


def test_tv_distance():
    assert tv_distance({"a": 3, "b": 1}, {"a": 0.5, "b": 0.5}) == pytest.approx(0.25)
    exact = ExactDistribution({(0,): Fraction(1, 2), (1,): Fraction(1, 2)})
    assert tv_distance({(0,): 10, (2,): 10}, exact) == pytest.approx(0.5)
    with pytest.raises(DegenerateInputError):
        tv_distance({}, exact)


def test_wilson_interval():
    low, high = wilson_interval(5, 10)
    assert low < 0.5 < high
    assert 0.5 - low == pytest.approx(high - 0.5)
    low, high = wilson_interval(0, 10)
    assert low == pytest.approx(0.0, abs=1e-12)
    assert high > 0.0
    with pytest.raises(DegenerateInputError):
        wilson_interval(3, 2)


def test_mean_and_stderr():
    mean, stderr = mean_and_stderr([1, 2, 3])
    assert mean == 2.0
    assert stderr == pytest.approx(1 / math.sqrt(3))
    with pytest.raises(DegenerateInputError):
        mean_and_stderr([1.0])


def test_counts_over():
    assert counts_over(["a", "b"], ["a", "c", "a"]) == [2, 0]
