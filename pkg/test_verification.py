"""
Tests for the exact verification suite.
"""

from fractions import Fraction

import exact_laws
import main
from exact_laws import ExactDistribution
from verification import (check_cycle_law, check_forests, check_mini_golf, check_mini_parking, check_multiball,
                          check_rotation, check_z_laws, run_verification)
from golf_model import NearestHole, PWalk

SMALL = dict(max_n=4, normalization_n=6, block_n=8, mini_n=5, forest_n=5)


def corrupt_law(original):
    """Move 1/100 of mass between the first two keys of every law with two or more keys."""
    def corrupted(n, n_b, n_t):
        law = original(n, n_b, n_t)
        keys = law.support
        if len(keys) < 2:
            return law
        masses = dict(law.masses)
        masses[keys[0]] += Fraction(1, 100)
        masses[keys[1]] -= Fraction(1, 100)
        return ExactDistribution(masses)
    return corrupted


def test_small_suite_passes():
    report = run_verification(**SMALL)
    assert report.passed, report.counterexample
    assert report.counterexample is None
    assert len(report.checks) == 12
    assert all(check.cases > 0 for check in report.checks)
    document = report.to_json_dict()
    assert document['passed'] is True
    assert document['checks'][0]['name'] == 'cycle law'


def test_individual_checks():
    assert check_cycle_law(4, [PWalk(Fraction(2, 3)), NearestHole()])[1] is None
    assert check_multiball(5, [PWalk(Fraction(1, 2))])[1] is None
    assert check_rotation(4, PWalk(Fraction(1, 3)))[1] is None
    assert check_forests(7)[1] is None
    assert check_mini_parking(9)[1] is None
    cases, counterexample = check_mini_golf(6, 6)
    assert counterexample is None
    assert cases > 6 * 4
    cases, counterexample = check_z_laws(max_k=10, tail_length=2000)
    assert counterexample is None
    assert cases == 2 + 11 + 1


def test_corrupted_formula_is_caught(monkeypatch):
    monkeypatch.setattr(exact_laws, 'remaining_holes_distribution_cycle',
                        corrupt_law(exact_laws.remaining_holes_distribution_cycle))
    report = run_verification(**SMALL)
    assert not report.passed
    assert len(report.checks) == 1
    assert report.counterexample.startswith("cycle law: n=2 n_b=0 n_t=1")


def test_verify_command_exit_codes(monkeypatch, capsys):
    assert main.main(['verify', '--max-n', '3']) == 0
    assert '"passed": true' in capsys.readouterr().out

    monkeypatch.setattr(exact_laws, 'remaining_holes_distribution_cycle',
                        corrupt_law(exact_laws.remaining_holes_distribution_cycle))
    assert main.main(['verify', '--max-n', '3']) == 1
    assert 'Counterexample: cycle law' in capsys.readouterr().err
