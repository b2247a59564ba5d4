"""
Tests for the Monte Carlo scans and checks.

Sizes are kept small; tests marked ``statistical`` compare samples with
exact laws at a loose level so they hold for the fixed seeds used.
"""

from functools import partial

import numpy as np
import pytest
from scipy import stats

from exact_laws import sample_critical_block0_limit
from experiments import (Critical, Linear, ScanSpec, Sub, Super, _forest_blocks, balanced_block0_trend,
                         block0_density_gof, critical_block0_cdf, critical_window_profile,
                         cross_model_triangle, holes_left, is_monotone, max_block_monotonicity, max_block_scan,
                         parking_asymptotics_check, parse_regime, recentering_check, relative_variation,
                         separator_density_scan, separator_fill_check, simulate_golf, simulate_multiball,
                         simulate_parking, sparse_block_samples, sparse_case_check, sparse_mean_rows,
                         z_block_law_check)
from golf_errors import ParameterError
from golf_model import CycleConfig, FixedDirection, PWalk
from seed_manager import SeedManager, run_trials


def loose_bound(result):
    return stats.chi2.ppf(0.9999, result.dof)


def test_holes_left_matches_parity():
    assert holes_left(100, 10.4) == 10
    assert holes_left(101, 10.4) == 11
    assert holes_left(10, 0.2) == 2
    assert holes_left(5, 9.0) == 5


def test_regimes():
    assert parse_regime('linear', a=0.5) == Linear(0.5)
    assert parse_regime('Critical', lam=2.0).target(100) == pytest.approx(20.0)
    assert parse_regime('super').target(16) == pytest.approx(8.0)
    assert parse_regime('sub') == Sub()
    assert Super().label() == 'super'
    with pytest.raises(ParameterError):
        parse_regime('linear', a=1.5)
    with pytest.raises(ParameterError):
        parse_regime('critical')
    with pytest.raises(ParameterError):
        parse_regime('cubic')


def test_scan_spec_validation():
    with pytest.raises(ParameterError):
        ScanSpec(Linear(0.5), (100, 50), 100, 0)
    with pytest.raises(ParameterError):
        ScanSpec(Linear(0.5), (50, 100), 99, 0)
    with pytest.raises(ParameterError):
        ScanSpec(Linear(0.5), (50, 100), 100, 0, sampler='urn')


def test_trials_do_not_depend_on_worker_count():
    trial = partial(_forest_blocks, 20, 4)
    inline = run_trials(trial, 600, SeedManager(5), "workers", 1)
    pooled = run_trials(trial, 600, SeedManager(5), "workers", 2)
    assert inline == pooled
    assert run_trials(trial, 600, SeedManager(6), "workers", 1) != inline


def test_max_block_scan_rows():
    rows = max_block_scan(ScanSpec(Linear(0.5), (40, 80), 100, seed=1))
    assert [row['n'] for row in rows] == [40, 80]
    assert [row['n_l'] for row in rows] == [20, 40]
    for row in rows:
        assert row['q10'] <= row['q50'] <= row['q90']
        assert row['mean_max_over_n'] == pytest.approx(row['mean_max'] / row['n'])
    golf = max_block_scan(ScanSpec(Critical(1.0), (64,), 100, seed=1, sampler='golf'))
    assert golf[0]['n_l'] == 8


def test_scan_helpers():
    assert relative_variation([2.0, 3.0, 4.0]) == pytest.approx(1.0)
    assert is_monotone([1.0, 2.0, 3.0], increasing=True)
    assert not is_monotone([1.0, 3.0, 2.0], increasing=True)
    assert is_monotone([0.5, 0.4, 0.1], increasing=False)


def test_is_monotone_with_slack():
    assert is_monotone([3.0, 3.2, 2.0], increasing=False, slack=[0.5, 0.0])
    assert not is_monotone([3.0, 3.2, 2.0], increasing=False, slack=[0.1, 0.0])
    assert is_monotone([1.0, 0.9, 2.0], increasing=True, slack=[0.2, 0.0])
    with pytest.raises(ParameterError):
        is_monotone([1.0, 2.0], increasing=True, slack=[])


@pytest.mark.statistical
def test_mean_largest_block_does_not_grow_with_holes_left():
    rows = max_block_monotonicity(40, [2, 4, 8, 16], 400, seed=17)
    assert [row['n_l'] for row in rows] == [2, 4, 8, 16]
    assert all(row['non_increasing'] == 1 for row in rows)
    assert rows[0]['mean_max'] > rows[-1]['mean_max']
    with pytest.raises(ParameterError):
        max_block_monotonicity(40, [4, 2], 100, seed=1)
    with pytest.raises(ParameterError):
        max_block_monotonicity(40, [3, 5], 100, seed=1)


def test_simulate_golf_rows():
    rows = simulate_golf(12, 3, 5, FixedDirection(0), 10, seed=1)
    assert len(rows) == 10
    assert [row['trial'] for row in rows] == list(range(10))
    for row in rows:
        assert len(row['remaining_holes'].split()) == 2
        assert sum(int(d) for d in row['blocks'].split()) == 10
    fixed = simulate_golf(0, 0, 0, PWalk(1), 3, seed=1, config=CycleConfig.from_string("BHH"))
    assert [row['remaining_holes'] for row in fixed] == ['2', '2', '2']
    with pytest.raises(ParameterError):
        simulate_golf(10, 3, 3, FixedDirection(0), 5, seed=1)


def test_simulate_golf_is_reproducible():
    first = simulate_golf(30, 8, 12, PWalk(0.5), 20, seed=9)
    assert first == simulate_golf(30, 8, 12, PWalk(0.5), 20, seed=9)
    assert first != simulate_golf(30, 8, 12, PWalk(0.5), 20, seed=10)


def test_simulate_multiball_rows():
    rows = simulate_multiball({-1: 4, 0: 1, 2: 1}, PWalk(0.5), 8, seed=2)
    assert len(rows) == 8
    assert all(len(row['remaining_holes'].split()) == 2 for row in rows)
    with pytest.raises(ParameterError):
        simulate_multiball({-1: 2, 2: 1}, PWalk(0.5), 8, seed=2)


def test_simulate_parking_summary():
    row = simulate_parking(30, 15, PWalk(0.5), 50, seed=2)
    assert row['cars'] == 15
    assert row['largest_max'] >= row['mean_max'] >= 0
    assert row['strategy'] == PWalk(0.5).label


def test_critical_cdf():
    assert critical_block0_cdf(1.0, 0.0) == 0.0
    assert critical_block0_cdf(1.0, 1.0) == 1.0
    assert critical_block0_cdf(1.0, 0.5) == pytest.approx(0.682689, abs=1e-6)


@pytest.mark.statistical
def test_block0_gof_accepts_limit_draws():
    result = block0_density_gof(sample_critical_block0_limit(1.5, 4000, seed=0), 1.5)
    assert result.dof == 19
    assert result.statistic < loose_bound(result)


def test_critical_profile_shape():
    profile = critical_window_profile(1.0, 400, 120, seed=3)
    assert profile.n_l == 20
    assert profile.block0.shape == (120,)
    assert profile.sorted_blocks.shape == (120, 20)
    assert (profile.sorted_blocks[:, 0] >= profile.sorted_blocks[:, 1]).all()
    rows = profile.rows()
    assert len(rows) == 120
    assert 0.0 <= rows[0]['block0_over_n'] <= rows[0]['largest_over_n'] < 1.0


def test_sparse_samples_lie_on_the_simplex():
    samples = sparse_block_samples(1, 3, 200, 50, seed=4)
    assert samples.shape == (50, 2)
    np.testing.assert_allclose(samples.sum(axis=1), 1.0)
    rows = sparse_mean_rows(1, 3, samples)
    assert [row['index'] for row in rows] == [0, 1]
    assert rows[0]['exact'] == pytest.approx(0.7)


def test_sparse_check_with_one_block_is_vacuous():
    result = sparse_case_check(1, 2, 100, 20, seed=1)
    assert (result.statistic, result.dof, result.reject_at_1pct) == (0.0, 0, False)


@pytest.mark.statistical
def test_sparse_moments_match_limit():
    result = sparse_case_check(1, 4, 2000, 1500, seed=11)
    assert result.dof == 5
    assert result.statistic < loose_bound(result)


def test_parking_check_rows():
    rows = parking_asymptotics_check(0.5, [200, 400], 100, seed=3)
    assert [row['m'] for row in rows] == [100, 200]
    assert rows[0]['within_band'] == 1
    with pytest.raises(ParameterError):
        parking_asymptotics_check(0.9, [200], 100, seed=3)


@pytest.mark.statistical
def test_golf_forest_and_exact_block_laws_agree():
    result = cross_model_triangle(8, 2, 3000, seed=21)
    for name, gof in result.to_json_dict().items():
        assert gof['statistic'] < stats.chi2.ppf(0.9999, gof['dof']), name
    with pytest.raises(ParameterError):
        cross_model_triangle(9, 2, 100, seed=1)


def test_separators_are_never_filled():
    outcome = separator_fill_check(0.3, 0.45, 60, 40, seed=5)
    assert outcome['filled'] == 0
    assert outcome['runs'] + outcome['skipped_no_separator'] == 40
    assert outcome['runs'] > 0


@pytest.mark.statistical
def test_separator_density_near_target():
    row = separator_density_scan(0.2, 0.5, [100], 100, seed=8)[0]
    assert row['target'] == pytest.approx(0.18)
    assert abs(row['density'] - row['target']) < 0.03


@pytest.mark.statistical
def test_z_block_laws_without_neutral_sites():
    results = z_block_law_check(0.4, 0.6, 2000, 1, 800, seed=13)
    assert sorted(results) == ['delta_-1', 'delta_0', 'delta_1']
    for result in results.values():
        assert result.statistic < loose_bound(result)


@pytest.mark.statistical
def test_z_block0_law_with_neutral_sites():
    results = z_block_law_check(0.2, 0.5, 2000, 0, 800, seed=14)
    assert list(results) == ['delta_0']
    assert results['delta_0'].statistic < loose_bound(results['delta_0'])


@pytest.mark.statistical
def test_block0_seen_from_another_vertex():
    result = recentering_check(0.2, 0.5, 1000, 400, seed=15)
    assert result.statistic < loose_bound(result)


def test_balanced_trend_rows():
    rows = balanced_block0_trend(0.3, [200, 400], 60, seed=16, K=10)
    assert [row['n'] for row in rows] == [200, 400]
    for row in rows:
        assert row['wilson_low'] <= row['probability'] <= row['wilson_high']
