"""
Tests for the exact small-instance oracle.
"""

from fractions import Fraction

import pytest

from exact_laws import (block_size_distribution_full, mini_parking_conditional, multiball_distribution,
                        parking_distribution, remaining_holes_distribution_cycle)
from golf_errors import DomainError, InstanceTooLargeError, ParameterError, UnsupportedStrategyError
from golf_model import (CycleConfig, FixedDirection, MultiballConfig, NearestHole, ParityRule, PWalk, SiteState,
                        block_sizes)
from oracle import (all_configurations, conditional_block_law, ensemble_final_distribution,
                    ensemble_multiball_distribution, exact_final_distribution, exact_multiball_distribution,
                    exact_parking_distribution, exact_segment_distribution, hitting_prob_interval, settle_law,
                    verify_p_independence, verify_strategy_independence)

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


def test_hitting_prob_interval():
    assert hitting_prob_interval(4, 1, HALF) == Fraction(1, 4)
    assert hitting_prob_interval(3, 1, Fraction(2, 3)) == Fraction(4, 7)
    assert hitting_prob_interval(3, 2, Fraction(1)) == 1
    assert hitting_prob_interval(3, 2, Fraction(0)) == 0
    with pytest.raises(DomainError):
        hitting_prob_interval(3, 3, HALF)


def test_clockwise_walk_is_deterministic():
    law = exact_final_distribution(CycleConfig.from_string("BHH"), PWalk(1))
    assert law.masses == {(2,): Fraction(1)}


def test_single_configuration_law_depends_on_p():
    config = CycleConfig.from_string("B.HH")
    half = exact_final_distribution(config, PWalk(HALF))
    third = exact_final_distribution(config, PWalk(THIRD))
    assert half.masses == {(3,): Fraction(1, 3), (2,): Fraction(2, 3)}
    assert half != third
    assert half.is_normalized() and third.is_normalized()


def test_uniform_start_matches_closed_form():
    for strategy in (PWalk(HALF), PWalk(THIRD), NearestHole(), FixedDirection(0), FixedDirection(HALF)):
        assert ensemble_final_distribution(4, 1, 3, strategy) == remaining_holes_distribution_cycle(4, 1, 3)
        assert ensemble_final_distribution(5, 2, 3, strategy) == remaining_holes_distribution_cycle(5, 2, 3)


def test_uniform_start_block_law_matches_block_formula():
    law = ensemble_final_distribution(7, 2, 5, PWalk(THIRD))
    assert law.map_keys(lambda X: block_sizes(X, 7).deltas) == block_size_distribution_full(7, 2)


def test_p_and_strategy_independence():
    config = CycleConfig.from_string("BH.HH")
    assert verify_p_independence(config, HALF, THIRD)
    assert verify_strategy_independence(config, NearestHole(), FixedDirection(1))


def test_all_configurations_count():
    assert sum(1 for _ in all_configurations(5, 1, 2)) == 5 * 6


def test_parity_rule_is_rejected():
    with pytest.raises(UnsupportedStrategyError):
        exact_final_distribution(CycleConfig.from_string("BH.HH"), ParityRule())


def test_oracle_guards():
    with pytest.raises(InstanceTooLargeError):
        settle_law(range(10, 20), range(9), PWalk(HALF), 20)
    with pytest.raises(ParameterError):
        settle_law([0], [1, 2], PWalk(HALF), 3)
    with pytest.raises(InstanceTooLargeError):
        exact_parking_distribution(10, 7)


def test_segment_law():
    law = exact_segment_distribution([SiteState.HOLE, SiteState.BALL, SiteState.HOLE], PWalk(HALF))
    assert law.masses == {(0,): HALF, (2,): HALF}
    shifted = exact_segment_distribution([SiteState.HOLE, SiteState.BALL, SiteState.HOLE], PWalk(HALF), offset=10)
    assert shifted.support == [(10,), (12,)]
    # No hole to the left of a ball at the segment start
    edge = exact_segment_distribution([SiteState.BALL, SiteState.HOLE, SiteState.HOLE], PWalk(HALF))
    assert edge.masses == {(2,): Fraction(1)}


def test_parking_chain_matches_closed_form():
    for n, m in ((3, 2), (4, 2), (4, 3), (5, 3)):
        for p in (HALF, Fraction(1), THIRD):
            assert exact_parking_distribution(n, m, p=p) == parking_distribution(n, m)


def test_parking_avoiding_a_slot():
    for n in range(2, 7):
        law = exact_parking_distribution(n, n - 1, p=HALF, avoid=0)
        assert law.probability((0,)) == mini_parking_conditional(n)


def test_multiball_oracle():
    config = MultiballConfig(4, (-1, 2, -1, -1))
    law = exact_multiball_distribution(config, PWalk(HALF))
    assert law.is_normalized()
    assert set(law.support) <= {(0,), (2,), (3,)}
    census = {-1: 3, 0: 1, 2: 1}
    expected = multiball_distribution(5, census)
    assert ensemble_multiball_distribution(census, PWalk(THIRD)) == expected
    assert ensemble_multiball_distribution(census, NearestHole()) == expected


def test_conditional_block_law():
    assert conditional_block_law(5, (0,), (2,), NearestHole()) == THIRD
    assert conditional_block_law(6, (0,), (1,), PWalk(THIRD)) == HALF


@pytest.mark.parametrize('n, X, b, strategy', [
    (7, (0, 3), (1, 1), NearestHole()),
    (8, (0, 5), (2, 0), NearestHole()),
    (8, (1, 4), (1, 1), PWalk(THIRD)),
    (9, (2, 6), (1, 1), PWalk(THIRD)),
    (9, (2, 6), (2, 1), FixedDirection(0)),
])
def test_conditional_law_is_a_product_over_blocks(n, X, b, strategy):
    expected = Fraction(1)
    for bi in b:
        expected /= bi + 1
    assert conditional_block_law(n, X, b, strategy) == expected
    with pytest.raises(ParameterError):
        conditional_block_law(5, (0,), (3,), NearestHole())
