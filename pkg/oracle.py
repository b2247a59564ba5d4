"""
Formula-free exact laws on small instances.

Balls wake in a uniformly random order. Each awake ball is resolved
between its two nearest free holes with the exact absorption probability of
its walk, so no walk path is ever enumerated. States are memoised on the
pair (free holes, balls still asleep), which folds the factorially many
activation orders together.
"""

import itertools
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from exact_laws import ExactDistribution
from golf_errors import DomainError, InstanceTooLargeError, ParameterError
from golf_model import (CycleConfig, MultiballConfig, PWalk, SiteState, Strategy,
                        block_sizes, nearest_holes)

logger = logging.getLogger(__name__)

MAX_ORACLE_BALLS = 8
MAX_PARKING_VECTORS = 10 ** 6

Law = Dict[Tuple[int, ...], Fraction]


def hitting_prob_interval(L: int, k: int, p: Fraction) -> Fraction:
    """Probability that a p-walk started at k hits L before 0."""
    p = Fraction(p)
    if not 0 < k < L:
        raise DomainError(f"Need 0 < k < L, got k={k}, L={L}")
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if p == 1:
        return Fraction(1)
    if p == 0:
        return Fraction(0)
    if p == Fraction(1, 2):
        return Fraction(k, L)
    r = (1 - p) / p
    return (1 - r ** k) / (1 - r ** L)


def _resolve(free: Tuple[int, ...], origin: int, strategy: Strategy,
             n: Optional[int]) -> List[Tuple[int, Fraction]]:
    """Exact law of the hole an arrival at ``origin`` ends up in."""
    if origin in free:
        return [(origin, Fraction(1))]
    left, right = nearest_holes(free, origin, n)
    if left is None and right is None:
        raise ParameterError("More balls than holes")
    if left is None or right is None or left == right:
        return [(right if left is None else left, Fraction(1))]

    left_gap = (origin - left) % n if n is not None else origin - left
    right_gap = (right - origin) % n if n is not None else right - origin
    to_right = Fraction(0)
    for weight, bias in strategy.exact_branches(left_gap, right_gap):
        to_right += weight * hitting_prob_interval(left_gap + right_gap, left_gap, bias)
    return [(left, 1 - to_right), (right, to_right)]


def _add(law: Law, key: Tuple[int, ...], mass: Fraction):
    law[key] = law.get(key, Fraction(0)) + mass


def settle_law(holes: Sequence[int], balls: Sequence[int], strategy: Strategy,
               n: Optional[int]) -> ExactDistribution:
    """Exact law of the free holes once every ball has settled.

    Args:
        holes: initially free holes
        balls: ball origins, repeated for several balls on one site
        strategy: movement rule with rational parameters
        n: cycle length, or None for a segment

    Returns:
        ExactDistribution keyed by sorted free-hole tuples
    """
    if len(balls) > MAX_ORACLE_BALLS:
        raise InstanceTooLargeError(f"Oracle limited to {MAX_ORACLE_BALLS} balls, got {len(balls)}")
    if len(balls) > len(holes):
        raise ParameterError(f"Need #balls <= #holes, got {len(balls)} > {len(holes)}")

    @lru_cache(maxsize=None)
    def law(free: Tuple[int, ...], asleep: Tuple[int, ...]) -> Tuple[Tuple[Tuple[int, ...], Fraction], ...]:
        if not asleep:
            return ((free, Fraction(1)),)
        out: Law = {}
        for origin in sorted(set(asleep)):
            pick = Fraction(asleep.count(origin), len(asleep))
            rest = list(asleep)
            rest.remove(origin)
            for target, prob in _resolve(free, origin, strategy, n):
                if prob == 0:
                    continue
                following = tuple(h for h in free if h != target)
                for key, mass in law(following, tuple(rest)):
                    _add(out, key, pick * prob * mass)
        return tuple(out.items())

    result = ExactDistribution(dict(law(tuple(sorted(holes)), tuple(sorted(balls)))))
    logger.debug("oracle: %d balls, %d memoised states", len(balls), law.cache_info().currsize)
    return result


def exact_final_distribution(config: CycleConfig, strategy: Strategy) -> ExactDistribution:
    """Exact law of TL for one initial configuration on the cycle."""
    return settle_law(config.holes, config.balls, strategy, config.n)


def exact_multiball_distribution(config: MultiballConfig, strategy: Strategy) -> ExactDistribution:
    """Exact law of TL when sites may hold several balls."""
    if config.hole_surplus < 0:
        raise ParameterError(f"Hole surplus must be non-negative, got {config.hole_surplus}")
    return settle_law(config.holes, config.ball_origins, strategy, config.n)


def exact_segment_distribution(states: Sequence[SiteState], strategy: Strategy,
                               offset: int = 0) -> ExactDistribution:
    """Exact law of the free holes of golf on a segment starting at ``offset``."""
    holes = [offset + i for i, s in enumerate(states) if s is SiteState.HOLE]
    balls = [offset + i for i, s in enumerate(states) if s is SiteState.BALL]
    return settle_law(holes, balls, strategy, None)


def exact_parking_distribution(n: int, m: int, p: Optional[Fraction] = None,
                               strategy: Optional[Strategy] = None,
                               avoid: Optional[int] = None) -> ExactDistribution:
    """Exact law of the free slots after m cars summed over all n^m choice vectors.

    With ``avoid`` the cars choose uniformly among the other n - 1 vertices,
    which conditions on no car choosing ``avoid``.
    """
    if not 0 <= m < n:
        raise ParameterError(f"Parking needs 0 <= m < n, got n={n}, m={m}")
    if n ** m > MAX_PARKING_VECTORS:
        raise InstanceTooLargeError(f"n^m = {n ** m} exceeds {MAX_PARKING_VECTORS}")
    if strategy is None:
        strategy = PWalk(Fraction(1, 2) if p is None else p)
    choices = [v for v in range(n) if v != avoid]
    pick = Fraction(1, len(choices))

    states: Law = {tuple(range(n)): Fraction(1)}
    for _ in range(m):
        following: Law = {}
        for free, weight in states.items():
            for origin in choices:
                for target, prob in _resolve(free, origin, strategy, n):
                    if prob:
                        _add(following, tuple(h for h in free if h != target), weight * pick * prob)
        states = following
    return ExactDistribution(states)


def all_configurations(n: int, n_b: int, n_t: int):
    """Every configuration with n_b balls and n_t holes on the cycle."""
    for balls in itertools.combinations(range(n), n_b):
        others = [v for v in range(n) if v not in balls]
        for holes in itertools.combinations(others, n_t):
            yield CycleConfig.from_positions(n, balls, holes)


def ensemble_final_distribution(n: int, n_b: int, n_t: int, strategy: Strategy) -> ExactDistribution:
    """Law of TL for a uniform start: the average of the per-configuration laws."""
    total: Law = {}
    count = 0
    for config in all_configurations(n, n_b, n_t):
        count += 1
        for key, mass in exact_final_distribution(config, strategy).masses.items():
            _add(total, key, mass)
    return ExactDistribution({key: mass / count for key, mass in total.items()})


def ensemble_multiball_distribution(census: Dict[int, int], strategy: Strategy) -> ExactDistribution:
    """Law of TL for a uniform arrangement of the census (key -1: holes)."""
    values = [j for j, c in sorted(census.items()) for _ in range(c)]
    arrangements = sorted(set(itertools.permutations(values)))
    total: Law = {}
    for arrangement in arrangements:
        config = MultiballConfig(len(values), arrangement)
        for key, mass in exact_multiball_distribution(config, strategy).masses.items():
            _add(total, key, mass)
    return ExactDistribution({key: mass / len(arrangements) for key, mass in total.items()})


def _census(config: CycleConfig) -> Tuple[int, int, int]:
    return config.n, len(config.balls), len(config.holes)


def verify_strategy_independence(config: CycleConfig, first: Strategy, second: Strategy) -> bool:
    """True iff the uniform-start laws of TL agree exactly for the census of ``config``."""
    n, n_b, n_t = _census(config)
    return ensemble_final_distribution(n, n_b, n_t, first) == ensemble_final_distribution(n, n_b, n_t, second)


def verify_p_independence(config: CycleConfig, p1: Fraction, p2: Fraction) -> bool:
    """True iff the uniform-start laws of TL agree exactly for PWalk(p1) and PWalk(p2).

    The law of TL from one fixed configuration does depend on p, so the
    comparison is made over the census class of ``config``.
    """
    return verify_strategy_independence(config, PWalk(p1), PWalk(p2))


def conditional_block_law(n: int, X: Sequence[int], b: Sequence[int], strategy: Strategy) -> Fraction:
    """P(TL = X | X among the holes, block i holds exactly b_i balls and b_i holes)."""
    X = tuple(sorted(X))
    blocks = block_sizes(X, n).deltas
    if len(b) != len(blocks):
        raise ParameterError(f"Expected {len(blocks)} block counts, got {len(b)}")
    if any(2 * bi > length for bi, length in zip(b, blocks)):
        raise ParameterError(f"Block counts {list(b)} do not fit blocks {list(blocks)}")

    ranked = sorted(v if v > 0 else n for v in X)
    starts = [ranked[-1] + 1] + [v + 1 for v in ranked[:-1]]
    vertex_sets = [[(s + j) % n for j in range(length)] for s, length in zip(starts, blocks)]

    per_block = []
    for vertices, bi in zip(vertex_sets, b):
        options = []
        for balls in itertools.combinations(vertices, bi):
            rest = [v for v in vertices if v not in balls]
            for holes in itertools.combinations(rest, bi):
                options.append((balls, holes))
        per_block.append(options)

    total = Fraction(0)
    count = 0
    for choice in itertools.product(*per_block):
        balls = [v for option in choice for v in option[0]]
        holes = list(X) + [v for option in choice for v in option[1]]
        config = CycleConfig.from_positions(n, balls, holes)
        total += exact_final_distribution(config, strategy).probability(X)
        count += 1
    return total / count
