"""
Closed-form laws of the golf and parking processes.

Cycle laws are finite rational sums and are evaluated with exact
``Fraction`` arithmetic. Laws on Z and limit densities involve irrational
closed forms and are evaluated in floating point.
"""

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from golf_errors import DomainError, ParameterError
from golf_model import block_sizes
from seed_manager import SeedLike, as_generator

# Series are cut once a term drops below this fraction of the partial sum
SERIES_TOLERANCE = 1e-16
SERIES_MAX_TERMS = 10 ** 6


# Exact distributions

def format_fraction(value: Fraction) -> str:
    """Render as "p/q", always with a denominator."""
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


@dataclass(frozen=True)
class ExactDistribution:
    """Map from keys (hole sets or block-size vectors) to exact masses.

    Keys are sorted integer tuples for hole sets and ordered tuples for
    block sizes. Zero masses are dropped.
    """

    masses: Dict[Tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {tuple(int(v) for v in key): Fraction(mass)
                   for key, mass in self.masses.items() if mass != 0}
        for key, mass in cleaned.items():
            if mass < 0:
                raise ParameterError(f"Negative mass {mass} for {key}")
        object.__setattr__(self, 'masses', cleaned)

    @property
    def support(self) -> List[Tuple[int, ...]]:
        return sorted(self.masses)

    def probability(self, key: Sequence[int]) -> Fraction:
        return self.masses.get(tuple(key), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0))

    def is_normalized(self) -> bool:
        return self.total() == 1

    def map_keys(self, fn) -> 'ExactDistribution':
        """Push the law forward through ``fn`` (keys merged by summation)."""
        pushed: Dict[Tuple[int, ...], Fraction] = {}
        for key, mass in self.masses.items():
            image = tuple(fn(key))
            pushed[image] = pushed.get(image, Fraction(0)) + mass
        return ExactDistribution(pushed)

    def to_json_dict(self) -> Dict:
        support = self.support
        return {
            "support": [list(key) for key in support],
            "mass": [format_fraction(self.masses[key]) for key in support],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> 'ExactDistribution':
        data = json.loads(text)
        if len(data["support"]) != len(data["mass"]):
            raise ParameterError("Support and mass lists differ in length")
        return cls({tuple(key): parse_fraction(mass) for key, mass in zip(data["support"], data["mass"])})


# Integer building blocks

def multinomial(n: int, parts: Sequence[int]) -> int:
    """n! / prod(parts_i!) for parts summing to n."""
    if any(p < 0 for p in parts):
        raise ParameterError(f"Multinomial parts must be non-negative: {list(parts)}")
    if sum(parts) != n:
        raise ParameterError(f"Multinomial parts sum to {sum(parts)}, expected {n}")
    result = 1
    remaining = n
    for p in parts:
        result *= math.comb(remaining, p)
        remaining -= p
    return result


def catalan(k: int) -> int:
    """k-th Catalan number."""
    if k < 0:
        raise ParameterError(f"Catalan index must be non-negative, got {k}")
    return math.comb(2 * k, k) // (k + 1)


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _check_hole_set(X: Sequence[int], n: int, expected: int) -> Tuple[int, ...]:
    holes = tuple(sorted(set(int(v) for v in X)))
    if len(holes) != len(X):
        raise ParameterError(f"Repeated vertices in {list(X)}")
    if any(v < 0 or v >= n for v in holes):
        raise ParameterError(f"Vertices must lie in 0..{n - 1}: {list(X)}")
    if len(holes) != expected:
        raise ParameterError(f"Expected {expected} remaining holes, got {len(holes)}")
    return holes


# Cycle laws

def _block_weights(length: int, max_balls: int) -> List[Fraction]:
    """Weight of b balls and b holes inside a block of the given length."""
    return [Fraction(multinomial(length, [b, b, length - 2 * b]), b + 1)
            for b in range(min(length // 2, max_balls) + 1)]


def _convolve(left: List[Fraction], right: List[Fraction], cap: int) -> List[Fraction]:
    out = [Fraction(0)] * min(len(left) + len(right) - 1, cap + 1)
    for i, a in enumerate(left):
        if a == 0:
            continue
        for j, b in enumerate(right):
            if i + j > cap:
                break
            out[i + j] += a * b
    return out


def prob_remaining_holes_cycle(n: int, n_b: int, n_t: int, X: Sequence[int]) -> Fraction:
    """P(TL = X) for a uniform start with n_b balls and n_t holes on the cycle.

    Sum over the ways to put b_i balls and b_i holes in block i, each way
    weighted by 1/(b_i + 1), normalised by the number of configurations.
    The sum over (b_i) is a truncated convolution over blocks.
    """
    if not 0 <= n_b < n_t or n_b + n_t > n:
        raise ParameterError(f"Need 0 <= n_b < n_t and n_b + n_t <= n, got n={n}, n_b={n_b}, n_t={n_t}")
    holes = _check_hole_set(X, n, n_t - n_b)
    total = [Fraction(1)]
    for length in block_sizes(holes, n).deltas:
        total = _convolve(total, _block_weights(length, n_b), n_b)
    if len(total) <= n_b:
        return Fraction(0)
    return total[n_b] / multinomial(n, [n_b, n_t, n - n_b - n_t])


def remaining_holes_distribution_cycle(n: int, n_b: int, n_t: int) -> ExactDistribution:
    """Law of TL over all hole sets of size n_t - n_b."""
    return ExactDistribution({X: prob_remaining_holes_cycle(n, n_b, n_t, X)
                              for X in itertools.combinations(range(n), n_t - n_b)})


def block_size_distribution_cycle(n: int, n_b: int, n_t: int) -> ExactDistribution:
    """Law of the block-size vector, obtained from the law of TL."""
    return remaining_holes_distribution_cycle(n, n_b, n_t).map_keys(lambda X: block_sizes(X, n).deltas)


def prob_block_sizes_cycle_full(n: int, n_b: int, b: Sequence[int]) -> Fraction:
    """P(Delta = 2b) on a cycle with no neutral site (n_b + n_t = n)."""
    n_l = len(b)
    if n_l < 1 or any(x < 0 for x in b):
        raise ParameterError(f"Need a non-empty vector of non-negative halves, got {list(b)}")
    if sum(b) != n_b or n != 2 * n_b + n_l:
        raise ParameterError(f"Need sum(b) = n_b and n = 2 n_b + len(b), got n={n}, n_b={n_b}, b={list(b)}")
    product = 2 * b[0] + 1
    for x in b:
        product *= catalan(x)
    return Fraction(product, math.comb(n, n_b))


def block_size_distribution_full(n: int, n_b: int) -> ExactDistribution:
    """Law of Delta on a cycle with no neutral site, as a map from Delta to mass."""
    n_l = n - 2 * n_b
    if n_l < 1:
        raise ParameterError(f"Need n - 2 n_b >= 1, got n={n}, n_b={n_b}")
    return ExactDistribution({tuple(2 * x for x in b): prob_block_sizes_cycle_full(n, n_b, b)
                              for b in compositions(n_b, n_l)})


def prob_block0_size_cycle(n: int, n_b: int, n_t: int, l0: int) -> Fraction:
    """P(Delta_0 = l0) on the cycle, neutral sites allowed.

    Block 0 holds b0 balls and b0 holes; the rest of the cycle, from the
    hole closing block 0 to the hole opening it, is a path whose own law
    of remaining holes counts the other n_l - 1 blocks.
    """
    if not 0 <= n_b < n_t or n_b + n_t > n:
        raise ParameterError(f"Need 0 <= n_b < n_t and n_b + n_t <= n, got n={n}, n_b={n_b}, n_t={n_t}")
    n_l = n_t - n_b
    if l0 < 0 or l0 > n - n_l:
        return Fraction(0)
    if n_l == 1:
        return Fraction(1 if l0 == n - 1 else 0)
    neutrals = n - n_b - n_t
    total = Fraction(0)
    for b0 in range(min(n_b, l0 // 2) + 1):
        inside_neutral = l0 - 2 * b0
        outside = [n_b - b0, n_t - b0 - 2, neutrals - inside_neutral]
        if min(outside) < 0:
            continue
        inside = Fraction((l0 + 1) * multinomial(l0, [b0, b0, inside_neutral]), b0 + 1)
        # Remaining holes of a path with the last hole pinned: (n_l - 1) / (n_t - b0 - 1)
        rest = Fraction(n_l - 1, n_t - b0 - 1) * multinomial(n - l0 - 2, outside)
        total += inside * rest
    return total / multinomial(n, [n_b, n_t, neutrals])


def block0_distribution_cycle(n: int, n_b: int, n_t: int) -> ExactDistribution:
    """Law of Delta_0 keyed by 1-tuples."""
    return ExactDistribution({(l0,): prob_block0_size_cycle(n, n_b, n_t, l0) for l0 in range(n)})


# Parking

def prob_remaining_holes_parking(n: int, m: int, X: Sequence[int]) -> Fraction:
    """P(free slots = X) after m cars park on the cycle of n slots."""
    if not 0 <= m < n:
        raise ParameterError(f"Parking needs 0 <= m < n, got n={n}, m={m}")
    holes = _check_hole_set(X, n, n - m)
    lengths = block_sizes(holes, n).deltas
    value = Fraction(multinomial(m, lengths), n ** m)
    for length in lengths:
        value *= Fraction(length + 1) ** (length - 1)
    return value


def parking_distribution(n: int, m: int) -> ExactDistribution:
    return ExactDistribution({X: prob_remaining_holes_parking(n, m, X)
                              for X in itertools.combinations(range(n), n - m)})


def mini_parking_conditional(n: int) -> Fraction:
    """P(the single free slot is x | no car chose x) with n - 1 cars."""
    if n < 2:
        raise ParameterError(f"Need n >= 2, got {n}")
    return Fraction(n ** (n - 2), (n - 1) ** (n - 1))


# Several balls per site

def _census_key_order(census: Dict[int, int]) -> List[int]:
    return [-1, 0] + sorted(j for j in census if j >= 1)


def _multiball_block_terms(length: int, remaining: Tuple[int, ...],
                           ball_types: List[int]) -> Iterator[Tuple[Tuple[int, ...], Fraction]]:
    """Ways to fill a block: yields (counts per type in census order, weight)."""
    def choose(index: int, used_sites: int, ball_total: int, picked: Tuple[int, ...]):
        if index == len(ball_types):
            holes = ball_total
            neutral = length - used_sites - holes
            if holes > remaining[0] or neutral < 0 or neutral > remaining[1]:
                return
            counts = (holes, neutral) + picked
            weight = Fraction(multinomial(length, list(counts)), holes + 1)
            yield counts, weight
            return
        j = ball_types[index]
        for c in range(min(remaining[index + 2], length - used_sites) + 1):
            if ball_total + j * c > remaining[0]:
                break
            yield from choose(index + 1, used_sites + c, ball_total + j * c, picked + (c,))

    yield from choose(0, 0, 0, ())


def prob_remaining_holes_multiball(n: int, census: Dict[int, int], X: Sequence[int]) -> Fraction:
    """P(TL = X) for a uniform arrangement of the census (key -1: holes, j >= 0: sites with j balls).

    Each block carries as many holes as balls; the block weight is
    1/(holes in block + 1) times the number of arrangements.
    """
    census = {int(j): int(c) for j, c in census.items() if c}
    if any(j < -1 for j in census):
        raise ParameterError(f"Census keys must be >= -1: {sorted(census)}")
    if sum(census.values()) != n:
        raise ParameterError(f"Census covers {sum(census.values())} sites, expected {n}")
    surplus = census.get(-1, 0) - sum(j * c for j, c in census.items() if j >= 1)
    if surplus <= 0:
        raise ParameterError(f"Hole surplus must be positive, got {surplus}")
    holes = _check_hole_set(X, n, surplus)

    order = _census_key_order(census)
    ball_types = order[2:]
    start = (census.get(-1, 0) - surplus, census.get(0, 0)) + tuple(census[j] for j in ball_types)
    states: Dict[Tuple[int, ...], Fraction] = {start: Fraction(1)}
    for length in block_sizes(holes, n).deltas:
        following: Dict[Tuple[int, ...], Fraction] = {}
        for remaining, weight in states.items():
            for counts, term in _multiball_block_terms(length, remaining, ball_types):
                key = tuple(r - c for r, c in zip(remaining, counts))
                following[key] = following.get(key, Fraction(0)) + weight * term
        states = following
    zero = tuple(0 for _ in start)
    parts = [census.get(j, 0) for j in order]
    return states.get(zero, Fraction(0)) / multinomial(n, parts)


def multiball_distribution(n: int, census: Dict[int, int]) -> ExactDistribution:
    surplus = census.get(-1, 0) - sum(j * c for j, c in census.items() if j >= 1)
    return ExactDistribution({X: prob_remaining_holes_multiball(n, census, X)
                              for X in itertools.combinations(range(n), surplus)})


# Laws on Z

def _check_gf_argument(a: float):
    if not 0.0 < a <= 0.25:
        raise DomainError(f"Generating-function argument must lie in (0, 1/4], got {a}")


def catalan_gf_G(a: float) -> float:
    """Sum of C_k a^k."""
    _check_gf_argument(a)
    return (1.0 - math.sqrt(1.0 - 4.0 * a)) / (2.0 * a)


def catalan_gf_G_prime(a: float) -> float:
    """Derivative of catalan_gf_G."""
    _check_gf_argument(a)
    s = math.sqrt(1.0 - 4.0 * a)
    if s == 0.0:
        return math.inf
    return (4.0 * a / s - 2.0 + 2.0 * s) / (4.0 * a * a)


def catalan_gf_H(a: float) -> float:
    """Sum of (2k+1) C_k a^k = 2a G'(a) + G(a); infinite at a = 1/4."""
    _check_gf_argument(a)
    s = math.sqrt(1.0 - 4.0 * a)
    if s == 0.0:
        return math.inf
    return catalan_gf_G(a) / s


def catalan_gf_series(a: float, size_biased: bool = False) -> float:
    """Truncated series for G (or H when ``size_biased``)."""
    _check_gf_argument(a)
    term = 1.0   # C_k a^k at k = 0
    total = 0.0
    for k in range(SERIES_MAX_TERMS):
        contribution = (2 * k + 1) * term if size_biased else term
        total += contribution
        if contribution < SERIES_TOLERANCE * total:
            return total
        term *= 2.0 * (2 * k + 1) * a / (k + 2)
    return total


@dataclass(frozen=True)
class ZLawParams:
    """Ball and hole densities of the i.i.d. start on Z."""

    d_b: float
    d_t: float

    def __post_init__(self):
        if not (0.0 < self.d_b < 1.0 and 0.0 < self.d_t < 1.0):
            raise DomainError(f"Densities must lie in (0, 1), got d_b={self.d_b}, d_t={self.d_t}")
        if self.d_b + self.d_t > 1.0 + 1e-12:
            raise DomainError(f"Need d_b + d_t <= 1, got {self.d_b + self.d_t}")

    @property
    def lam(self) -> float:
        return self.d_b * self.d_t


def _catalan_power(b: int, lam: float) -> float:
    """C_b lam^b without overflow."""
    if b <= 300:
        return float(catalan(b)) * lam ** b
    log_value = math.lgamma(2 * b + 1) - math.lgamma(b + 1) - math.lgamma(b + 2) + b * math.log(lam)
    return math.exp(log_value)


def z_critical_block_law(params: ZLawParams, index: int, b: int) -> float:
    """P(Delta_index = 2b) on Z with no neutral site; block 0 is size-biased."""
    if abs(params.d_b + params.d_t - 1.0) > 1e-12 or not params.d_b < params.d_t:
        raise DomainError(f"Need d_b + d_t = 1 and d_b < d_t, got d_b={params.d_b}, d_t={params.d_t}")
    if b < 0:
        raise DomainError(f"Block half-size must be non-negative, got {b}")
    lam = params.lam
    if index == 0:
        return (2 * b + 1) * _catalan_power(b, lam) / catalan_gf_H(lam)
    return _catalan_power(b, lam) / catalan_gf_G(lam)


def z_block0_law_general(d_b: float, d_t: float, l0: int) -> float:
    """P(Delta_0 = l0) on Z, neutral sites allowed."""
    if not (0.0 < d_b < d_t and d_b + d_t <= 1.0 + 1e-12):
        raise DomainError(f"Need 0 < d_b < d_t and d_b + d_t <= 1, got d_b={d_b}, d_t={d_t}")
    if l0 < 0:
        raise DomainError(f"Block size must be non-negative, got {l0}")
    neutral = max(0.0, 1.0 - d_b - d_t)
    if neutral < 1e-15:
        if l0 % 2:
            return 0.0
        b0 = l0 // 2
        log_term = (math.log(d_t - d_b) + math.log((l0 + 1) / (b0 + 1)) + math.log(math.comb(l0, b0))
                    + b0 * math.log(d_b * d_t) + math.log(d_t))
        return math.exp(log_term)

    total = 0.0
    for b0 in range(l0 // 2 + 1):
        rest = l0 - 2 * b0
        log_term = (math.log((l0 + 1) / (b0 + 1)) + math.lgamma(l0 + 1) - 2 * math.lgamma(b0 + 1)
                    - math.lgamma(rest + 1) + b0 * math.log(d_b) + (b0 + 1) * math.log(d_t)
                    + rest * math.log(neutral))
        total += math.exp(log_term)
    return (d_t - d_b) * total


# Limit densities

def sparse_density(n_b: int, n_t: int, x: Sequence[float]) -> float:
    """Density of the limit of (Delta_i / n) with n_b balls and n_t holes fixed."""
    n_l = n_t - n_b
    if not 0 <= n_b < n_t:
        raise ParameterError(f"Need 0 <= n_b < n_t, got n_b={n_b}, n_t={n_t}")
    if len(x) != n_l:
        raise ParameterError(f"Expected a point of dimension {n_l}, got {len(x)}")
    if any(v < 0.0 for v in x) or abs(sum(x) - 1.0) > 1e-9:
        return 0.0
    total = 0.0
    for b in compositions(n_b, n_l):
        term = 1.0
        for xk, bk in zip(x, b):
            term *= xk ** (2 * bk) / (math.factorial(bk) * math.factorial(bk + 1))
        total += term
    return x[0] * math.factorial(n_b) * math.factorial(n_t) * total


@dataclass(frozen=True)
class SparseMoments:
    """First and second moments of the sparse limit law."""

    mean: Tuple[Fraction, ...]
    second: Tuple[Tuple[Fraction, ...], ...]


def sparse_limit_moments(n_b: int, n_t: int) -> SparseMoments:
    """Exact moments of the sparse limit law.

    The density is a mixture over compositions (b_k) of Dirichlet laws with
    parameters (2 b_0 + 2, 2 b_1 + 1, ...), mixed with the cycle weights
    (2 b_0 + 1) prod C_{b_k} / binom(n_b + n_t, n_b).
    """
    n_l = n_t - n_b
    if not 0 <= n_b < n_t:
        raise ParameterError(f"Need 0 <= n_b < n_t, got n_b={n_b}, n_t={n_t}")
    A = n_b + n_t + 1
    mean = [Fraction(0)] * n_l
    second = [[Fraction(0)] * n_l for _ in range(n_l)]
    for b in compositions(n_b, n_l):
        weight = prob_block_sizes_cycle_full(n_b + n_t, n_b, b)
        alpha = [2 * bk + 1 for bk in b]
        alpha[0] += 1
        for i in range(n_l):
            mean[i] += weight * Fraction(alpha[i], A)
            for j in range(n_l):
                extra = 1 if i == j else 0
                second[i][j] += weight * Fraction(alpha[i] * (alpha[j] + extra), A * (A + 1))
    return SparseMoments(tuple(mean), tuple(tuple(row) for row in second))


def critical_block0_density(lam: float, x: float) -> float:
    """Density of N^2 / (lam^2 + N^2), N standard normal."""
    if lam <= 0.0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    return (lam / (math.sqrt(2.0 * math.pi) * math.sqrt(x) * (1.0 - x) ** 1.5)
            * math.exp(-lam * lam * x / (2.0 * (1.0 - x))))


def sample_critical_block0_limit(lam: float, size: int, seed: SeedLike = None) -> np.ndarray:
    """Draws of N^2 / (lam^2 + N^2)."""
    if lam <= 0.0:
        raise DomainError(f"lambda must be positive, got {lam}")
    normal = as_generator(seed).standard_normal(size)
    return normal ** 2 / (lam ** 2 + normal ** 2)


def pittel_prediction(a: float, n: int) -> float:
    """Centering of the largest parking block with a n cars: (log n - 1.5 log log n) / (a - 1 - log a)."""
    if not 0.0 < a < 1.0:
        raise DomainError(f"a must lie in (0, 1), got {a}")
    if n < 3:
        raise DomainError(f"n must be at least 3, got {n}")
    return (math.log(n) - 1.5 * math.log(math.log(n))) / (a - 1.0 - math.log(a))


# Forest counts

def _check_forest_size(n: int, k: int):
    if not 1 <= k <= n or (n - k) % 2:
        raise ParameterError(f"Need 1 <= k <= n and n = k mod 2, got n={n}, k={k}")


def count_forests(n: int, k: int) -> int:
    """Forests of k complete binary trees with n nodes in total."""
    _check_forest_size(n, k)
    return k * math.comb(n, (n - k) // 2) // n


def count_marked_forests(n: int, k: int) -> int:
    """Same forests with one marked node in the first tree."""
    _check_forest_size(n, k)
    return math.comb(n, (n - k) // 2)
