"""
Monte Carlo scans and checks.

Every function takes a master seed and derives one child generator per
trial (see seed_manager), so outputs are identical for any worker count.
Trial functions are module level so worker processes can unpickle them.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

import exact_laws
from exact_laws import ZLawParams
from forests import sample_block_sizes_via_forest
from gof_tests import (GofResult, chi_square_gof, chi_square_two_sample, counts_over,
                       ks_two_sample, mean_and_stderr, wilson_interval)
from golf_errors import ParameterError, SeparatorFilledError
from golf_model import (CycleConfig, FixedDirection, PWalk, Strategy, run_golf, run_golf_multiball,
                        run_parking, sample_initial_cycle, sample_multiball_config)
from line_model import (find_window_separators, run_golf_line, sample_line_window,
                        sample_Z_blocks_surrogate, separator_target_density,
                        time_truncated_config)
from seed_manager import SeedManager, run_trials

logger = logging.getLogger(__name__)

Row = Dict[str, Union[int, float, str]]


# Regimes of n_l(n)

@dataclass(frozen=True)
class Linear:
    a: float

    def target(self, n: int) -> float:
        return self.a * n

    def label(self) -> str:
        return f"linear:{self.a}"


@dataclass(frozen=True)
class Critical:
    lam: float

    def target(self, n: int) -> float:
        return self.lam * math.sqrt(n)

    def label(self) -> str:
        return f"critical:{self.lam}"


@dataclass(frozen=True)
class Super:
    def target(self, n: int) -> float:
        return n ** 0.75

    def label(self) -> str:
        return "super"


@dataclass(frozen=True)
class Sub:
    def target(self, n: int) -> float:
        return n ** 0.25

    def label(self) -> str:
        return "sub"


Regime = Union[Linear, Critical, Super, Sub]


def parse_regime(name: str, a: Optional[float] = None, lam: Optional[float] = None) -> Regime:
    name = name.lower()
    if name == 'linear':
        if a is None or not 0.0 < a < 1.0:
            raise ParameterError(f"The linear regime needs a in (0, 1), got {a}")
        return Linear(a)
    if name == 'critical':
        if lam is None or lam <= 0.0:
            raise ParameterError(f"The critical regime needs lambda > 0, got {lam}")
        return Critical(lam)
    if name == 'super':
        return Super()
    if name == 'sub':
        return Sub()
    raise ParameterError(f"Unknown regime: {name}")


def holes_left(n: int, target: float) -> int:
    """Nearest integer to target with the parity of n, clipped to 1..n."""
    n_l = max(1, min(n, int(round(target))))
    if (n - n_l) % 2:
        n_l = n_l + 1 if n_l + 1 <= n else n_l - 1
    return n_l


@dataclass(frozen=True)
class ScanSpec:
    regime: Regime
    ns: Tuple[int, ...]
    trials: int
    seed: int
    sampler: str = 'forest'
    strategy: Strategy = field(default_factory=lambda: FixedDirection(0))

    def __post_init__(self):
        object.__setattr__(self, 'ns', tuple(self.ns))
        if not self.ns or any(b <= a for a, b in zip(self.ns, self.ns[1:])):
            raise ParameterError(f"The n grid must be non-empty and strictly increasing: {self.ns}")
        if self.trials < 100:
            raise ParameterError(f"A scan needs at least 100 trials per n, got {self.trials}")
        if self.sampler not in ('forest', 'golf'):
            raise ParameterError(f"Unknown sampler: {self.sampler}")


# Trial functions

def _golf_blocks(n: int, n_b: int, n_t: int, strategy: Strategy, rng: np.random.Generator) -> Tuple[int, ...]:
    return run_golf(sample_initial_cycle(n, n_b, n_t, rng), strategy, seed=rng).block_sizes().deltas


def _forest_blocks(n: int, n_l: int, rng: np.random.Generator) -> Tuple[int, ...]:
    return sample_block_sizes_via_forest(n, n_l, rng).deltas


def _max_block_forest(n: int, n_l: int, rng: np.random.Generator) -> int:
    return sample_block_sizes_via_forest(n, n_l, rng).largest


def _max_block_golf(n: int, n_l: int, strategy: Strategy, rng: np.random.Generator) -> int:
    n_b = (n - n_l) // 2
    return max(_golf_blocks(n, n_b, n - n_b, strategy, rng))


def _sorted_normalised_blocks(n: int, n_l: int, rng: np.random.Generator) -> Tuple[float, np.ndarray]:
    deltas = np.array(sample_block_sizes_via_forest(n, n_l, rng).deltas, dtype=float) / n
    return float(deltas[0]), np.sort(deltas)[::-1]


def _parking_max_block(n: int, m: int, strategy: Strategy, rng: np.random.Generator) -> int:
    remaining = np.asarray(run_parking(n, m, strategy, seed=rng).remaining_holes)
    gaps = np.diff(np.concatenate((remaining, [remaining[0] + n]))) - 1
    return int(gaps.max())


# Plain simulation tables

def _golf_row(config: Optional[CycleConfig], n: int, n_b: int, n_t: int, strategy: Strategy,
              rng: np.random.Generator) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    start = config if config is not None else sample_initial_cycle(n, n_b, n_t, rng)
    final = run_golf(start, strategy, seed=rng)
    return final.remaining_holes, final.block_sizes().deltas


def _multiball_row(census: Dict[int, int], strategy: Strategy,
                   rng: np.random.Generator) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    final = run_golf_multiball(sample_multiball_config(census, rng), strategy, seed=rng)
    return final.remaining_holes, final.block_sizes().deltas


def _table(results: Sequence[Tuple[Tuple[int, ...], Tuple[int, ...]]]) -> List[Row]:
    return [{'trial': trial, 'remaining_holes': ' '.join(map(str, holes)), 'blocks': ' '.join(map(str, deltas))}
            for trial, (holes, deltas) in enumerate(results)]


def simulate_golf(n: int, n_b: int, n_t: int, strategy: Strategy, trials: int, seed: int,
                  config: Optional[CycleConfig] = None, threads: int = 1) -> List[Row]:
    """One row per run: remaining holes and the block vector, space separated.

    With ``config`` every run starts from it; otherwise starts are uniform.
    """
    if config is not None:
        n, n_b, n_t = config.n, len(config.balls), len(config.holes)
    if n < 1 or not 0 <= n_b < n_t or n_b + n_t > n:
        raise ParameterError(f"Need 0 <= n_b < n_t and n_b + n_t <= n, got n={n}, n_b={n_b}, n_t={n_t}")
    results = run_trials(partial(_golf_row, config, n, n_b, n_t, strategy), trials, SeedManager(seed),
                         "simulate:golf", threads)
    return _table(results)


def simulate_multiball(census: Dict[int, int], strategy: Strategy, trials: int, seed: int,
                       threads: int = 1) -> List[Row]:
    surplus = census.get(-1, 0) - sum(j * c for j, c in census.items() if j >= 1)
    if surplus < 1:
        raise ParameterError(f"Hole surplus must be positive, got {surplus}")
    results = run_trials(partial(_multiball_row, census, strategy), trials, SeedManager(seed),
                         "simulate:multiball", threads)
    return _table(results)


def simulate_parking(n: int, m: int, strategy: Strategy, trials: int, seed: int, threads: int = 1) -> Row:
    """Summary of the largest block over repeated parking runs."""
    maxima = np.array(run_trials(partial(_parking_max_block, n, m, strategy), trials, SeedManager(seed),
                                 "simulate:parking", threads), dtype=float)
    mean, stderr = mean_and_stderr(maxima) if trials > 1 else (float(maxima.mean()), 0.0)
    return {'n': n, 'cars': m, 'trials': trials, 'strategy': strategy.label,
            'mean_max': mean, 'stderr': stderr, 'median_max': float(np.median(maxima)),
            'largest_max': int(maxima.max())}


# Phase transition

def max_block_scan(spec: ScanSpec, threads: int = 1) -> List[Row]:
    """Per-n summary of the largest block for the regime's n_l(n)."""
    seeds = SeedManager(spec.seed)
    rows: List[Row] = []
    for n in spec.ns:
        n_l = holes_left(n, spec.regime.target(n))
        if spec.sampler == 'forest':
            trial = partial(_max_block_forest, n, n_l)
        else:
            trial = partial(_max_block_golf, n, n_l, spec.strategy)
        maxima = np.array(run_trials(trial, spec.trials, seeds, f"scan:{n}", threads), dtype=float)
        mean, stderr = mean_and_stderr(maxima)
        q10, q50, q90 = np.quantile(maxima, [0.1, 0.5, 0.9])
        rows.append({
            'n': n, 'n_l': n_l, 'trials': spec.trials,
            'mean_max': mean, 'stderr': stderr,
            'q10': float(q10), 'q50': float(q50), 'q90': float(q90),
            'mean_max_over_log_n': mean / math.log(n),
            'mean_max_over_n': mean / n,
        })
        logger.info("scan %s n=%d n_l=%d mean max %.4f", spec.regime.label(), n, n_l, mean)
    return rows


def relative_variation(values: Sequence[float]) -> float:
    """(max - min) / min; the band check of the linear regime."""
    values = list(values)
    return (max(values) - min(values)) / min(values)


def is_monotone(values: Sequence[float], increasing: bool, slack: Optional[Sequence[float]] = None) -> bool:
    """Strict monotonicity; with ``slack``, step i may go the wrong way by up to slack[i]."""
    pairs = list(zip(values, values[1:]))
    if slack is None:
        return all(b > a for a, b in pairs) if increasing else all(b < a for a, b in pairs)
    if len(slack) != len(pairs):
        raise ParameterError(f"Need one slack per step, got {len(slack)} for {len(pairs)}")
    if increasing:
        return all(b >= a - s for (a, b), s in zip(pairs, slack))
    return all(b <= a + s for (a, b), s in zip(pairs, slack))


def max_block_monotonicity(n: int, n_ls: Sequence[int], trials: int, seed: int, threads: int = 1,
                           sigmas: float = 3.0) -> List[Row]:
    """Mean largest block at fixed n over a grid of n_l, which must not increase.

    A step counts as non-increasing when the rise stays within ``sigmas``
    combined standard errors of the two means.
    """
    n_ls = list(n_ls)
    if len(n_ls) < 2 or any(b <= a for a, b in zip(n_ls, n_ls[1:])):
        raise ParameterError(f"n_l grid must be strictly increasing with two points or more, got {n_ls}")
    if any(not 1 <= n_l <= n or (n - n_l) % 2 for n_l in n_ls):
        raise ParameterError(f"Every n_l needs 1 <= n_l <= {n} and the parity of n, got {n_ls}")
    if trials < 2:
        raise ParameterError(f"Need at least 2 trials, got {trials}")
    seeds = SeedManager(seed)
    means, errors = [], []
    for n_l in n_ls:
        maxima = run_trials(partial(_max_block_forest, n, n_l), trials, seeds, f"monotone:{n_l}", threads)
        mean, stderr = mean_and_stderr(maxima)
        means.append(mean)
        errors.append(stderr)
    slack = [sigmas * math.hypot(a, b) for a, b in zip(errors, errors[1:])]
    rows: List[Row] = []
    for i, n_l in enumerate(n_ls):
        step_ok = i == 0 or is_monotone(means[i - 1:i + 1], increasing=False, slack=slack[i - 1:i])
        rows.append({'n': n, 'n_l': n_l, 'trials': trials, 'mean_max': means[i],
                     'stderr': errors[i], 'non_increasing': int(step_ok)})
    if not is_monotone(means, increasing=False, slack=slack):
        logger.warning("mean largest block rises with n_l at n=%d beyond %.1f standard errors", n, sigmas)
    return rows


@dataclass(frozen=True)
class CriticalProfile:
    lam: float
    n: int
    n_l: int
    block0: np.ndarray
    sorted_blocks: np.ndarray

    def rows(self) -> List[Row]:
        out = []
        for trial, (first, blocks) in enumerate(zip(self.block0, self.sorted_blocks)):
            out.append({'trial': trial, 'block0_over_n': float(first),
                        'largest_over_n': float(blocks[0]),
                        'second_over_n': float(blocks[1]) if len(blocks) > 1 else 0.0})
        return out


def critical_window_profile(lam: float, n: int, trials: int, seed: int, threads: int = 1) -> CriticalProfile:
    """Normalised blocks (Delta / n) in the critical window n_l ~ lam sqrt(n)."""
    if lam <= 0.0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    n_l = holes_left(n, lam * math.sqrt(n))
    results = run_trials(partial(_sorted_normalised_blocks, n, n_l), trials, SeedManager(seed),
                         f"critical:{n}", threads)
    block0 = np.array([r[0] for r in results])
    sorted_blocks = np.array([r[1] for r in results])
    return CriticalProfile(lam, n, n_l, block0, sorted_blocks)


def critical_block0_cdf(lam: float, x: float) -> float:
    """P(N^2 / (lam^2 + N^2) <= x)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return float(stats.chi2.cdf(lam * lam * x / (1.0 - x), 1))


def block0_density_gof(samples: Sequence[float], lam: float, bins: int = 20) -> GofResult:
    """Chi-square of Delta_0 / n against the limit density on equiprobable bins."""
    quantiles = stats.chi2.ppf(np.linspace(0.0, 1.0, bins + 1)[1:-1], 1)
    edges = np.concatenate(([0.0], quantiles / (lam * lam + quantiles), [1.0]))
    counts, _ = np.histogram(np.asarray(samples), bins=edges)
    return chi_square_gof(counts, [1.0 / bins] * bins)


def largest_block_stability(lam: float, n_small: int, n_large: int, trials: int, seed: int,
                            threads: int = 1) -> GofResult:
    """KS comparison of the largest normalised block at two sizes."""
    small = critical_window_profile(lam, n_small, trials, seed, threads)
    large = critical_window_profile(lam, n_large, trials, seed + 1, threads)
    return ks_two_sample(small.sorted_blocks[:, 0], large.sorted_blocks[:, 0])


# Sparse case

def _sparse_features(deltas: np.ndarray) -> np.ndarray:
    """x_i for i < n_l - 1 and products x_i x_j for i <= j < n_l - 1."""
    k = deltas.shape[1] - 1
    columns = [deltas[:, i] for i in range(k)]
    columns += [deltas[:, i] * deltas[:, j] for i in range(k) for j in range(i, k)]
    return np.column_stack(columns)


def _exact_sparse_features(n_b: int, n_t: int) -> np.ndarray:
    moments = exact_laws.sparse_limit_moments(n_b, n_t)
    k = n_t - n_b - 1
    values = [float(moments.mean[i]) for i in range(k)]
    values += [float(moments.second[i][j]) for i in range(k) for j in range(i, k)]
    return np.array(values)


def sparse_block_samples(n_b: int, n_t: int, n: int, trials: int, seed: int,
                         strategy: Optional[Strategy] = None, threads: int = 1) -> np.ndarray:
    """Trials x n_l array of Delta_i / (n - n_l); rows lie on the simplex."""
    if not 0 <= n_b < n_t or n_b + n_t > n:
        raise ParameterError(f"Need 0 <= n_b < n_t and n_b + n_t <= n, got n={n}, n_b={n_b}, n_t={n_t}")
    strategy = strategy if strategy is not None else FixedDirection(0)
    blocks = run_trials(partial(_golf_blocks, n, n_b, n_t, strategy), trials, SeedManager(seed),
                        f"sparse:{n}", threads)
    return np.array(blocks, dtype=float) / (n - (n_t - n_b))


def sparse_case_check(n_b: int, n_t: int, n: int, trials: int, seed: int,
                      strategy: Optional[Strategy] = None, threads: int = 1) -> GofResult:
    """Compare empirical first and second moments of the blocks with the exact limit moments.

    The statistic is trials * d' S^+ d with d the moment discrepancy and S
    the sample covariance of the per-trial features.
    """
    n_l = n_t - n_b
    samples = sparse_block_samples(n_b, n_t, n, trials, seed, strategy, threads)
    if n_l < 2:
        return GofResult(0.0, 0, False)
    features = _sparse_features(samples)
    discrepancy = features.mean(axis=0) - _exact_sparse_features(n_b, n_t)
    covariance = np.atleast_2d(np.cov(features, rowvar=False))
    dof = int(np.linalg.matrix_rank(covariance))
    statistic = float(trials * discrepancy @ np.linalg.pinv(covariance) @ discrepancy)
    return GofResult(statistic, dof, bool(statistic > stats.chi2.ppf(0.99, dof)))


def sparse_mean_rows(n_b: int, n_t: int, samples: np.ndarray) -> List[Row]:
    """Empirical and exact E[x_i] per block index."""
    moments = exact_laws.sparse_limit_moments(n_b, n_t)
    rows = []
    for i in range(samples.shape[1]):
        mean, stderr = mean_and_stderr(samples[:, i])
        exact = float(moments.mean[i])
        rows.append({'index': i, 'mean': mean, 'stderr': stderr, 'exact': exact,
                     'z': (mean - exact) / stderr if stderr > 0 else 0.0})
    return rows


# Parking

def parking_asymptotics_check(a: float, ns: Sequence[int], trials: int, seed: int,
                              strategy: Optional[Strategy] = None, threads: int = 1,
                              band: float = 1.0) -> List[Row]:
    """Mean largest parking block against the log n - 1.5 log log n prediction.

    The difference at the smallest n fixes the band centre; later rows are
    flagged within the band when they stay within ``band`` + 3 combined
    standard errors of it.
    """
    if not 0.2 < a < 0.8:
        raise ParameterError(f"a must lie in (0.2, 0.8), got {a}")
    strategy = strategy if strategy is not None else FixedDirection(0)
    seeds = SeedManager(seed)
    rows: List[Row] = []
    centre = centre_err = None
    for n in ns:
        m = int(round(a * n))
        maxima = run_trials(partial(_parking_max_block, n, m, strategy), trials, seeds, f"parking:{n}", threads)
        mean, stderr = mean_and_stderr(maxima)
        prediction = exact_laws.pittel_prediction(a, n)
        difference = mean - prediction
        if centre is None:
            centre, centre_err = difference, stderr
        within = abs(difference - centre) <= band + 3.0 * math.hypot(stderr, centre_err)
        rows.append({'n': n, 'm': m, 'trials': trials, 'strategy': strategy.label,
                     'mean_max': mean, 'stderr': stderr, 'prediction': prediction,
                     'difference': difference, 'within_band': int(within)})
    return rows


# Cross-model triangle

@dataclass(frozen=True)
class TriangleResult:
    golf_vs_exact: GofResult
    forest_vs_exact: GofResult
    golf_vs_forest: GofResult

    def to_json_dict(self) -> Dict:
        return {name: getattr(self, name).to_json_dict()
                for name in ('golf_vs_exact', 'forest_vs_exact', 'golf_vs_forest')}


def cross_model_triangle(n: int, n_l: int, trials: int, seed: int,
                         strategy: Optional[Strategy] = None, threads: int = 1) -> TriangleResult:
    """Block laws from golf, from the forest sampler and from the exact formula, pairwise."""
    if (n - n_l) % 2 or not 1 <= n_l <= n:
        raise ParameterError(f"Need 1 <= n_l <= n with n = n_l mod 2, got n={n}, n_l={n_l}")
    n_b = (n - n_l) // 2
    strategy = strategy if strategy is not None else PWalk(Fraction(1, 2))
    exact = exact_laws.block_size_distribution_full(n, n_b)
    keys = exact.support
    probs = [float(exact.masses[k]) for k in keys]
    probs = [p / sum(probs) for p in probs]

    seeds = SeedManager(seed)
    golf = run_trials(partial(_golf_blocks, n, n_b, n - n_b, strategy), trials, seeds, "triangle:golf", threads)
    forest = run_trials(partial(_forest_blocks, n, n_l), trials, seeds, "triangle:forest", threads)
    golf_counts = counts_over(keys, golf)
    forest_counts = counts_over(keys, forest)
    if sum(golf_counts) != trials or sum(forest_counts) != trials:
        raise ParameterError("A sampler produced a block vector outside the exact support")
    return TriangleResult(chi_square_gof(golf_counts, probs),
                          chi_square_gof(forest_counts, probs),
                          chi_square_two_sample(golf_counts, forest_counts))


# Separators on Z

def _separator_count(d_b: float, d_t: float, half_width: int, t: Optional[float],
                     rng: np.random.Generator) -> int:
    config = sample_line_window(d_b, d_t, half_width, rng)
    if t is not None:
        config = time_truncated_config(config, t)
    quarter = half_width // 2
    return sum(1 for v in find_window_separators(config).certified if -quarter <= v <= quarter)


def separator_density_scan(d_b: float, d_t: float, half_widths: Sequence[int], trials: int, seed: int,
                           t: Optional[float] = None, threads: int = 1) -> List[Row]:
    """Certified separators per site in the central half of the window."""
    seeds = SeedManager(seed)
    effective = d_b * t if t is not None else d_b
    target = separator_target_density(effective, d_t)
    rows: List[Row] = []
    for half_width in half_widths:
        span = 2 * (half_width // 2) + 1
        counts = run_trials(partial(_separator_count, d_b, d_t, half_width, t), trials, seeds,
                            f"separators:{half_width}", threads)
        mean, stderr = mean_and_stderr(np.asarray(counts, dtype=float) / span)
        rows.append({'half_width': half_width, 'trials': trials, 'density': mean, 'stderr': stderr,
                     'target': target, 'z': (mean - target) / stderr if stderr > 0 else 0.0})
    return rows


def _filled_separator_run(d_b: float, d_t: float, half_width: int, strategy: Strategy,
                          rng: np.random.Generator) -> int:
    config = sample_line_window(d_b, d_t, half_width, rng)
    if len(find_window_separators(config).certified) < 2:
        return -1
    try:
        run_golf_line(config, strategy, seed=rng)
    except SeparatorFilledError:
        return 1
    return 0


def separator_fill_check(d_b: float, d_t: float, half_width: int, trials: int, seed: int,
                         strategy: Optional[Strategy] = None, threads: int = 1) -> Row:
    """Count runs in which a certified separator was filled (expected: none)."""
    strategy = strategy if strategy is not None else PWalk(Fraction(1, 2))
    outcomes = run_trials(partial(_filled_separator_run, d_b, d_t, half_width, strategy), trials,
                          SeedManager(seed), f"fill:{half_width}", threads)
    return {'trials': trials, 'runs': sum(1 for o in outcomes if o >= 0),
            'filled': sum(1 for o in outcomes if o == 1),
            'skipped_no_separator': sum(1 for o in outcomes if o < 0)}


# Block laws on Z

def _surrogate(d_b: float, d_t: float, n: int, R: int, strategy: Strategy, center: int,
               hole_surplus: Optional[int], rng: np.random.Generator) -> Tuple[int, ...]:
    return sample_Z_blocks_surrogate(d_b, d_t, n, R, rng, strategy, center, hole_surplus)


def surrogate_samples(d_b: float, d_t: float, n: int, R: int, trials: int, seed: int,
                      strategy: Optional[Strategy] = None, center: int = 0,
                      hole_surplus: Optional[int] = None, threads: int = 1,
                      stream: str = "surrogate") -> np.ndarray:
    """Trials x (2R + 1) array of central blocks."""
    strategy = strategy if strategy is not None else FixedDirection(0)
    return np.array(run_trials(partial(_surrogate, d_b, d_t, n, R, strategy, center, hole_surplus),
                               trials, SeedManager(seed), f"{stream}:{n}:{center}", threads))


def _discrete_gof(values: np.ndarray, probs: Sequence[float]) -> GofResult:
    """Values 0..len(probs)-1 against probs, everything beyond in one tail category."""
    k = len(probs)
    counts = np.bincount(np.minimum(values, k), minlength=k + 1)[:k + 1]
    tail = max(0.0, 1.0 - sum(probs))
    full = list(probs) + [tail]
    total = sum(full)
    return chi_square_gof(counts, [p / total for p in full])


def z_block_law_check(d_b: float, d_t: float, n: int, R: int, trials: int, seed: int,
                      strategy: Optional[Strategy] = None, threads: int = 1,
                      max_half: int = 30) -> Dict[str, GofResult]:
    """Surrogate blocks against the exact laws on Z.

    Returns a GofResult for the central block and, when there is no neutral
    site, one for each non-central block.
    """
    samples = surrogate_samples(d_b, d_t, n, R, trials, seed, strategy, threads=threads)
    results: Dict[str, GofResult] = {}
    if abs(d_b + d_t - 1.0) <= 1e-12:
        params = ZLawParams(d_b, d_t)
        for column, index in enumerate(range(-R, R + 1)):
            law = [exact_laws.z_critical_block_law(params, index, b) for b in range(max_half)]
            results[f"delta_{index}"] = _discrete_gof(samples[:, column] // 2, law)
    else:
        law = [exact_laws.z_block0_law_general(d_b, d_t, l0) for l0 in range(2 * max_half)]
        results["delta_0"] = _discrete_gof(samples[:, R], law)
    return results


def recentering_check(d_b: float, d_t: float, n: int, trials: int, seed: int, offset: int = 100,
                      strategy: Optional[Strategy] = None, threads: int = 1, max_value: int = 40) -> GofResult:
    """Two-sample test of the central block seen from 0 and from ``offset``."""
    at_zero = surrogate_samples(d_b, d_t, n, 0, trials, seed, strategy, 0, threads=threads)[:, 0]
    shifted = surrogate_samples(d_b, d_t, n, 0, trials, seed, strategy, offset, threads=threads)[:, 0]
    bins = max_value + 1
    return chi_square_two_sample(np.bincount(np.minimum(at_zero, max_value), minlength=bins),
                                 np.bincount(np.minimum(shifted, max_value), minlength=bins))


def balanced_block0_trend(density: float, ns: Sequence[int], trials: int, seed: int, K: int = 10,
                          hole_surplus: int = 2, threads: int = 1) -> List[Row]:
    """P(Delta_0 <= K) with equal densities and a fixed hole surplus, per n."""
    rows: List[Row] = []
    for n in ns:
        central = surrogate_samples(density, density, n, 0, trials, seed, hole_surplus=hole_surplus,
                                    threads=threads, stream="balanced")[:, 0]
        hits = int((central <= K).sum())
        low, high = wilson_interval(hits, trials)
        rows.append({'n': n, 'trials': trials, 'K': K, 'probability': hits / trials,
                     'wilson_low': low, 'wilson_high': high})
    return rows
