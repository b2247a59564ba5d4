"""
Goodness-of-fit tests, distances and intervals used by the checks.

All tests use a fixed 1% level; no further p-value handling is done.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Hashable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from exact_laws import ExactDistribution
from golf_errors import DegenerateInputError

logger = logging.getLogger(__name__)

ALPHA = 0.01
MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class GofResult:
    statistic: float
    dof: int
    reject_at_1pct: bool

    def to_json_dict(self) -> Dict:
        return asdict(self)


def _pool_small(observed: np.ndarray, expected: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Merge categories with expected count below MIN_EXPECTED into one tail bucket."""
    small = expected < MIN_EXPECTED
    if not small.any():
        return observed, expected
    kept_obs = list(observed[~small])
    kept_exp = list(expected[~small])
    tail_obs = observed[small].sum()
    tail_exp = expected[small].sum()
    if tail_exp < MIN_EXPECTED and kept_exp:
        j = int(np.argmin(kept_exp))
        kept_obs[j] += tail_obs
        kept_exp[j] += tail_exp
    else:
        kept_obs.append(tail_obs)
        kept_exp.append(tail_exp)
    return np.array(kept_obs, dtype=float), np.array(kept_exp, dtype=float)


def chi_square_gof(counts: Sequence[int], probs: Sequence[float], alpha: float = ALPHA) -> GofResult:
    """Pearson test of counts against category probabilities."""
    observed = np.asarray(counts, dtype=float)
    p = np.asarray(probs, dtype=float)
    if observed.shape != p.shape or observed.ndim != 1:
        raise DegenerateInputError(f"Counts and probabilities differ in shape: {observed.shape} vs {p.shape}")
    if (observed < 0).any() or (p < 0).any():
        raise DegenerateInputError("Counts and probabilities must be non-negative")
    if abs(p.sum() - 1.0) > 1e-12:
        raise DegenerateInputError(f"Probabilities sum to {p.sum()!r}, not 1")
    total = observed.sum()
    if total <= 0:
        raise DegenerateInputError("No observations")

    observed, expected = _pool_small(observed, total * p)
    if (expected == 0).any():
        if observed[expected == 0].sum() > 0:
            return GofResult(math.inf, max(len(expected) - 1, 0), True)
        observed, expected = observed[expected > 0], expected[expected > 0]
    dof = len(expected) - 1
    if dof < 1:
        logger.warning("Pooling left a single category; the test is vacuous")
        return GofResult(0.0, 0, False)
    statistic = float(((observed - expected) ** 2 / expected).sum())
    return GofResult(statistic, dof, bool(statistic > stats.chi2.ppf(1.0 - alpha, dof)))


def chi_square_two_sample(counts_a: Sequence[int], counts_b: Sequence[int], alpha: float = ALPHA) -> GofResult:
    """Homogeneity test of two count vectors over the same categories."""
    a = np.asarray(counts_a, dtype=float)
    b = np.asarray(counts_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DegenerateInputError("Count vectors differ in shape")
    if a.sum() <= 0 or b.sum() <= 0:
        raise DegenerateInputError("Both samples need observations")

    combined = a + b
    small = combined < 2 * MIN_EXPECTED
    columns_a = list(a[~small])
    columns_b = list(b[~small])
    if small.any() and combined[small].sum() > 0:
        columns_a.append(a[small].sum())
        columns_b.append(b[small].sum())
    table = np.array([columns_a, columns_b])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        logger.warning("Pooling left a single category; the test is vacuous")
        return GofResult(0.0, 0, False)
    statistic, p_value, dof, _ = stats.chi2_contingency(table, correction=False)
    return GofResult(float(statistic), int(dof), bool(p_value < alpha))


def ks_two_sample(sample_a: Sequence[float], sample_b: Sequence[float], alpha: float = ALPHA) -> GofResult:
    """Two-sample Kolmogorov-Smirnov test; dof is reported as 0."""
    result = stats.ks_2samp(np.asarray(sample_a), np.asarray(sample_b))
    return GofResult(float(result.statistic), 0, bool(result.pvalue < alpha))


def tv_distance(empirical: Mapping[Hashable, float],
                exact: Union[ExactDistribution, Mapping[Hashable, float]]) -> float:
    """Total variation distance; empirical counts are normalised first."""
    reference = exact.masses if isinstance(exact, ExactDistribution) else exact
    total = float(sum(empirical.values()))
    if total <= 0:
        raise DegenerateInputError("Empirical law has no mass")
    keys = set(empirical) | set(reference)
    return 0.5 * sum(abs(empirical.get(k, 0) / total - float(reference.get(k, 0))) for k in keys)


def wilson_interval(k: int, n: int, level: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0 or not 0 <= k <= n:
        raise DegenerateInputError(f"Need 0 <= k <= n and n > 0, got k={k}, n={n}")
    if not 0.0 < level < 1.0:
        raise DegenerateInputError(f"Level must lie in (0, 1), got {level}")
    z = stats.norm.ppf(1.0 - (1.0 - level) / 2.0)
    phat = k / n
    denominator = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denominator
    half = z / denominator * math.sqrt(phat * (1.0 - phat) / n + z * z / (4 * n * n))
    return center - half, center + half


def mean_and_stderr(values: Sequence[float]) -> Tuple[float, float]:
    data = np.asarray(values, dtype=float)
    if data.size < 2:
        raise DegenerateInputError("Need at least two values for a standard error")
    return float(data.mean()), float(data.std(ddof=1) / math.sqrt(data.size))


def counts_over(keys: Sequence[Hashable], samples: Sequence[Hashable]) -> List[int]:
    """Occurrences of each key among the samples; samples outside ``keys`` are ignored."""
    index = {key: i for i, key in enumerate(keys)}
    counts = [0] * len(keys)
    for sample in samples:
        i = index.get(sample)
        if i is not None:
            counts[i] += 1
    return counts
