"""
Oracle-vs-formula suite behind ``main.py verify``.

Each check compares two independent routes to the same exact law with
rational equality and stops at the first counterexample. Closed forms are
looked up on the exact_laws module at call time, so a patched formula is
picked up by the suite.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import exact_laws
import oracle
from exact_laws import ExactDistribution, ZLawParams, format_fraction
from forests import (BinaryForest, bridge_to_marked_forest, enumerate_forests, enumerate_marked_forests,
                     forest_to_path, marked_forest_to_bridge, path_to_forest)
from golf_model import CycleConfig, FixedDirection, NearestHole, PWalk, Strategy, block_sizes

logger = logging.getLogger(__name__)

FLOAT_TOLERANCE = 1e-12
SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    counterexample: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


@dataclass(frozen=True)
class VerificationReport:
    checks: Tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def counterexample(self) -> Optional[str]:
        for check in self.checks:
            if not check.passed:
                return f"{check.name}: {check.counterexample}"
        return None

    def to_json_dict(self):
        return {"passed": self.passed,
                "checks": [{"name": c.name, "cases": c.cases, "passed": c.passed,
                            "counterexample": c.counterexample} for c in self.checks]}


def _first_difference(got: ExactDistribution, expected: ExactDistribution) -> Optional[str]:
    for key in sorted(set(got.masses) | set(expected.masses)):
        a, b = got.probability(key), expected.probability(key)
        if a != b:
            return f"key {list(key)}: got {format_fraction(a)}, expected {format_fraction(b)}"
    return None


def _cycle_censuses(max_n: int) -> Iterator[Tuple[int, int, int]]:
    """(n, n_b, n_t) with n_b < n_t and n_b + n_t <= n."""
    for n in range(1, max_n + 1):
        for n_t in range(1, n + 1):
            for n_b in range(0, min(n_t - 1, n - n_t) + 1):
                yield n, n_b, n_t


# Checks. Each returns (cases, counterexample or None).

def check_cycle_law(max_n: int, strategies: Sequence[Strategy]) -> Tuple[int, Optional[str]]:
    """Uniform-start oracle law of TL against the closed form, per strategy."""
    cases = 0
    for n, n_b, n_t in _cycle_censuses(max_n):
        if n_b > oracle.MAX_ORACLE_BALLS:
            continue
        expected = exact_laws.remaining_holes_distribution_cycle(n, n_b, n_t)
        for strategy in strategies:
            cases += 1
            diff = _first_difference(oracle.ensemble_final_distribution(n, n_b, n_t, strategy), expected)
            if diff:
                return cases, f"n={n} n_b={n_b} n_t={n_t} strategy={strategy.label}: {diff}"
    return cases, None


def check_cycle_normalization(max_n: int) -> Tuple[int, Optional[str]]:
    cases = 0
    for n, n_b, n_t in _cycle_censuses(max_n):
        cases += 1
        total = exact_laws.remaining_holes_distribution_cycle(n, n_b, n_t).total()
        if total != 1:
            return cases, f"n={n} n_b={n_b} n_t={n_t}: total {format_fraction(total)}"
    return cases, None


def check_block_law_normalization(max_n: int) -> Tuple[int, Optional[str]]:
    cases = 0
    for n in range(1, max_n + 1):
        for n_b in range(0, (n - 1) // 2 + 1):
            cases += 1
            total = exact_laws.block_size_distribution_full(n, n_b).total()
            if total != 1:
                return cases, f"n={n} n_b={n_b}: total {format_fraction(total)}"
    return cases, None


def check_mini_golf(max_n: int, oracle_n: int) -> Tuple[int, Optional[str]]:
    """Single remaining holes are uniform, and X survives its block counts b with probability prod 1/(b_i + 1)."""
    cases = 0
    for n in range(1, max_n + 1):
        for n_b in range(0, (n - 1) // 2 + 1):
            for x in range(n):
                cases += 1
                value = exact_laws.prob_remaining_holes_cycle(n, n_b, n_b + 1, (x,))
                if value != Fraction(1, n):
                    return cases, f"n={n} n_b={n_b} x={x}: {format_fraction(value)} != 1/{n}"
            if n <= oracle_n and n_b <= oracle.MAX_ORACLE_BALLS:
                cases += 1
                value = oracle.conditional_block_law(n, (0,), (n_b,), NearestHole())
                if value != Fraction(1, n_b + 1):
                    return cases, f"n={n} n_b={n_b} conditional: {format_fraction(value)} != 1/{n_b + 1}"
    for n in range(3, oracle_n + 1):
        for h in range(1, n):
            blocks = block_sizes((0, h), n).deltas
            for b in itertools.product(*(range(length // 2 + 1) for length in blocks)):
                if sum(b) > 2:
                    continue
                cases += 1
                value = oracle.conditional_block_law(n, (0, h), b, NearestHole())
                expected = Fraction(1, math.prod(bi + 1 for bi in b))
                if value != expected:
                    return cases, (f"n={n} X=(0, {h}) b={b} conditional: "
                                   f"{format_fraction(value)} != {format_fraction(expected)}")
    return cases, None


def check_parking(max_n: int, ps: Sequence[Fraction]) -> Tuple[int, Optional[str]]:
    cases = 0
    for n in range(1, max_n + 1):
        for m in range(0, min(n - 1, 4) + 1):
            expected = exact_laws.parking_distribution(n, m)
            for p in ps:
                cases += 1
                diff = _first_difference(oracle.exact_parking_distribution(n, m, p=p), expected)
                if diff:
                    return cases, f"n={n} m={m} p={p}: {diff}"
    return cases, None


def check_mini_parking(max_n: int) -> Tuple[int, Optional[str]]:
    """The avoided-slot law against the oracle and against the parking formula."""
    cases = 0
    for n in range(2, max_n + 1):
        cases += 1
        value = exact_laws.mini_parking_conditional(n)
        no_choice = Fraction(n - 1, n) ** (n - 1)
        from_formula = exact_laws.prob_remaining_holes_parking(n, n - 1, (0,)) / no_choice
        if n ** (n - 1) <= oracle.MAX_PARKING_VECTORS:
            conditioned = oracle.exact_parking_distribution(n, n - 1, p=Fraction(1, 2), avoid=0).probability((0,))
        else:
            conditioned = from_formula
        if not value == conditioned == from_formula:
            return cases, (f"n={n}: closed form {format_fraction(value)}, oracle {format_fraction(conditioned)}, "
                           f"parking law {format_fraction(from_formula)}")
    return cases, None


def check_blocks_from_cycle_law(max_n: int) -> Tuple[int, Optional[str]]:
    """Block law pushed forward from the law of TL equals the block formula (no neutral sites)."""
    cases = 0
    for n in range(1, max_n + 1):
        for n_b in range(0, (n - 1) // 2 + 1):
            cases += 1
            diff = _first_difference(exact_laws.block_size_distribution_cycle(n, n_b, n - n_b),
                                     exact_laws.block_size_distribution_full(n, n_b))
            if diff:
                return cases, f"n={n} n_b={n_b}: {diff}"
    return cases, None


def check_block0_marginal(max_n: int) -> Tuple[int, Optional[str]]:
    cases = 0
    for n, n_b, n_t in _cycle_censuses(max_n):
        cases += 1
        marginal = exact_laws.block_size_distribution_cycle(n, n_b, n_t).map_keys(lambda deltas: deltas[:1])
        diff = _first_difference(exact_laws.block0_distribution_cycle(n, n_b, n_t), marginal)
        if diff:
            return cases, f"n={n} n_b={n_b} n_t={n_t}: {diff}"
    return cases, None


MULTIBALL_CENSUSES = (
    {-1: 2, 0: 1, 1: 1},
    {-1: 3, 2: 1},
    {-1: 3, 0: 1, 2: 1},
    {-1: 4, 1: 1, 2: 1},
    {-1: 3, 1: 2, 0: 1},
    {-1: 4, 3: 1, 0: 1},
)


def check_multiball(max_n: int, strategies: Sequence[Strategy]) -> Tuple[int, Optional[str]]:
    cases = 0
    for census in MULTIBALL_CENSUSES:
        n = sum(census.values())
        if n > max_n:
            continue
        expected = exact_laws.multiball_distribution(n, census)
        for strategy in strategies:
            cases += 1
            diff = _first_difference(oracle.ensemble_multiball_distribution(census, strategy), expected)
            if diff:
                return cases, f"census={census} strategy={strategy.label}: {diff}"
    return cases, None


def _sorted_size_law(forests: Sequence[BinaryForest]) -> Counter:
    return Counter(tuple(sorted(f.tree_sizes)) for f in forests)


def check_forests(max_n: int) -> Tuple[int, Optional[str]]:
    """Counts, both bijections, bridge coverage and the sorted-size law of plain vs marked forests."""
    cases = 0
    for n in range(1, max_n + 1):
        for k in range(1 if n % 2 else 2, n + 1, 2):
            cases += 1
            forests = list(enumerate_forests(n, k))
            marked = list(enumerate_marked_forests(n, k))
            where = f"n={n} k={k}"
            if len(forests) != exact_laws.count_forests(n, k):
                return cases, f"{where}: {len(forests)} forests, formula {exact_laws.count_forests(n, k)}"
            if len(marked) != exact_laws.count_marked_forests(n, k):
                return cases, f"{where}: {len(marked)} marked forests, formula {exact_laws.count_marked_forests(n, k)}"
            for forest in forests:
                if path_to_forest(forest_to_path(forest)) != forest:
                    return cases, f"{where}: walk round trip fails for {forest.trees}"
            bridges = set()
            for forest in marked:
                bridge = marked_forest_to_bridge(forest)
                if bridge_to_marked_forest(bridge) != forest:
                    return cases, f"{where}: bridge round trip fails for mark {forest.mark}"
                bridges.add(bridge)
            if len(bridges) != math.comb(n, (n - k) // 2):
                return cases, f"{where}: {len(bridges)} distinct bridges"
            plain, weighted = _sorted_size_law(forests), _sorted_size_law(marked)
            for sizes in plain:
                if Fraction(plain[sizes], len(forests)) != Fraction(weighted[sizes], len(marked)):
                    return cases, f"{where}: sorted sizes {list(sizes)} differ between plain and marked forests"
    return cases, None


def check_rotation(max_n: int, strategy: Strategy) -> Tuple[int, Optional[str]]:
    """Rotating a start rotates the law of TL."""
    cases = 0
    for n, n_b, n_t in _cycle_censuses(max_n):
        if n_b > oracle.MAX_ORACLE_BALLS:
            continue
        config = next(oracle.all_configurations(n, n_b, n_t))
        base = oracle.exact_final_distribution(config, strategy)
        for shift in range(1, n):
            cases += 1
            moved = base.map_keys(lambda X: sorted((v + shift) % n for v in X))
            diff = _first_difference(oracle.exact_final_distribution(config.rotated(shift), strategy), moved)
            if diff:
                return cases, f"config={config.to_string()} shift={shift}: {diff}"
    return cases, None


def check_z_laws(max_k: int = 50, tail_length: int = 4000) -> Tuple[int, Optional[str]]:
    """Generating functions at 0.24, the general Delta_0 law against the critical one, and its total mass."""
    cases = 0
    for name, closed, weighted, exact in (("G", exact_laws.catalan_gf_G, False, 5.0 / 3.0),
                                          ("H", exact_laws.catalan_gf_H, True, 25.0 / 3.0)):
        cases += 1
        series = exact_laws.catalan_gf_series(0.24, size_biased=weighted)
        if abs(closed(0.24) - exact) > FLOAT_TOLERANCE * exact or abs(series - exact) > FLOAT_TOLERANCE * exact:
            return cases, f"{name}(0.24): closed {closed(0.24)!r}, series {series!r}, expected {exact!r}"
    params = ZLawParams(0.4, 0.6)
    for k in range(max_k + 1):
        cases += 1
        general = exact_laws.z_block0_law_general(0.4, 0.6, 2 * k)
        critical = exact_laws.z_critical_block_law(params, 0, k)
        if abs(general - critical) > FLOAT_TOLERANCE:
            return cases, f"Delta_0 = {2 * k}: general {general!r}, critical {critical!r}"
    cases += 1
    total = math.fsum(exact_laws.z_block0_law_general(0.4, 0.6, l0) for l0 in range(tail_length))
    if abs(total - 1.0) > SUM_TOLERANCE:
        return cases, f"Delta_0 law sums to {total!r}"
    return cases, None


def run_verification(max_n: int = 6, p_pair: Tuple[Fraction, Fraction] = (Fraction(1, 2), Fraction(1, 3)),
                     normalization_n: int = 12, block_n: int = 20, mini_n: int = 8,
                     forest_n: int = 9, stop_early: bool = True) -> VerificationReport:
    """Run the exact suite.

    Args:
        max_n: largest cycle for the oracle comparisons
        p_pair: two walk biases; both must reproduce the closed form
        normalization_n: largest cycle for the normalisation of the TL law
        block_n: largest cycle for the normalisation of the block law
        mini_n: largest cycle for the one-hole and avoided-slot laws
        forest_n: largest forest size for exhaustive enumeration
        stop_early: stop after the first failing check

    Returns:
        VerificationReport with one entry per check run
    """
    strategies = [PWalk(p_pair[0]), PWalk(p_pair[1]), NearestHole(), FixedDirection(0)]
    plan: List[Tuple[str, Callable[[], Tuple[int, Optional[str]]]]] = [
        ("cycle law", lambda: check_cycle_law(max_n, strategies)),
        ("cycle law normalisation", lambda: check_cycle_normalization(normalization_n)),
        ("block law normalisation", lambda: check_block_law_normalization(block_n)),
        ("mini-golf", lambda: check_mini_golf(mini_n, max_n)),
        ("parking", lambda: check_parking(min(max_n, 5), (Fraction(1), Fraction(1, 2)))),
        ("mini-parking", lambda: check_mini_parking(mini_n)),
        ("block law from cycle law", lambda: check_blocks_from_cycle_law(min(normalization_n, 10))),
        ("block 0 marginal", lambda: check_block0_marginal(min(normalization_n, 9))),
        ("multiball", lambda: check_multiball(max_n, strategies[:3])),
        ("forests", lambda: check_forests(forest_n)),
        ("rotation", lambda: check_rotation(max_n, strategies[1])),
        ("laws on Z", check_z_laws),
    ]
    results = []
    for name, check in plan:
        cases, counterexample = check()
        result = CheckResult(name, cases, counterexample)
        results.append(result)
        if result.passed:
            logger.info("verify %s: %d cases passed", name, cases)
        else:
            logger.info("verify %s failed: %s", name, counterexample)
            if stop_early:
                break
    return VerificationReport(tuple(results))
