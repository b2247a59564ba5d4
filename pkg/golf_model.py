"""
Golf and parking dynamics on the cycle Z/nZ.

A configuration puts a ball, a hole or nothing on each vertex. Balls wake up
in the order of their clocks; an awake ball walks until it drops into the
first hole that is still free. Parking is the same game where every vertex
starts as a free slot and cars arrive one by one at uniform vertices.

Two execution modes:

* fast mode samples the filled hole directly from the two-sided absorption
  law between the nearest free holes (or, when every ball moves the same
  way, settles the whole configuration with one vectorised carry scan);
* step mode walks every ball step by step and keeps a trajectory log.
"""

import bisect
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from golf_errors import (EmptySetError, ParameterError, SeparatorFilledError,
                         UnsupportedStrategyError, WalkDivergenceError)
from seed_manager import SeedLike, as_generator

logger = logging.getLogger(__name__)

# Hard failure bound for step mode; a finite cycle never needs it
MAX_WALK_STEPS = 10 ** 9
_STEP_CHUNK = 4096


class SiteState(Enum):
    """State of one vertex."""

    BALL = 'B'
    HOLE = 'H'
    NEUTRAL = '.'

    @property
    def increment(self) -> int:
        """Height increment: +1 for a ball, -1 for a hole, 0 otherwise."""
        return _INCREMENTS[self]

    @classmethod
    def from_char(cls, char: str) -> 'SiteState':
        try:
            return cls(char)
        except ValueError:
            raise ParameterError(f"Unknown site character: {char!r}")


_INCREMENTS = {SiteState.BALL: 1, SiteState.HOLE: -1, SiteState.NEUTRAL: 0}


@dataclass(frozen=True)
class CycleConfig:
    """Configuration of the cycle of length n, vertex 0 first."""

    n: int
    states: Tuple[SiteState, ...]

    def __post_init__(self):
        object.__setattr__(self, 'states', tuple(self.states))
        if self.n < 1:
            raise ParameterError(f"Cycle length must be positive, got {self.n}")
        if len(self.states) != self.n:
            raise ParameterError(f"Expected {self.n} site states, got {len(self.states)}")

    @classmethod
    def from_string(cls, text: str) -> 'CycleConfig':
        """Parse the {B, H, .} alphabet, index 0 first."""
        text = text.strip()
        return cls(len(text), tuple(SiteState.from_char(c) for c in text))

    @classmethod
    def from_positions(cls, n: int, balls: Sequence[int], holes: Sequence[int]) -> 'CycleConfig':
        """Build a configuration from ball and hole positions."""
        states = [SiteState.NEUTRAL] * n
        for v in holes:
            states[v % n] = SiteState.HOLE
        for v in balls:
            if states[v % n] is SiteState.HOLE:
                raise ParameterError(f"Vertex {v} cannot hold both a ball and a hole")
            states[v % n] = SiteState.BALL
        return cls(n, tuple(states))

    def to_string(self) -> str:
        return ''.join(state.value for state in self.states)

    @property
    def balls(self) -> Tuple[int, ...]:
        return tuple(v for v, state in enumerate(self.states) if state is SiteState.BALL)

    @property
    def holes(self) -> Tuple[int, ...]:
        return tuple(v for v, state in enumerate(self.states) if state is SiteState.HOLE)

    def increments(self) -> np.ndarray:
        return np.array([state.increment for state in self.states], dtype=np.int64)

    def rotated(self, shift: int) -> 'CycleConfig':
        """Configuration moved ``shift`` steps clockwise."""
        return CycleConfig(self.n, tuple(self.states[(v - shift) % self.n] for v in range(self.n)))


@dataclass(frozen=True)
class Clocks:
    """Activation times in (0, 1), one per ball in position order."""

    times: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'times', tuple(float(t) for t in self.times))
        for t in self.times:
            if not 0.0 < t < 1.0:
                raise ParameterError(f"Clock times must lie in (0, 1), got {t}")
        if len(set(self.times)) != len(self.times):
            raise ParameterError("Clock times must be pairwise distinct")

    @classmethod
    def sample(cls, m: int, rng: np.random.Generator) -> 'Clocks':
        """Draw m i.i.d. uniform clocks."""
        while True:
            times = rng.random(m)
            # rng.random() may return exactly 0.0
            if np.all(times > 0.0) and len(np.unique(times)) == m:
                return cls(tuple(times.tolist()))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> 'Clocks':
        """Clocks whose activation order is ``order`` (ball indices, first to wake first)."""
        m = len(order)
        if sorted(order) != list(range(m)):
            raise ParameterError(f"Not a permutation of range({m}): {list(order)}")
        times = [0.0] * m
        for rank, ball in enumerate(order):
            times[ball] = (rank + 1) / (m + 1)
        return cls(tuple(times))

    def order(self) -> List[int]:
        """Ball indices sorted by activation time."""
        return sorted(range(len(self.times)), key=self.times.__getitem__)


# Strategies

class Strategy:
    """Shift-invariant local rule deciding how an awake ball moves.

    A rule is reduced to a walk bias: the probability of a clockwise step
    of the walk the ball performs. Biases 0 and 1 are deterministic moves.
    """

    label = 'strategy'

    def walk_bias(self, left_gap: int, right_gap: int, clock: float, rng: np.random.Generator) -> float:
        raise NotImplementedError

    def exact_branches(self, left_gap: int, right_gap: int) -> List[Tuple[Fraction, Fraction]]:
        """(weight, bias) pairs describing the rule exactly."""
        raise NotImplementedError

    def direction(self) -> int:
        """+1 / -1 if every ball moves that way regardless of surroundings, else 0."""
        return 0


def _as_fraction(value: Union[Fraction, int, float, str], name: str) -> Fraction:
    try:
        result = Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParameterError(f"{name} must be a rational number, got {value!r}")
    if not 0 <= result <= 1:
        raise ParameterError(f"{name} must lie in [0, 1], got {result}")
    return result


@dataclass(frozen=True)
class PWalk(Strategy):
    """Walk with clockwise step probability p."""

    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'p', _as_fraction(self.p, 'p'))

    @property
    def label(self) -> str:
        return f"pwalk:{self.p}"

    def walk_bias(self, left_gap, right_gap, clock, rng):
        return float(self.p)

    def exact_branches(self, left_gap, right_gap):
        return [(Fraction(1), self.p)]

    def direction(self):
        if self.p == 1:
            return 1
        if self.p == 0:
            return -1
        return 0


@dataclass(frozen=True)
class FixedDirection(Strategy):
    """Pick left with probability q, right otherwise, then walk straight."""

    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'q', _as_fraction(self.q, 'q'))

    @property
    def label(self) -> str:
        return f"dir:{self.q}"

    def walk_bias(self, left_gap, right_gap, clock, rng):
        return 0.0 if rng.random() < float(self.q) else 1.0

    def exact_branches(self, left_gap, right_gap):
        return [(self.q, Fraction(0)), (1 - self.q, Fraction(1))]

    def direction(self):
        if self.q == 0:
            return 1
        if self.q == 1:
            return -1
        return 0


@dataclass(frozen=True)
class NearestHole(Strategy):
    """Go to the nearest free hole; ties split evenly."""

    label = 'nearest'

    def walk_bias(self, left_gap, right_gap, clock, rng):
        if right_gap < left_gap:
            return 1.0
        if left_gap < right_gap:
            return 0.0
        return 0.0 if rng.random() < 0.5 else 1.0

    def exact_branches(self, left_gap, right_gap):
        if right_gap < left_gap:
            return [(Fraction(1), Fraction(1))]
        if left_gap < right_gap:
            return [(Fraction(1), Fraction(0))]
        return [(Fraction(1, 2), Fraction(0)), (Fraction(1, 2), Fraction(1))]


@dataclass(frozen=True)
class ParityRule(Strategy):
    """Go left when the nearest free hole on the right is at even distance,
    otherwise walk with clockwise probability equal to the ball's clock."""

    label = 'parity'

    def walk_bias(self, left_gap, right_gap, clock, rng):
        if right_gap % 2 == 0:
            return 0.0
        return clock

    def exact_branches(self, left_gap, right_gap):
        raise UnsupportedStrategyError("The parity rule mixes over clock values and has no rational law")


def parse_strategy(text: str) -> Strategy:
    """Parse ``pwalk:<rational>``, ``dir:<rational>``, ``nearest`` or ``parity``."""
    name, _, arg = text.strip().partition(':')
    name = name.lower()
    if name == 'pwalk' and arg:
        return PWalk(_as_fraction(arg, 'p'))
    if name == 'dir' and arg:
        return FixedDirection(_as_fraction(arg, 'q'))
    if name == 'nearest' and not arg:
        return NearestHole()
    if name == 'parity' and not arg:
        return ParityRule()
    raise ParameterError(f"Unknown strategy: {text!r}")


# Final states and blocks

@dataclass(frozen=True)
class TrajectoryRecord:
    """One ball's walk in step mode."""

    origin: int
    filled: int
    rank: int
    reach_left: int
    reach_right: int
    steps: int


@dataclass(frozen=True)
class FinalState:
    """Terminal configuration of a run."""

    remaining_holes: Tuple[int, ...]
    frozen: bool
    per_vertex: Tuple[SiteState, ...]
    trajectory_log: Optional[Tuple[TrajectoryRecord, ...]] = None

    def block_sizes(self) -> 'BlockSizes':
        return block_sizes(self.remaining_holes, len(self.per_vertex))


@dataclass(frozen=True)
class BlockSizes:
    """Gaps between cyclically consecutive remaining holes; block 0 contains vertex 0."""

    deltas: Tuple[int, ...]

    @property
    def largest(self) -> int:
        return max(self.deltas)


def block_sizes(X: Sequence[int], n: int) -> BlockSizes:
    """Block sizes of the vertex set X on the cycle of length n.

    Vertices are ranked 1, ..., n-1 and then 0 (vertex 0 ranks last), so the
    block running from the last ranked hole to the first one contains 0.
    """
    if not X:
        raise EmptySetError("Block sizes need at least one remaining hole")
    if any(v < 0 or v >= n for v in X):
        raise ParameterError(f"Vertices must lie in 0..{n - 1}: {sorted(X)}")
    ranked = sorted(v if v > 0 else n for v in set(X))
    deltas = [(ranked[0] - ranked[-1] - 1) % n]
    deltas.extend(b - a - 1 for a, b in zip(ranked, ranked[1:]))
    return BlockSizes(tuple(deltas))


def _final_state(n: int, remaining: Sequence[int],
                 log: Optional[List[TrajectoryRecord]] = None) -> FinalState:
    remaining = tuple(sorted(int(v) for v in remaining))
    per_vertex = [SiteState.NEUTRAL] * n
    for v in remaining:
        per_vertex[v] = SiteState.HOLE
    return FinalState(remaining, False, tuple(per_vertex),
                      None if log is None else tuple(log))


# Walk resolution

def hitting_probability(length: int, start: int, bias: float) -> float:
    """Probability that a walk started at ``start`` hits ``length`` before 0."""
    if bias >= 1.0:
        return 1.0
    if bias <= 0.0:
        return 0.0
    if bias == 0.5:
        return start / length
    log_r = math.log((1.0 - bias) / bias)
    if log_r < 0:
        return math.expm1(start * log_r) / math.expm1(length * log_r)
    # Reflected form keeps the powers below 1
    log_s = -log_r
    return math.exp((length - start) * log_s) * math.expm1(start * log_s) / math.expm1(length * log_s)


def nearest_holes(holes: Sequence[int], v: int, n: Optional[int]) -> Tuple[Optional[int], Optional[int]]:
    """Nearest free holes strictly left and right of v in a sorted hole list.

    ``n`` is the cycle length; ``None`` means a segment without wrap-around.
    """
    i = bisect.bisect_left(holes, v)
    j = bisect.bisect_right(holes, v)
    if n is None:
        left = holes[i - 1] if i > 0 else None
        right = holes[j] if j < len(holes) else None
        return left, right
    if not holes:
        return None, None
    return holes[i - 1], holes[j % len(holes)]


def _walk(left_gap: int, right_gap: int, bias: float, rng: np.random.Generator) -> Tuple[int, int, int, int]:
    """Simulate a walk absorbed at -left_gap and +right_gap.

    Returns (side, steps, reach_left, reach_right) with side +1 for the right absorber.
    """
    if bias >= 1.0:
        return 1, right_gap, 0, right_gap
    if bias <= 0.0:
        return -1, left_gap, left_gap, 0

    position = 0
    low = high = 0
    steps = 0
    while steps < MAX_WALK_STEPS:
        path = position + np.cumsum(np.where(rng.random(_STEP_CHUNK) < bias, 1, -1))
        hits = np.flatnonzero((path >= right_gap) | (path <= -left_gap))
        if hits.size:
            j = int(hits[0])
            low = min(low, int(path[:j + 1].min()))
            high = max(high, int(path[:j + 1].max()))
            side = 1 if path[j] >= right_gap else -1
            return side, steps + j + 1, -low, high
        low = min(low, int(path.min()))
        high = max(high, int(path.max()))
        position = int(path[-1])
        steps += _STEP_CHUNK
    raise WalkDivergenceError(f"Walk exceeded {MAX_WALK_STEPS} steps")


def settle_sequential(holes: Sequence[int], arrivals: Sequence[Tuple[int, float]], strategy: Strategy,
                      rng: np.random.Generator, n: Optional[int] = None,
                      log_trajectories: bool = False) -> Tuple[List[int], Optional[List[TrajectoryRecord]]]:
    """Resolve arrivals one at a time against a shrinking set of free holes.

    Args:
        holes: initially free holes
        arrivals: (origin, clock) pairs in activation order
        strategy: movement rule
        rng: random source
        n: cycle length, or None for a segment
        log_trajectories: walk step by step and record every walk

    Returns:
        (remaining free holes sorted, trajectory log or None)
    """
    free = sorted(holes)
    log: Optional[List[TrajectoryRecord]] = [] if log_trajectories else None

    for rank, (origin, clock) in enumerate(arrivals):
        i = bisect.bisect_left(free, origin)
        if i < len(free) and free[i] == origin:
            # Arriving on a free vertex (parking) fills it at once
            del free[i]
            if log is not None:
                log.append(TrajectoryRecord(origin, origin, rank, 0, 0, 0))
            continue
        if not free:
            raise ParameterError("More balls than holes")

        left, right = nearest_holes(free, origin, n)
        if n is not None and left == right:
            target = left
            reach_left = reach_right = steps = 0
            if log is not None:
                gap_right = (right - origin) % n
                side, steps, reach_left, reach_right = _walk(n - gap_right, gap_right,
                                                             strategy.walk_bias(n - gap_right, gap_right, clock, rng), rng)
        elif left is None or right is None:
            target = right if left is None else left
            steps = abs(target - origin)
            reach_left = origin - target if target < origin else 0
            reach_right = target - origin if target > origin else 0
        else:
            left_gap = (origin - left) % n if n is not None else origin - left
            right_gap = (right - origin) % n if n is not None else right - origin
            bias = strategy.walk_bias(left_gap, right_gap, clock, rng)
            if log is None:
                go_right = rng.random() < hitting_probability(left_gap + right_gap, left_gap, bias)
                target = right if go_right else left
                reach_left = reach_right = steps = 0
            else:
                side, steps, reach_left, reach_right = _walk(left_gap, right_gap, bias, rng)
                target = right if side > 0 else left

        free.remove(target)
        if log is not None:
            record = TrajectoryRecord(origin, target, rank, reach_left, reach_right, steps)
            logger.debug("walk %s", record)
            log.append(record)

    return free, log


def check_trajectories(remaining: Sequence[int], log: Sequence[TrajectoryRecord], n: Optional[int]):
    """Raise if any logged walk visited a vertex that stayed free."""
    if not remaining:
        return
    ordered = sorted(remaining)
    for record in log:
        low = record.origin - record.reach_left
        high = record.origin + record.reach_right
        if n is not None and high - low + 1 >= n:
            raise SeparatorFilledError(f"Walk from {record.origin} covered the whole cycle")
        for start, stop in _arcs(low, high, n):
            i = bisect.bisect_left(ordered, start)
            if i < len(ordered) and ordered[i] <= stop:
                raise SeparatorFilledError(
                    f"Walk from {record.origin} visited remaining hole {ordered[i]}")


def _arcs(low: int, high: int, n: Optional[int]) -> List[Tuple[int, int]]:
    if n is None:
        return [(low, high)]
    low_mod, high_mod = low % n, high % n
    if low_mod <= high_mod:
        return [(low_mod, high_mod)]
    return [(low_mod, n - 1), (0, high_mod)]


def settle_directed(balls_per_site: np.ndarray, hole_mask: np.ndarray, direction: int = 1) -> np.ndarray:
    """Free holes left when every ball moves ``direction`` (+1 clockwise).

    Sites hold any number of balls and at most one hole; a ball on a free
    hole drops in immediately. The scan starts right after the first
    minimum of the cumulative (balls - holes) sum, where no ball crosses
    in, and keeps the holes at which the running sum makes a new low.
    """
    balls_per_site = np.asarray(balls_per_site, dtype=np.int64)
    hole_mask = np.asarray(hole_mask, dtype=bool)
    n = len(balls_per_site)
    if direction < 0:
        mirrored = settle_directed(balls_per_site[::-1], hole_mask[::-1], 1)
        return np.sort(n - 1 - mirrored)

    x = balls_per_site - hole_mask.astype(np.int64)
    if x.sum() > 0:
        raise ParameterError("More balls than holes")
    start = (int(np.argmin(np.cumsum(x))) + 1) % n
    rotated = np.roll(x, -start)
    heights = np.cumsum(rotated)
    previous_low = np.minimum.accumulate(np.concatenate(([0], heights[:-1])))
    free = np.roll(hole_mask, -start) & (heights < previous_low)
    return np.sort((np.flatnonzero(free) + start) % n)


# Runs

def sample_initial_cycle(n: int, n_b: int, n_t: int, seed: SeedLike = None) -> CycleConfig:
    """Uniform configuration with exactly n_b balls and n_t holes."""
    if n < 1 or not 0 <= n_b <= n_t or n_b + n_t > n:
        raise ParameterError(f"Need 0 <= n_b <= n_t and n_b + n_t <= n, got n={n}, n_b={n_b}, n_t={n_t}")
    rng = as_generator(seed)
    codes = np.zeros(n, dtype=np.int8)
    codes[:n_b] = 1
    codes[n_b:n_b + n_t] = -1
    codes = rng.permutation(codes)
    lookup = {1: SiteState.BALL, -1: SiteState.HOLE, 0: SiteState.NEUTRAL}
    return CycleConfig(n, tuple(lookup[int(c)] for c in codes))


def run_golf(config: CycleConfig, strategy: Strategy, clocks: Optional[Clocks] = None,
             seed: SeedLike = None, log_trajectories: bool = False) -> FinalState:
    """Run the golf process on a cycle until every ball has found a hole.

    Args:
        config: initial configuration, #balls <= #holes
        strategy: ball movement rule
        clocks: activation times, one per ball in position order; sampled when None
        seed: random source
        log_trajectories: step mode with a trajectory log

    Returns:
        FinalState with the remaining holes
    """
    balls = config.balls
    holes = config.holes
    if len(balls) > len(holes):
        raise ParameterError(f"Golf needs #balls <= #holes, got {len(balls)} > {len(holes)}")
    rng = as_generator(seed)
    if clocks is None:
        clocks = Clocks.sample(len(balls), rng)
    elif len(clocks.times) != len(balls):
        raise ParameterError(f"Expected {len(balls)} clocks, got {len(clocks.times)}")

    direction = strategy.direction()
    if direction and not log_trajectories:
        increments = config.increments()
        remaining = settle_directed(increments > 0, increments < 0, direction)
        return _final_state(config.n, remaining)

    arrivals = [(balls[i], clocks.times[i]) for i in clocks.order()]
    remaining, log = settle_sequential(holes, arrivals, strategy, rng, config.n, log_trajectories)
    if log is not None:
        check_trajectories(remaining, log, config.n)
    return _final_state(config.n, remaining, log)


def run_parking(n: int, m: int, strategy: Strategy, seed: SeedLike = None,
                log_trajectories: bool = False) -> FinalState:
    """Park m cars on a cycle of n slots; each car arrives at a uniform vertex."""
    if n < 1 or not 0 <= m < n:
        raise ParameterError(f"Parking needs 0 <= m < n, got n={n}, m={m}")
    rng = as_generator(seed)
    choices = rng.integers(0, n, size=m)
    clocks = np.sort(rng.random(m))

    direction = strategy.direction()
    if direction and not log_trajectories:
        remaining = settle_directed(np.bincount(choices, minlength=n), np.ones(n, dtype=bool), direction)
        return _final_state(n, remaining)

    arrivals = list(zip(choices.tolist(), clocks.tolist()))
    remaining, log = settle_sequential(range(n), arrivals, strategy, rng, n, log_trajectories)
    if log is not None:
        check_trajectories(remaining, log, n)
    return _final_state(n, remaining, log)


# Several balls per site

@dataclass(frozen=True)
class MultiballConfig:
    """Cycle where vertex v holds a hole (-1) or multiplicity[v] >= 0 balls."""

    n: int
    multiplicity: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'multiplicity', tuple(int(j) for j in self.multiplicity))
        if len(self.multiplicity) != self.n:
            raise ParameterError(f"Expected {self.n} multiplicities, got {len(self.multiplicity)}")
        if any(j < -1 for j in self.multiplicity):
            raise ParameterError(f"Multiplicities must be >= -1: {self.multiplicity}")

    def census(self) -> Dict[int, int]:
        """N_j: number of vertices with multiplicity j."""
        counts: Dict[int, int] = {}
        for j in self.multiplicity:
            counts[j] = counts.get(j, 0) + 1
        return counts

    @property
    def holes(self) -> Tuple[int, ...]:
        return tuple(v for v, j in enumerate(self.multiplicity) if j == -1)

    @property
    def ball_origins(self) -> Tuple[int, ...]:
        """One entry per ball, in position order."""
        return tuple(v for v, j in enumerate(self.multiplicity) for _ in range(max(j, 0)))

    @property
    def hole_surplus(self) -> int:
        return len(self.holes) - len(self.ball_origins)


def sample_multiball_config(census: Dict[int, int], seed: SeedLike = None) -> MultiballConfig:
    """Uniform arrangement of the census over the cycle of length sum(census)."""
    rng = as_generator(seed)
    values = [j for j, count in sorted(census.items()) for _ in range(count)]
    return MultiballConfig(len(values), tuple(int(j) for j in rng.permutation(values)))


def run_golf_multiball(config: MultiballConfig, strategy: Strategy, seed: SeedLike = None,
                       log_trajectories: bool = False) -> FinalState:
    """Golf where several balls may start on the same vertex."""
    if config.hole_surplus < 0:
        raise ParameterError(f"Hole surplus must be non-negative, got {config.hole_surplus}")
    rng = as_generator(seed)
    origins = config.ball_origins
    clocks = Clocks.sample(len(origins), rng)

    direction = strategy.direction()
    if direction and not log_trajectories:
        counts = np.array([max(j, 0) for j in config.multiplicity])
        holes = np.array([j == -1 for j in config.multiplicity])
        return _final_state(config.n, settle_directed(counts, holes, direction))

    arrivals = [(origins[i], clocks.times[i]) for i in clocks.order()]
    remaining, log = settle_sequential(config.holes, arrivals, strategy, rng, config.n, log_trajectories)
    if log is not None:
        check_trajectories(remaining, log, config.n)
    return _final_state(config.n, remaining, log)
