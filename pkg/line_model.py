"""
Golf on windows of Z.

Sites of a window are drawn i.i.d. (ball with probability d_b, hole with
probability d_t, neutral otherwise). A hole is a separator when, within the
window, every run of sites ending just left of it and every run starting
just right of it holds no more balls than holes. Golf between two
separators is self-contained and never fills them.

Laws of the remaining-hole blocks on Z are sampled on a large cycle with
matching densities.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from golf_errors import DomainError, NoSeparatorError, ParameterError, SeparatorFilledError
from golf_model import (FinalState, FixedDirection, SiteState, Strategy, TrajectoryRecord,
                        block_sizes, check_trajectories, run_golf, sample_initial_cycle,
                        settle_sequential)
from seed_manager import SeedLike, as_generator

logger = logging.getLogger(__name__)

_CODES = {SiteState.BALL: 1, SiteState.HOLE: -1, SiteState.NEUTRAL: 0}
_STATES = {1: SiteState.BALL, -1: SiteState.HOLE, 0: SiteState.NEUTRAL}


def _check_densities(d_b: float, d_t: float):
    if d_b < 0.0 or d_t < 0.0 or d_b + d_t > 1.0 + 1e-12:
        raise DomainError(f"Need d_b, d_t >= 0 and d_b + d_t <= 1, got d_b={d_b}, d_t={d_t}")


@dataclass(frozen=True)
class LineWindowConfig:
    """Sites left..right of Z with their states and ball clocks (None off balls)."""

    left: int
    right: int
    states: Tuple[SiteState, ...]
    d_b: float = 0.0
    d_t: float = 0.0
    clocks: Optional[Tuple[Optional[float], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'states', tuple(self.states))
        if len(self.states) != self.right - self.left + 1:
            raise ParameterError(f"Window {self.left}..{self.right} needs {self.right - self.left + 1} states")
        if self.clocks is not None:
            object.__setattr__(self, 'clocks', tuple(self.clocks))
            if len(self.clocks) != len(self.states):
                raise ParameterError("One clock slot per site is required")

    @property
    def positions(self) -> range:
        return range(self.left, self.right + 1)

    def codes(self) -> np.ndarray:
        return np.array([_CODES[s] for s in self.states], dtype=np.int64)

    def clock_at(self, position: int) -> float:
        if self.clocks is None or self.clocks[position - self.left] is None:
            raise ParameterError(f"No clock for site {position}")
        return self.clocks[position - self.left]

    def to_string(self) -> str:
        """Window header then the {B, H, .} states; clocks are not serialised."""
        return f"offset={self.left}\n" + ''.join(s.value for s in self.states)

    @classmethod
    def from_string(cls, text: str) -> 'LineWindowConfig':
        header, _, body = text.strip().partition('\n')
        if not header.startswith('offset='):
            raise ParameterError(f"Missing offset header in {header!r}")
        left = int(header[len('offset='):])
        states = tuple(SiteState.from_char(c) for c in body.strip())
        return cls(left, left + len(states) - 1, states)


@dataclass(frozen=True)
class HeightPath:
    """Heights on the edges of the window; heights[0] sits left of the first site."""

    left: int
    heights: Tuple[int, ...]


@dataclass(frozen=True)
class SeparatorReport:
    certified: Tuple[int, ...]
    margin: Tuple[int, ...]


@dataclass(frozen=True)
class LineFinalState(FinalState):
    """Final state of a window run; per_vertex covers the window from ``offset``."""

    offset: int = 0
    separators: Tuple[int, ...] = ()
    uncertified: Tuple[int, ...] = ()

    def block_sizes(self):
        holes = self.remaining_holes
        return tuple(b - a - 1 for a, b in zip(holes, holes[1:]))


def sample_line_window(d_b: float, d_t: float, half_width: int, seed: SeedLike = None) -> LineWindowConfig:
    """2W + 1 i.i.d. sites centred at 0 with uniform clocks on the balls."""
    _check_densities(d_b, d_t)
    if half_width < 0:
        raise ParameterError(f"Half width must be non-negative, got {half_width}")
    rng = as_generator(seed)
    size = 2 * half_width + 1
    codes = rng.choice(np.array([1, -1, 0]), size=size, p=[d_b, d_t, max(0.0, 1.0 - d_b - d_t)])
    times = rng.random(size)
    clocks = tuple(float(t) if c == 1 else None for c, t in zip(codes, times))
    states = tuple(_STATES[int(c)] for c in codes)
    return LineWindowConfig(-half_width, half_width, states, d_b, d_t, clocks)


def height_path(config: LineWindowConfig) -> HeightPath:
    """Cumulative sums of the site increments, starting from 0."""
    heights = np.concatenate(([0], np.cumsum(config.codes())))
    return HeightPath(config.left, tuple(int(h) for h in heights))


def find_window_separators(config: LineWindowConfig) -> SeparatorReport:
    """Holes whose edge starts at the running low from the left and ends at the running high from the right.

    The margin is how far the partial sums out to the window boundary stay
    below zero, the smaller of the two sides.
    """
    codes = config.codes()
    if codes.size == 0:
        return SeparatorReport((), ())
    heights = np.concatenate(([0], np.cumsum(codes)))
    prefix_low = np.minimum.accumulate(heights)[:-1]
    suffix_high = np.maximum.accumulate(heights[::-1])[::-1][1:]
    before, after = heights[:-1], heights[1:]
    ok = (codes == -1) & (before == prefix_low) & (after == suffix_high)
    index = np.flatnonzero(ok)
    margin = np.minimum(-before[index], after[index] - heights[-1])
    return SeparatorReport(tuple(int(i) + config.left for i in index),
                           tuple(int(m) for m in margin))


def run_golf_line(config: LineWindowConfig, strategy: Strategy, seed: SeedLike = None,
                  log_trajectories: bool = False) -> LineFinalState:
    """Golf on each interval between consecutive certified separators.

    Sites outside the outermost separators are reported as uncertified and
    keep their initial state.
    """
    report = find_window_separators(config)
    separators = report.certified
    if len(separators) < 2:
        raise NoSeparatorError(f"Found {len(separators)} certified separators, need at least 2")
    logger.debug("window %d..%d: %d certified separators", config.left, config.right, len(separators))
    rng = as_generator(seed)

    final = list(config.states)
    remaining: List[int] = []
    log: Optional[List[TrajectoryRecord]] = [] if log_trajectories else None
    for start, stop in zip(separators, separators[1:]):
        inner = range(start + 1, stop)
        holes = [start] + [v for v in inner if config.states[v - config.left] is SiteState.HOLE] + [stop]
        balls = [v for v in inner if config.states[v - config.left] is SiteState.BALL]
        if config.clocks is None:
            times = rng.random(len(balls)).tolist()
        else:
            times = [config.clock_at(v) for v in balls]
        arrivals = sorted(zip(balls, times), key=lambda item: item[1])
        free, segment_log = settle_sequential(holes, arrivals, strategy, rng, None, log_trajectories)
        if free[0] != start or free[-1] != stop:
            raise SeparatorFilledError(f"A separator of the interval {start}..{stop} was filled")
        if segment_log is not None:
            check_trajectories(free, segment_log, None)
            log.extend(segment_log)
        for v in range(start, stop + 1):
            final[v - config.left] = SiteState.NEUTRAL
        for v in free:
            final[v - config.left] = SiteState.HOLE
        remaining.extend(free if not remaining else free[1:])

    uncertified = tuple(v for v in config.positions if v < separators[0] or v > separators[-1])
    return LineFinalState(tuple(remaining), False, tuple(final),
                          None if log is None else tuple(log),
                          offset=config.left, separators=separators, uncertified=uncertified)


def time_truncated_config(config: LineWindowConfig, t: float) -> LineWindowConfig:
    """Demote balls whose clock is at least t to neutral sites."""
    if not 0.0 < t <= 1.0:
        raise DomainError(f"t must lie in (0, 1], got {t}")
    if config.clocks is None:
        raise ParameterError("Time truncation needs ball clocks")
    states = []
    clocks = []
    for state, clock in zip(config.states, config.clocks):
        if state is SiteState.BALL and clock >= t:
            states.append(SiteState.NEUTRAL)
            clocks.append(None)
        else:
            states.append(state)
            clocks.append(clock)
    return LineWindowConfig(config.left, config.right, tuple(states), config.d_b * t, config.d_t, tuple(clocks))


def separator_target_density(d_b: float, d_t: float) -> float:
    """d_t (1 - d_b/d_t)^2: a hole whose two one-sided walks never climb above 0."""
    if not 0.0 <= d_b < d_t:
        raise DomainError(f"Need 0 <= d_b < d_t, got d_b={d_b}, d_t={d_t}")
    return (d_t - d_b) ** 2 / d_t


# Large-cycle surrogate

def surrogate_counts(d_b: float, d_t: float, n: int, hole_surplus: Optional[int] = None) -> Tuple[int, int]:
    """(n_b, n_t) of the cycle standing in for Z."""
    _check_densities(d_b, d_t)
    n_t = math.floor(d_t * n)
    n_b = n_t - hole_surplus if hole_surplus is not None else math.floor(d_b * n)
    if not 0 <= n_b <= n_t or n_b + n_t > n:
        raise ParameterError(f"Cannot place {n_b} balls and {n_t} holes on {n} sites")
    return n_b, n_t


def sample_Z_blocks_surrogate(d_b: float, d_t: float, n: int, R: int, seed: SeedLike = None,
                              strategy: Optional[Strategy] = None, center: int = 0,
                              hole_surplus: Optional[int] = None) -> Tuple[int, ...]:
    """Blocks Delta_{-R}, ..., Delta_R around ``center`` after golf on a cycle of n sites.

    Args:
        d_b, d_t: ball and hole densities, d_b <= d_t
        n: cycle length
        R: number of blocks on each side of the central one
        seed: random source
        strategy: movement rule; every ball moving clockwise by default
        center: vertex playing the role of the origin
        hole_surplus: if set, n_b = n_t - hole_surplus (balanced densities)

    Returns:
        2R + 1 block sizes, the central block (containing ``center``) in the middle
    """
    if d_b > d_t:
        raise DomainError(f"Need d_b <= d_t, got d_b={d_b}, d_t={d_t}")
    if R < 0:
        raise ParameterError(f"R must be non-negative, got {R}")
    n_b, n_t = surrogate_counts(d_b, d_t, n, hole_surplus)
    n_l = n_t - n_b
    # a fixed surplus may be as small as the number of returned blocks
    needed = 2 * R + 1 if hole_surplus is not None else 2 * R + 3
    if n_l < needed:
        raise ParameterError(f"{n_l} remaining holes, need at least {needed} for R={R}")
    strategy = strategy if strategy is not None else FixedDirection(0)
    rng = as_generator(seed)

    remaining = run_golf(sample_initial_cycle(n, n_b, n_t, rng), strategy, seed=rng).remaining_holes
    shifted = [(v - center) % n for v in remaining]
    deltas = block_sizes(shifted, n).deltas
    return tuple(deltas[i % n_l] for i in range(-R, R + 1))
