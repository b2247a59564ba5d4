"""
Seed handling and trial-parallel execution for golflab.

One master seed drives everything. Child generators are derived by a
counter-based split: trial ``i`` of stream ``s`` always gets
``SeedSequence(entropy=master, spawn_key=(s, i))``, so results do not
depend on evaluation order or on the number of workers.
"""

import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, List, Union

import numpy as np

from golf_errors import ParameterError

logger = logging.getLogger(__name__)

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]

# Trials per task handed to a worker process
CHUNK_SIZE = 256


def stream_id(name: str) -> int:
    """Stable integer id for a named stream."""
    return zlib.crc32(name.encode('utf-8'))


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Turn an int, SeedSequence or Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        return np.random.default_rng()
    if isinstance(seed, (int, np.integer)) and seed < 0:
        raise ParameterError(f"Seeds must be non-negative, got {seed}")
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class SeedManager:
    """Derives reproducible child seeds from a master seed."""

    master_seed: int

    def __post_init__(self):
        if self.master_seed < 0:
            raise ParameterError(f"Master seed must be non-negative, got {self.master_seed}")

    def child(self, stream: Union[int, str], index: int) -> np.random.SeedSequence:
        """Seed sequence for trial ``index`` of ``stream``."""
        if isinstance(stream, str):
            stream = stream_id(stream)
        return np.random.SeedSequence(entropy=self.master_seed, spawn_key=(stream, index))

    def generator(self, stream: Union[int, str], index: int) -> np.random.Generator:
        """Generator for trial ``index`` of ``stream``."""
        return np.random.default_rng(self.child(stream, index))


def _run_chunk(trial_fn: Callable[[np.random.Generator], Any], seeds: SeedManager,
               stream: Union[int, str], start: int, stop: int) -> List[Any]:
    return [trial_fn(seeds.generator(stream, i)) for i in range(start, stop)]


def run_trials(trial_fn: Callable[[np.random.Generator], Any], trials: int, seeds: SeedManager,
               stream: Union[int, str], threads: int = 1) -> List[Any]:
    """Run ``trial_fn`` once per trial and return the results in trial order.

    Args:
        trial_fn: picklable callable taking the trial's Generator
        trials: number of trials
        seeds: seed manager holding the master seed
        stream: stream name or id separating unrelated experiments
        threads: worker processes; 1 runs inline

    Returns:
        List of per-trial results, index i from child seed i
    """
    if trials < 0:
        raise ParameterError(f"Trial count must be non-negative, got {trials}")
    if threads < 1:
        raise ParameterError(f"Worker count must be at least 1, got {threads}")

    if threads == 1 or trials <= CHUNK_SIZE:
        return _run_chunk(trial_fn, seeds, stream, 0, trials)

    bounds = [(start, min(start + CHUNK_SIZE, trials)) for start in range(0, trials, CHUNK_SIZE)]
    workers = min(threads, len(bounds))
    if workers < threads:
        logger.warning("Only %d chunks of work; using %d workers instead of %d", len(bounds), workers, threads)

    results: List[Any] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_chunk, trial_fn, seeds, stream, start, stop) for start, stop in bounds]
        for future in futures:
            results.extend(future.result())
    return results
