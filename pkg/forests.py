"""
Complete binary forests and their lattice-path encodings.

A tree is a nested tuple: a leaf is ``()`` and an internal node is
``(left, right)``. Nodes are explored depth first, parent before children
and left before right; a node's walk-order index is its position in that
exploration. The Łukasiewicz walk of a forest has one step per node,
``children - 1``, so +1 for internal nodes and -1 for leaves.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from golf_errors import MalformedPathError, ParameterError
from golf_model import BlockSizes
from seed_manager import SeedLike, as_generator

Tree = tuple
Path = Tuple[int, ...]

_STEP_LETTERS = {1: 'U', 0: 'Z', -1: 'D'}
_LETTER_STEPS = {letter: step for step, letter in _STEP_LETTERS.items()}


@dataclass(frozen=True)
class BinaryForest:
    """Ordered forest of complete binary trees, optionally marked in its first tree.

    ``mark`` is the walk-order (depth-first) index of the marked node, which
    is also the index of its step in the Łukasiewicz walk. Rotating the walk
    by ``mark`` therefore starts it with the marked node's step.
    """

    trees: Tuple[Tree, ...]
    mark: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'trees', tuple(self.trees))
        if not self.trees:
            raise ParameterError("A forest needs at least one tree")
        if self.mark is not None and not 0 <= self.mark < tree_size(self.trees[0]):
            raise ParameterError(f"Mark {self.mark} outside the first tree")

    @property
    def size(self) -> int:
        return sum(tree_size(t) for t in self.trees)

    @property
    def tree_sizes(self) -> Tuple[int, ...]:
        return tuple(tree_size(t) for t in self.trees)

    @property
    def marked_node(self) -> Optional[Tree]:
        if self.mark is None:
            return None
        return walk_order(self.trees[0])[self.mark]


@dataclass(frozen=True)
class Excursion:
    left: int
    length: int


def tree_size(tree: Tree) -> int:
    """Number of nodes."""
    count = 0
    stack = [tree]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(node)
    return count


def walk_order(tree: Tree) -> Tuple[Tree, ...]:
    """Subtrees of every node, in the order their steps appear in the walk."""
    order = []
    stack = [tree]
    while stack:
        node = stack.pop()
        order.append(node)
        if node:
            stack.append(node[1])
            stack.append(node[0])
    return tuple(order)


def _tree_steps(tree: Tree, out: List[int]):
    out.extend(1 if node else -1 for node in walk_order(tree))


def forest_to_path(forest: BinaryForest) -> Path:
    """Łukasiewicz walk of the forest."""
    steps: List[int] = []
    for tree in forest.trees:
        _tree_steps(tree, steps)
    return tuple(steps)


def _check_steps(w: Sequence[int], alphabet=(1, -1)):
    for step in w:
        if step not in alphabet:
            raise MalformedPathError(f"Step {step} outside alphabet {alphabet}")


def passage_times(w: Sequence[int]) -> List[int]:
    """tau_{-j} for j = 1, 2, ...: first times the walk reaches -j."""
    times = []
    height = 0
    low = 0
    for t, step in enumerate(w, start=1):
        height += int(step)
        if height < low:
            low = height
            times.append(t)
    return times


def _check_first_passage(w: Sequence[int]) -> int:
    """Return k if w ends at -k exactly when first reaching it."""
    _check_steps(w)
    if len(w) == 0:
        raise MalformedPathError("Empty path")
    k = -sum(int(step) for step in w)
    times = passage_times(w)
    if k < 1 or len(times) != k or times[-1] != len(w):
        raise MalformedPathError(f"Path does not first reach its final level {-k} at its end")
    return k


def _decode_tree(steps: Sequence[int]) -> Tree:
    pending: List[list] = []
    root = None
    for step in steps:
        if step == 1:
            pending.append([])
            continue
        done: Optional[Tree] = ()
        while pending:
            pending[-1].append(done)
            if len(pending[-1]) < 2:
                done = None
                break
            done = tuple(pending.pop())
        if done is not None:
            root = done
    return root


def path_to_forest(w: Sequence[int]) -> BinaryForest:
    """Inverse of forest_to_path."""
    _check_first_passage(w)
    trees = []
    start = 0
    for stop in passage_times(w):
        trees.append(_decode_tree(w[start:stop]))
        start = stop
    return BinaryForest(tuple(trees))


def rot_discrete(w: Sequence[int], r: int) -> Path:
    """Cyclic shift of the increments: steps r, r+1, ..., then 0, ..., r-1."""
    if not 0 <= r <= len(w):
        raise ParameterError(f"Rotation index must lie in 0..{len(w)}, got {r}")
    w = tuple(w)
    return w[r:] + w[:r]


def first_argmin(w: Sequence[int]) -> int:
    """Smallest index t in 0..len(w) at which the prefix sum is minimal."""
    prefix = np.concatenate(([0], np.cumsum(np.asarray(w, dtype=np.int64))))
    return int(np.argmin(prefix))


def marked_forest_to_bridge(forest: BinaryForest) -> Path:
    """Walk rotated so it starts with the step of the marked node."""
    if forest.mark is None:
        raise ParameterError("Forest carries no mark")
    return rot_discrete(forest_to_path(forest), forest.mark)


def bridge_to_marked_forest(b: Sequence[int]) -> BinaryForest:
    """Inverse of marked_forest_to_bridge: rotate at the first argmin."""
    _check_steps(b)
    if len(b) == 0 or sum(int(step) for step in b) >= 0:
        raise MalformedPathError("A bridge must end at a negative level")
    n = len(b)
    r = first_argmin(b)
    forest = path_to_forest(rot_discrete(b, r))
    return BinaryForest(forest.trees, (n - r) % n)


def excursion_lengths(w: Sequence[int]) -> List[Excursion]:
    """Excursions above the running minimum, one per passage to a new level."""
    _check_first_passage(w)
    starts = [0] + passage_times(w)
    return [Excursion(left, right - left - 1) for left, right in zip(starts, starts[1:])]


def path_to_string(w: Sequence[int]) -> str:
    return ''.join(_STEP_LETTERS[step] for step in w)


def path_from_string(text: str) -> Path:
    try:
        return tuple(_LETTER_STEPS[c] for c in text.strip())
    except KeyError as e:
        raise MalformedPathError(f"Unknown step letter {e.args[0]!r}")


# Samplers

def _check_parity(n: int, k: int):
    if k < 1 or k > n or (n - k) % 2:
        raise ParameterError(f"Need 1 <= k <= n and n = k mod 2, got n={n}, k={k}")


def sample_uniform_bridge(n: int, k: int, seed: SeedLike = None) -> np.ndarray:
    """Uniform shuffle of (n-k)/2 up steps and (n+k)/2 down steps."""
    _check_parity(n, k)
    steps = np.full(n, -1, dtype=np.int8)
    steps[:(n - k) // 2] = 1
    return as_generator(seed).permutation(steps)


def sample_first_passage_path(n: int, k: int, seed: SeedLike = None) -> np.ndarray:
    """Uniform path of length n first reaching -k at time n.

    Exactly k cyclic shifts of a bridge are first-passage paths: the shifts
    starting at the first visits of the levels min, ..., min + k - 1. One of
    them is picked uniformly.
    """
    _check_parity(n, k)
    rng = as_generator(seed)
    bridge = sample_uniform_bridge(n, k, rng)
    prefix = np.concatenate(([0], np.cumsum(bridge, dtype=np.int64)))
    level = int(prefix.min()) + int(rng.integers(k))
    r = int(np.argmax(prefix == level))
    return np.roll(bridge, -r)


def _excursion_lengths_array(path: np.ndarray) -> np.ndarray:
    heights = np.cumsum(path, dtype=np.int64)
    previous_low = np.minimum.accumulate(np.concatenate(([0], heights[:-1])))
    passages = np.flatnonzero(heights < previous_low) + 1
    return np.diff(np.concatenate(([0], passages))) - 1


def sample_block_sizes_via_forest(n: int, n_l: int, seed: SeedLike = None) -> BlockSizes:
    """Block sizes of a full cycle (n_b + n_t = n, n_l = n_t - n_b) sampled through a bridge.

    The excursions of the bridge rotated at its first argmin are the trees
    of a uniform marked forest minus one node each; block 0 is the marked
    tree, size-biased like the block containing vertex 0.
    """
    _check_parity(n, n_l)
    bridge = sample_uniform_bridge(n, n_l, seed)
    path = np.roll(bridge, -first_argmin(bridge))
    return BlockSizes(tuple(int(x) for x in _excursion_lengths_array(path)))


# Exhaustive generation

@lru_cache(maxsize=None)
def enumerate_trees(size: int) -> Tuple[Tree, ...]:
    """All complete binary trees with ``size`` nodes (size odd)."""
    if size < 1 or size % 2 == 0:
        return ()
    if size == 1:
        return ((),)
    trees = []
    for left_size in range(1, size - 1, 2):
        for left in enumerate_trees(left_size):
            for right in enumerate_trees(size - 1 - left_size):
                trees.append((left, right))
    return tuple(trees)


def _odd_compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2, 2):
        for rest in _odd_compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_forests(n: int, k: int) -> Iterator[BinaryForest]:
    """All forests of k complete binary trees with n nodes."""
    _check_parity(n, k)
    for sizes in _odd_compositions(n, k):
        for trees in itertools.product(*(enumerate_trees(s) for s in sizes)):
            yield BinaryForest(trees)


def enumerate_marked_forests(n: int, k: int) -> Iterator[BinaryForest]:
    """All forests of enumerate_forests with every possible mark in the first tree."""
    for forest in enumerate_forests(n, k):
        for mark in range(tree_size(forest.trees[0])):
            yield BinaryForest(forest.trees, mark)
