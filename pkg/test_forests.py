"""
Tests for binary forests and their paths.
"""

import numpy as np
import pytest
from scipy import stats

from exact_laws import block_size_distribution_full, count_forests, count_marked_forests
from forests import (BinaryForest, Excursion, bridge_to_marked_forest, enumerate_forests, enumerate_marked_forests,
                     enumerate_trees, excursion_lengths, first_argmin, forest_to_path, marked_forest_to_bridge,
                     passage_times, path_from_string, path_to_forest, path_to_string, rot_discrete,
                     sample_block_sizes_via_forest, sample_first_passage_path, sample_uniform_bridge, tree_size,
                     walk_order)
from gof_tests import chi_square_gof, counts_over
from golf_errors import MalformedPathError, ParameterError

CHERRY = ((), ())


def test_cherry_walk():
    forest = BinaryForest((CHERRY,))
    assert forest_to_path(forest) == (1, -1, -1)
    assert forest.size == 3
    assert tree_size(((CHERRY, ()))) == 5


def test_passage_times_and_excursions():
    w = (1, -1, -1, -1)
    assert passage_times(w) == [3, 4]
    assert excursion_lengths(w) == [Excursion(0, 2), Excursion(3, 0)]
    assert path_to_forest(w) == BinaryForest((CHERRY, ()))


def test_path_must_end_at_its_first_passage():
    with pytest.raises(MalformedPathError):
        path_to_forest((1, -1))
    with pytest.raises(MalformedPathError):
        path_to_forest((-1, 1, -1))
    with pytest.raises(MalformedPathError):
        path_to_forest((1, 0, -1, -1))


def test_bridge_rotation():
    forest = bridge_to_marked_forest((-1, 1, -1))
    assert forest == BinaryForest((CHERRY,), mark=2)
    assert marked_forest_to_bridge(forest) == (-1, 1, -1)
    assert first_argmin((-1, 1, -1)) == 1
    assert rot_discrete((1, 2, 3), 1) == (2, 3, 1)
    with pytest.raises(MalformedPathError):
        bridge_to_marked_forest((1, -1))
    with pytest.raises(ParameterError):
        marked_forest_to_bridge(BinaryForest((CHERRY,)))


def test_mark_is_the_walk_order_index():
    tree = (CHERRY, ())
    assert walk_order(tree) == (tree, CHERRY, (), (), ())
    assert BinaryForest((tree,), mark=1).marked_node == CHERRY
    assert BinaryForest((tree,)).marked_node is None
    for forest in enumerate_marked_forests(8, 2):
        first_step = marked_forest_to_bridge(forest)[0]
        assert first_step == (1 if forest.marked_node else -1)


def test_mark_must_fall_in_first_tree():
    with pytest.raises(ParameterError):
        BinaryForest((CHERRY, ()), mark=3)
    with pytest.raises(ParameterError):
        BinaryForest(())


def test_step_letters():
    assert path_from_string("UDD") == (1, -1, -1)
    assert path_to_string((1, 0, -1)) == "UZD"
    with pytest.raises(MalformedPathError):
        path_from_string("UXD")


def test_enumeration_counts():
    assert len(enumerate_trees(7)) == 5
    assert enumerate_trees(4) == ()
    assert sum(1 for _ in enumerate_forests(9, 3)) == count_forests(9, 3)
    assert sum(1 for _ in enumerate_marked_forests(9, 3)) == count_marked_forests(9, 3)


def test_marked_forests_biject_with_bridges():
    bridges = set()
    for forest in enumerate_marked_forests(7, 1):
        bridge = marked_forest_to_bridge(forest)
        assert bridge_to_marked_forest(bridge) == forest
        bridges.add(bridge)
    # Every arrangement of 3 up steps and 4 down steps appears once
    assert len(bridges) == 35


def test_first_passage_sampler():
    for seed in range(30):
        path = sample_first_passage_path(11, 3, seed=seed)
        steps = tuple(int(s) for s in path)
        assert passage_times(steps)[-1] == 11
        assert len(path_to_forest(steps).trees) == 3


def test_bridge_sampler_counts_steps():
    bridge = sample_uniform_bridge(21, 5, seed=1)
    assert int(bridge.sum()) == -5
    with pytest.raises(ParameterError):
        sample_uniform_bridge(20, 5)


def test_block_sampler_sizes():
    for seed in range(20):
        blocks = sample_block_sizes_via_forest(31, 5, seed=seed)
        assert len(blocks.deltas) == 5
        assert sum(blocks.deltas) == 26
        assert all(d % 2 == 0 for d in blocks.deltas)


@pytest.mark.statistical
def test_block_sampler_matches_block_law():
    exact = block_size_distribution_full(10, 4)
    support = exact.support
    rng = np.random.default_rng(20240611)
    samples = [sample_block_sizes_via_forest(10, 2, rng).deltas for _ in range(6000)]
    counts = counts_over(support, samples)
    assert sum(counts) == len(samples)
    result = chi_square_gof(counts, [float(exact.probability(key)) for key in support])
    assert result.statistic < stats.chi2.ppf(0.9999, result.dof)
