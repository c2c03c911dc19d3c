from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from src.errors import InvalidConfig, InvalidInput
from src.graph.builder import (
    ZERO_NORM_EDGES,
    build_interaction_graph,
    edge_counts,
    edge_weight_cross,
    edge_weight_same,
    expected_edge_counts,
)
from src.graph.filters import filter_eigenvalues, normalized_adjacency, normalized_filters


@pytest.mark.parametrize("x_j, expected", [
    ([1.0, 0.0], 1.0),
    ([0.0, 1.0], 0.5),
    ([-1.0, 0.0], 0.0),
])
def test_edge_weight_same(x_j, expected):
    assert edge_weight_same(np.array([1.0, 0.0]), np.array(x_j)) == pytest.approx(expected)


def test_edge_weight_cross():
    assert edge_weight_cross(np.array([1.0, 0.0]), np.array([1.0, 0.0]), 0.5) == pytest.approx(0.5)
    with pytest.raises(InvalidConfig):
        edge_weight_cross(np.ones(2), np.ones(2), 0.0)


def test_zero_norm_edge_is_counted():
    ZERO_NORM_EDGES.reset()
    assert edge_weight_same(np.zeros(2), np.array([1.0, 0.0])) == 0.5
    assert ZERO_NORM_EDGES.count == 1


def test_zero_norm_counter_is_exact_across_threads():
    ZERO_NORM_EDGES.reset()

    def bump(_):
        for _ in range(2000):
            ZERO_NORM_EDGES.increment()

    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(bump, range(8)))
    assert ZERO_NORM_EDGES.count == 16000
    ZERO_NORM_EDGES.reset()


@pytest.mark.parametrize("n_utt, k, expected", [
    (3, 1, (6, 9)),
    (1, 3, (0, 3)),
    (2, 0, (0, 6)),
])
def test_edge_counts(rng, n_utt, k, expected):
    graph = build_interaction_graph(rng.standard_normal((3 * n_utt, 4)), k, 0.5)
    assert edge_counts(graph) == expected
    assert expected_edge_counts(n_utt, k) == expected


def test_expected_counts_match_brute_force():
    for n_utt in range(1, 8):
        for k in range(0, 9):
            pairs = sum(1 for i in range(n_utt) for j in range(i + 1, n_utt) if j - i <= k)
            assert expected_edge_counts(n_utt, k) == (3 * pairs, 3 * n_utt)


def test_graph_structure(rng):
    graph = build_interaction_graph(rng.standard_normal((12, 5)), 2, 0.7)
    A = graph.A
    assert A.shape == (12, 12)
    np.testing.assert_array_equal(A, A.T)
    np.testing.assert_array_equal(np.diag(A), 0.0)
    assert A.min() >= 0.0
    # cross-modal weights are bounded by phi, same-modal by 1
    assert A[graph.node_index(0, 1), graph.node_index(2, 1)] <= 0.7
    assert A[graph.node_index(0, 0), graph.node_index(0, 3)] == 0.0
    assert A[graph.node_index(0, 0), graph.node_index(1, 1)] == 0.0


def test_graph_rejects_bad_input(rng):
    with pytest.raises(InvalidInput):
        build_interaction_graph(rng.standard_normal((4, 2)), 1, 0.5)
    with pytest.raises(InvalidConfig):
        build_interaction_graph(rng.standard_normal((6, 2)), -1, 0.5)
    with pytest.raises(InvalidConfig):
        build_interaction_graph(rng.standard_normal((6, 2)), 1, 0.0)


def test_graph_counts_zero_norm_nodes():
    ZERO_NORM_EDGES.reset()
    X = np.ones((3, 2))
    X[0] = 0.0
    graph = build_interaction_graph(X, 1, 0.5)
    assert graph.degenerate_pairs == 2
    assert ZERO_NORM_EDGES.count == 2
    assert graph.A[0, 1] == pytest.approx(0.25)


def test_two_node_filters():
    pair = normalized_filters(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(pair.low, [[1.0, 1.0], [1.0, 1.0]])
    np.testing.assert_allclose(pair.high, [[1.0, -1.0], [-1.0, 1.0]])


def test_isolated_nodes_give_identity():
    pair = normalized_filters(np.zeros((3, 3)))
    np.testing.assert_array_equal(pair.low, np.eye(3))
    np.testing.assert_array_equal(pair.high, np.eye(3))


@pytest.mark.parametrize("A", [
    np.array([[0.0, 1.0], [0.5, 0.0]]),
    np.array([[0.0, -1.0], [-1.0, 0.0]]),
    np.array([[1.0, 1.0], [1.0, 0.0]]),
    np.ones((2, 3)),
])
def test_invalid_adjacency(A):
    with pytest.raises(InvalidInput):
        normalized_filters(A)


def test_filter_properties(rng):
    graph = build_interaction_graph(rng.standard_normal((15, 4)), 2, 0.5)
    pair = normalized_filters(graph.A)
    np.testing.assert_array_equal(pair.low + pair.high, 2.0 * np.eye(15))
    low, high = filter_eigenvalues(pair)
    for values in (low, high):
        assert values.min() >= -1e-10
        assert values.max() <= 2.0 + 1e-10


def test_high_pass_annihilates_degree_weighted_signal(rng):
    graph = build_interaction_graph(rng.standard_normal((9, 3)), 1, 0.5)
    degree = graph.A.sum(axis=1)
    smooth = np.sqrt(degree)
    pair = normalized_filters(graph.A)
    np.testing.assert_allclose(pair.high @ smooth, 0.0, atol=1e-10)
    np.testing.assert_allclose(pair.low @ smooth, 2.0 * smooth, atol=1e-10)
    np.testing.assert_allclose(normalized_adjacency(graph.A) @ smooth, smooth, atol=1e-10)
