"""Tests for the social graph and Influence Rank."""

import itertools
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import connected_graphs, degree_distribution, dense_pagerank, random_graphs
from moirank.errors import (
    DataError,
    DuplicateAccountIdError,
    EmptyGraphError,
    SelfLoopError,
    UnknownEndpointError,
)
from moirank.graph_core import (
    DEFAULT_MAX_ITER,
    RankVector,
    build_graph,
    influence_rank,
    rank_order,
    top_k_by_rank,
)


# --- build_graph ---

def test_reversed_duplicate_edges_collapse():
    graph = build_graph(["A", "B"], [("A", "B"), ("B", "A")])
    assert graph.number_of_edges() == 1
    assert graph.edges == (("A", "B"),)


def test_self_loop_rejected():
    with pytest.raises(SelfLoopError) as exc:
        build_graph(["A"], [("A", "A")])
    assert exc.value.code == "SelfLoop"
    assert exc.value.record == (0, "A", "A")


def test_unknown_endpoint_rejected():
    with pytest.raises(UnknownEndpointError, match="Z"):
        build_graph(["A", "B"], [("A", "B"), ("A", "Z")])


def test_duplicate_account_rejected():
    with pytest.raises(DuplicateAccountIdError):
        build_graph(["A", "A"], [])


def test_isolated_node_retained():
    graph = build_graph(["A", "B", "C"], [("A", "B")])
    assert "C" in graph
    assert graph.degree("C") == 0
    assert graph.isolated_nodes() == ("C",)


def _path_triangle_isolated():
    edges = [("a", "b"), ("b", "c"), ("d", "e"), ("e", "f"), ("d", "f")]
    return build_graph(list("abcdefg"), edges)


def test_structure_metrics():
    triangle = build_graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    assert triangle.density() == 1.0
    assert triangle.average_clustering() == 1.0
    assert triangle.diameter() == 1
    assert triangle.number_of_components() == 1

    mixed = _path_triangle_isolated()
    assert mixed.number_of_components() == 3
    assert mixed.diameter() == 2
    assert mixed.density() == pytest.approx(5 / 21)
    assert mixed.average_clustering() == pytest.approx(3 / 7)

    empty = build_graph([], [])
    assert (empty.density(), empty.average_clustering(), empty.diameter()) == (0.0, 0.0, 0)


def test_neighbors_symmetric_and_sorted():
    graph = build_graph(["c", "a", "b"], [("c", "a"), ("b", "c")])
    assert graph.nodes == ("a", "b", "c")
    assert graph.neighbors("c") == ("a", "b")
    for a, b in graph.edges:
        assert a in graph.neighbors(b) and b in graph.neighbors(a)


def test_graph_equality_ignores_input_order():
    g1 = build_graph(["a", "b", "c"], [("a", "b"), ("c", "b")])
    g2 = build_graph(["c", "b", "a"], [("b", "c"), ("b", "a")])
    assert g1 == g2


def test_data_errors_are_value_errors():
    assert issubclass(SelfLoopError, ValueError)
    assert issubclass(EmptyGraphError, DataError)


# --- influence_rank examples ---

def test_triangle_uniform():
    graph = build_graph(["A", "B", "C"], [("A", "B"), ("B", "C"), ("A", "C")])
    ranks = influence_rank(graph, 0.85, tol=1e-12)
    assert ranks.converged
    for score in ranks.scores.values():
        assert score == pytest.approx(1 / 3, abs=1e-12)


def test_path_undamped_is_degree_proportional():
    graph = build_graph(["A", "B", "C"], [("A", "B"), ("B", "C")])
    ranks = influence_rank(graph, 1.0, tol=1e-12)
    assert ranks.converged
    assert ranks.scores["A"] == pytest.approx(0.25, abs=1e-12)
    assert ranks.scores["B"] == pytest.approx(0.5, abs=1e-12)
    assert ranks.scores["C"] == pytest.approx(0.25, abs=1e-12)


def test_star_hub_strictly_largest():
    leaves = ["L1", "L2", "L3", "L4"]
    graph = build_graph(["H"] + leaves, [("H", leaf) for leaf in leaves])
    ranks = influence_rank(graph, 0.85)
    oracle = dense_pagerank(graph.nodes, graph.edges, 0.85, iterations=10000)
    assert all(ranks.scores["H"] > ranks.scores[leaf] for leaf in leaves)
    for node in graph.nodes:
        assert ranks.scores[node] == pytest.approx(oracle[node], abs=1e-8)


def test_cycle_is_uniform_for_every_damping():
    nodes = [f"c{i}" for i in range(6)]
    graph = build_graph(nodes, [(nodes[i], nodes[(i + 1) % 6]) for i in range(6)])
    for damping in (0.0, 0.5, 0.85, 1.0):
        ranks = influence_rank(graph, damping, tol=1e-12)
        for score in ranks.scores.values():
            assert score == pytest.approx(1 / 6, abs=1e-12)


def test_single_isolated_node():
    ranks = influence_rank(build_graph(["solo"], []), 0.85)
    assert list(ranks.scores) == ["solo"]
    assert ranks.scores["solo"] == pytest.approx(1.0)


def test_empty_graph_rejected():
    with pytest.raises(EmptyGraphError):
        influence_rank(build_graph([], []))


@pytest.mark.parametrize("kwargs", [
    {"damping": -0.1},
    {"damping": 1.5},
    {"tol": 0.0},
    {"max_iter": 0},
])
def test_parameter_ranges(kwargs):
    graph = build_graph(["A", "B"], [("A", "B")])
    with pytest.raises(ValueError):
        influence_rank(graph, **kwargs)


def test_non_convergence_reported(caplog):
    nodes = [f"p{i}" for i in range(8)]
    graph = build_graph(nodes, list(zip(nodes, nodes[1:])))
    with caplog.at_level(logging.WARNING, logger="moirank.graph_core"):
        ranks = influence_rank(graph, 0.85, tol=1e-15, max_iter=2)
    assert not ranks.converged
    assert ranks.iterations == 2
    assert ranks.residual >= 1e-15
    assert ranks.total() == pytest.approx(1.0, abs=1e-9)
    assert "did not converge" in caplog.text


def test_rank_vector_echoes_damping():
    ranks = influence_rank(build_graph(["A", "B"], [("A", "B")]), 0.5)
    assert isinstance(ranks, RankVector)
    assert ranks.damping == 0.5
    assert ranks.to_dict()["damping"] == 0.5
    with pytest.raises(TypeError):
        ranks.scores["A"] = 1.0


def test_deterministic_bitwise():
    nodes = [f"n{i}" for i in range(12)]
    edges = [(a, b) for a, b in itertools.combinations(nodes, 2) if (int(a[1:]) * int(b[1:])) % 5 == 1]
    graph = build_graph(nodes, edges)
    first = influence_rank(graph, 0.85)
    second = influence_rank(build_graph(list(reversed(nodes)), list(reversed(edges))), 0.85)
    assert dict(first.scores) == dict(second.scores)
    assert first.iterations == second.iterations


def test_undamped_disconnected_graph_splits_mass_by_component_degree():
    ranks = influence_rank(_path_triangle_isolated(), 1.0, tol=1e-13)
    assert ranks.converged
    expected = {"a": 0.125, "b": 0.25, "c": 0.125, "d": 1 / 6, "e": 1 / 6, "f": 1 / 6, "g": 0.0}
    for node, value in expected.items():
        assert ranks.scores[node] == pytest.approx(value, abs=1e-9)


def test_undamped_isolated_nodes_only_stay_uniform():
    ranks = influence_rank(build_graph(["x", "y"], []), 1.0)
    assert ranks.converged
    assert dict(ranks.scores) == {"x": 0.5, "y": 0.5}


def test_long_path_undamped_exceeds_default_iterations():
    nodes = [f"p{i:02d}" for i in range(50)]
    edges = list(zip(nodes, nodes[1:]))
    graph = build_graph(nodes, edges)

    capped = influence_rank(graph, 1.0)
    assert not capped.converged
    assert capped.iterations == DEFAULT_MAX_ITER

    full = influence_rank(graph, 1.0, tol=1e-12, max_iter=200000)
    assert full.converged
    expected = degree_distribution(nodes, edges)
    for node in nodes:
        assert abs(full.scores[node] - expected[node]) < 1e-6


# --- influence_rank properties ---

@settings(max_examples=200, deadline=None)
@given(random_graphs(min_nodes=3, max_nodes=10), st.sampled_from([0.0, 0.5, 0.85, 0.95]))
def test_matches_dense_oracle(sample, damping):
    nodes, edges = sample
    graph = build_graph(nodes, edges)
    ranks = influence_rank(graph, damping, tol=1e-13)
    oracle = dense_pagerank(nodes, edges, damping)
    for node in nodes:
        assert abs(ranks.scores[node] - oracle[node]) < 1e-8


@settings(max_examples=50, deadline=None)
@given(connected_graphs(max_nodes=50))
def test_undamped_degree_proportional(sample):
    nodes, edges = sample
    graph = build_graph(nodes, edges)
    ranks = influence_rank(graph, 1.0, tol=1e-12, max_iter=200000)
    expected = degree_distribution(nodes, edges)
    assert ranks.converged
    for node in nodes:
        assert abs(ranks.scores[node] - expected[node]) < 1e-6


@settings(max_examples=100, deadline=None)
@given(random_graphs(min_nodes=1, max_nodes=15), st.sampled_from([0.0, 0.5, 0.85, 1.0]))
def test_scores_are_stochastic(sample, damping):
    nodes, edges = sample
    graph = build_graph(nodes, edges)
    ranks = influence_rank(graph, damping)
    assert set(ranks.scores) == set(nodes)
    assert all(score >= 0 for score in ranks.scores.values())
    assert abs(ranks.total() - 1.0) < 1e-9


# --- top_k_by_rank ---

def _vector(scores):
    return RankVector(scores=scores, iterations=1, converged=True, residual=0.0)


def test_top_k_sorted():
    assert top_k_by_rank(_vector({"A": 0.5, "B": 0.3, "C": 0.2}), 2) == [("A", 0.5), ("B", 0.3)]


def test_top_k_tie_break_by_id():
    assert top_k_by_rank(_vector({"B": 0.5, "A": 0.5}), 1) == [("A", 0.5)]


def test_top_k_truncates():
    graph = build_graph(["c", "a", "b"], [("a", "b"), ("b", "c"), ("a", "c")])
    ranks = influence_rank(graph, 0.85, tol=1e-12)
    top = top_k_by_rank(ranks, 5)
    assert len(top) == 3
    # Exactly symmetric graph: ties resolved by id.
    if len({score for _, score in top}) == 1:
        assert [a for a, _ in top] == ["a", "b", "c"]


def test_top_k_requires_positive_k():
    with pytest.raises(ValueError):
        top_k_by_rank(_vector({"A": 1.0}), 0)


@given(st.dictionaries(st.text("abcdef", min_size=1, max_size=3), st.sampled_from([0.1, 0.2, 0.3]), min_size=1),
       st.integers(1, 10))
def test_top_k_monotone_prefix(scores, k):
    ranks = _vector(scores)
    shorter, longer = top_k_by_rank(ranks, k), top_k_by_rank(ranks, k + 1)
    assert longer[:len(shorter)] == shorter
    assert shorter == rank_order(scores)[:k]
