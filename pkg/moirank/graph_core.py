# moirank/graph_core.py
"""
Social Graph and Influence Rank
Immutable undirected friendship graph plus the PageRank power iteration
that scores each account's position in it.
"""

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, List, Mapping, Sequence, Tuple

import networkx as nx
import numpy as np
import scipy.sparse as sp

from .errors import (
    DuplicateAccountIdError,
    EmptyGraphError,
    SelfLoopError,
    UnknownEndpointError,
)

_LOG = logging.getLogger("moirank.graph_core")

AccountId = str
Edge = Tuple[AccountId, AccountId]

DEFAULT_DAMPING = 0.85
DEFAULT_TOL = 1e-9
# Undamped ranking mixes slowly on long chains: a 50-node path at damping 1
# stays above DEFAULT_TOL after 1000 iterations, so such runs need a higher cap.
DEFAULT_MAX_ITER = 1000


def is_valid_account_id(value: object) -> bool:
    """Nonempty string token without whitespace."""
    return isinstance(value, str) and bool(value) and not any(ch.isspace() for ch in value)


def canonical_edge(a: AccountId, b: AccountId) -> Edge:
    """Order an undirected pair as (min, max)."""
    return (a, b) if a <= b else (b, a)


class SocialGraph:
    """
    Undirected simple graph over account ids.

    Wraps a frozen networkx graph; node order everywhere is ascending id.
    degree(u) is the out-link count of u, neighbors(u) its back-link set.
    """

    def __init__(self, graph: nx.Graph):
        self._graph = nx.freeze(nx.Graph(graph))
        self._nodes: Tuple[AccountId, ...] = tuple(sorted(graph.nodes))
        self._edges: Tuple[Edge, ...] = tuple(sorted(canonical_edge(a, b) for a, b in graph.edges))

    @property
    def nodes(self) -> Tuple[AccountId, ...]:
        return self._nodes

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    def neighbors(self, node: AccountId) -> Tuple[AccountId, ...]:
        return tuple(sorted(self._graph.neighbors(node)))

    def degree(self, node: AccountId) -> int:
        return self._graph.degree(node)

    def number_of_nodes(self) -> int:
        return len(self._nodes)

    def number_of_edges(self) -> int:
        return len(self._edges)

    def is_connected(self) -> bool:
        return bool(self._nodes) and nx.is_connected(self._graph)

    def is_bipartite(self) -> bool:
        return nx.is_bipartite(self._graph)

    def isolated_nodes(self) -> Tuple[AccountId, ...]:
        return tuple(n for n in self._nodes if self._graph.degree(n) == 0)

    def number_of_components(self) -> int:
        return nx.number_connected_components(self._graph)

    def density(self) -> float:
        return float(nx.density(self._graph))

    def average_clustering(self) -> float:
        if not self._nodes:
            return 0.0
        return float(nx.average_clustering(self._graph, nodes=self._nodes))

    def diameter(self) -> int:
        """Longest shortest path inside any connected component (0 without edges)."""
        return max(
            (nx.diameter(self._graph.subgraph(component)) for component in nx.connected_components(self._graph)),
            default=0,
        )

    def adjacency_matrix(self) -> sp.csr_array:
        """0/1 adjacency in ascending-id order with sorted column indices."""
        matrix = nx.to_scipy_sparse_array(
            self._graph, nodelist=list(self._nodes), dtype=float, weight=None, format="csr"
        )
        matrix.sort_indices()
        return matrix

    def __contains__(self, node: object) -> bool:
        return node in self._graph

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SocialGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    __hash__ = None

    def __repr__(self) -> str:
        return f"SocialGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"


@dataclass(frozen=True)
class RankVector:
    """Influence Rank scores; a stochastic vector over every graph node."""

    scores: Mapping[AccountId, float]
    iterations: int
    converged: bool
    residual: float
    damping: float = DEFAULT_DAMPING

    def total(self) -> float:
        return float(sum(self.scores.values()))

    def to_dict(self) -> dict:
        return {
            "scores": dict(self.scores),
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
            "damping": self.damping,
        }


def build_graph(accounts: Sequence[AccountId], edges: Iterable[Edge]) -> SocialGraph:
    """
    Build the friendship graph.

    Args:
        accounts: Unique account ids (isolated ones are kept)
        edges: Undirected pairs; reversed and repeated pairs collapse to one edge

    Returns:
        Immutable SocialGraph

    Raises:
        DuplicateAccountIdError: If an id is listed twice
        SelfLoopError: If an edge joins an account to itself
        UnknownEndpointError: If an edge references an unlisted account
    """
    graph = nx.Graph()
    for account in accounts:
        if account in graph:
            raise DuplicateAccountIdError(f"Account '{account}' listed more than once")
        graph.add_node(account)

    for index, (a, b) in enumerate(edges):
        if a == b:
            raise SelfLoopError(f"Edge #{index} ({a}, {b}) is a self-loop", record=(index, a, b))
        missing = [x for x in (a, b) if x not in graph]
        if missing:
            raise UnknownEndpointError(
                f"Edge #{index} ({a}, {b}) references unknown account(s): {', '.join(missing)}",
                record=(index, a, b),
            )
        graph.add_edge(a, b)

    _LOG.debug("Built graph with %d nodes and %d edges", graph.number_of_nodes(), graph.number_of_edges())
    return SocialGraph(graph)


def influence_rank(
    graph: SocialGraph,
    damping: float = DEFAULT_DAMPING,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RankVector:
    """
    Compute Influence Rank by power iteration from the uniform vector.

    PR'(u) = (1 - d)/N + d * (sum_{v in N(u)} PR(v)/deg(v) + dangling/N)

    Isolated nodes are dangling: their mass is spread uniformly each step.
    With damping == 1 the update is plain PageRank without teleportation; the
    iterate can oscillate with period 2 on bipartite components, so the mean
    of the last two iterates is tracked and returned instead.

    Args:
        graph: Social graph (nonempty)
        damping: Damping factor in [0, 1]
        tol: L1 change threshold (> 0)
        max_iter: Iteration cap (>= 1)

    Returns:
        RankVector; converged is False if max_iter was hit first

    Raises:
        EmptyGraphError: If the graph has no nodes
        ValueError: If a parameter is out of range
    """
    if graph.number_of_nodes() == 0:
        raise EmptyGraphError("Cannot rank an empty graph")
    if not 0.0 <= damping <= 1.0:
        raise ValueError(f"damping must be in [0, 1], got {damping}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")

    n = graph.number_of_nodes()
    adjacency = graph.adjacency_matrix()
    degree = np.asarray(adjacency.sum(axis=1)).ravel()
    dangling = degree == 0
    inv_degree = np.zeros(n)
    inv_degree[~dangling] = 1.0 / degree[~dangling]

    averaging = damping == 1.0
    teleport = (1.0 - damping) / n

    x = np.full(n, 1.0 / n)
    mean = x
    residual = float("inf")
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        # Row u of the symmetric adjacency sums neighbor shares in ascending id order.
        spread = adjacency @ (x * inv_degree)
        x_next = teleport + damping * (spread + x[dangling].sum() / n)

        if averaging:
            mean_next = 0.5 * (x_next + x)
            residual = float(np.abs(mean_next - mean).sum())
            mean = mean_next
        else:
            residual = float(np.abs(x_next - x).sum())
        x = x_next

        if residual < tol:
            converged = True
            break

    result = mean if averaging else x
    result = result / result.sum()

    if converged:
        _LOG.debug("Influence rank converged after %d iterations (residual=%.3e)", iterations, residual)
    else:
        _LOG.warning(
            "Influence rank did not converge in %d iterations (residual=%.3e, tol=%.1e)",
            max_iter, residual, tol,
        )

    scores = MappingProxyType({node: float(result[i]) for i, node in enumerate(graph.nodes)})
    return RankVector(
        scores=scores,
        iterations=iterations,
        converged=converged,
        residual=residual,
        damping=damping,
    )


def rank_order(scores: Mapping[AccountId, float]) -> List[Tuple[AccountId, float]]:
    """Descending by score, ties by ascending id."""
    return sorted(scores.items(), key=lambda item: (-item[1], item[0]))


def top_k_by_rank(ranks: RankVector, k: int) -> List[Tuple[AccountId, float]]:
    """
    Return the k highest-ranked accounts; the first is the opinion leader.

    Raises:
        ValueError: If k < 1
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return rank_order(ranks.scores)[:k]
