"""Shared fixtures: bundled dataset paths, small graphs and a dense PageRank oracle."""

import itertools
import json
import shutil
import sys
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pytest
from hypothesis import strategies as st

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from moirank.ingest import ACCOUNTS_FILE, EDGES_FILE, POSTS_FILE, load_dataset

ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = ROOT / "data" / "telco65"
HUB = "telkomsel"


@pytest.fixture
def fixture_paths() -> Tuple[Path, Path, Path]:
    return FIXTURE_DIR / ACCOUNTS_FILE, FIXTURE_DIR / EDGES_FILE, FIXTURE_DIR / POSTS_FILE


@pytest.fixture(scope="session")
def telco65():
    dataset, report = load_dataset(
        FIXTURE_DIR / ACCOUNTS_FILE, FIXTURE_DIR / EDGES_FILE, FIXTURE_DIR / POSTS_FILE
    )
    assert report.ok, report.generate_report()
    return dataset


@pytest.fixture
def fixture_copy(tmp_path) -> Path:
    """Writable copy of the bundled dataset."""
    target = tmp_path / "telco65"
    shutil.copytree(FIXTURE_DIR, target)
    return target


def write_dataset(
    directory: Path,
    accounts: Iterable[Sequence],
    edges: Iterable[Sequence] = (),
    posts: Iterable[Dict] = (),
) -> Tuple[Path, Path, Path]:
    """Write the three input files from plain rows and post dicts."""
    directory.mkdir(parents=True, exist_ok=True)
    accounts_path = directory / ACCOUNTS_FILE
    edges_path = directory / EDGES_FILE
    posts_path = directory / POSTS_FILE
    accounts_path.write_text(
        "id,handle,category,follower_count\n" + "".join(",".join(map(str, r)) + "\n" for r in accounts),
        encoding="utf-8",
    )
    edges_path.write_text("src,dst\n" + "".join(f"{a},{b}\n" for a, b in edges), encoding="utf-8")
    posts_path.write_text("".join(json.dumps(p) + "\n" for p in posts), encoding="utf-8")
    return accounts_path, edges_path, posts_path


def dense_pagerank(nodes: Sequence[str], edges: Iterable[Tuple[str, str]], damping: float,
                   iterations: int = 1000) -> Dict[str, float]:
    """Independent oracle: dense Google matrix, dangling columns uniform."""
    order = sorted(nodes)
    index = {node: i for i, node in enumerate(order)}
    n = len(order)
    adjacency = np.zeros((n, n))
    for a, b in edges:
        adjacency[index[a], index[b]] = 1.0
        adjacency[index[b], index[a]] = 1.0
    degree = adjacency.sum(axis=0)
    safe = np.where(degree > 0, degree, 1.0)
    transition = np.where(degree[None, :] > 0, adjacency / safe[None, :], 1.0 / n)
    google = damping * transition + (1.0 - damping) / n
    x = np.full(n, 1.0 / n)
    for _ in range(iterations):
        x = google @ x
    return {node: float(x[index[node]]) for node in order}


@st.composite
def random_graphs(draw, min_nodes: int = 1, max_nodes: int = 10):
    """(nodes, edges) with random density; may be disconnected or have isolated nodes."""
    n = draw(st.integers(min_nodes, max_nodes))
    nodes = [f"n{i:02d}" for i in range(n)]
    pairs = list(itertools.combinations(nodes, 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return nodes, [p for p, keep in zip(pairs, mask) if keep]


@st.composite
def connected_graphs(draw, min_nodes: int = 2, max_nodes: int = 50):
    """Random spanning tree plus random extra edges; trees make some samples bipartite."""
    n = draw(st.integers(min_nodes, max_nodes))
    nodes = [f"v{i:02d}" for i in range(n)]
    edges = set()
    for i in range(1, n):
        parent = draw(st.integers(0, i - 1))
        edges.add((nodes[parent], nodes[i]))
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    for a, b in extra:
        if a != b:
            edges.add((nodes[min(a, b)], nodes[max(a, b)]))
    return nodes, sorted(edges)


def degree_distribution(nodes: List[str], edges: List[Tuple[str, str]]) -> Dict[str, float]:
    degree = {node: 0 for node in nodes}
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    return {node: d / (2 * len(edges)) for node, d in degree.items()}
