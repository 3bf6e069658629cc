"""Shared fixtures: small named graphs, dataset factories and benchmark data."""

import os
from pathlib import Path
from typing import Optional

import pytest

from src.dataset_loader import load_dataset
from src.graph_core import complete_graph, cycle_graph, path_graph
from src.models import Dataset, Graph


def benchmark_dir(name: str) -> Optional[Path]:
    """``$QGK_DATA_DIR/<name>`` if it holds the benchmark files, else None."""
    root = os.getenv("QGK_DATA_DIR")
    if not root:
        return None
    directory = Path(root) / name
    if not (directory / f"{name}_A.txt").is_file():
        return None
    return directory


def relabel(graphs, name="synthetic"):
    """Dataset with graph_ids reassigned to list positions."""
    graphs = tuple(
        Graph(vertex_count=g.vertex_count, edges=g.edges, label=g.label, graph_id=k)
        for k, g in enumerate(graphs)
    )
    return Dataset(graphs=graphs, name=name, class_count=len({g.label for g in graphs}))


@pytest.fixture
def make_dataset():
    """Factory fixture: ``make_dataset(graphs, name)``."""
    return relabel


@pytest.fixture
def k2():
    return complete_graph(2)


@pytest.fixture
def k3():
    return complete_graph(3)


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def isolated():
    return Graph.from_edges(1, [])


@pytest.fixture
def two_class_dataset():
    """Five triangles (label 1) and five 4-paths (label 2), interleaved."""
    graphs = []
    for _ in range(5):
        graphs.append(complete_graph(3, label=1))
        graphs.append(path_graph(4, label=2))
    return relabel(graphs, "TWOCLASS")


@pytest.fixture
def small_dataset():
    """A handful of mixed small graphs with two labels."""
    graphs = [
        path_graph(3, label=0), complete_graph(3, label=1), cycle_graph(5, label=0),
        path_graph(5, label=1), complete_graph(4, label=0), cycle_graph(4, label=1),
    ]
    return relabel(graphs, "SMALL")


def _benchmark(name):
    directory = benchmark_dir(name)
    if directory is None:
        pytest.skip(f"{name} benchmark files not found under $QGK_DATA_DIR")
    return load_dataset(directory, name)


@pytest.fixture(scope="session")
def mutag():
    return _benchmark("MUTAG")


@pytest.fixture(scope="session")
def shock():
    return _benchmark("Shock")
