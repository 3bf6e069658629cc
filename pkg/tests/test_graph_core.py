"""Unit tests for graph helpers."""

import networkx as nx
import numpy as np
import pytest

from src.errors import ConfigurationError
from src.graph_core import (
    adjacency_matrix, dataset_statistics, from_networkx, graph_content_hash,
    permute_graph, random_connected_graph, sparse_adjacency, to_networkx,
)
from src.models import Graph


def test_adjacency_matrix(k2, k3):
    """Test dense adjacency matrices of small graphs."""
    assert adjacency_matrix(k2).tolist() == [[0, 1], [1, 0]]
    assert np.array_equal(adjacency_matrix(k3), np.ones((3, 3)) - np.eye(3))
    assert not adjacency_matrix(Graph.from_edges(4, [])).any()


def test_sparse_matches_dense(p3):
    """Test that sparse and dense adjacency agree."""
    assert np.array_equal(sparse_adjacency(p3).toarray(), adjacency_matrix(p3))


def test_networkx_conversion(p3):
    """Test conversion to and from networkx."""
    nxg = to_networkx(p3)
    assert sorted(nxg.edges()) == [(0, 1), (1, 2)]
    back = from_networkx(nx.relabel_nodes(nxg, {0: "a", 1: "b", 2: "c"}), label=4, graph_id=2)
    assert back.edges == p3.edges
    assert (back.label, back.graph_id) == (4, 2)


def test_content_hash_ignores_label_and_id():
    """Test that the content hash depends on structure only."""
    a = Graph.from_edges(3, [(0, 1), (1, 2)], label=1, graph_id=0)
    b = Graph.from_edges(3, [(2, 1), (1, 0)], label=2, graph_id=7)
    c = Graph.from_edges(3, [(0, 1), (0, 2)])
    assert graph_content_hash(a) == graph_content_hash(b)
    assert graph_content_hash(a) != graph_content_hash(c)
    assert len(graph_content_hash(a)) == 64


def test_permute_graph(p3):
    """Test vertex relabelling."""
    moved = permute_graph(p3, [1, 0, 2])
    assert moved.edges == frozenset({(0, 1), (0, 2)})
    assert moved.degrees().tolist() == [2, 1, 1]


def test_dataset_statistics(make_dataset):
    """Test dataset statistics."""
    d = make_dataset([Graph.from_edges(3, []), Graph.from_edges(5, [])])
    stats = dataset_statistics(d)
    assert (stats.max_vertices, stats.min_vertices, stats.mean_vertices) == (5, 3, 4.0)
    assert stats.graph_count == 2

    single = dataset_statistics(make_dataset([Graph.from_edges(6, [])]))
    assert single.max_vertices == single.min_vertices == single.mean_vertices == 6


def test_dataset_statistics_empty(make_dataset):
    """Test that statistics of an empty dataset are rejected."""
    with pytest.raises(ConfigurationError):
        dataset_statistics(make_dataset([]))


def test_random_connected_graph():
    """Test that sampled graphs are connected and reproducible."""
    for seed in range(10):
        g = random_connected_graph(7, 0.3, seed=seed)
        assert nx.is_connected(to_networkx(g))
    assert random_connected_graph(6, seed=3).edges == random_connected_graph(6, seed=3).edges
