"""
Graph helpers: adjacency matrices, dataset statistics, content hashes.
"""

import hashlib
from typing import Optional

import networkx as nx
import numpy as np
from scipy import sparse

from .errors import ConfigurationError
from .models import Dataset, DatasetStatistics, Graph


def adjacency_matrix(g: Graph) -> np.ndarray:
    """Dense symmetric 0/1 adjacency matrix with zero diagonal."""
    a = np.zeros((g.vertex_count, g.vertex_count), dtype=np.float64)
    if g.edges:
        rows, cols = np.array(g.sorted_edges()).T
        a[rows, cols] = 1.0
        a[cols, rows] = 1.0
    return a


def sparse_adjacency(g: Graph) -> sparse.csr_matrix:
    """CSR adjacency for BFS and degree counting on large graphs."""
    n = g.vertex_count
    if not g.edges:
        return sparse.csr_matrix((n, n), dtype=np.int64)
    rows, cols = np.array(g.sorted_edges()).T
    data = np.ones(2 * len(rows), dtype=np.int64)
    return sparse.csr_matrix(
        (data, (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n),
    )


def to_networkx(g: Graph) -> nx.Graph:
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.vertex_count))
    nxg.add_edges_from(g.sorted_edges())
    return nxg


def from_networkx(nxg: nx.Graph, label: int = 0, graph_id: int = 0) -> Graph:
    """Convert a networkx graph, relabelling nodes 0..n-1 in sorted order."""
    index = {node: k for k, node in enumerate(sorted(nxg.nodes()))}
    edges = ((index[u], index[v]) for u, v in nxg.edges() if u != v)
    return Graph.from_edges(len(index), edges, label=label, graph_id=graph_id)


def permute_graph(g: Graph, permutation) -> Graph:
    """Relabel vertex v as permutation[v]; label and graph_id are kept."""
    perm = list(permutation)
    edges = ((perm[u], perm[v]) for u, v in g.edges)
    return Graph.from_edges(g.vertex_count, edges, label=g.label, graph_id=g.graph_id)


def graph_content_hash(g: Graph) -> str:
    """SHA-256 of the canonical (vertex_count, sorted edges) encoding.

    Label and graph_id do not take part, so identical structures share
    cache records.
    """
    h = hashlib.sha256()
    h.update(f"n={g.vertex_count}\n".encode("ascii"))
    for u, v in g.sorted_edges():
        h.update(f"{u},{v}\n".encode("ascii"))
    return h.hexdigest()


def dataset_statistics(d: Dataset) -> DatasetStatistics:
    """Max/min/mean vertex counts, graph count and class count."""
    if len(d) == 0:
        raise ConfigurationError(f"dataset {d.name!r} is empty")
    sizes = np.array([g.vertex_count for g in d.graphs], dtype=np.int64)
    return DatasetStatistics(
        name=d.name,
        graph_count=len(d),
        class_count=d.class_count,
        max_vertices=int(sizes.max()),
        min_vertices=int(sizes.min()),
        mean_vertices=float(sizes.mean()),
    )


def random_connected_graph(n: int, edge_probability: float = 0.4,
                           seed: Optional[int] = None, graph_id: int = 0,
                           label: int = 0) -> Graph:
    """Sample G(n, p) until the result is connected."""
    rng = np.random.default_rng(seed)
    while True:
        nxg = nx.gnp_random_graph(n, edge_probability, seed=int(rng.integers(2**31)))
        if n == 1 or nx.is_connected(nxg):
            return from_networkx(nxg, label=label, graph_id=graph_id)


def complete_graph(n: int, graph_id: int = 0, label: int = 0) -> Graph:
    return from_networkx(nx.complete_graph(n), label=label, graph_id=graph_id)


def path_graph(n: int, graph_id: int = 0, label: int = 0) -> Graph:
    return from_networkx(nx.path_graph(n), label=label, graph_id=graph_id)


def cycle_graph(n: int, graph_id: int = 0, label: int = 0) -> Graph:
    return from_networkx(nx.cycle_graph(n), label=label, graph_id=graph_id)
