"""
Depth-based vertex representations.

For a root vertex and a layer h, the h-layer expansion subgraph is induced
on every vertex within shortest-path distance h of the root. Its classical
steady-state random-walk entropy, taken for h = 1..H, forms the root's
H-dimensional depth representation. The neighbourhood size at layer h
counts vertices at distance 1..h, so it excludes the root itself.
"""

import math
from typing import List

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import shortest_path
from scipy.special import entr

from .errors import ContractViolation
from .graph_core import sparse_adjacency, to_networkx
from .models import DepthRepresentation, Graph

ROOT_BLOCK = 256


def bfs_distances(g: Graph, root: int) -> List[float]:
    """Hop distances from ``root``; unreachable vertices are ``math.inf``."""
    if not 0 <= root < g.vertex_count:
        raise ContractViolation(f"root {root} outside [0, {g.vertex_count})")
    lengths = nx.single_source_shortest_path_length(to_networkx(g), root)
    return [float(lengths[v]) if v in lengths else math.inf for v in range(g.vertex_count)]


def distance_matrix(g: Graph) -> np.ndarray:
    """All-pairs hop distances (float, ``inf`` across components)."""
    return shortest_path(sparse_adjacency(g), directed=False, unweighted=True)


def eccentricities(g: Graph) -> np.ndarray:
    """Largest finite distance from each vertex, i.e. within its component."""
    dist = distance_matrix(g)
    finite = np.where(np.isfinite(dist), dist, -1.0)
    return finite.max(axis=1).astype(np.int64)


def expansion_subgraph(g: Graph, root: int, layer: int) -> Graph:
    """Subgraph induced on vertices within ``layer`` hops of ``root``.

    Vertices keep their relative order and are relabelled 0..m-1.
    """
    if layer < 1:
        raise ContractViolation(f"layer must be >= 1, got {layer}")
    dist = bfs_distances(g, root)
    kept = [v for v in range(g.vertex_count) if dist[v] <= layer]
    index = {v: k for k, v in enumerate(kept)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    return Graph.from_edges(len(kept), edges, label=g.label, graph_id=g.graph_id)


def _degree_entropy(degrees: np.ndarray) -> float:
    total = degrees.sum()
    if total == 0:
        return 0.0
    return float(entr(degrees / total).sum())


def steady_state_entropy(s: Graph) -> float:
    """Shannon entropy (nats) of the degree-proportional stationary distribution.

    A subgraph without edges has entropy 0.
    """
    return _degree_entropy(s.degrees())


def depth_representation(g: Graph, levels: int) -> DepthRepresentation:
    """Depth representation of every vertex for layers 1..levels.

    Once a layer stops adding vertices the subgraph is unchanged, so the
    previous value is carried forward and the tail is exactly constant.
    """
    if levels < 1:
        raise ContractViolation(f"levels must be >= 1, got {levels}")
    n = g.vertex_count
    adj = sparse_adjacency(g)
    values = np.zeros((n, levels), dtype=np.float64)
    sizes = np.zeros((n, levels), dtype=np.int64)

    for start in range(0, n, ROOT_BLOCK):
        roots = np.arange(start, min(start + ROOT_BLOCK, n))
        dist = np.atleast_2d(shortest_path(adj, directed=False, unweighted=True, indices=roots))
        for row, root in enumerate(roots):
            d = dist[row]
            previous_count = -1
            for layer in range(1, levels + 1):
                mask = d <= layer
                count = int(mask.sum())
                sizes[root, layer - 1] = count - 1
                if count == previous_count:
                    values[root, layer - 1] = values[root, layer - 2]
                    continue
                previous_count = count
                inside = adj @ mask.astype(np.int64)
                values[root, layer - 1] = _degree_entropy(inside[mask])
    return DepthRepresentation(values=values, neighborhood_sizes=sizes)
