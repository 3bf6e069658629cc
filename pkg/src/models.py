"""
Data models for the graph-kernel toolkit.

This module defines the data structures shared by every pipeline stage.
All models are dataclasses; the ones describing inputs (graphs, datasets)
are frozen so they can be handed to worker processes without copying
concerns.

These models represent:
- Graphs and datasets
- Spectral decompositions, averaged mixing matrices and vertex entropies
- Depth-based vertex representations and per-graph feature bundles
- Affinity and correspondence matrices between graph pairs
- Kernel configuration, Gram matrices and cross-validation reports
- CLI run configuration
"""

import base64
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from .errors import ConfigurationError, GraphValidationError


@dataclass(frozen=True)
class Graph:
    """An undirected, unweighted simple graph with a class label.

    Edges are stored as ``(u, v)`` pairs with ``u < v``; use
    :meth:`from_edges` to build a graph from arbitrary pairs.
    """
    vertex_count: int                       # number of vertices, indices 0..vertex_count-1
    edges: FrozenSet[Tuple[int, int]]       # undirected edges, each stored as (min, max)
    label: int = 0                          # class id as read from the labels file
    graph_id: int = 0                       # position within the owning dataset

    def __post_init__(self):
        if self.vertex_count < 1:
            raise GraphValidationError(
                f"graph {self.graph_id}: vertex_count must be positive, got {self.vertex_count}"
            )
        for u, v in self.edges:
            if u == v:
                raise GraphValidationError(f"graph {self.graph_id}: self-loop at vertex {u}")
            if u > v:
                raise GraphValidationError(
                    f"graph {self.graph_id}: edge ({u}, {v}) not in canonical (min, max) order"
                )
            if u < 0 or v >= self.vertex_count:
                raise GraphValidationError(
                    f"graph {self.graph_id}: edge ({u}, {v}) outside [0, {self.vertex_count})"
                )

    @classmethod
    def from_edges(cls, vertex_count: int, edges, label: int = 0,
                   graph_id: int = 0) -> "Graph":
        """Build a graph from any iterable of vertex pairs (duplicates merged)."""
        canonical = frozenset((min(u, v), max(u, v)) for u, v in edges)
        return cls(vertex_count=vertex_count, edges=canonical, label=label, graph_id=graph_id)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> List[Tuple[int, int]]:
        return sorted(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.vertex_count, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of graphs; graph_ids are 0..n-1 in list order."""
    graphs: Tuple[Graph, ...]
    name: str
    class_count: int

    def __post_init__(self):
        for position, graph in enumerate(self.graphs):
            if graph.graph_id != position:
                raise GraphValidationError(
                    f"dataset {self.name}: graph at position {position} has graph_id {graph.graph_id}"
                )

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def labels(self) -> Tuple[int, ...]:
        return tuple(g.label for g in self.graphs)


@dataclass(frozen=True)
class DatasetStatistics:
    """Summary row in the style of a benchmark statistics table."""
    name: str
    graph_count: int
    class_count: int
    max_vertices: int
    min_vertices: int
    mean_vertices: float

    def as_rows(self) -> List[Tuple[str, str]]:
        return [
            ("Dataset", self.name),
            ("Max # vertices", str(self.max_vertices)),
            ("Min # vertices", str(self.min_vertices)),
            ("Mean # vertices", f"{self.mean_vertices:.2f}"),
            ("# graphs", str(self.graph_count)),
            ("# classes", str(self.class_count)),
        ]


@dataclass(frozen=True)
class Eigenpairs:
    """Eigenvalues (descending) and matching orthonormal eigenvector columns."""
    values: np.ndarray                      # shape (n,)
    vectors: np.ndarray                     # shape (n, n); column k pairs with values[k]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues of a symmetric matrix and their eigenspaces.

    Each eigenspace is kept as an orthonormal basis ``B_j`` (n x m_j); the
    projector ``P_j = B_j B_j^T`` is built on demand so that large graphs
    never hold every projector in memory at once.
    """
    distinct_eigenvalues: Tuple[float, ...]
    bases: Tuple[np.ndarray, ...]

    @property
    def multiplicities(self) -> List[int]:
        return [b.shape[1] for b in self.bases]

    @property
    def dimension(self) -> int:
        return self.bases[0].shape[0] if self.bases else 0

    def projector(self, j: int) -> np.ndarray:
        basis = self.bases[j]
        return basis @ basis.T

    @property
    def projectors(self) -> List[np.ndarray]:
        return [self.projector(j) for j in range(len(self.bases))]


@dataclass(frozen=True)
class AmmMatrix:
    """Averaged mixing matrix of the continuous-time quantum walk."""
    q: np.ndarray                           # doubly stochastic, symmetric


@dataclass(frozen=True)
class VertexEntropyProfile:
    """Quantum Shannon entropy (nats) of each row of the averaged mixing matrix."""
    entropies: np.ndarray

    def __len__(self) -> int:
        return len(self.entropies)

    def __getitem__(self, index):
        return self.entropies[index]


@dataclass(frozen=True)
class DepthRepresentation:
    """Depth-based vertex representations over layers 1..H.

    Column ``h-1`` holds layer ``h``: ``values`` is the steady-state random
    walk entropy of the h-layer expansion subgraph, ``neighborhood_sizes``
    the number of vertices at distance 1..h from the root.
    """
    values: np.ndarray                      # float, shape (n, H)
    neighborhood_sizes: np.ndarray          # int, shape (n, H)

    @property
    def levels(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class GraphFeatures:
    """Everything the kernels need about one graph."""
    graph_id: int
    vertex_count: int
    content_hash: str                       # SHA-256 of the canonical edge encoding
    amm: np.ndarray                         # Q, shape (n, n)
    entropies: np.ndarray                   # H_Q(v), shape (n,)
    depth: DepthRepresentation

    @property
    def levels(self) -> int:
        return self.depth.levels


@dataclass(frozen=True)
class AffinityMatrix:
    """Euclidean distances between depth-representation prefixes of two graphs."""
    r: np.ndarray                           # shape (|V_p|, |V_q|)
    level: int


@dataclass(frozen=True)
class CorrespondenceLevel:
    """One level of a correspondence set, stored sparsely."""
    level: int
    pairs: Tuple[Tuple[int, int], ...]      # aligned (i, j) in acceptance order
    entropic: Tuple[float, ...]             # C_E value for each pair
    shape: Tuple[int, int]

    def binary_matrix(self) -> np.ndarray:
        c = np.zeros(self.shape, dtype=np.int8)
        for i, j in self.pairs:
            c[i, j] = 1
        return c

    def entropic_matrix(self) -> np.ndarray:
        ce = np.zeros(self.shape, dtype=np.float64)
        for (i, j), value in zip(self.pairs, self.entropic):
            ce[i, j] = value
        return ce


@dataclass(frozen=True)
class CorrespondenceSet:
    """Binary and entropic correspondence matrices for levels 1..H."""
    graph_ids: Tuple[int, int]
    levels: Tuple[CorrespondenceLevel, ...]


KERNEL_KINDS = ("AERK", "DBMK", "RGK")


@dataclass(frozen=True)
class KernelConfig:
    """Which kernel to compute and how."""
    kind: str = "AERK"
    levels: int = 10                        # H; 10 is the reference setting
    seed: int = 42
    normalize: bool = False
    log_base: str = "e"                     # fixed: entropies are in nats

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ConfigurationError(f"unknown kernel kind {self.kind!r}; expected one of {KERNEL_KINDS}")
        if self.levels < 1:
            raise ConfigurationError(f"H must be >= 1, got {self.levels}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        if self.log_base != "e":
            raise ConfigurationError("only natural-log entropies are supported")

    def header(self) -> str:
        return (f"kernel={self.kind} H={self.levels} seed={self.seed} "
                f"normalize={str(self.normalize).lower()}")


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric kernel matrix over a dataset, with provenance."""
    k: np.ndarray
    config: KernelConfig
    dataset_name: str
    labels: Tuple[int, ...]

    @property
    def size(self) -> int:
        return self.k.shape[0]


@dataclass
class CvReport:
    """Result of one stratified cross-validation run."""
    fold_accuracies: List[float]
    mean_accuracy: float
    std_error: float
    config: Dict[str, str] = field(default_factory=dict)   # echo of kernel + CV settings


@dataclass
class RepeatedCvReport:
    """Several cross-validation runs with consecutive seeds."""
    runs: List[CvReport]
    mean_accuracy: float
    std_error: float
    config: Dict[str, str] = field(default_factory=dict)


DEFAULT_CACHE_DIR = Path.home() / ".qgk_cache"


@dataclass
class RunConfig:
    """Everything a CLI invocation needs."""
    command: str
    dataset_path: Optional[Path] = None
    name: Optional[str] = None
    kernel: str = "AERK"
    levels: int = 10
    seed: int = 42
    normalize: bool = False
    folds: int = 10
    neighbors: int = 1
    repeats: int = 1
    output: Optional[Path] = None
    export_format: str = "csv"
    cache_dir: Optional[Path] = None
    use_cache: bool = True
    threads: Optional[int] = None
    dump_pair: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if self.cache_dir is None:
            env_dir = os.getenv("QGK_CACHE_DIR")
            self.cache_dir = Path(env_dir) if env_dir else DEFAULT_CACHE_DIR
        if self.threads is None:
            self.threads = os.cpu_count() or 1

    def kernel_config(self) -> KernelConfig:
        return KernelConfig(kind=self.kernel.upper(), levels=self.levels,
                            seed=self.seed, normalize=self.normalize)


# Serialization helpers for the feature cache

def serialize_array(a: np.ndarray) -> dict:
    """Encode an array as dtype, shape and base64 little-endian bytes."""
    a = np.ascontiguousarray(a)
    dtype = a.dtype.newbyteorder("<")
    return {
        "dtype": dtype.str,
        "shape": list(a.shape),
        "data": base64.b64encode(a.astype(dtype, copy=False).tobytes()).decode("ascii"),
    }


def deserialize_array(d: dict) -> np.ndarray:
    """Decode an array produced by :func:`serialize_array` (bit-exact)."""
    raw = base64.b64decode(d["data"].encode("ascii"))
    a = np.frombuffer(raw, dtype=np.dtype(d["dtype"]))
    return a.reshape(d["shape"]).astype(a.dtype.newbyteorder("="), copy=True)
