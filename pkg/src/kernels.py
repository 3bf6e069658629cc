"""
Pairwise graph kernels and Gram matrix assembly.

- AERK sums, over levels 1..H and all aligned vertex pairs, the basic
  reproducing kernel between the two vertices' quantum entropies.
- DBMK counts aligned vertex pairs at one level (no neighbourhood guard).
- RGK applies the basic reproducing kernel to a degree-based approximation
  of each graph's von Neumann entropy.

The Gram matrix is computed once per unordered pair and mirrored, so it is
symmetric bit for bit. No positive-semidefinite repair is applied.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .alignment import (
    affinity, brk, correspondence_level, pair_seed, raw_matches, resolve_conflicts,
)
from .cache import FeatureCache
from .errors import ConfigurationError, ContractViolation, KernelError
from .features import extract_features
from .models import Dataset, Graph, GraphFeatures, GramMatrix, KernelConfig

logger = logging.getLogger(__name__)

__all__ = [
    "brk", "approximate_von_neumann_entropy", "rgk_pair", "dbmk_pair",
    "aerk_level_contributions", "aerk_pair", "gram", "normalize_gram",
    "most_negative_eigenvalue", "export_gram", "read_gram_csv",
]

EXPORT_FORMATS = ("csv", "svm")
PAIR_CHUNK = 64


def approximate_von_neumann_entropy(g: Graph) -> float:
    """``1 - 1/|V| - (1/|V|^2) * sum over edges of 1/(deg u * deg v)``."""
    n = g.vertex_count
    degrees = g.degrees()
    edge_terms = math.fsum(1.0 / (int(degrees[u]) * int(degrees[v])) for u, v in g.sorted_edges())
    return 1.0 - 1.0 / n - edge_terms / (n * n)


def rgk_pair(gp: Graph, gq: Graph) -> float:
    return brk(approximate_von_neumann_entropy(gp), approximate_von_neumann_entropy(gq))


def _ordered(fp: GraphFeatures, fq: GraphFeatures) -> Tuple[GraphFeatures, GraphFeatures]:
    return (fq, fp) if fq.graph_id < fp.graph_id else (fp, fq)


def dbmk_pair(fp: GraphFeatures, fq: GraphFeatures, h: int, seed: int) -> int:
    """Number of aligned vertex pairs at level ``h``.

    Unlike AERK, rows and columns with empty neighbourhoods are not
    excluded, so two single-vertex graphs align once.
    """
    fp, fq = _ordered(fp, fq)
    r = affinity(h, fp.depth, fq.depth)
    candidates = raw_matches(r)
    return len(resolve_conflicts(candidates, r, pair_seed(seed, fp.graph_id, fq.graph_id, h)))


def aerk_level_contributions(fp: GraphFeatures, fq: GraphFeatures,
                             cfg: KernelConfig) -> List[float]:
    """Sum of the entropic correspondence at each level 1..H."""
    if min(fp.levels, fq.levels) < cfg.levels:
        raise ContractViolation(
            f"features hold {min(fp.levels, fq.levels)} levels, kernel needs {cfg.levels}"
        )
    fp, fq = _ordered(fp, fq)
    return [
        math.fsum(correspondence_level(fp, fq, h, cfg.seed).entropic)
        for h in range(1, cfg.levels + 1)
    ]


def aerk_pair(fp: GraphFeatures, fq: GraphFeatures, cfg: KernelConfig) -> float:
    """AERK value; operands are ordered by graph_id so aerk(p, q) == aerk(q, p)."""
    return math.fsum(aerk_level_contributions(fp, fq, cfg))


def _pair_value(features: Sequence[GraphFeatures], cfg: KernelConfig, i: int, j: int) -> float:
    if cfg.kind == "AERK":
        return aerk_pair(features[i], features[j], cfg)
    return float(dbmk_pair(features[i], features[j], cfg.levels, cfg.seed))


# Worker state, set once per process by the pool initializer
_worker_features: Optional[Sequence[GraphFeatures]] = None
_worker_config: Optional[KernelConfig] = None


def _init_worker(features: Sequence[GraphFeatures], cfg: KernelConfig):
    global _worker_features, _worker_config
    _worker_features = features
    _worker_config = cfg


def _evaluate_chunk(chunk: Sequence[Tuple[int, int]]) -> List[float]:
    return [_pair_value(_worker_features, _worker_config, i, j) for i, j in chunk]


def _rgk_matrix(dataset: Dataset) -> np.ndarray:
    entropies = [approximate_von_neumann_entropy(g) for g in dataset.graphs]
    n = len(entropies)
    k = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i, n):
            k[i, j] = k[j, i] = brk(entropies[i], entropies[j])
    return k


def _matching_matrix(features: Sequence[GraphFeatures], cfg: KernelConfig,
                     threads: int) -> np.ndarray:
    n = len(features)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    chunks = [pairs[s:s + PAIR_CHUNK] for s in range(0, len(pairs), PAIR_CHUNK)]

    if threads > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(chunks)),
                                 initializer=_init_worker,
                                 initargs=(features, cfg)) as pool:
            values = list(pool.map(_evaluate_chunk, chunks))
    else:
        values = [[_pair_value(features, cfg, i, j) for i, j in chunk] for chunk in chunks]

    k = np.zeros((n, n), dtype=np.float64)
    for chunk, chunk_values in zip(chunks, values):
        for (i, j), value in zip(chunk, chunk_values):
            k[i, j] = k[j, i] = value
    return k


def normalize_gram(k: np.ndarray) -> np.ndarray:
    """``k(p, q) / sqrt(k(p, p) * k(q, q))``.

    Raises:
        KernelError: If a self-kernel is not positive
    """
    diagonal = np.diag(k).copy()
    bad = np.flatnonzero(diagonal <= 0.0)
    if bad.size:
        raise KernelError(
            f"cannot normalize: self-kernel of graph {int(bad[0])} is {diagonal[bad[0]]!r}"
        )
    return k / np.sqrt(np.outer(diagonal, diagonal))


def gram(dataset: Dataset, cfg: KernelConfig,
         features: Optional[Sequence[GraphFeatures]] = None,
         threads: int = 1, cache: Optional[FeatureCache] = None) -> GramMatrix:
    """Kernel matrix over ``dataset``.

    Args:
        dataset: Graphs to compare
        cfg: Kernel kind, levels, seed and normalization
        features: Precomputed features (AERK/DBMK); extracted when omitted
        threads: Worker processes for extraction and pair evaluation
        cache: Feature cache used when features are extracted here

    Returns:
        GramMatrix, identical for every ``threads`` value

    Raises:
        KernelError: If normalization meets a zero self-kernel
    """
    if threads < 1:
        raise ConfigurationError(f"threads must be >= 1, got {threads}")
    if cfg.kind == "RGK":
        k = _rgk_matrix(dataset)
    else:
        if features is None:
            features, _ = extract_features(dataset, cfg.levels, cache, threads)
        if len(features) != len(dataset):
            raise ContractViolation(f"{len(features)} feature bundles for {len(dataset)} graphs")
        k = _matching_matrix(features, cfg, threads)

    if cfg.normalize:
        k = normalize_gram(k)
    logger.info("%s: %s Gram matrix %dx%d", dataset.name, cfg.kind, k.shape[0], k.shape[1])
    return GramMatrix(k=k, config=cfg, dataset_name=dataset.name, labels=dataset.labels)


def most_negative_eigenvalue(g: Union[GramMatrix, np.ndarray]) -> float:
    """Smallest eigenvalue of the Gram matrix (diagnostic only)."""
    k = g.k if isinstance(g, GramMatrix) else np.asarray(g, dtype=np.float64)
    if k.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(k)[0])


def _format_value(x: float) -> str:
    return np.format_float_positional(float(x), unique=True, trim="-")


def export_gram(g: GramMatrix, format: str, path) -> Path:
    """Write the Gram matrix as ``csv`` or libsvm precomputed-kernel ``svm``.

    csv: a ``# kernel=... H=... seed=... normalize=...`` header, then one
    comma-separated row per graph. svm: ``<label> 0:<row> 1:<k> ... n:<k>``.
    Values use the shortest repr that parses back to the same double.
    """
    if format == "svm-precomputed":
        format = "svm"
    if format not in EXPORT_FORMATS:
        raise ConfigurationError(f"unknown export format {format!r}; expected one of {EXPORT_FORMATS}")
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        if format == "csv":
            f.write(f"# {g.config.header()}\n")
            for row in g.k:
                f.write(",".join(_format_value(x) for x in row) + "\n")
        else:
            for i, (label, row) in enumerate(zip(g.labels, g.k)):
                cells = " ".join(f"{j + 1}:{_format_value(x)}" for j, x in enumerate(row))
                f.write(f"{label} 0:{i + 1} {cells}\n")
    return path


def read_gram_csv(path) -> np.ndarray:
    """Read a csv export back into a matrix."""
    return np.loadtxt(path, comments="#", delimiter=",", ndmin=2, dtype=np.float64)
