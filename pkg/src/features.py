"""
Per-graph feature bundles.

A GraphFeatures bundle holds everything the kernels read about one graph:
the averaged mixing matrix, the vertex quantum entropies and the depth
representation. Extraction runs one task per graph in a process pool and
consults the feature cache first.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .cache import CorruptRecordError, FeatureCache
from .depth_features import depth_representation
from .graph_core import adjacency_matrix, graph_content_hash
from .models import Dataset, Graph, GraphFeatures
from .spectral import amm_matrix, spectral_decomposition, vertex_entropies

logger = logging.getLogger(__name__)


@dataclass
class ExtractionSummary:
    """What extract_features did for one dataset."""
    graph_count: int = 0
    computed: int = 0
    cache_hits: int = 0
    recomputed_corrupt: int = 0
    elapsed_seconds: float = 0.0
    corrupt_graph_ids: List[int] = field(default_factory=list)


def compute_features(g: Graph, levels: int) -> GraphFeatures:
    """Compute Q, vertex entropies and the depth representation of ``g``."""
    sd = spectral_decomposition(adjacency_matrix(g))
    amm = amm_matrix(sd)
    entropies = vertex_entropies(amm)
    return GraphFeatures(
        graph_id=g.graph_id,
        vertex_count=g.vertex_count,
        content_hash=graph_content_hash(g),
        amm=amm.q,
        entropies=entropies.entropies,
        depth=depth_representation(g, levels),
    )


def _compute_task(args: Tuple[Graph, int]) -> GraphFeatures:
    g, levels = args
    return compute_features(g, levels)


def extract_features(dataset: Dataset, levels: int,
                     cache: Optional[FeatureCache] = None,
                     threads: int = 1) -> Tuple[List[GraphFeatures], ExtractionSummary]:
    """Features for every graph of ``dataset``, in graph_id order.

    Args:
        dataset: Dataset to process
        levels: Depth levels H
        cache: Feature cache, or None to compute everything
        threads: Worker processes; 1 computes in the calling process

    Returns:
        (features, summary)
    """
    start = time.perf_counter()
    summary = ExtractionSummary(graph_count=len(dataset))
    results: List[Optional[GraphFeatures]] = [None] * len(dataset)
    pending: List[Graph] = []

    for g in dataset.graphs:
        if cache is None:
            pending.append(g)
            continue
        try:
            hit = cache.lookup(graph_content_hash(g), levels, g.graph_id)
        except CorruptRecordError as e:
            logger.warning("graph %d: corrupted cache record (%s), recomputing", g.graph_id, e)
            summary.recomputed_corrupt += 1
            summary.corrupt_graph_ids.append(g.graph_id)
            hit = None
        if hit is None:
            pending.append(g)
        else:
            results[g.graph_id] = hit
            summary.cache_hits += 1

    logger.debug("%s: %d cache hits, %d graphs to compute",
                 dataset.name, summary.cache_hits, len(pending))

    if pending:
        tasks = [(g, levels) for g in pending]
        if threads > 1 and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=min(threads, len(pending))) as pool:
                computed = list(pool.map(_compute_task, tasks, chunksize=8))
        else:
            computed = [_compute_task(t) for t in tasks]
        for features in computed:
            results[features.graph_id] = features
            if cache is not None:
                cache.store(features)
        summary.computed = len(computed)

    summary.elapsed_seconds = time.perf_counter() - start
    return results, summary
