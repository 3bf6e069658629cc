"""
Vertex alignment between two graphs.

For each level h the depth representations (truncated to their first h
columns) give an affinity matrix of Euclidean distances. A vertex pair is a
candidate when its distance is minimal in both its row and its column and
both roots have a non-empty h-neighbourhood. Candidates that share a row or
column are resolved greedily in (distance, seeded key) order, so each vertex
is aligned to at most one vertex. The entropic correspondence weights every
aligned pair by the basic reproducing kernel of the two quantum entropies.

Seeding: the generator for level h of a pair is
``default_rng([seed, min(id_p, id_q), max(id_p, id_q), h])``, so results do
not depend on evaluation order or worker scheduling.
"""

import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ContractViolation
from .models import (
    AffinityMatrix, CorrespondenceLevel, CorrespondenceSet,
    DepthRepresentation, GraphFeatures,
)

Pair = Tuple[int, int]


def brk(a: float, b: float) -> float:
    """Basic reproducing kernel ``0.5 * exp(-|a - b|)``."""
    return 0.5 * math.exp(-abs(float(a) - float(b)))


def pair_seed(seed: int, id_p: int, id_q: int, level: int) -> List[int]:
    """Entropy key for the tiebreak generator of one (pair, level)."""
    return [int(seed), min(int(id_p), int(id_q)), max(int(id_p), int(id_q)), int(level)]


def affinity(level: int, dp: DepthRepresentation, dq: DepthRepresentation) -> AffinityMatrix:
    """Distances between the first ``level`` depth columns of every vertex pair."""
    if not 1 <= level <= min(dp.levels, dq.levels):
        raise ContractViolation(
            f"level {level} outside 1..{min(dp.levels, dq.levels)} of the representations"
        )
    r = np.zeros((dp.values.shape[0], dq.values.shape[0]), dtype=np.float64)
    # Column by column, so the rounding matches a per-entry running sum
    for k in range(level):
        d = dp.values[:, k][:, None] - dq.values[:, k][None, :]
        r += d * d
    np.sqrt(r, out=r)
    return AffinityMatrix(r=r, level=level)


def raw_matches(r: Union[AffinityMatrix, np.ndarray],
                np_sizes: Optional[np.ndarray] = None,
                nq_sizes: Optional[np.ndarray] = None) -> List[Pair]:
    """Row-and-column minimal entries of ``r``, in row-major order.

    Ties are all admitted. When neighbourhood sizes are given, rows or
    columns with an empty neighbourhood produce no candidate.
    """
    r = r.r if isinstance(r, AffinityMatrix) else np.asarray(r, dtype=np.float64)
    if r.size == 0:
        return []
    minimal = (r <= r.min(axis=1)[:, None]) & (r <= r.min(axis=0)[None, :])
    if np_sizes is not None:
        if len(np_sizes) != r.shape[0]:
            raise ContractViolation("row neighbourhood sizes do not match the affinity matrix")
        minimal &= (np.asarray(np_sizes) > 0)[:, None]
    if nq_sizes is not None:
        if len(nq_sizes) != r.shape[1]:
            raise ContractViolation("column neighbourhood sizes do not match the affinity matrix")
        minimal &= (np.asarray(nq_sizes) > 0)[None, :]
    rows, cols = np.nonzero(minimal)
    return list(zip(rows.tolist(), cols.tolist()))


def resolve_conflicts(candidates: Sequence[Pair], r: Union[AffinityMatrix, np.ndarray],
                      seed: Union[int, Sequence[int]]) -> Tuple[Pair, ...]:
    """Greedy one-per-row/column selection among ``candidates``.

    Each candidate receives a uniform key from ``default_rng(seed)``, drawn
    in the given order. Candidates are visited by distance, then key; a pair
    is accepted when neither its row nor its column is taken yet.

    Returns:
        Accepted pairs in acceptance order (a sparse partial permutation)
    """
    if not candidates:
        return ()
    r = r.r if isinstance(r, AffinityMatrix) else np.asarray(r, dtype=np.float64)
    rows = np.fromiter((i for i, _ in candidates), dtype=np.int64, count=len(candidates))
    cols = np.fromiter((j for _, j in candidates), dtype=np.int64, count=len(candidates))
    keys = np.random.default_rng(seed).random(len(candidates))
    order = np.lexsort((keys, r[rows, cols]))

    used_rows, used_cols = set(), set()
    accepted = []
    for k in order:
        i, j = int(rows[k]), int(cols[k])
        if i in used_rows or j in used_cols:
            continue
        used_rows.add(i)
        used_cols.add(j)
        accepted.append((i, j))
    return tuple(accepted)


def entropic_correspondence(pairs: Sequence[Pair], hp: Sequence[float],
                            hq: Sequence[float]) -> Tuple[float, ...]:
    """brk of the two vertex entropies for every aligned pair."""
    return tuple(brk(hp[i], hq[j]) for i, j in pairs)


def correspondence_level(fp: GraphFeatures, fq: GraphFeatures, level: int,
                         seed: int) -> CorrespondenceLevel:
    """Binary and entropic correspondence of ``fp`` and ``fq`` at one level."""
    r = affinity(level, fp.depth, fq.depth)
    candidates = raw_matches(
        r,
        fp.depth.neighborhood_sizes[:, level - 1],
        fq.depth.neighborhood_sizes[:, level - 1],
    )
    pairs = resolve_conflicts(candidates, r, pair_seed(seed, fp.graph_id, fq.graph_id, level))
    return CorrespondenceLevel(
        level=level,
        pairs=pairs,
        entropic=entropic_correspondence(pairs, fp.entropies, fq.entropies),
        shape=r.r.shape,
    )


def correspondence_set(fp: GraphFeatures, fq: GraphFeatures, levels: int,
                       seed: int) -> CorrespondenceSet:
    """Correspondences for levels 1..``levels``."""
    if levels < 1:
        raise ContractViolation(f"levels must be >= 1, got {levels}")
    return CorrespondenceSet(
        graph_ids=(fp.graph_id, fq.graph_id),
        levels=tuple(correspondence_level(fp, fq, h, seed) for h in range(1, levels + 1)),
    )


def dump_correspondence(cs: CorrespondenceSet, path) -> Path:
    """Write ``h i j value`` lines, one per aligned pair, for inspection."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# graphs={cs.graph_ids[0]},{cs.graph_ids[1]} levels={len(cs.levels)}\n")
        for level in cs.levels:
            for (i, j), value in zip(level.pairs, level.entropic):
                f.write(f"{level.level} {i} {j} {value!r}\n")
    return path
