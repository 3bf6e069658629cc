"""
Feature cache for per-graph spectral and depth features.

Uses SQLite in a cache directory. Records are keyed by the graph's content
hash and the number of depth levels, so a graph that reappears (in the same
or another dataset) is never recomputed.

Each record payload is text: the magic line ``QGK-FEAT v1`` followed by a
JSON object whose arrays are base64-encoded little-endian bytes, which makes
warm-cache results bit-identical to cold-cache ones. A SHA-256 checksum of
the payload is stored alongside it to detect corruption.
"""

import hashlib
import json
import os
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Optional

from .models import (
    DEFAULT_CACHE_DIR, DepthRepresentation, GraphFeatures,
    serialize_array, deserialize_array,
)

MAGIC_HEADER = "QGK-FEAT v1"


class CorruptRecordError(Exception):
    """A cache record exists but cannot be decoded."""


def _checksum(payload: str) -> str:
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class FeatureCache:
    """Stores and retrieves GraphFeatures keyed by (content hash, levels)."""

    def __init__(self, cache_dir: Optional[Path] = None):
        """Initialize the cache.

        Args:
            cache_dir: Directory for cache storage. Defaults to ~/.qgk_cache
        """
        if cache_dir is None:
            cache_dir = DEFAULT_CACHE_DIR
        cache_dir = Path(cache_dir)
        cache_dir.mkdir(parents=True, exist_ok=True)
        self.db_path = cache_dir / "features.db"
        self._init_db()

    def _init_db(self):
        conn = sqlite3.connect(self.db_path)
        conn.execute("""
            CREATE TABLE IF NOT EXISTS feature_cache (
                content_hash TEXT NOT NULL,
                levels INTEGER NOT NULL,
                payload TEXT NOT NULL,
                checksum TEXT NOT NULL,
                timestamp TEXT NOT NULL,
                PRIMARY KEY (content_hash, levels)
            )
        """)
        conn.commit()
        conn.close()

    def lookup(self, content_hash: str, levels: int, graph_id: int) -> Optional[GraphFeatures]:
        """Look up features for a graph.

        The stored graph_id is informational; the returned bundle carries
        ``graph_id`` from the caller.

        Returns:
            GraphFeatures if found, None on a miss

        Raises:
            CorruptRecordError: If the record fails its header, checksum or
                decoding checks
        """
        conn = sqlite3.connect(self.db_path)
        cursor = conn.execute(
            "SELECT payload, checksum FROM feature_cache WHERE content_hash = ? AND levels = ?",
            (content_hash, levels),
        )
        row = cursor.fetchone()
        conn.close()

        if row is None:
            return None

        payload, checksum = row
        if _checksum(payload) != checksum:
            raise CorruptRecordError(f"checksum mismatch for {content_hash[:12]}")
        header, _, body = payload.partition("\n")
        if header != MAGIC_HEADER:
            raise CorruptRecordError(f"unexpected header {header!r}")
        try:
            return self._deserialize_features(json.loads(body), graph_id)
        except (ValueError, KeyError, TypeError) as e:
            raise CorruptRecordError(f"cannot decode record {content_hash[:12]}: {e}") from e

    def store(self, features: GraphFeatures):
        """Store (or replace) the record for ``features``."""
        body = json.dumps(self._serialize_features(features), sort_keys=True)
        payload = f"{MAGIC_HEADER}\n{body}"

        conn = sqlite3.connect(self.db_path)
        conn.execute(
            """
            INSERT OR REPLACE INTO feature_cache (content_hash, levels, payload, checksum, timestamp)
            VALUES (?, ?, ?, ?, ?)
            """,
            (features.content_hash, features.levels, payload, _checksum(payload),
             datetime.now().isoformat()),
        )
        conn.commit()
        conn.close()

    def count(self) -> int:
        conn = sqlite3.connect(self.db_path)
        (n,) = conn.execute("SELECT COUNT(*) FROM feature_cache").fetchone()
        conn.close()
        return n

    def _serialize_features(self, features: GraphFeatures) -> dict:
        return {
            "graph_id": features.graph_id,
            "vertex_count": features.vertex_count,
            "content_hash": features.content_hash,
            "levels": features.levels,
            "amm": serialize_array(features.amm),
            "entropies": serialize_array(features.entropies),
            "depth_values": serialize_array(features.depth.values),
            "neighborhood_sizes": serialize_array(features.depth.neighborhood_sizes),
        }

    def _deserialize_features(self, data: dict, graph_id: int) -> GraphFeatures:
        n = int(data["vertex_count"])
        levels = int(data["levels"])
        amm = deserialize_array(data["amm"])
        entropies = deserialize_array(data["entropies"])
        values = deserialize_array(data["depth_values"])
        sizes = deserialize_array(data["neighborhood_sizes"])
        if amm.shape != (n, n) or entropies.shape != (n,) \
                or values.shape != (n, levels) or sizes.shape != (n, levels):
            raise ValueError("array shapes do not match the recorded vertex count")
        return GraphFeatures(
            graph_id=graph_id,
            vertex_count=n,
            content_hash=data["content_hash"],
            amm=amm,
            entropies=entropies,
            depth=DepthRepresentation(values=values, neighborhood_sizes=sizes),
        )


def get_cache_manager(cache_dir: Optional[Path] = None) -> FeatureCache:
    """Get the feature cache, honouring the QGK_CACHE_DIR environment variable."""
    if cache_dir is None and os.getenv("QGK_CACHE_DIR"):
        cache_dir = Path(os.environ["QGK_CACHE_DIR"])
    return FeatureCache(cache_dir)
