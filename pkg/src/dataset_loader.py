"""
Benchmark dataset ingestion.

Reads the widely used graph-classification text format:

- ``<NAME>_A.txt``: one edge per line, ``u, v``, 1-based global vertex ids
- ``<NAME>_graph_indicator.txt``: line i holds the 1-based graph id of vertex i
- ``<NAME>_graph_labels.txt``: line g holds the class label of graph g

Node labels, edge labels and attribute files are ignored. Directed duplicate
rows are merged into one undirected edge and self-loops are dropped; both
are reported as warnings.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Set, Tuple

from .errors import ParseError, IngestionError
from .models import Dataset, Graph

logger = logging.getLogger(__name__)


@dataclass
class IngestionReport:
    """Anomalies found while reading a dataset."""
    self_loops_dropped: int = 0
    duplicate_rows_merged: int = 0


def _dataset_file(path_prefix: Path, name: str, suffix: str) -> Path:
    path = Path(path_prefix) / f"{name}_{suffix}.txt"
    if not path.is_file():
        raise IngestionError("required dataset file not found", str(path))
    return path


def _numbered_lines(path: Path) -> Iterator[Tuple[int, str]]:
    """Yield (1-based line number, stripped text) for non-blank lines."""
    try:
        with open(path, "rb") as f:
            for number, raw in enumerate(f, start=1):
                try:
                    text = raw.decode("utf-8").strip()
                except UnicodeDecodeError as e:
                    raise ParseError(f"not valid UTF-8 text ({e.reason})", str(path), number) from e
                if text:
                    yield number, text
    except OSError as e:
        raise IngestionError(f"cannot read file: {e}", str(path)) from e


def _parse_int(text: str, path: Path, line: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ParseError(f"expected an integer, got {text.strip()!r}", str(path), line)


def load_dataset_with_report(path_prefix, name: str) -> Tuple[Dataset, IngestionReport]:
    """Load a dataset and return it with the ingestion anomaly counts."""
    path_prefix = Path(path_prefix)
    a_path = _dataset_file(path_prefix, name, "A")
    indicator_path = _dataset_file(path_prefix, name, "graph_indicator")
    labels_path = _dataset_file(path_prefix, name, "graph_labels")

    # Vertex -> graph assignment
    vertex_graph: List[int] = []
    for line, text in _numbered_lines(indicator_path):
        graph_number = _parse_int(text, indicator_path, line)
        if graph_number < 1:
            raise ParseError(f"graph id {graph_number} must be >= 1", str(indicator_path), line)
        vertex_graph.append(graph_number - 1)

    labels = [_parse_int(text, labels_path, line) for line, text in _numbered_lines(labels_path)]
    graph_count = len(labels)
    if vertex_graph and max(vertex_graph) >= graph_count:
        raise ParseError(
            f"graph indicator references graph {max(vertex_graph) + 1} "
            f"but only {graph_count} labels are declared",
            str(indicator_path),
        )

    # Global vertex id -> local index within its graph, in file order
    local_index: List[int] = []
    sizes = [0] * graph_count
    for g in vertex_graph:
        local_index.append(sizes[g])
        sizes[g] += 1
    for g, size in enumerate(sizes):
        if size == 0:
            raise ParseError(f"graph {g + 1} has no vertices", str(indicator_path))

    report = IngestionReport()
    edge_sets: List[Set[Tuple[int, int]]] = [set() for _ in range(graph_count)]
    row_counts: Dict[Tuple[int, int, int], int] = Counter()
    total_vertices = len(vertex_graph)

    for line, text in _numbered_lines(a_path):
        parts = text.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'u, v', got {text!r}", str(a_path), line)
        u = _parse_int(parts[0], a_path, line)
        v = _parse_int(parts[1], a_path, line)
        for vertex in (u, v):
            if not 1 <= vertex <= total_vertices:
                raise ParseError(
                    f"vertex {vertex} outside declared range 1..{total_vertices}",
                    str(a_path), line,
                )
        gu, gv = vertex_graph[u - 1], vertex_graph[v - 1]
        if gu != gv:
            raise ParseError(
                f"edge ({u}, {v}) joins graph {gu + 1} and graph {gv + 1}",
                str(a_path), line,
            )
        if u == v:
            report.self_loops_dropped += 1
            continue
        lu, lv = local_index[u - 1], local_index[v - 1]
        row_counts[(gu, lu, lv)] += 1
        edge_sets[gu].add((min(lu, lv), max(lu, lv)))

    # Each direction of an edge may appear once; further repeats are duplicates
    report.duplicate_rows_merged = sum(count - 1 for count in row_counts.values())

    graphs = tuple(
        Graph(vertex_count=sizes[g], edges=frozenset(edge_sets[g]), label=labels[g], graph_id=g)
        for g in range(graph_count)
    )
    dataset = Dataset(graphs=graphs, name=name, class_count=len(set(labels)))

    if report.self_loops_dropped:
        logger.warning("%s: dropped %d self-loop rows", name, report.self_loops_dropped)
    if report.duplicate_rows_merged:
        logger.warning("%s: merged %d duplicate edge rows", name, report.duplicate_rows_merged)
    logger.info("loaded %s: %d graphs, %d vertices", name, graph_count, total_vertices)
    return dataset, report


def load_dataset(path_prefix, name: str) -> Dataset:
    """Load ``<name>_*.txt`` files from ``path_prefix`` into a Dataset.

    Args:
        path_prefix: Directory holding the dataset files
        name: Dataset name used as the file prefix

    Returns:
        Dataset with 0-based vertex indices and deduplicated undirected edges

    Raises:
        IngestionError: If a required file is missing
        ParseError: On malformed lines, out-of-range vertices or cross-graph edges
    """
    dataset, _ = load_dataset_with_report(path_prefix, name)
    return dataset


def write_dataset(d: Dataset, directory, name: Optional[str] = None) -> Path:
    """Write a dataset in the same text format (both edge directions).

    Returns:
        The directory the files were written to
    """
    name = name or d.name
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    offsets = []
    total = 0
    for g in d.graphs:
        offsets.append(total)
        total += g.vertex_count

    with open(directory / f"{name}_A.txt", "w", encoding="utf-8") as f:
        for g, offset in zip(d.graphs, offsets):
            for u, v in g.sorted_edges():
                f.write(f"{u + offset + 1}, {v + offset + 1}\n")
                f.write(f"{v + offset + 1}, {u + offset + 1}\n")
    with open(directory / f"{name}_graph_indicator.txt", "w", encoding="utf-8") as f:
        for g in d.graphs:
            f.write(f"{g.graph_id + 1}\n" * g.vertex_count)
    with open(directory / f"{name}_graph_labels.txt", "w", encoding="utf-8") as f:
        for g in d.graphs:
            f.write(f"{g.label}\n")
    return directory
