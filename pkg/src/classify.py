"""
Kernel k-nearest-neighbour classification with stratified cross-validation.

Predictions only read test-to-train kernel entries; test-to-test entries are
never touched.
"""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import ConfigurationError
from .models import CvReport, GramMatrix, RepeatedCvReport

logger = logging.getLogger(__name__)


def kernel_knn_predict(k_row, train_labels: Sequence[int], neighbors: int = 1) -> int:
    """Majority label among the ``neighbors`` most similar training graphs.

    Equal kernel values prefer the lower training index; equal vote counts
    prefer the smaller label.

    Raises:
        ConfigurationError: On an empty training set or an invalid neighbor count
    """
    k_row = np.asarray(k_row, dtype=np.float64)
    labels = np.asarray(train_labels)
    n = len(labels)
    if n == 0:
        raise ConfigurationError("cannot predict from an empty training set")
    if len(k_row) != n:
        raise ConfigurationError(f"{len(k_row)} kernel values for {n} training labels")
    if not 1 <= neighbors <= n:
        raise ConfigurationError(f"neighbors must be in 1..{n}, got {neighbors}")

    nearest = np.lexsort((np.arange(n), -k_row))[:neighbors]
    votes = Counter(labels[nearest].tolist())
    top = max(votes.values())
    return min(label for label, count in votes.items() if count == top)


def stratified_folds(labels: Sequence[int], folds: int, seed: int) -> np.ndarray:
    """Fold index of every graph.

    Each class (in sorted label order) is shuffled and dealt round-robin,
    continuing the count from the previous class, so per-class fold sizes
    differ by at most one and every fold is non-empty when folds <= n.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if folds < 2:
        raise ConfigurationError(f"folds must be >= 2, got {folds}")
    if folds > n:
        raise ConfigurationError(f"folds ({folds}) exceeds dataset size ({n})")

    rng = np.random.default_rng(seed)
    assignment = np.empty(n, dtype=np.int64)
    dealt = 0
    for label in sorted(set(labels.tolist())):
        members = np.flatnonzero(labels == label)
        rng.shuffle(members)
        assignment[members] = (dealt + np.arange(len(members))) % folds
        dealt += len(members)
    return assignment


def _kernel_block(k, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return np.asarray(k[np.ix_(rows, cols)], dtype=np.float64)


def _fold_accuracy(k, labels: np.ndarray, assignment: np.ndarray, fold: int,
                   neighbors: int) -> float:
    test = np.flatnonzero(assignment == fold)
    train = np.flatnonzero(assignment != fold)
    block = _kernel_block(k, test, train)
    train_labels = labels[train]
    correct = sum(
        kernel_knn_predict(block[row], train_labels, neighbors) == labels[index]
        for row, index in enumerate(test)
    )
    return correct / len(test)


def _config_echo(gram, folds: int, neighbors: int, seed: int) -> Dict[str, str]:
    echo: Dict[str, str] = {}
    if isinstance(gram, GramMatrix):
        echo.update({
            "dataset": gram.dataset_name,
            "kernel": gram.config.kind,
            "H": str(gram.config.levels),
            "kernel_seed": str(gram.config.seed),
            "normalize": str(gram.config.normalize).lower(),
        })
    echo.update({"folds": str(folds), "neighbors": str(neighbors), "seed": str(seed)})
    return echo


def stratified_cv(gram, labels: Optional[Sequence[int]] = None, folds: int = 10,
                  neighbors: int = 1, seed: int = 42, threads: int = 1) -> CvReport:
    """Stratified k-fold cross-validation of kernel k-NN.

    Args:
        gram: GramMatrix, or any object with ``shape`` and numpy-style
            ``__getitem__`` holding the kernel values
        labels: Class labels; taken from the GramMatrix when omitted
        folds: Number of folds (2..n)
        neighbors: k of the k-NN classifier
        seed: Fold assignment seed
        threads: Folds evaluated concurrently

    Returns:
        CvReport with per-fold accuracies, their mean and standard error
    """
    k = gram.k if isinstance(gram, GramMatrix) else gram
    if labels is None:
        if not isinstance(gram, GramMatrix):
            raise ConfigurationError("labels are required for a bare kernel matrix")
        labels = gram.labels
    labels = np.asarray(labels)
    if tuple(k.shape) != (len(labels), len(labels)):
        raise ConfigurationError(f"kernel shape {tuple(k.shape)} does not match {len(labels)} labels")

    assignment = stratified_folds(labels, folds, seed)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, folds)) as pool:
            accuracies = list(pool.map(
                lambda f: _fold_accuracy(k, labels, assignment, f, neighbors), range(folds)
            ))
    else:
        accuracies = [_fold_accuracy(k, labels, assignment, f, neighbors) for f in range(folds)]

    mean = float(np.mean(accuracies))
    std_error = float(np.std(accuracies, ddof=1) / math.sqrt(folds))
    logger.debug("cv seed=%d: mean accuracy %.4f", seed, mean)
    return CvReport(
        fold_accuracies=accuracies,
        mean_accuracy=mean,
        std_error=std_error,
        config=_config_echo(gram, folds, neighbors, seed),
    )


def repeated_cv(gram, labels: Optional[Sequence[int]] = None, folds: int = 10,
                neighbors: int = 1, seed: int = 42, repeats: int = 10,
                threads: int = 1) -> RepeatedCvReport:
    """Run stratified_cv ``repeats`` times with seeds seed, seed+1, ...

    The reported accuracy is the mean of the per-run means, with the
    standard error taken over runs.
    """
    if repeats < 1:
        raise ConfigurationError(f"repeats must be >= 1, got {repeats}")
    runs = [stratified_cv(gram, labels, folds, neighbors, seed + r, threads) for r in range(repeats)]
    means = [run.mean_accuracy for run in runs]
    std_error = float(np.std(means, ddof=1) / math.sqrt(repeats)) if repeats > 1 else 0.0
    config = _config_echo(gram, folds, neighbors, seed)
    config["repeats"] = str(repeats)
    return RepeatedCvReport(
        runs=runs,
        mean_accuracy=float(np.mean(means)),
        std_error=std_error,
        config=config,
    )


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}"


def format_report_table(report) -> str:
    """Aligned text table for a CvReport or RepeatedCvReport."""
    if isinstance(report, RepeatedCvReport):
        header = ("run", "seed", "accuracy (%)")
        rows = [
            (str(r + 1), run.config.get("seed", ""), _pct(run.mean_accuracy))
            for r, run in enumerate(report.runs)
        ]
    else:
        header = ("fold", "accuracy (%)")
        rows = [(str(f + 1), _pct(a)) for f, a in enumerate(report.fold_accuracies)]

    widths = [max(len(header[c]), *(len(row[c]) for row in rows)) for c in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    lines.append("")
    lines.append(f"mean accuracy: {_pct(report.mean_accuracy)} +/- {_pct(report.std_error)}")
    lines.append("config: " + " ".join(f"{key}={value}" for key, value in report.config.items()))
    return "\n".join(lines)


def format_report_keyvalue(report) -> str:
    """Machine-readable ``key=value`` lines (floats at round-trip precision)."""
    lines = [f"{key}={value}" for key, value in report.config.items()]
    lines.append(f"mean_accuracy={report.mean_accuracy!r}")
    lines.append(f"std_error={report.std_error!r}")
    if isinstance(report, RepeatedCvReport):
        lines.append("run_accuracies=" + ",".join(repr(run.mean_accuracy) for run in report.runs))
    else:
        lines.append("fold_accuracies=" + ",".join(repr(a) for a in report.fold_accuracies))
    return "\n".join(lines) + "\n"
