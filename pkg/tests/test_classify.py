"""Unit tests for kernel k-NN and cross-validation."""

import math
from collections import Counter

import numpy as np
import pytest

from src.classify import (
    format_report_keyvalue, format_report_table, kernel_knn_predict, repeated_cv,
    stratified_cv, stratified_folds,
)
from src.errors import ConfigurationError
from src.kernels import gram
from src.models import GramMatrix, KernelConfig


class TracingKernel:
    """Kernel matrix wrapper that records every (rows, cols) block read."""

    def __init__(self, k):
        self.k = np.asarray(k)
        self.shape = self.k.shape
        self.reads = []

    def __getitem__(self, key):
        rows, cols = key
        self.reads.append((set(np.ravel(rows).tolist()), set(np.ravel(cols).tolist())))
        return self.k[key]


def block_gram(labels):
    labels = np.asarray(labels)
    return (labels[:, None] == labels[None, :]).astype(float)


def test_knn_unique_maximum():
    """Test 1-NN with a unique maximum."""
    assert kernel_knn_predict([0.1, 0.9, 0.3], [1, 2, 1], 1) == 2


def test_knn_majority_and_ties():
    """Test majority voting and tie-breaks."""
    assert kernel_knn_predict([1.0, 1.0, 1.0], [1, 1, 2], 3) == 1
    assert kernel_knn_predict([0.5, 0.5], [2, 1], 2) == 1
    # Equal kernel values prefer the lower training index
    assert kernel_knn_predict([0.5, 0.5, 0.5], [3, 1, 2], 1) == 3


def test_knn_errors():
    """Test invalid training sets and neighbor counts."""
    with pytest.raises(ConfigurationError):
        kernel_knn_predict([], [], 1)
    with pytest.raises(ConfigurationError):
        kernel_knn_predict([0.1, 0.2], [1, 2], 3)


def test_stratified_folds():
    """Test that folds are disjoint, covering, balanced and seeded."""
    labels = [0] * 13 + [1] * 7 + [2] * 4
    assignment = stratified_folds(labels, 5, seed=3)
    assert sorted(Counter(assignment.tolist())) == [0, 1, 2, 3, 4]
    for label in set(labels):
        per_fold = Counter(assignment[np.asarray(labels) == label].tolist())
        counts = [per_fold.get(f, 0) for f in range(5)]
        assert max(counts) - min(counts) <= 1
    assert np.array_equal(assignment, stratified_folds(labels, 5, seed=3))
    assert not np.array_equal(assignment, stratified_folds(labels, 5, seed=4))


def test_stratified_folds_leave_one_out():
    """Test that folds = n gives n folds of size one."""
    assignment = stratified_folds([1, 1, 2, 2, 2], 5, seed=0)
    assert sorted(assignment.tolist()) == [0, 1, 2, 3, 4]


def test_stratified_folds_errors():
    """Test invalid fold counts."""
    with pytest.raises(ConfigurationError):
        stratified_folds([0, 1, 0], 4, seed=0)
    with pytest.raises(ConfigurationError):
        stratified_folds([0, 1, 0], 1, seed=0)


def test_cv_block_diagonal():
    """Test perfect accuracy on an oracle kernel."""
    labels = [1, 2] * 10
    for folds in (2, 5, 10):
        report = stratified_cv(block_gram(labels), labels, folds=folds)
        assert report.mean_accuracy == 1.0
        assert report.std_error == 0.0


def test_cv_constant_gram_collapses_to_tiebreak():
    """Test that a constant kernel predicts the lowest-index training label."""
    labels = np.array([2, 1, 1, 2, 1, 2, 2, 1, 1, 1, 2, 1])
    report = stratified_cv(np.ones((12, 12)), labels, folds=4, seed=9)

    assignment = stratified_folds(labels, 4, seed=9)
    expected = []
    for fold in range(4):
        test = np.flatnonzero(assignment == fold)
        train = np.flatnonzero(assignment != fold)
        predicted = labels[train[0]]
        expected.append(float(np.mean(labels[test] == predicted)))
    assert report.fold_accuracies == pytest.approx(expected)


def test_cv_leave_one_out():
    """Test leave-one-out cross-validation."""
    labels = [1, 1, 2, 2]
    report = stratified_cv(block_gram(labels), labels, folds=4)
    assert len(report.fold_accuracies) == 4
    assert report.mean_accuracy == 1.0


def test_cv_never_reads_test_test_entries():
    """Test the information-leak guard by tracing kernel reads."""
    labels = [0, 1, 2] * 6
    traced = TracingKernel(np.random.default_rng(0).random((18, 18)))
    stratified_cv(traced, labels, folds=6, neighbors=3, seed=1)
    assert len(traced.reads) == 6
    for rows, cols in traced.reads:
        assert not rows & cols


def test_cv_reproducible_and_thread_independent():
    """Test that the same seed gives the same report for any thread count."""
    rng = np.random.default_rng(4)
    k = rng.random((30, 30))
    k = (k + k.T) / 2
    labels = rng.integers(0, 3, size=30)
    a = stratified_cv(k, labels, folds=5, neighbors=3, seed=11)
    b = stratified_cv(k, labels, folds=5, neighbors=3, seed=11, threads=4)
    assert a.fold_accuracies == b.fold_accuracies
    assert a.mean_accuracy == b.mean_accuracy


def test_cv_report_statistics():
    """Test mean and standard error of the fold accuracies."""
    rng = np.random.default_rng(5)
    labels = rng.integers(0, 2, size=40)
    report = stratified_cv(rng.random((40, 40)), labels, folds=8, seed=2)
    accuracies = np.array(report.fold_accuracies)
    assert report.mean_accuracy == pytest.approx(accuracies.mean())
    assert report.std_error == pytest.approx(accuracies.std(ddof=1) / math.sqrt(8))


def test_cv_folds_exceed_dataset():
    """Test that more folds than graphs is rejected."""
    with pytest.raises(ConfigurationError):
        stratified_cv(np.eye(5), [0, 1, 0, 1, 0], folds=6)


def test_repeated_cv():
    """Test repeated cross-validation with consecutive seeds."""
    rng = np.random.default_rng(6)
    labels = rng.integers(0, 2, size=24)
    k = rng.random((24, 24))
    report = repeated_cv(k, labels, folds=4, seed=10, repeats=3)
    assert len(report.runs) == 3
    assert [run.config["seed"] for run in report.runs] == ["10", "11", "12"]
    assert report.runs[1].fold_accuracies == stratified_cv(k, labels, folds=4, seed=11).fold_accuracies
    means = [run.mean_accuracy for run in report.runs]
    assert report.mean_accuracy == pytest.approx(np.mean(means))
    assert report.std_error == pytest.approx(np.std(means, ddof=1) / math.sqrt(3))


def test_report_formats(two_class_dataset):
    """Test the text table and key=value report with the config echo."""
    g = gram(two_class_dataset, KernelConfig(kind="RGK"))
    report = stratified_cv(g, folds=5)
    assert report.mean_accuracy == 1.0

    table = format_report_table(report)
    assert "mean accuracy: 100.00 +/- 0.00" in table
    assert "kernel=RGK" in table and "folds=5" in table

    keyvalue = format_report_keyvalue(report).splitlines()
    assert "dataset=TWOCLASS" in keyvalue
    assert "neighbors=1" in keyvalue
    assert "mean_accuracy=1.0" in keyvalue
    assert keyvalue[-1].startswith("fold_accuracies=")


def test_labels_required_for_bare_matrix():
    """Test that a bare matrix needs explicit labels."""
    with pytest.raises(ConfigurationError):
        stratified_cv(np.eye(4), folds=2)
    g = GramMatrix(k=block_gram([0, 0, 1, 1]), config=KernelConfig(), dataset_name="X",
                   labels=(0, 0, 1, 1))
    assert stratified_cv(g, folds=2).mean_accuracy == 1.0


def test_mutag_accuracy_above_majority(mutag):
    """Test 1-NN on the MUTAG AERK Gram beats the majority rate by 5 points."""
    g = gram(mutag, KernelConfig(), threads=4)
    majority = max(Counter(mutag.labels).values()) / len(mutag)
    report = stratified_cv(g, folds=10, neighbors=1, seed=42)
    assert report.mean_accuracy >= majority + 0.05
