"""Unit tests for the quantum-walk spectral stage."""

import math

import numpy as np
import pytest

from src.errors import ContractViolation, NumericalError
from src.graph_core import adjacency_matrix, complete_graph, cycle_graph, random_connected_graph
from src.models import Eigenpairs, Graph
from src.selftest import CESARO_HORIZON, CESARO_SAMPLES, CESARO_TOL, cesaro_graphs
from src.spectral import (
    amm_matrix, cesaro_oracle, check_doubly_stochastic, eigendecompose,
    group_eigenspaces, mixing_matrix_at, projector_residuals,
    spectral_decomposition, vertex_entropies,
)

P3_AMM = np.array([[3 / 8, 1 / 4, 3 / 8], [1 / 4, 1 / 2, 1 / 4], [3 / 8, 1 / 4, 3 / 8]])


def amm(g):
    return amm_matrix(spectral_decomposition(adjacency_matrix(g))).q


def test_eigendecompose_k2():
    """Test K2 eigenpairs."""
    pairs = eigendecompose(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert pairs.values == pytest.approx([1.0, -1.0])
    s = 1 / math.sqrt(2)
    assert np.abs(pairs.vectors[:, 0]) == pytest.approx([s, s])
    assert pairs.vectors[0, 1] * pairs.vectors[1, 1] == pytest.approx(-0.5)


def test_eigendecompose_zero_and_triangle(k3):
    """Test the zero matrix and the triangle spectrum."""
    assert eigendecompose(np.zeros((4, 4))).values == pytest.approx([0, 0, 0, 0])
    assert eigendecompose(adjacency_matrix(k3)).values == pytest.approx([2, -1, -1])


def test_eigendecompose_rejects_bad_input():
    """Test contract violations for non-symmetric or non-square input."""
    with pytest.raises(ContractViolation):
        eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ContractViolation):
        eigendecompose(np.zeros((2, 3)))
    with pytest.raises(ContractViolation):
        eigendecompose(np.zeros((2, 2)), method="power")


def test_jacobi_matches_lapack():
    """Test that the Jacobi solver agrees with LAPACK."""
    for seed in range(5):
        a = adjacency_matrix(random_connected_graph(8, 0.4, seed=seed))
        jacobi = eigendecompose(a, method="jacobi")
        lapack = eigendecompose(a, method="lapack")
        assert jacobi.values == pytest.approx(lapack.values, abs=1e-9)


def test_group_eigenspaces_k3(k3):
    """Test K3 grouping and its Perron projector."""
    sd = spectral_decomposition(adjacency_matrix(k3))
    assert sd.distinct_eigenvalues == pytest.approx((2.0, -1.0))
    assert sd.multiplicities == [1, 2]
    assert np.allclose(sd.projector(0), np.full((3, 3), 1 / 3), atol=1e-12)


def test_group_eigenspaces_merges_within_tolerance():
    """Test that eigenvalues closer than the tolerance share an eigenspace."""
    tol = 1e-6
    pairs = Eigenpairs(values=np.array([1.0, 1.0 - tol / 2, -1.0]), vectors=np.eye(3))
    sd = group_eigenspaces(pairs, tol)
    assert sd.multiplicities == [2, 1]

    distinct = Eigenpairs(values=np.array([3.0, 1.0, -2.0]), vectors=np.eye(3))
    assert group_eigenspaces(distinct).multiplicities == [1, 1, 1]


def test_projector_algebra():
    """Test completeness, idempotence and orthogonality of projectors."""
    for g in (cycle_graph(6), complete_graph(5), random_connected_graph(9, 0.4, seed=1)):
        assert max(projector_residuals(spectral_decomposition(adjacency_matrix(g)))) < 1e-9


def test_amm_closed_forms(k2, k3, p3):
    """Test averaged mixing matrices of K2, K3 and P3."""
    assert np.allclose(amm(k2), np.full((2, 2), 0.5), atol=1e-9, rtol=0)
    expected = np.full((3, 3), 2 / 9)
    np.fill_diagonal(expected, 5 / 9)
    assert np.allclose(amm(k3), expected, atol=1e-9, rtol=0)
    assert np.allclose(amm(p3), P3_AMM, atol=1e-9, rtol=0)


def test_amm_edgeless_is_identity():
    """Test that an edgeless graph never mixes."""
    assert np.allclose(amm(Graph.from_edges(4, [])), np.eye(4))


def test_amm_doubly_stochastic_random():
    """Test double stochasticity and symmetry on random graphs."""
    for seed in range(20):
        q = amm(random_connected_graph(12, 0.3, seed=seed))
        assert check_doubly_stochastic(q) <= 1e-9
        assert np.array_equal(q, q.T)


def test_check_doubly_stochastic_negative_control(p3):
    """Test that a perturbation of 1e-3 is detected."""
    q = amm(p3).copy()
    q[0, 0] += 1e-3
    with pytest.raises(NumericalError):
        check_doubly_stochastic(q)


def test_mixing_matrix_at(k2, p3):
    """Test the instantaneous mixing matrix at known times."""
    assert np.allclose(mixing_matrix_at(adjacency_matrix(p3), 0.0), np.eye(3))
    a = adjacency_matrix(k2)
    assert np.allclose(mixing_matrix_at(a, math.pi / 2), [[0, 1], [1, 0]], atol=1e-12)
    assert np.allclose(mixing_matrix_at(a, math.pi / 4), np.full((2, 2), 0.5), atol=1e-12)


def test_cesaro_oracle_small(k2, k3):
    """Test the time average on K2, K3 and an edgeless graph."""
    assert np.allclose(cesaro_oracle(adjacency_matrix(k2), 1000.0, 20000), 0.5, atol=1e-2)
    assert np.abs(cesaro_oracle(adjacency_matrix(k3), 200.0, 20000) - amm(k3)).max() <= 1e-2
    assert np.allclose(cesaro_oracle(np.zeros((3, 3)), 10.0, 10), np.eye(3))
    with pytest.raises(ContractViolation):
        cesaro_oracle(adjacency_matrix(k2), 10.0, 1)


def test_cesaro_agrees_with_spectral():
    """Test closed-form Q against the time average on 30 random graphs."""
    graphs = cesaro_graphs(30, seed=7)
    assert len(graphs) == 30
    assert all(3 <= g.vertex_count <= 8 for g in graphs)
    for g in graphs:
        a = adjacency_matrix(g)
        sd = spectral_decomposition(a)
        oracle = cesaro_oracle(a, CESARO_HORIZON, CESARO_SAMPLES, sd=sd)
        assert np.abs(amm_matrix(sd).q - oracle).max() <= CESARO_TOL


def test_vertex_entropies_closed_forms(k2, k3, p3):
    """Test vertex entropies of K2, K3 and P3."""
    assert vertex_entropies(amm(k2)).entropies == pytest.approx([math.log(2)] * 2, abs=1e-9)
    k3_value = -(5 / 9) * math.log(5 / 9) - 2 * (2 / 9) * math.log(2 / 9)
    assert vertex_entropies(amm(k3)).entropies == pytest.approx([k3_value] * 3, abs=1e-9)

    h = vertex_entropies(amm(p3))
    end = -2 * (3 / 8) * math.log(3 / 8) - (1 / 4) * math.log(1 / 4)
    assert h[1] == pytest.approx(1.5 * math.log(2), abs=1e-9)
    assert h[0] == pytest.approx(end, abs=1e-9)
    assert abs(h[0] - h[1]) > 0.04


def test_vertex_entropies_invariants():
    """Test entropy bounds and uniformity on vertex-transitive graphs."""
    for g in (cycle_graph(6), complete_graph(5)):
        h = vertex_entropies(amm(g)).entropies
        assert h.max() - h.min() <= 1e-9
    for seed in range(10):
        g = random_connected_graph(9, 0.35, seed=seed)
        h = vertex_entropies(amm(g)).entropies
        assert (h >= 0).all()
        assert (h <= math.log(g.vertex_count) + 1e-12).all()


def test_vertex_entropies_negative_entry():
    """Test that clearly negative entries are rejected and rounding noise is not."""
    with pytest.raises(NumericalError):
        vertex_entropies(np.array([[1.0 + 1e-6, -1e-6], [-1e-6, 1.0 + 1e-6]]))
    h = vertex_entropies(np.array([[1.0, -1e-13], [-1e-13, 1.0]]))
    assert h.entropies == pytest.approx([0.0, 0.0])


def test_benchmark_double_stochasticity(mutag, shock):
    """Test Q row/column sums and entry signs on every MUTAG and Shock graph."""
    for dataset in (mutag, shock):
        for g in dataset.graphs:
            q = amm(g)
            assert check_doubly_stochastic(q) <= 1e-9
            assert q.min() >= -1e-12
