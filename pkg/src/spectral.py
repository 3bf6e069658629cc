"""
Spectral side of the continuous-time quantum walk (CTQW).

The adjacency matrix is the walk Hamiltonian. Its eigenspace projectors give
the averaged mixing matrix in closed form, ``Q = sum_j P_j o P_j`` (Hadamard
square of each projector). The instantaneous mixing matrix
``|exp(iAt)|^2`` and its Cesaro time-average are provided as an independent
check of that closed form. Row v of Q is the time-averaged visiting
distribution of a walk started at v; its Shannon entropy is the vertex's
quantum entropy.
"""

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import entr

from .errors import ContractViolation, NumericalError
from .models import AmmMatrix, Eigenpairs, SpectralDecomposition, VertexEntropyProfile

logger = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-9          # row/column sums of Q
PROJECTOR_TOL = 1e-9           # projector algebra
NEGATIVE_CLAMP = 1e-12         # entries in [-1e-12, 0) are rounding noise
EIGEN_TOL = 1e-9

JACOBI_THRESHOLD = 1e-12
JACOBI_MAX_SWEEPS = 100


def _as_symmetric(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractViolation("matrix has non-finite entries")
    scale = max(1.0, float(np.abs(a).max())) if a.size else 1.0
    if a.size and float(np.abs(a - a.T).max()) > 1e-12 * scale:
        raise ContractViolation("matrix is not symmetric")
    return a


def _jacobi_eigh(a: np.ndarray, threshold: float = JACOBI_THRESHOLD,
                 max_sweeps: int = JACOBI_MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations; returns (eigenvalues, eigenvector columns)."""
    m = a.copy()
    n = m.shape[0]
    v = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(m)))

    def off_norm() -> float:
        return math.sqrt(max(0.0, float(np.sum(m * m) - np.sum(np.diag(m) ** 2))))

    for _ in range(max_sweeps):
        if off_norm() <= threshold * scale:
            return np.diag(m).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p, col_q = m[:, p].copy(), m[:, q].copy()
                m[:, p] = c * col_p - s * col_q
                m[:, q] = s * col_p + c * col_q
                row_p, row_q = m[p, :].copy(), m[q, :].copy()
                m[p, :] = c * row_p - s * row_q
                m[q, :] = s * row_p + c * row_q
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    residual = off_norm()
    if residual > threshold * scale:
        raise NumericalError(
            f"Jacobi eigensolver did not converge within {max_sweeps} sweeps", residual
        )
    return np.diag(m).copy(), v


def eigendecompose(a, tol: float = EIGEN_TOL, method: str = "lapack") -> Eigenpairs:
    """Eigenpairs of a symmetric matrix, eigenvalues sorted descending.

    Args:
        a: Symmetric matrix with finite entries
        tol: Tolerance for the orthonormality and reconstruction post-checks
        method: "lapack" (numpy eigh) or "jacobi" (cyclic Jacobi rotations)

    Returns:
        Eigenpairs with orthonormal eigenvector columns

    Raises:
        ContractViolation: If ``a`` is not square, finite and symmetric
        NumericalError: If the solver fails or the post-checks are violated
    """
    a = _as_symmetric(a)
    n = a.shape[0]
    if method == "lapack":
        try:
            values, vectors = np.linalg.eigh(a)
        except np.linalg.LinAlgError as e:
            raise NumericalError(f"eigh did not converge: {e}", float("nan")) from e
    elif method == "jacobi":
        values, vectors = _jacobi_eigh(a)
    else:
        raise ContractViolation(f"unknown eigensolver method {method!r}")

    order = np.argsort(-values, kind="stable")
    values, vectors = values[order], vectors[:, order]

    if n:
        orthogonality = float(np.abs(vectors.T @ vectors - np.eye(n)).max())
        if orthogonality > tol:
            raise NumericalError("eigenvectors are not orthonormal", orthogonality)
        reconstruction = float(np.abs((vectors * values) @ vectors.T - a).max())
        bound = tol * max(1.0, float(np.abs(a).max())) * n
        if reconstruction > bound:
            raise NumericalError("eigendecomposition does not reconstruct the input", reconstruction)
    return Eigenpairs(values=values, vectors=vectors)


def default_group_tol(n: int, max_abs_entry: float = 1.0) -> float:
    return 1e-8 * max(1.0, max_abs_entry * n)


def group_eigenspaces(pairs: Eigenpairs, group_tol: Optional[float] = None) -> SpectralDecomposition:
    """Merge eigenvalues closer than ``group_tol`` into one eigenspace.

    Eigenvalues are visited in descending order; a gap larger than
    ``group_tol`` to the previous eigenvalue starts a new eigenspace. The
    eigenspace is labelled with the mean of its member eigenvalues.
    """
    n = len(pairs)
    if group_tol is None:
        group_tol = default_group_tol(n)
    groups = []
    for k in range(n):
        if groups and pairs.values[k - 1] - pairs.values[k] <= group_tol:
            groups[-1].append(k)
        else:
            groups.append([k])

    eigenvalues = tuple(float(np.mean(pairs.values[g])) for g in groups)
    bases = tuple(pairs.vectors[:, g] for g in groups)
    degenerate = sum(1 for g in groups if len(g) > 1)
    if degenerate:
        logger.debug("grouped %d eigenvalues into %d eigenspaces (%d degenerate)",
                     n, len(groups), degenerate)
    return SpectralDecomposition(distinct_eigenvalues=eigenvalues, bases=bases)


def spectral_decomposition(a, method: str = "lapack") -> SpectralDecomposition:
    """eigendecompose followed by group_eigenspaces with the default tolerance."""
    a = _as_symmetric(a)
    max_abs = float(np.abs(a).max()) if a.size else 0.0
    pairs = eigendecompose(a, method=method)
    return group_eigenspaces(pairs, default_group_tol(a.shape[0], max_abs))


def projector_residuals(sd: SpectralDecomposition) -> Tuple[float, float, float]:
    """Return (||sum P - I||, max ||P^2 - P||, max_{j!=k} ||P_j P_k||), max-norms."""
    n = sd.dimension
    projectors = sd.projectors
    completeness = float(np.abs(sum(projectors) - np.eye(n)).max())
    idempotence = max(float(np.abs(p @ p - p).max()) for p in projectors)
    orthogonality = 0.0
    for j in range(len(projectors)):
        for k in range(j + 1, len(projectors)):
            orthogonality = max(orthogonality, float(np.abs(projectors[j] @ projectors[k]).max()))
    return completeness, idempotence, orthogonality


def check_doubly_stochastic(q: np.ndarray, tol: float = STOCHASTIC_TOL) -> float:
    """Largest deviation of a row or column sum from 1.

    Raises:
        NumericalError: If that deviation exceeds ``tol`` or an entry is
            below ``-NEGATIVE_CLAMP``
    """
    q = np.asarray(q, dtype=np.float64)
    deviation = max(float(np.abs(q.sum(axis=1) - 1.0).max()),
                    float(np.abs(q.sum(axis=0) - 1.0).max()))
    if deviation > tol:
        raise NumericalError("matrix is not doubly stochastic", deviation)
    lowest = float(q.min())
    if lowest < -NEGATIVE_CLAMP:
        raise NumericalError("matrix has negative entries", lowest)
    return deviation


def amm_matrix(sd: SpectralDecomposition) -> AmmMatrix:
    """Averaged mixing matrix ``Q = sum_j P_j o P_j``.

    Simple eigenvalues contribute ``(v o v)(v o v)^T``, which is summed in a
    single matrix product; degenerate eigenspaces build their projector.

    Raises:
        NumericalError: If Q is not doubly stochastic within STOCHASTIC_TOL,
            which points at a mis-grouped eigenspace
    """
    n = sd.dimension
    q = np.zeros((n, n), dtype=np.float64)
    simple = [b[:, 0] for b in sd.bases if b.shape[1] == 1]
    if simple:
        w = np.column_stack(simple) ** 2
        q += w @ w.T
    for basis in sd.bases:
        if basis.shape[1] > 1:
            p = basis @ basis.T
            q += p * p
    q = (q + q.T) / 2.0
    check_doubly_stochastic(q)
    return AmmMatrix(q=q)


def _walk_basis(sd: SpectralDecomposition) -> Tuple[np.ndarray, np.ndarray]:
    """Concatenated eigenvectors and the grouped eigenvalue of each column."""
    vectors = np.hstack(sd.bases)
    values = np.concatenate([np.full(b.shape[1], lam) for lam, b in zip(sd.distinct_eigenvalues, sd.bases)])
    return vectors, values


def mixing_matrix_at(a, t: float, sd: Optional[SpectralDecomposition] = None) -> np.ndarray:
    """Instantaneous mixing matrix ``|U(t)|^2`` with ``U(t) = sum_j exp(i lambda_j t) P_j``."""
    if sd is None:
        sd = spectral_decomposition(a)
    vectors, values = _walk_basis(sd)
    u = (vectors * np.exp(1j * values * t)) @ vectors.T
    return np.abs(u) ** 2


def cesaro_oracle(a, horizon: float, samples: int,
                  sd: Optional[SpectralDecomposition] = None) -> np.ndarray:
    """Time average ``(1/T) int_0^T |U(t)|^2 dt`` by midpoint quadrature.

    Args:
        a: Adjacency matrix
        horizon: Averaging horizon T
        samples: Number of quadrature panels (>= 2)

    Returns:
        Approximation of the averaged mixing matrix, converging to
        amm_matrix as T grows
    """
    if samples < 2:
        raise ContractViolation(f"samples must be >= 2, got {samples}")
    if horizon <= 0:
        raise ContractViolation(f"horizon must be positive, got {horizon}")
    if sd is None:
        sd = spectral_decomposition(a)
    vectors, values = _walk_basis(sd)
    n = vectors.shape[0]

    dt = horizon / samples
    total = np.zeros((n, n), dtype=np.float64)
    chunk = max(1, 2 ** 20 // max(1, n * n))
    for start in range(0, samples, chunk):
        times = (np.arange(start, min(start + chunk, samples)) + 0.5) * dt
        phases = np.exp(1j * np.outer(times, values))
        u = np.einsum("ik,ck,jk->cij", vectors, phases, vectors, optimize=True)
        total += (np.abs(u) ** 2).sum(axis=0)
    return total / samples


def vertex_entropies(q: Union[AmmMatrix, np.ndarray]) -> VertexEntropyProfile:
    """Shannon entropy (nats) of each row of Q, with 0 log 0 = 0.

    Raises:
        NumericalError: If an entry is below ``-NEGATIVE_CLAMP``
    """
    q = q.q if isinstance(q, AmmMatrix) else np.asarray(q, dtype=np.float64)
    lowest = float(q.min()) if q.size else 0.0
    if lowest < -NEGATIVE_CLAMP:
        raise NumericalError("mixing matrix has a negative entry", lowest)
    clamped = np.clip(q, 0.0, None)
    return VertexEntropyProfile(entropies=entr(clamped).sum(axis=1))
