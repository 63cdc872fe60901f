"""Dense Hermitian linear algebra on small matrices (2x2 and 4x4 dominant).

All functions operate on plain ``numpy`` arrays with ``complex128`` entries.
States and effects are carried as Hermitian matrices; Bloch vectors are real
length-3 arrays.
"""

from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (X, Y, Z)


def hermitian_part(m: np.ndarray) -> np.ndarray:
    """Return (M + M†)/2, absorbing round-off accumulated by callers."""
    return (m + m.conj().T) / 2


def require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate Hermiticity within ``tol`` (max entry deviation) and return
    the symmetrized matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return hermitian_part(m)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product, row-major index convention (i,k),(j,l)."""
    return np.kron(a, b)


def eig_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted descending and the
    matching orthonormal eigenvectors as columns of ``v``.
    """
    m = require_hermitian(m, tol)
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def trace_norm(m: np.ndarray) -> float:
    """tr|M| for Hermitian M: sum of absolute eigenvalues."""
    w = np.linalg.eigvalsh(hermitian_part(np.asarray(m, dtype=complex)))
    return float(np.sum(np.abs(w)))


def operator_norm(m: np.ndarray) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    w = np.linalg.eigvalsh(hermitian_part(np.asarray(m, dtype=complex)))
    return float(np.max(np.abs(w)))


def trace_distance(r: np.ndarray, s: np.ndarray) -> float:
    """Half the trace norm of r - s.

    For qubit states this equals half the Euclidean distance between the
    Bloch vectors.
    """
    r = np.asarray(r, dtype=complex)
    s = np.asarray(s, dtype=complex)
    if r.shape != s.shape:
        raise ValueError(f"dimension mismatch: {r.shape} vs {s.shape}")
    return 0.5 * trace_norm(r - s)


def partial_trace_A(rho_ab: np.ndarray) -> np.ndarray:
    """Trace out the first qubit of a 4x4 two-qubit operator."""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    if rho_ab.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho_ab.shape}")
    return np.einsum("ikil->kl", rho_ab.reshape(2, 2, 2, 2))


def partial_trace_B(rho_ab: np.ndarray) -> np.ndarray:
    """Trace out the second qubit of a 4x4 two-qubit operator."""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    if rho_ab.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho_ab.shape}")
    return np.einsum("ikjk->ij", rho_ab.reshape(2, 2, 2, 2))


def bloch_from_state(rho: np.ndarray) -> np.ndarray:
    """Bloch vector of a (possibly subnormalized) qubit state.

    The input is normalized by its trace first, so weighted assemblage
    members map to the Bloch point of the normalized state.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
    tr = float(np.trace(rho).real)
    if tr <= 0.0:
        raise ValueError("bloch_from_state requires a positive trace")
    return np.array([float(np.trace(rho @ p).real) / tr for p in PAULIS])


def state_from_bloch(v, weight: float = 1.0) -> np.ndarray:
    """weight * (I + v . sigma) / 2."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError("Bloch vector must have three components")
    return weight * (I2 + v[0] * X + v[1] * Y + v[2] * Z) / 2
