"""Two-qubit state families, measurement triads, and the analytic
local-hidden-state construction for the noisy-singlet family."""

from __future__ import annotations

import json

import numpy as np

from . import steering
from .linalg import I2, PAULIS, kron, require_hermitian, state_from_bloch

SQRT3 = float(np.sqrt(3.0))

KET_00 = np.array([1, 0, 0, 0], dtype=complex)
KET_01 = np.array([0, 1, 0, 0], dtype=complex)
KET_10 = np.array([0, 0, 1, 0], dtype=complex)
KET_11 = np.array([0, 0, 0, 1], dtype=complex)

SINGLET = (KET_10 - KET_01) / np.sqrt(2)
TRIPLET = (KET_10 + KET_01) / np.sqrt(2)

_SINGLET_PROJ = np.outer(SINGLET, SINGLET.conj())
_TRIPLET_PROJ = np.outer(TRIPLET, TRIPLET.conj())


def require_two_qubit_state(rho: np.ndarray) -> np.ndarray:
    """Validate a 4x4 density matrix (Hermitian, PSD, unit trace)."""
    rho = require_hermitian(rho, tol=1e-10)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 state, got shape {rho.shape}")
    if abs(float(np.trace(rho).real) - 1.0) > 1e-10:
        raise ValueError("state trace differs from 1")
    if float(np.linalg.eigvalsh(rho).min()) < -1e-10:
        raise ValueError("state has a negative eigenvalue")
    return rho


def _check_mixing(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {p}")
    return p


def werner(p: float) -> np.ndarray:
    """Singlet mixed with white noise: p |S><S| + (1-p) I/4."""
    p = _check_mixing(p)
    return p * _SINGLET_PROJ + (1 - p) * np.eye(4, dtype=complex) / 4


def horodecki(p: float) -> np.ndarray:
    """Singlet mixed with the orthogonal product state |00>."""
    p = _check_mixing(p)
    return p * _SINGLET_PROJ + (1 - p) * np.outer(KET_00, KET_00.conj())


def bell_diagonal_rank2(p: float) -> np.ndarray:
    """Rank-2 mixture of the singlet and the triplet (|10>+|01>)/sqrt(2)."""
    p = _check_mixing(p)
    return p * _SINGLET_PROJ + (1 - p) * _TRIPLET_PROJ


def projective_measurement(axis) -> tuple:
    """Dichotomic projective measurement along a Bloch axis.

    Outcome 0 carries the projector onto the +axis direction.
    """
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("measurement axis must be a unit vector")
    plus = (I2 + sum(axis[i] * PAULIS[i] for i in range(3))) / 2
    return (plus, I2 - plus)


def pauli_triad() -> tuple:
    """The three mutually unbiased measurements along x, y, z."""
    return tuple(projective_measurement(axis) for axis in np.eye(3))


def werner_lhs_oracle(p: float, phi: float = 0.0) -> steering.LhsModel:
    """Explicit hidden-state model for the noisy singlet at shrink p <= 1/sqrt(3).

    The eight hidden states sit at Bloch points p(s1 a1 + s2 a2 + s3 a3) for
    sign patterns s in {-1,+1}^3, where a1 = (cos phi, sin phi, 0),
    a2 = (-sin phi, cos phi, 0), a3 = (0, 0, 1).  Each carries weight 1/8,
    and the states are ordered so that the lexicographic deterministic
    strategies reproduce every steered member exactly (outcome 0 responds
    along the -axis, matching the singlet's anticorrelation).
    """
    p = float(p)
    if p > 1 / SQRT3 + 1e-12:
        raise ValueError(
            f"hidden states only exist for p <= 1/sqrt(3), got {p}"
        )
    axes = np.array(
        [
            [np.cos(phi), np.sin(phi), 0.0],
            [-np.sin(phi), np.cos(phi), 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    strategies = steering.deterministic_strategies(3, 2)
    hidden = []
    for lam in strategies:
        signs = np.where(lam == 0, -1.0, 1.0)
        bloch = p * (signs @ axes)
        hidden.append(state_from_bloch(bloch, weight=1.0 / 8.0))
    return steering.LhsModel(
        hidden_states=np.array(hidden), strategies=strategies
    )


def state_to_json(rho: np.ndarray) -> str:
    rho = require_two_qubit_state(rho)
    return json.dumps(
        {"dim": 4, "re": rho.real.tolist(), "im": rho.imag.tolist()}
    )


def state_from_json(text: str) -> np.ndarray:
    data = json.loads(text)
    if data.get("dim") != 4:
        raise ValueError("state file must declare dim 4")
    rho = np.asarray(data["re"], dtype=float) + 1j * np.asarray(
        data["im"], dtype=float
    )
    return require_two_qubit_state(rho)


def load_state(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return state_from_json(fh.read())
