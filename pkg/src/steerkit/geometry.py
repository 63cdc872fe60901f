"""Quantum steering ellipsoids, sampled LHS surfaces, and the volume
difference witness.

The steering ellipsoid is the set of Bloch vectors Alice can steer Bob's
qubit to; the LHS surface is the corresponding object for the best
local-hidden-state approximation found by the restricted-noise robustness
SDP, sampled over uniformly random rotations of a mutually unbiased
measurement triad.  A positive gap between the two enclosed volumes
witnesses steerability.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import sdp, steering
from .linalg import PAULIS, bloch_from_state, partial_trace_A, partial_trace_B
from .states import projective_measurement, require_two_qubit_state


class SingularStateError(ValueError):
    """Alice's reduced state is too close to pure for the QSE formulas."""


class GeometryError(ValueError):
    """Invalid rotation or geometric input."""


@dataclass(frozen=True)
class Ellipsoid:
    """Steering ellipsoid: center, semiaxes (descending), axis directions.

    ``orientation`` columns are the unit axis directions matching the
    semiaxes order.
    """

    center: np.ndarray
    semiaxes: np.ndarray
    orientation: np.ndarray

    def form_value(self, point, axis_tol: float = 1e-7) -> float:
        """Quadratic-form coordinate of a point: <= 1 means inside.

        Degenerate axes (semiaxis below ``axis_tol``) admit no extent; a
        component beyond 1e-6 along one of them returns infinity.
        """
        u = self.orientation.T @ (np.asarray(point, dtype=float) - self.center)
        value = 0.0
        for comp, s in zip(u, self.semiaxes):
            if s <= axis_tol:
                if abs(comp) > 1e-6:
                    return np.inf
            else:
                value += (comp / s) ** 2
        return value


@dataclass(frozen=True)
class PointCloud:
    """Sampled Bloch points with the rotation sample each one came from."""

    points: np.ndarray  # (n, 3)
    triad_ids: np.ndarray  # (n,)
    seed: int

    def validate(self) -> "PointCloud":
        radii = np.linalg.norm(self.points, axis=1)
        if radii.size and float(radii.max()) > 1.0 + 1e-6:
            raise GeometryError(
                f"point cloud leaves the unit ball (max radius {radii.max():.6f})"
            )
        return self


@dataclass(frozen=True)
class DeltaVReport:
    delta: float
    v_qse: float
    v_lhs: float
    convergence_gap: float


def correlation_matrix(rho_ab: np.ndarray) -> np.ndarray:
    """T_{jk} = tr[rho (sigma_j x sigma_k)]."""
    return np.array(
        [
            [float(np.trace(rho_ab @ np.kron(sj, sk)).real) for sk in PAULIS]
            for sj in PAULIS
        ]
    )


def qse(rho_ab: np.ndarray) -> Ellipsoid:
    """Quantum steering ellipsoid of Bob's qubit steered by Alice.

    Center c = (b - T^T a) / (1 - a^2) and matrix
    Q = (T^T - b a^T)(I + a a^T/(1-a^2))(T - a b^T)/(1 - a^2), where a, b
    are the local Bloch vectors and T the correlation matrix.  Semiaxes are
    the square roots of the eigenvalues of Q.
    """
    rho_ab = require_two_qubit_state(rho_ab)
    a_vec = bloch_from_state(partial_trace_B(rho_ab))
    b_vec = bloch_from_state(partial_trace_A(rho_ab))
    t_mat = correlation_matrix(rho_ab)
    asq = float(a_vec @ a_vec)
    if asq >= 1.0 - 1e-9:
        raise SingularStateError(
            f"QSE undefined: Alice's Bloch norm squared {asq:.9f} >= 1 - 1e-9"
        )
    gamma = 1.0 / (1.0 - asq)
    center = gamma * (b_vec - t_mat.T @ a_vec)
    left = t_mat.T - np.outer(b_vec, a_vec)
    q_mat = gamma * left @ (np.eye(3) + gamma * np.outer(a_vec, a_vec)) @ left.T
    eigvals, eigvecs = np.linalg.eigh((q_mat + q_mat.T) / 2)
    if float(eigvals.min()) < -1e-10:
        raise GeometryError(
            f"ellipsoid matrix has negative eigenvalue {eigvals.min():.3e}"
        )
    eigvals = np.clip(eigvals, 0.0, None)
    order = np.argsort(eigvals)[::-1]
    return Ellipsoid(
        center=center,
        semiaxes=np.sqrt(eigvals[order]),
        orientation=eigvecs[:, order],
    )


def ellipsoid_volume(e: Ellipsoid) -> float:
    return 4.0 * np.pi / 3.0 * float(np.prod(e.semiaxes))


def mub_triad(rotation: np.ndarray) -> tuple:
    """Three dichotomic measurements along the rotated x, y, z axes.

    The axes are the images of the coordinate axes, i.e. the columns of the
    rotation matrix.
    """
    rotation = np.asarray(rotation, dtype=float)
    if rotation.shape != (3, 3):
        raise GeometryError("rotation must be a 3x3 matrix")
    if np.max(np.abs(rotation.T @ rotation - np.eye(3))) > 1e-9:
        raise GeometryError("rotation matrix is not orthogonal")
    if np.linalg.det(rotation) < 0:
        raise GeometryError("rotation must be proper (determinant +1)")
    return tuple(projective_measurement(rotation[:, i]) for i in range(3))


def rotation_about_z(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def random_rotations(n: int, seed: int) -> np.ndarray:
    """n rotation matrices from uniformly random unit quaternions."""
    rng = np.random.default_rng(seed)
    q = rng.normal(size=(n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, xq, yq, zq = q.T
    mats = np.empty((n, 3, 3))
    mats[:, 0, 0] = 1 - 2 * (yq**2 + zq**2)
    mats[:, 0, 1] = 2 * (xq * yq - w * zq)
    mats[:, 0, 2] = 2 * (xq * zq + w * yq)
    mats[:, 1, 0] = 2 * (xq * yq + w * zq)
    mats[:, 1, 1] = 1 - 2 * (xq**2 + zq**2)
    mats[:, 1, 2] = 2 * (yq * zq - w * xq)
    mats[:, 2, 0] = 2 * (xq * zq - w * yq)
    mats[:, 2, 1] = 2 * (yq * zq + w * xq)
    mats[:, 2, 2] = 1 - 2 * (xq**2 + yq**2)
    return mats


def surface_points(rho_ab, rotation, solver_opts=None) -> np.ndarray:
    """The six LHS-surface Bloch points for one rotated triad."""
    asm = steering.assemblage_from_state(rho_ab, mub_triad(rotation))
    result = steering.rncsr(asm, solver_opts)
    sigma_b = asm.sigma_b
    points = np.empty((asm.n_inputs * asm.n_outcomes, 3))
    idx = 0
    for x in range(asm.n_inputs):
        for a in range(asm.n_outcomes):
            member = result.closest.members[x, a]
            if float(np.trace(member).real) <= 1e-12:
                # Zero-probability outcome: normalization is undefined, the
                # natural limit of Eq.-style mixing is the reduced state.
                points[idx] = bloch_from_state(sigma_b)
            else:
                points[idx] = bloch_from_state(member)
            idx += 1
    return points


def lhs_surface(
    rho_ab, n_samples: int, seed: int, solver_opts=None, map_fn=map
) -> PointCloud:
    """Sample the LHS surface over n_samples random triad rotations.

    ``map_fn`` lets callers substitute a concurrent map; rotations are
    generated up-front from the seed, so evaluation order cannot change the
    result.
    """
    if n_samples < 1:
        raise GeometryError("n_samples must be at least 1")
    rho_ab = require_two_qubit_state(rho_ab)
    rotations = random_rotations(n_samples, seed)

    def one(item):
        i, rot = item
        try:
            return surface_points(rho_ab, rot, solver_opts)
        except sdp.SolverFailure as exc:
            raise sdp.SolverFailure(f"surface sample {i}: {exc}") from exc

    chunks = list(map_fn(one, enumerate(rotations)))
    points = np.concatenate(chunks, axis=0)
    triad_ids = np.repeat(np.arange(n_samples), chunks[0].shape[0])
    return PointCloud(points=points, triad_ids=triad_ids, seed=seed).validate()


def hull_volume(cloud) -> float:
    """Volume of the 3D convex hull; degenerate clouds give 0."""
    points = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud)
    if points.shape[0] < 4:
        return 0.0
    try:
        return float(ConvexHull(points).volume)
    except QhullError:
        return 0.0


def delta_v(
    rho_ab, n_samples: int = 1000, seed: int = 0, solver_opts=None, map_fn=map
) -> DeltaVReport:
    """Volume witness Delta V = V_QSE - V_LHS with a convergence estimate.

    The hull volume underestimates the enclosed volume, so the witness is
    one-sided; ``convergence_gap`` extrapolates the sampling deficit from
    the half-sample hull (3x the observed half-to-full growth) and should
    gate any steerability claim.
    """
    cloud = lhs_surface(rho_ab, n_samples, seed, solver_opts, map_fn)
    return witness_from_cloud(rho_ab, cloud)


def witness_from_cloud(rho_ab, cloud: PointCloud) -> DeltaVReport:
    """Evaluate the volume witness on an already sampled surface cloud."""
    n_samples = int(cloud.triad_ids.max()) + 1
    v_lhs = hull_volume(cloud)
    half = (n_samples + 1) // 2
    v_half = hull_volume(cloud.points[cloud.triad_ids < half])
    v_qse = ellipsoid_volume(qse(rho_ab))
    return DeltaVReport(
        delta=v_qse - v_lhs,
        v_qse=v_qse,
        v_lhs=v_lhs,
        convergence_gap=3.0 * max(v_lhs - v_half, 0.0),
    )


def cloud_to_text(cloud: PointCloud) -> str:
    """Plain-text export: one `sample_index x y z` row per point."""
    lines = [
        f"{int(i)} {p[0]:.9g} {p[1]:.9g} {p[2]:.9g}"
        for i, p in zip(cloud.triad_ids, cloud.points)
    ]
    return "\n".join(lines) + "\n"


def summary_to_json(cloud: PointCloud, report: DeltaVReport, n_samples: int) -> str:
    return json.dumps(
        {
            "seed": int(cloud.seed),
            "n_samples": int(n_samples),
            "v_lhs": report.v_lhs,
            "v_qse": report.v_qse,
            "delta": report.delta,
            "convergence_gap": report.convergence_gap,
        }
    )
