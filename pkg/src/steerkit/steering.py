"""Assemblages, deterministic local-hidden-state strategies, and the
SDP-based steerability quantifiers.

Quantifier overview (all on two-outcome qubit assemblages):

* ``s_min``            -- operator-norm lower bound on the trace-distance
                          steerability measure, as one SDP.
* ``rncsr``            -- restricted-noise consistent steering robustness:
                          minimal weight t of product noise p(a|x) sigma_B
                          that makes the mixture unsteerable.
* ``s_max_restricted`` -- trace distance to the RNCSR unsteerable assemblage,
                          an upper bound on the measure.
* ``csr`` / ``s_max``  -- same with an arbitrary noise assemblage sharing
                          the reduced state; a tighter upper bound.

The exact trace-distance measure is not computed directly; it is only
bracketed by the interval [s_min, s_max].
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from . import sdp
from .linalg import (
    bloch_from_state,
    partial_trace_A,
    require_hermitian,
    trace_distance,
)

MAX_STRATEGIES = 4096

# Hermitian 2x2 parametrization sigma = y0 E00 + y1 E11 + y2 Sx + y3 Sy.
_HERM_BASIS = np.array(
    [
        [[1, 0], [0, 0]],
        [[0, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
    ],
    dtype=complex,
)


def _params_to_herm(y) -> np.ndarray:
    return np.einsum("i,iab->ab", np.asarray(y, dtype=float), _HERM_BASIS)


def _herm_to_params(h) -> np.ndarray:
    return np.array(
        [h[0, 0].real, h[1, 1].real, h[0, 1].real, -h[0, 1].imag]
    )


class SteeringError(ValueError):
    """Invalid assemblage, measurement, or wiring data."""


@dataclass(frozen=True)
class Assemblage:
    """Family of subnormalized steered states sigma_{a|x} with input weights."""

    members: np.ndarray  # (n_inputs, n_outcomes, 2, 2) complex
    input_weights: np.ndarray  # (n_inputs,)

    @property
    def n_inputs(self) -> int:
        return self.members.shape[0]

    @property
    def n_outcomes(self) -> int:
        return self.members.shape[1]

    @property
    def sigma_b(self) -> np.ndarray:
        """Bob's reduced state, the outcome sum (averaged over inputs)."""
        return self.members.sum(axis=1).mean(axis=0)

    @property
    def outcome_probabilities(self) -> np.ndarray:
        """p(a|x) = tr sigma_{a|x}."""
        return np.einsum("xakk->xa", self.members).real

    def validate(self, require_normalized: bool = True) -> "Assemblage":
        m = self.members
        if m.ndim != 4 or m.shape[2:] != (2, 2):
            raise SteeringError(f"bad member array shape {m.shape}")
        if self.input_weights.shape != (self.n_inputs,):
            raise SteeringError("input_weights length mismatch")
        if abs(self.input_weights.sum() - 1.0) > 1e-9 or (
            self.input_weights < -1e-12
        ).any():
            raise SteeringError("input_weights is not a probability vector")
        for x in range(self.n_inputs):
            for a in range(self.n_outcomes):
                sig = require_hermitian(m[x, a], tol=1e-9)
                if float(np.linalg.eigvalsh(sig).min()) < -1e-9:
                    raise SteeringError(f"member ({a}|{x}) is not PSD")
        sums = m.sum(axis=1)
        for x in range(1, self.n_inputs):
            if 0.5 * np.abs(np.linalg.eigvalsh(sums[x] - sums[0])).sum() > 1e-9:
                raise SteeringError("no-signaling violated: outcome sums differ")
        if require_normalized and abs(np.trace(sums[0]).real - 1.0) > 1e-9:
            raise SteeringError("reduced state trace differs from 1")
        return self

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_inputs": self.n_inputs,
                "n_outcomes": self.n_outcomes,
                "input_weights": self.input_weights.tolist(),
                "members": [
                    [
                        {
                            "re": self.members[x, a].real.tolist(),
                            "im": self.members[x, a].imag.tolist(),
                        }
                        for a in range(self.n_outcomes)
                    ]
                    for x in range(self.n_inputs)
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Assemblage":
        data = json.loads(text)
        nx, na = int(data["n_inputs"]), int(data["n_outcomes"])
        members = np.empty((nx, na, 2, 2), dtype=complex)
        for x in range(nx):
            for a in range(na):
                entry = data["members"][x][a]
                members[x, a] = np.asarray(entry["re"], dtype=float) + 1j * np.asarray(
                    entry["im"], dtype=float
                )
        asm = cls(
            members=members,
            input_weights=np.asarray(data["input_weights"], dtype=float),
        )
        return asm.validate()


def assemblage_from_state(
    rho_ab: np.ndarray, measurements, input_weights=None
) -> Assemblage:
    """Steered assemblage sigma_{a|x} = tr_A(rho_AB (A_{a|x} x I))."""
    rho_ab = require_hermitian(rho_ab, tol=1e-10)
    if rho_ab.shape != (4, 4):
        raise SteeringError("rho_ab must be 4x4")
    if float(np.linalg.eigvalsh(rho_ab).min()) < -1e-10:
        raise SteeringError("rho_ab is not PSD")
    if abs(float(np.trace(rho_ab).real) - 1.0) > 1e-9:
        raise SteeringError("rho_ab must have unit trace")

    n_inputs = len(measurements)
    n_outcomes = len(measurements[0])
    members = np.empty((n_inputs, n_outcomes, 2, 2), dtype=complex)
    eye2 = np.eye(2)
    for x, effects in enumerate(measurements):
        if len(effects) != n_outcomes:
            raise SteeringError("all measurements need the same outcome count")
        total = sum(effects)
        if np.max(np.abs(total - eye2)) > 1e-10:
            raise SteeringError(f"measurement {x} effects do not sum to identity")
        for a, effect in enumerate(effects):
            effect = require_hermitian(effect, tol=1e-10)
            if float(np.linalg.eigvalsh(effect).min()) < -1e-10:
                raise SteeringError(f"effect ({a}|{x}) is not PSD")
            members[x, a] = partial_trace_A(rho_ab @ np.kron(effect, eye2))

    if input_weights is None:
        input_weights = np.full(n_inputs, 1.0 / n_inputs)
    asm = Assemblage(members=members, input_weights=np.asarray(input_weights, float))
    return asm.validate()


def assemblage_distance(a1: Assemblage, a2: Assemblage) -> float:
    """Input-weighted sum of member trace distances (a metric)."""
    if a1.members.shape != a2.members.shape:
        raise SteeringError("assemblage shape mismatch")
    if np.max(np.abs(a1.input_weights - a2.input_weights)) > 1e-12:
        raise SteeringError("assemblages carry different input weights")
    total = 0.0
    for x in range(a1.n_inputs):
        for a in range(a1.n_outcomes):
            total += a1.input_weights[x] * trace_distance(
                a1.members[x, a], a2.members[x, a]
            )
    return total


def deterministic_strategies(n_inputs: int, n_outcomes: int) -> np.ndarray:
    """All response vectors (lambda_x)_x in lexicographic order."""
    count = n_outcomes**n_inputs
    if count > MAX_STRATEGIES:
        raise SteeringError(
            f"{count} strategies exceed the guard of {MAX_STRATEGIES}"
        )
    return np.array(
        list(itertools.product(range(n_outcomes), repeat=n_inputs)), dtype=int
    )


@dataclass(frozen=True)
class LhsModel:
    """Unnormalized hidden states, one per deterministic strategy."""

    hidden_states: np.ndarray  # (n_strategies, 2, 2)
    strategies: np.ndarray  # (n_strategies, n_inputs)

    @property
    def sigma_b(self) -> np.ndarray:
        return self.hidden_states.sum(axis=0)

    def members(self, n_outcomes: int | None = None) -> np.ndarray:
        """The unsteerable assemblage members sum_l delta_{a,l_x} sigma_l."""
        n_inputs = self.strategies.shape[1]
        if n_outcomes is None:
            n_outcomes = int(self.strategies.max()) + 1
        out = np.zeros((n_inputs, n_outcomes, 2, 2), dtype=complex)
        for lam, sig in zip(self.strategies, self.hidden_states):
            for x in range(n_inputs):
                out[x, lam[x]] += sig
        return out

    def to_assemblage(self, input_weights=None) -> Assemblage:
        members = self.members()
        n_inputs = members.shape[0]
        if input_weights is None:
            input_weights = np.full(n_inputs, 1.0 / n_inputs)
        return Assemblage(members=members, input_weights=np.asarray(input_weights))


@dataclass(frozen=True)
class SMinResult:
    value: float
    model: LhsModel
    solution: sdp.SdpSolution


@dataclass(frozen=True)
class RobustnessResult:
    t_min: float
    closest: Assemblage
    model: LhsModel
    solution: sdp.SdpSolution
    slack_max: float = 0.0


@dataclass(frozen=True)
class BoundsReport:
    s_min: float
    s_max: float
    s_max_restricted: float
    t_rncsr: float
    t_csr: float
    closest_rncsr_assemblage: Assemblage
    closest_csr_assemblage: Assemblage


def _solver_opts(opts: dict | None) -> dict:
    return dict(opts) if opts else {}


def _run(problem: sdp.SdpProblem, opts, what: str) -> sdp.SdpSolution:
    solution = sdp.solve(problem, **_solver_opts(opts))
    if not solution.optimal:
        raise sdp.SolverFailure(
            f"{what} SDP ended with status {solution.status} "
            f"after {solution.iterations} iterations"
        )
    return solution


def _hidden_vars(n_strategies: int, offset: int = 0):
    """Variable index of component c of hidden state l."""
    return lambda lam, comp: offset + 4 * lam + comp


def _psd_blocks(n_strategies: int, var):
    blocks = []
    for lam in range(n_strategies):
        blocks.append(
            sdp.LmiBlock(
                constant=np.zeros((2, 2), dtype=complex),
                coeffs=tuple(
                    (var(lam, comp), _HERM_BASIS[comp]) for comp in range(4)
                ),
            )
        )
    return blocks


def _extract_hidden(y, n_strategies: int, var) -> np.ndarray:
    return np.array(
        [
            _params_to_herm([y[var(lam, comp)] for comp in range(4)])
            for lam in range(n_strategies)
        ]
    )


def s_min(a: Assemblage, solver_opts: dict | None = None) -> SMinResult:
    """Operator-norm lower bound, minimized over consistent LHS models.

    Minimizes (1/2) sum_x p(x) sum_a ||sigma_{a|x} - sum_l delta sigma_l||_inf
    subject to sum_l sigma_l = sigma_B and sigma_l >= 0.
    """
    a.validate(require_normalized=False)
    strategies = deterministic_strategies(a.n_inputs, a.n_outcomes)
    n_strat = len(strategies)
    n_mu = a.n_inputs * a.n_outcomes
    var = _hidden_vars(n_strat, offset=n_mu)
    num_vars = n_mu + 4 * n_strat

    objective = np.zeros(num_vars)
    blocks = []
    mu_idx = 0
    for x in range(a.n_inputs):
        for out in range(a.n_outcomes):
            objective[mu_idx] = a.input_weights[x] / 2.0
            responding = [lam for lam in range(n_strat) if strategies[lam][x] == out]
            # mu I - (sigma_{a|x} - sum_l delta sigma_l) >= 0
            coeffs_plus = [(mu_idx, np.eye(2, dtype=complex))]
            coeffs_minus = [(mu_idx, np.eye(2, dtype=complex))]
            for lam in responding:
                for comp in range(4):
                    coeffs_plus.append((var(lam, comp), _HERM_BASIS[comp]))
                    coeffs_minus.append((var(lam, comp), -_HERM_BASIS[comp]))
            blocks.append(
                sdp.LmiBlock(constant=a.members[x, out], coeffs=tuple(coeffs_plus))
            )
            blocks.append(
                sdp.LmiBlock(constant=-a.members[x, out], coeffs=tuple(coeffs_minus))
            )
            mu_idx += 1
    blocks.extend(_psd_blocks(n_strat, var))

    # Consistency: sum_l sigma_l = sigma_B, component-wise.
    sigma_b_params = _herm_to_params(a.sigma_b)
    equalities = []
    for comp in range(4):
        coeff = np.zeros(num_vars)
        for lam in range(n_strat):
            coeff[var(lam, comp)] = 1.0
        equalities.append((coeff, float(sigma_b_params[comp])))

    problem = sdp.SdpProblem(
        num_vars=num_vars,
        objective=objective,
        blocks=tuple(blocks),
        equalities=tuple(equalities),
    )
    solution = _run(problem, solver_opts, "operator-norm lower bound")
    hidden = _extract_hidden(solution.y, n_strat, var)
    model = LhsModel(hidden_states=hidden, strategies=strategies)
    return SMinResult(
        value=max(float(solution.primal_objective), 0.0),
        model=model,
        solution=solution,
    )


def rncsr(a: Assemblage, solver_opts: dict | None = None) -> RobustnessResult:
    """Restricted-noise consistent steering robustness.

    min sum_l tr sigma_l - 1  subject to
    sum_l delta sigma_l - sigma_{a|x} >= (sum_l tr sigma_l - 1) p(a|x) sigma_B,
    sum_l tr sigma_l >= 1, sigma_l >= 0.  The inequality slacks vanish at the
    optimum; ``slack_max`` records their largest eigenvalue post hoc.
    """
    a.validate(require_normalized=False)
    strategies = deterministic_strategies(a.n_inputs, a.n_outcomes)
    n_strat = len(strategies)
    var = _hidden_vars(n_strat)
    num_vars = 4 * n_strat
    sigma_b = a.sigma_b
    probs = a.outcome_probabilities

    objective = np.zeros(num_vars)
    for lam in range(n_strat):
        objective[var(lam, 0)] = 1.0
        objective[var(lam, 1)] = 1.0

    blocks = []
    for x in range(a.n_inputs):
        for out in range(a.n_outcomes):
            p_ax = probs[x, out]
            coeffs: dict[int, np.ndarray] = {}
            for lam in range(n_strat):
                for comp in range(4):
                    mat = -float(np.trace(_HERM_BASIS[comp]).real) * p_ax * sigma_b
                    if strategies[lam][x] == out:
                        mat = mat + _HERM_BASIS[comp]
                    if np.any(mat):
                        coeffs[var(lam, comp)] = mat
            constant = a.members[x, out] - p_ax * sigma_b
            blocks.append(
                sdp.LmiBlock(constant=constant, coeffs=tuple(coeffs.items()))
            )
    # sum_l tr sigma_l >= 1
    trace_coeffs = tuple(
        (var(lam, comp), np.array([[1.0 + 0j]]))
        for lam in range(n_strat)
        for comp in (0, 1)
    )
    blocks.append(
        sdp.LmiBlock(constant=np.array([[1.0 + 0j]]), coeffs=trace_coeffs)
    )
    blocks.extend(_psd_blocks(n_strat, var))

    problem = sdp.SdpProblem(
        num_vars=num_vars, objective=objective, blocks=tuple(blocks)
    )
    solution = _run(problem, solver_opts, "restricted-noise robustness")
    hidden = _extract_hidden(solution.y, n_strat, var)
    t_min = max(float(solution.primal_objective) - 1.0, 0.0)

    closest_members = (
        a.members + t_min * probs[..., None, None] * sigma_b
    ) / (1.0 + t_min)
    closest = Assemblage(members=closest_members, input_weights=a.input_weights)
    model = LhsModel(hidden_states=hidden / (1.0 + t_min), strategies=strategies)

    slack_max = 0.0
    lhs_members = model.members(a.n_outcomes)
    for x in range(a.n_inputs):
        for out in range(a.n_outcomes):
            eta = lhs_members[x, out] - closest_members[x, out]
            slack_max = max(
                slack_max, float(np.linalg.eigvalsh((eta + eta.conj().T) / 2).max())
            )
    if slack_max > 1e-5:
        raise sdp.SolverFailure(
            f"restricted-noise slack failed to vanish (max eig {slack_max:.2e})"
        )
    return RobustnessResult(
        t_min=t_min,
        closest=closest,
        model=model,
        solution=solution,
        slack_max=slack_max,
    )


def csr(a: Assemblage, solver_opts: dict | None = None) -> RobustnessResult:
    """Consistent steering robustness with an arbitrary noise assemblage.

    min sum_l tr sigma_l - 1  subject to
    sum_l delta sigma_l - sigma_{a|x} >= 0 for all a, x,
    sum_l sigma_l = (sum_l tr sigma_l) sigma_B, sigma_l >= 0.
    The PSD slack plays the role of t tau_{a|x}; the equality forces the
    noise to reproduce the reduced state.
    """
    a.validate(require_normalized=False)
    strategies = deterministic_strategies(a.n_inputs, a.n_outcomes)
    n_strat = len(strategies)
    var = _hidden_vars(n_strat)
    num_vars = 4 * n_strat
    sigma_b = a.sigma_b

    objective = np.zeros(num_vars)
    for lam in range(n_strat):
        objective[var(lam, 0)] = 1.0
        objective[var(lam, 1)] = 1.0

    blocks = []
    for x in range(a.n_inputs):
        for out in range(a.n_outcomes):
            coeffs = []
            for lam in range(n_strat):
                if strategies[lam][x] == out:
                    for comp in range(4):
                        coeffs.append((var(lam, comp), _HERM_BASIS[comp]))
            blocks.append(
                sdp.LmiBlock(constant=a.members[x, out], coeffs=tuple(coeffs))
            )
    trace_coeffs = tuple(
        (var(lam, comp), np.array([[1.0 + 0j]]))
        for lam in range(n_strat)
        for comp in (0, 1)
    )
    blocks.append(
        sdp.LmiBlock(constant=np.array([[1.0 + 0j]]), coeffs=trace_coeffs)
    )
    blocks.extend(_psd_blocks(n_strat, var))

    # sum_l sigma_l - (sum_l tr sigma_l) sigma_B = 0, component-wise.
    sigma_b_params = _herm_to_params(sigma_b)
    equalities = []
    for comp in range(4):
        coeff = np.zeros(num_vars)
        for lam in range(n_strat):
            coeff[var(lam, comp)] += 1.0
            coeff[var(lam, 0)] -= float(sigma_b_params[comp])
            coeff[var(lam, 1)] -= float(sigma_b_params[comp])
        equalities.append((coeff, 0.0))

    problem = sdp.SdpProblem(
        num_vars=num_vars,
        objective=objective,
        blocks=tuple(blocks),
        equalities=tuple(equalities),
    )
    solution = _run(problem, solver_opts, "consistent robustness")
    t_min = max(float(solution.primal_objective) - 1.0, 0.0)
    if t_min > 1e-9:
        # The optimal noise assemblage is not unique; re-solve at the optimal
        # weight to pick the optimizer closest to the input in trace distance.
        hidden = _csr_select(a, strategies, t_min, solver_opts)
    else:
        t_min = 0.0
        hidden = _extract_hidden(solution.y, n_strat, var)
    model = LhsModel(hidden_states=hidden / (1.0 + t_min), strategies=strategies)
    closest = Assemblage(
        members=model.members(a.n_outcomes), input_weights=a.input_weights
    )
    return RobustnessResult(
        t_min=t_min, closest=closest, model=model, solution=solution
    )


def _csr_select(a: Assemblage, strategies, t_min: float, solver_opts):
    """Among CSR optimizers at weight t, minimize the distance to ``a``.

    Uses the epigraph ||M||_1 = min {2 tr P - tr M : P >= M, P >= 0}; with
    sum_l sigma_l pinned to (1+t) sigma_B the tr M part is constant, so the
    objective is just the weighted sum of tr P.  A small cushion on t keeps
    the feasible set full-dimensional.
    """
    n_strat = len(strategies)
    t = t_min * (1.0 + 1e-7) + 1e-9
    var = _hidden_vars(n_strat)
    n_members = a.n_inputs * a.n_outcomes

    def pvar(idx, comp):
        return 4 * n_strat + 4 * idx + comp

    num_vars = 4 * n_strat + 4 * n_members
    objective = np.zeros(num_vars)
    blocks = []
    idx = 0
    for x in range(a.n_inputs):
        for out in range(a.n_outcomes):
            responding = [
                lam for lam in range(n_strat) if strategies[lam][x] == out
            ]
            feas_coeffs = []
            epi_coeffs = [
                (pvar(idx, comp), _HERM_BASIS[comp]) for comp in range(4)
            ]
            for lam in responding:
                for comp in range(4):
                    feas_coeffs.append((var(lam, comp), _HERM_BASIS[comp]))
                    epi_coeffs.append(
                        (var(lam, comp), _HERM_BASIS[comp] / (1.0 + t))
                    )
            # Sum_l delta sigma_l - sigma_{a|x} >= 0 (valid noise).
            blocks.append(
                sdp.LmiBlock(constant=a.members[x, out], coeffs=tuple(feas_coeffs))
            )
            # P - (sigma_{a|x} - sum_l delta sigma_l / (1+t)) >= 0.
            blocks.append(
                sdp.LmiBlock(constant=a.members[x, out], coeffs=tuple(epi_coeffs))
            )
            blocks.append(
                sdp.LmiBlock(
                    constant=np.zeros((2, 2), dtype=complex),
                    coeffs=tuple(
                        (pvar(idx, comp), _HERM_BASIS[comp]) for comp in range(4)
                    ),
                )
            )
            objective[pvar(idx, 0)] = a.input_weights[x]
            objective[pvar(idx, 1)] = a.input_weights[x]
            idx += 1
    blocks.extend(_psd_blocks(n_strat, var))

    sigma_b_params = _herm_to_params((1.0 + t) * a.sigma_b)
    equalities = []
    for comp in range(4):
        coeff = np.zeros(num_vars)
        for lam in range(n_strat):
            coeff[var(lam, comp)] = 1.0
        equalities.append((coeff, float(sigma_b_params[comp])))

    problem = sdp.SdpProblem(
        num_vars=num_vars,
        objective=objective,
        blocks=tuple(blocks),
        equalities=tuple(equalities),
    )
    solution = _run(problem, solver_opts, "consistent robustness (selection)")
    hidden = _extract_hidden(solution.y, n_strat, var)
    return hidden * (1.0 + t_min) / (1.0 + t)


def s_max_restricted(
    a: Assemblage,
    result: RobustnessResult | None = None,
    solver_opts: dict | None = None,
) -> float:
    """Upper bound from the restricted-noise robustness solution."""
    if result is None:
        result = rncsr(a, solver_opts)
    return assemblage_distance(a, result.closest)


def s_max_restricted_bloch(a: Assemblage, t_min: float) -> float:
    """Bloch-sphere form of the restricted upper bound.

    Sum of rescaled Euclidean distances between the normalized members and
    the reduced state; zero-trace members contribute nothing and are skipped.
    """
    sigma_b = a.sigma_b
    q_vec = bloch_from_state(sigma_b)
    probs = a.outcome_probabilities
    total = 0.0
    for x in range(a.n_inputs):
        for out in range(a.n_outcomes):
            p_ax = probs[x, out]
            if p_ax <= 1e-14:
                continue
            p_vec = bloch_from_state(a.members[x, out])
            total += (
                a.input_weights[x]
                * p_ax
                * (t_min / (1.0 + t_min))
                * float(np.linalg.norm(p_vec - q_vec))
                / 2.0
            )
    return total


def s_max(
    a: Assemblage,
    result: RobustnessResult | None = None,
    solver_opts: dict | None = None,
) -> float:
    """Upper bound from the consistent-robustness solution."""
    if result is None:
        result = csr(a, solver_opts)
    return assemblage_distance(a, result.closest)


def compute_bounds(a: Assemblage, solver_opts: dict | None = None) -> BoundsReport:
    """Evaluate the full bound chain for one assemblage."""
    lower = s_min(a, solver_opts)
    restricted = rncsr(a, solver_opts)
    consistent = csr(a, solver_opts)
    return BoundsReport(
        s_min=lower.value,
        s_max=s_max(a, consistent),
        s_max_restricted=s_max_restricted(a, restricted),
        t_rncsr=restricted.t_min,
        t_csr=consistent.t_min,
        closest_rncsr_assemblage=restricted.closest,
        closest_csr_assemblage=consistent.closest,
    )


def apply_wiring(
    a: Assemblage,
    p_x_given_xp: np.ndarray,
    p_ap_given_axxp: np.ndarray,
    kraus: np.ndarray,
) -> Assemblage:
    """Alice-side classical wiring combined with one Kraus operator on Bob.

    ``p_x_given_xp[x, xp]`` generates the original input x from the final
    input xp; ``p_ap_given_axxp[ap, a, x, xp]`` generates the final outcome.
    The result is left unnormalized when the Kraus operator is a strict
    contraction (renormalize by the total weight for on-average monotonicity
    checks).
    """
    p_x_given_xp = np.asarray(p_x_given_xp, dtype=float)
    p_ap = np.asarray(p_ap_given_axxp, dtype=float)
    kraus = np.asarray(kraus, dtype=complex)
    n_x, n_xp = p_x_given_xp.shape
    if n_x != a.n_inputs:
        raise SteeringError("wiring input dimension mismatch")
    if p_ap.shape[1:] != (a.n_outcomes, n_x, n_xp):
        raise SteeringError("wiring outcome table shape mismatch")
    if np.max(np.abs(p_x_given_xp.sum(axis=0) - 1.0)) > 1e-9 or (
        p_x_given_xp < -1e-12
    ).any():
        raise SteeringError("p(x|x') columns must be probability vectors")
    if np.max(np.abs(p_ap.sum(axis=0) - 1.0)) > 1e-9 or (p_ap < -1e-12).any():
        raise SteeringError("p(a'|a,x,x') must normalize over a'")
    contraction = np.eye(2) - kraus.conj().T @ kraus
    if float(np.linalg.eigvalsh((contraction + contraction.conj().T) / 2).min()) < -1e-9:
        raise SteeringError("Kraus operator must satisfy K†K <= I")

    conjugated = np.einsum("ij,xajk,lk->xail", kraus, a.members, kraus.conj())
    members = np.einsum("xX,paxX,xaij->Xpij", p_x_given_xp, p_ap, conjugated)
    return Assemblage(
        members=members,
        input_weights=np.full(n_xp, 1.0 / n_xp),
    )
