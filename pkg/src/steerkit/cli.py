"""Command-line front end: bound sweeps, ellipsoid data, LHS surfaces,
and assemblage dumps.

Exit codes: 0 success, 2 usage or configuration error, 3 solver failure,
4 domain error (unphysical or singular state).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import geometry, sdp, states, steering

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_DOMAIN = 4

_FAMILIES = {
    "werner": states.werner,
    "horodecki": states.horodecki,
    "bell2": states.bell_diagonal_rank2,
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("STEERKIT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(
                f"STEERKIT_SEED must be an integer, got {env!r}", EXIT_CONFIG
            )
    return 0


def _solver_opts(args) -> dict:
    opts = {}
    if args.tol_gap is not None:
        opts["gap_tol"] = args.tol_gap
    if args.tol_feas is not None:
        opts["feas_tol"] = args.tol_feas
    return opts


def _state_grid(args):
    """Resolve --state/--p/--p-range into [(p_label, density matrix), ...]."""
    spec = args.state
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        try:
            rho = states.load_state(path)
        except OSError as exc:
            raise CliError(f"cannot read state file: {exc}", EXIT_CONFIG)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise CliError(f"invalid state file {path}: {exc}", EXIT_DOMAIN)
        return [(float(args.p) if args.p is not None else 0.0, rho)]
    if spec not in _FAMILIES:
        raise CliError(
            f"unknown state {spec!r}; expected werner, horodecki, bell2, "
            "or file:<path>",
            EXIT_CONFIG,
        )
    family = _FAMILIES[spec]
    if args.p_range is not None:
        if args.p is not None:
            raise CliError("--p and --p-range are mutually exclusive", EXIT_CONFIG)
        parts = args.p_range.split(":")
        if len(parts) != 3:
            raise CliError("--p-range expects start:end:steps", EXIT_CONFIG)
        try:
            start, end, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise CliError(f"bad --p-range {args.p_range!r}", EXIT_CONFIG)
        if not (0.0 <= start <= end <= 1.0) or steps < 1:
            raise CliError(
                "--p-range needs 0 <= start <= end <= 1 and steps >= 1",
                EXIT_CONFIG,
            )
        grid = np.linspace(start, end, steps)
    elif args.p is not None:
        grid = np.array([float(args.p)])
    else:
        raise CliError(f"--p or --p-range required for {spec}", EXIT_CONFIG)
    out = []
    for p in grid:
        p = float(p)
        try:
            out.append((p, family(p)))
        except ValueError as exc:
            raise CliError(str(exc), EXIT_CONFIG)
    return out


def _single_state(args):
    grid = _state_grid(args)
    if len(grid) != 1:
        raise CliError("this command takes a single state, not a sweep", EXIT_CONFIG)
    return grid[0][1]


def _parse_triad(spec: str):
    if spec == "default":
        rotation = np.eye(3)
    elif spec.startswith("zrot:"):
        try:
            rotation = geometry.rotation_about_z(float(spec[len("zrot:"):]))
        except ValueError:
            raise CliError(f"bad rotation angle in {spec!r}", EXIT_CONFIG)
    elif spec.startswith("matrix:"):
        try:
            entries = [float(v) for v in spec[len("matrix:"):].split(",")]
        except ValueError:
            raise CliError(f"bad matrix entries in {spec!r}", EXIT_CONFIG)
        if len(entries) != 9:
            raise CliError("--triad matrix needs 9 comma-separated values", EXIT_CONFIG)
        rotation = np.array(entries).reshape(3, 3)
    else:
        raise CliError(
            f"unknown triad {spec!r}; expected default, zrot:<phi>, "
            "or matrix:<9 values>",
            EXIT_CONFIG,
        )
    try:
        return geometry.mub_triad(rotation)
    except geometry.GeometryError as exc:
        raise CliError(str(exc), EXIT_CONFIG)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_bounds(args) -> int:
    grid = _state_grid(args)
    opts = _solver_opts(args)

    def one(item):
        i, (p, rho) = item
        asm = steering.assemblage_from_state(rho, states.pauli_triad())
        try:
            return steering.compute_bounds(asm, opts)
        except sdp.SolverFailure as exc:
            raise sdp.SolverFailure(f"row {i} (p={p:g}): {exc}") from exc

    reports = _ordered_map(one, list(enumerate(grid)), args.jobs, kind="row")
    lines = ["p,s_min,s_max,s_max_r,t_rncsr,t_csr"]
    for (p, _), rep in zip(grid, reports):
        vals = (p, rep.s_min, rep.s_max, rep.s_max_restricted, rep.t_rncsr, rep.t_csr)
        lines.append(",".join(format(v, ".9g") for v in vals))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _ordered_map(fn, items, jobs, kind):
    """Evaluate fn over items (optionally in parallel), keeping input order."""
    try:
        if jobs and jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]
    except sdp.SolverFailure as exc:
        raise CliError(f"solver failure ({kind}): {exc}", EXIT_SOLVER)


def cmd_qse(args) -> int:
    rho = _single_state(args)
    try:
        ell = geometry.qse(rho)
    except geometry.SingularStateError as exc:
        raise CliError(str(exc), EXIT_DOMAIN)
    payload = {
        "center": ell.center.tolist(),
        "semiaxes": ell.semiaxes.tolist(),
        "orientation": ell.orientation.tolist(),
        "volume": geometry.ellipsoid_volume(ell),
    }
    _emit(args, json.dumps(payload) + "\n")
    return EXIT_OK


def cmd_lhs_surface(args) -> int:
    rho = _single_state(args)
    seed = _resolve_seed(args)
    opts = _solver_opts(args)
    if args.samples < 1:
        raise CliError("--samples must be at least 1", EXIT_CONFIG)

    def run(map_fn):
        return geometry.lhs_surface(rho, args.samples, seed, opts, map_fn)

    try:
        if args.jobs and args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                cloud = run(pool.map)
        else:
            cloud = run(map)
    except sdp.SolverFailure as exc:
        raise CliError(f"solver failure: {exc}", EXIT_SOLVER)
    try:
        report = geometry.witness_from_cloud(rho, cloud)
    except geometry.SingularStateError as exc:
        raise CliError(str(exc), EXIT_DOMAIN)
    text = geometry.cloud_to_text(cloud)
    summary = geometry.summary_to_json(cloud, report, args.samples) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
        sys.stdout.write(summary)
    return EXIT_OK


def cmd_assemblage(args) -> int:
    rho = _single_state(args)
    triad = _parse_triad(args.triad)
    try:
        asm = steering.assemblage_from_state(rho, triad)
    except steering.SteeringError as exc:
        raise CliError(str(exc), EXIT_DOMAIN)
    _emit(args, asm.to_json() + "\n")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", required=True,
                        help="werner | horodecki | bell2 | file:<path>")
    parser.add_argument("--p", type=float, default=None,
                        help="mixing parameter in [0, 1]")
    parser.add_argument("--p-range", default=None, metavar="A:B:N",
                        help="inclusive sweep start:end:steps")
    parser.add_argument("--seed", type=int, default=None,
                        help="RNG seed (fallback: STEERKIT_SEED, then 0)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="concurrent evaluations (output order is fixed)")
    parser.add_argument("--out", default=None, help="write output to this file")
    parser.add_argument("--tol-gap", type=float, default=None,
                        help="SDP duality-gap tolerance")
    parser.add_argument("--tol-feas", type=float, default=None,
                        help="SDP feasibility tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steerkit",
        description="Trace-distance steering bounds and steering geometry "
                    "for two-qubit states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="CSV sweep of all five quantifiers")
    _add_common(p_bounds)
    p_bounds.set_defaults(func=cmd_bounds)

    p_qse = sub.add_parser("qse", help="steering ellipsoid as JSON")
    _add_common(p_qse)
    p_qse.set_defaults(func=cmd_qse)

    p_surf = sub.add_parser("lhs-surface",
                            help="sample the LHS surface and volume witness")
    _add_common(p_surf)
    p_surf.add_argument("--samples", type=int, default=1000,
                        help="number of random triad rotations")
    p_surf.set_defaults(func=cmd_lhs_surface)

    p_asm = sub.add_parser("assemblage", help="dump a triad assemblage as JSON")
    _add_common(p_asm)
    p_asm.add_argument("--triad", default="default",
                       help="default | zrot:<phi> | matrix:<9 values>")
    p_asm.set_defaults(func=cmd_assemblage)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"steerkit: {exc}", file=sys.stderr)
        return exc.code
    except (steering.SteeringError, geometry.GeometryError, ValueError) as exc:
        print(f"steerkit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
