"""Command-line interface.

State files are UTF-8 JSON objects with the schema

    {"modes": n, "ordering": "xxpp" | "xpxp",
     "mean": [2n reals], "cov": [[2n x 2n reals, row-major]]}

The ordering field is mandatory so that xxpp/xpxp mix-ups fail loudly.
Numbers are serialized with full double precision (shortest round-trip
decimals, up to 17 significant digits).

Exit codes: 0 success, 2 input or physicality error, 3 numerical failure,
64 unknown command.  ``--json`` emits a machine-readable report with a fixed
field set per command; the default output is aligned plain text.  The
environment variable GAUSSFID_TOL_PURE overrides the pure-pair discard
tolerance when --tol-pure is not given.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    DEFAULT_PHYS_TOL,
    GaussianState,
    ModeOrdering,
    as_xxpp,
    validate_state,
    williamson,
)
from .errors import (
    GaussfidError,
    InvalidParameter,
    InvalidState,
    NumericalError,
    PureStateError,
    StateFileError,
    TruncationError,
)
from .fidelity import DEFAULT_PURE_TOL, fidelity, invariant_set
from .metrology import (
    DEFAULT_METRIC_TOL,
    bures_distance,
    bures_metric,
    error_bounds,
    get_family,
    qfi_scalar,
)
from . import fock
from .states import random_state

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64

ORACLE_CHECK_THRESHOLD = 1e-6

COMMANDS = ("fidelity", "invariants", "bures", "metric", "qfi", "bounds",
            "oracle-check", "williamson", "random")


# ---------------------------------------------------------------------------
# state files
# ---------------------------------------------------------------------------

def parse_state_file(path: str | Path, phys_tol: float = DEFAULT_PHYS_TOL) -> GaussianState:
    """Load and validate a state file, converting to the canonical xxpp layout."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise StateFileError(f"{path}: top-level value must be an object")
    for key in ("modes", "ordering", "mean", "cov"):
        if key not in payload:
            raise StateFileError(f"{path}: missing required field {key!r}")
    try:
        n = int(payload["modes"])
        ordering = ModeOrdering(payload["ordering"])
        mean = np.asarray(payload["mean"], dtype=float)
        cov = np.asarray(payload["cov"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{path}: {exc}") from exc
    if mean.shape != (2 * n,) or cov.shape != (2 * n, 2 * n):
        raise StateFileError(
            f"{path}: mean/cov shapes {mean.shape}/{cov.shape} do not match modes={n}")
    state = GaussianState(n, mean, cov, ordering)
    report = validate_state(state, max(phys_tol, 1e-8))
    if not report.symmetric:
        raise InvalidState(f"{path}: covariance matrix is not symmetric within 1e-8")
    if not report.physical:
        raise InvalidState(
            f"{path}: covariance matrix is unphysical "
            f"(min_eig_shifted = {report.min_eig_shifted:.6e} < 0)")
    return as_xxpp(state)


def write_state_file(path: str | Path, state: GaussianState) -> None:
    state = as_xxpp(state)
    payload = {
        "modes": state.n,
        "ordering": state.ordering.value,
        "mean": state.u.tolist(),
        "cov": state.V.tolist(),
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def _digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _input_entry(path: str | Path) -> dict:
    return {"path": str(path), "sha256": _digest(path)}


def _parse_array_arg(value: str, what: str) -> np.ndarray:
    """Accept an inline JSON array or a path to a JSON file holding one."""
    candidate = Path(value)
    try:
        if candidate.exists():
            payload = json.loads(candidate.read_text(encoding="utf-8"))
        else:
            payload = json.loads(value)
    except (OSError, json.JSONDecodeError) as exc:
        raise StateFileError(f"cannot parse {what}: {exc}") from exc
    try:
        return np.asarray(payload, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{what} is not a numeric array: {exc}") from exc


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit(report: dict, as_json: bool) -> None:
    report = _jsonable(report)
    if as_json:
        print(json.dumps(report, indent=1))
        return
    width = max((len(k) for k in report), default=0)
    for key, value in report.items():
        if isinstance(value, (dict, list)):
            rendered = json.dumps(value)
        else:
            rendered = repr(value) if isinstance(value, float) else str(value)
        print(f"{key.ljust(width)}  {rendered}")


def _tolerances(args) -> dict:
    return {"phys": args.tol_phys, "pure": args.tol_pure, "metric": args.tol_metric}


def _fidelity_warnings(rep) -> list:
    warnings = []
    if rep.discarded_pairs:
        warnings.append(
            f"discarded {rep.discarded_pairs} unit eigenvalue pair(s) of W_aux "
            "(pure-mode reduction)")
    if rep.clamped:
        warnings.append(f"fidelity clamped to 1 from raw value {rep.F_raw!r}")
    return warnings


def _fidelity_fields(rep) -> dict:
    inv = rep.invariants
    return {
        "F": rep.F,
        "F0": rep.F0,
        "Ftot": rep.Ftot,
        "det_v1_plus_v2": rep.det_v_sum,
        "disp_exponent": rep.disp_exponent,
        "waux_spectrum": rep.waux_spectrum,
        "discarded_pairs": rep.discarded_pairs,
        "invariants": {
            "I2k": inv.i2k,
            "Gamma": inv.gamma,
            "Lambda": inv.lam,
            "Delta": inv.delta,
            "char_coeffs": inv.char_coeffs,
        },
    }


# ---------------------------------------------------------------------------
# command handlers; each returns (report dict, exit code)
# ---------------------------------------------------------------------------

def _cmd_fidelity(args):
    s1 = parse_state_file(args.state_a, args.tol_phys)
    s2 = parse_state_file(args.state_b, args.tol_phys)
    rep = fidelity(s1, s2, phys_tol=args.tol_phys, pure_tol=args.tol_pure)
    report = {
        "command": "fidelity",
        "inputs": {"a": _input_entry(args.state_a), "b": _input_entry(args.state_b)},
        **_fidelity_fields(rep),
        "tolerances": _tolerances(args),
        "warnings": _fidelity_warnings(rep),
    }
    return report, EXIT_OK


def _cmd_invariants(args):
    s1 = parse_state_file(args.state_a, args.tol_phys)
    s2 = parse_state_file(args.state_b, args.tol_phys)
    inv = invariant_set(s1.V, s2.V)
    n = inv.n
    report = {
        "command": "invariants",
        "inputs": {"a": _input_entry(args.state_a), "b": _input_entry(args.state_b)},
        "modes": n,
        "I2k": inv.i2k,
        "Gamma": inv.gamma,
        "Lambda": inv.lam,
        "Delta": inv.delta,
        "char_coeffs": inv.char_coeffs,
        "chi0": inv.chi(0.0),
        "chi1": inv.chi(1.0),
        "chi0_identity_residual": inv.chi(0.0) * (-1.0) ** n * inv.delta - inv.gamma,
        "chi1_identity_residual": inv.chi(1.0) * (-1.0) ** n * inv.delta - inv.lam,
        "tolerances": _tolerances(args),
        "warnings": [],
    }
    return report, EXIT_OK


def _cmd_bures(args):
    s1 = parse_state_file(args.state_a, args.tol_phys)
    s2 = parse_state_file(args.state_b, args.tol_phys)
    rep = fidelity(s1, s2, phys_tol=args.tol_phys, pure_tol=args.tol_pure)
    report = {
        "command": "bures",
        "inputs": {"a": _input_entry(args.state_a), "b": _input_entry(args.state_b)},
        "bures_distance": 2.0 * (1.0 - rep.F),
        "F": rep.F,
        "convention": "D_B = 2(1 - F); squared-distance normalization",
        "tolerances": _tolerances(args),
        "warnings": _fidelity_warnings(rep),
    }
    return report, EXIT_OK


def _cmd_metric(args):
    s = parse_state_file(args.state_a, args.tol_phys)
    du = _parse_array_arg(args.du, "--du")
    dV = _parse_array_arg(args.dv, "--dv")
    ev = bures_metric(s, du, dV, tol=args.tol_metric)
    warnings = []
    if ev.skipped_terms:
        warnings.append(
            f"skipped {ev.skipped_terms} metric term(s) with w_i w_j = 1 (pseudo-inverse rule)")
    report = {
        "command": "metric",
        "inputs": {"a": _input_entry(args.state_a)},
        "ds2": ev.ds2,
        "mean_part": ev.mean_part,
        "cov_part": ev.cov_part,
        "skipped_terms": ev.skipped_terms,
        "tolerances": _tolerances(args),
        "warnings": warnings,
    }
    return report, EXIT_OK


def _cmd_qfi(args):
    family = get_family(args.family)
    value = qfi_scalar(family, args.theta, mode=args.mode, h=args.h,
                       metric_tol=args.tol_metric)
    report = {
        "command": "qfi",
        "family": args.family,
        "theta": args.theta,
        "mode": args.mode,
        "h": args.h,
        "qfi": value,
        "tolerances": _tolerances(args),
        "warnings": [],
    }
    return report, EXIT_OK


def _cmd_bounds(args):
    b = error_bounds(args.fidelity, args.copies)
    report = {
        "command": "bounds",
        "fidelity_used": b.fidelity_used,
        "copies": b.copies,
        "lower": b.lower,
        "upper": b.upper,
        "tolerances": _tolerances(args),
        "warnings": [],
    }
    return report, EXIT_OK


def _cmd_oracle_check(args):
    rng = np.random.default_rng(args.seed)
    circuit_a = fock.random_circuit(args.modes, rng)
    circuit_b = fock.random_circuit(args.modes, rng)
    built_a = fock.build_circuit_state(circuit_a, args.cutoff)
    built_b = fock.build_circuit_state(circuit_b, args.cutoff)
    f_engine = fidelity(built_a.gaussian, built_b.gaussian,
                        phys_tol=args.tol_phys, pure_tol=args.tol_pure).F
    f_oracle = fock.uhlmann_fidelity_matrix(built_a.fock, built_b.fock)
    diff = abs(f_engine - f_oracle)
    passed = diff < ORACLE_CHECK_THRESHOLD
    warnings = []
    for name, built in (("a", built_a), ("b", built_b)):
        if built.fock.trace_deficit > 0:
            warnings.append(
                f"state {name}: truncation trace deficit {built.fock.trace_deficit:.3e}")
    report = {
        "command": "oracle-check",
        "seed": args.seed,
        "modes": args.modes,
        "cutoff": args.cutoff or fock.DEFAULT_CUTOFFS[args.modes],
        "F_engine": f_engine,
        "F_oracle": f_oracle,
        "abs_diff": diff,
        "threshold": ORACLE_CHECK_THRESHOLD,
        "passed": passed,
        "tolerances": _tolerances(args),
        "warnings": warnings,
    }
    return report, EXIT_OK if passed else EXIT_NUMERICAL


def _cmd_williamson(args):
    s = parse_state_file(args.state_a, args.tol_phys)
    dec = williamson(s.V)
    omega_resid = dec.S @ _omega(s.n) @ dec.S.T - _omega(s.n)
    D = np.diag(np.concatenate([dec.nu, dec.nu]))
    recon_resid = dec.S @ D @ dec.S.T - s.V
    report = {
        "command": "williamson",
        "inputs": {"a": _input_entry(args.state_a)},
        "nu": dec.nu,
        "S": dec.S,
        "residual_symplectic": float(np.max(np.abs(omega_resid))),
        "residual_reconstruction": float(np.max(np.abs(recon_resid))),
        "tolerances": _tolerances(args),
        "warnings": [],
    }
    return report, EXIT_OK


def _omega(n):
    from .core import make_symplectic_form
    return make_symplectic_form(n)


def _cmd_random(args):
    state = random_state(args.modes, args.seed, max_squeeze=args.max_squeeze,
                         max_thermal=args.max_thermal, max_disp=args.max_disp)
    write_state_file(args.output, state)
    report = {
        "command": "random",
        "modes": args.modes,
        "seed": args.seed,
        "output": str(args.output),
        "sha256": _digest(args.output),
        "tolerances": _tolerances(args),
        "warnings": [],
    }
    return report, EXIT_OK


HANDLERS = {
    "fidelity": _cmd_fidelity,
    "invariants": _cmd_invariants,
    "bures": _cmd_bures,
    "metric": _cmd_metric,
    "qfi": _cmd_qfi,
    "bounds": _cmd_bounds,
    "oracle-check": _cmd_oracle_check,
    "williamson": _cmd_williamson,
    "random": _cmd_random,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _default_pure_tol() -> float:
    env = os.environ.get("GAUSSFID_TOL_PURE")
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise InvalidParameter(f"GAUSSFID_TOL_PURE={env!r} is not a number") from None
    return DEFAULT_PURE_TOL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--tol-phys", type=float, default=DEFAULT_PHYS_TOL,
                        help="physicality tolerance")
    common.add_argument("--tol-pure", type=float, default=None,
                        help="pure-pair discard tolerance (env GAUSSFID_TOL_PURE)")
    common.add_argument("--tol-metric", type=float, default=DEFAULT_METRIC_TOL,
                        help="metric term-skipping tolerance")

    parser = argparse.ArgumentParser(
        prog="gaussfid",
        description="Fidelity and derived quantities for multimode Gaussian states.")
    parser.add_argument("--version", action="version", version=f"gaussfid {__version__}")
    sub = parser.add_subparsers(dest="command")

    two_state = {"fidelity": "Uhlmann fidelity between two state files",
                 "invariants": "symplectic invariants of a state pair",
                 "bures": "Bures distance (2(1-F) convention)"}
    for name, help_text in two_state.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("state_a")
        p.add_argument("state_b")

    p = sub.add_parser("metric", parents=[common],
                       help="Bures metric element for a perturbation (du, dV)")
    p.add_argument("state_a")
    p.add_argument("--du", required=True, help="JSON array (inline or file path)")
    p.add_argument("--dv", required=True, help="JSON 2n x 2n array (inline or file path)")

    p = sub.add_parser("qfi", parents=[common],
                       help="quantum Fisher information of a built-in family")
    p.add_argument("--family", required=True, help="one of: " + ", ".join(
        ("coherent-displacement", "thermal-nbar", "squeeze-r", "phase-theta")))
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--mode", choices=["analytic", "finite_difference"], default="analytic")
    p.add_argument("--h", type=float, default=None, help="step size override")

    p = sub.add_parser("bounds", parents=[common],
                       help="discrimination error-probability bounds from a fidelity")
    p.add_argument("--fidelity", type=float, required=True)
    p.add_argument("--copies", type=int, required=True)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="cross-check the engine against the Fock-space oracle")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--modes", type=int, choices=[1, 2], required=True)
    p.add_argument("--cutoff", type=int, default=None)

    p = sub.add_parser("williamson", parents=[common],
                       help="Williamson decomposition of a state file")
    p.add_argument("state_a")

    p = sub.add_parser("random", parents=[common], help="write a random state file")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--max-squeeze", type=float, default=1.0)
    p.add_argument("--max-thermal", type=float, default=2.0)
    p.add_argument("--max-disp", type=float, default=1.0)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        build_parser().print_usage(sys.stderr)
        return EXIT_USAGE
    if argv[0] not in COMMANDS and argv[0] not in ("-h", "--help", "--version"):
        print(f"gaussfid: unknown command {argv[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    args = build_parser().parse_args(argv)
    if getattr(args, "tol_pure", None) is None and hasattr(args, "tol_pure"):
        try:
            args.tol_pure = _default_pure_tol()
        except InvalidParameter as exc:
            print(f"gaussfid: {exc}", file=sys.stderr)
            return EXIT_INPUT
    try:
        report, code = HANDLERS[args.command](args)
    except (StateFileError, InvalidState, InvalidParameter) as exc:
        print(f"gaussfid: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, TruncationError, PureStateError) as exc:
        print(f"gaussfid: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except GaussfidError as exc:
        print(f"gaussfid: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(report, args.json)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
