"""Command-line interface.

Input files are JSON.  A problem file holds ``a, b, samples, h, H`` (q on
(a, b) = (0, 2pi)); a mixed-data file holds ``a, b, samples, H, spectrum`` and
optionally ``omega`` (q on (pi, 2pi)).  Tables are written as CSV with a
header row; every float is written with ``repr`` so it round-trips exactly.

Exit codes: 0 success, 1 a ``check`` failed, 2 unreadable input, 3 numerical
failure (the message carries the pipeline step).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy
from scipy.integrate import solve_ivp

from . import __version__
from .asymptotics import MixedData, decompose_spectrum
from .cauchy import cauchy_from_potential, eigen_data_from_cauchy
from .errors import HalfInverseError
from .grid import GridFunction
from .moments import DEFAULT_FLOOR, MomentSystem, moments_of, riesz_bounds, solve_moments
from .pipeline import Perturbation, SolveConfig, solve_half_inverse, stability_sweep, synthesize_mixed_data
from .sl_direct import (BoundaryParams, aux_spectra_lambda, choose_shift, eigenvalues_full, integrate_solution,
                        phi_boundary, psi_boundary)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("direct", "synth", "solve", "stability", "check")


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str
    output_path: str = "-"
    overrides: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.input_path or not self.output_path:
            raise ValueError("paths must be nonempty")


# -- file formats -----------------------------------------------------------

def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _read_json(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    return doc


def _field(doc: dict, key: str, path: str):
    if key not in doc:
        raise InputError(f"{path}: missing field {key!r}")
    return doc[key]


def _grid_function(doc: dict, path: str) -> GridFunction:
    try:
        return GridFunction(float(_field(doc, "a", path)), float(_field(doc, "b", path)),
                            np.asarray(_field(doc, "samples", path), dtype=float))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad potential: {exc}") from None


def read_problem(path: str):
    """``(q on (0, 2pi), h, H)`` from a problem file."""
    doc = _read_json(path)
    q = _grid_function(doc, path)
    if not (math.isclose(q.a, 0.0, abs_tol=1e-12) and math.isclose(q.b, 2 * np.pi, rel_tol=1e-12)):
        raise InputError(f"{path}: potential must live on (0, 2pi)")
    try:
        return q, float(_field(doc, "h", path)), float(_field(doc, "H", path))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def problem_document(q: GridFunction, h: float, H: float) -> dict:
    return {"a": q.a, "b": q.b, "samples": q.samples.tolist(), "h": h, "H": H}


def read_mixed(path: str) -> MixedData:
    doc = _read_json(path)
    q_right = _grid_function(doc, path)
    omega = doc.get("omega")
    try:
        return MixedData(q_right, float(_field(doc, "H", path)), np.asarray(_field(doc, "spectrum", path), float),
                         None if omega is None else float(omega))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad mixed data: {exc}") from None


def mixed_document(S: MixedData) -> dict:
    doc = {"a": S.q_right.a, "b": S.q_right.b, "samples": S.q_right.samples.tolist(), "H": S.H,
           "spectrum": S.spectrum.tolist()}
    if S.omega is not None:
        doc["omega"] = S.omega
    return doc


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=1, default=_num) + "\n"


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- commands ---------------------------------------------------------------

def _solve_config(ov: dict) -> SolveConfig:
    kw = {k: ov[k] for k in ("n_eigs", "grid_size", "n_aux", "n_gl") if ov.get(k) is not None}
    if ov.get("shift") is not None:
        kw["shift_policy"] = ov["shift"]
    if ov.get("omega_mode") is not None:
        kw["omega_mode"] = ov["omega_mode"]
    return SolveConfig(**kw)


def cmd_direct(cfg: RunConfig) -> int:
    q, h, H = read_problem(cfg.input_path)
    N = cfg.overrides.get("n_eigs") or 32
    rho = eigenvalues_full(q, BoundaryParams(h, H), N)
    omega = h + H + 0.5 * q.integral()
    dec = decompose_spectrum(rho, omega)
    rows = [(n + 1, rho[n], np.sign(rho[n]) * rho[n] ** 2, dec.kappas[n], omega) for n in range(N)]
    _write(cfg.output_path, _csv(("n", "rho_n", "lambda_n", "kappa_n", "omega"), rows))
    return EXIT_OK


def cmd_synth(cfg: RunConfig) -> int:
    q, h, H = read_problem(cfg.input_path)
    S = synthesize_mixed_data(q, h, H, cfg.overrides.get("n_eigs") or 32)
    _write(cfg.output_path, _json(mixed_document(S)))
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    S = read_mixed(cfg.input_path)
    rep = solve_half_inverse(S, _solve_config(cfg.overrides))
    doc = {"h": rep.h, "diagnostics": rep.diagnostics,
           "q_left": {"a": rep.q_left.a, "b": rep.q_left.b, "samples": rep.q_left.samples.tolist()}}
    _write(cfg.output_path, _json(doc))
    table = cfg.overrides.get("table")
    if table:
        _write(table, _csv(("x", "q_left"), zip(rep.q_left.nodes, rep.q_left.samples)))
    return EXIT_OK


def cmd_stability(cfg: RunConfig) -> int:
    q, h, H = read_problem(cfg.input_path)
    ov = cfg.overrides
    amp = ov.get("amplitude") or 0.05
    p = Perturbation(amp, amp, seed=cfg.seed, region=ov.get("region") or "both")
    rows, _ = stability_sweep((q, h, H), p, ov.get("trials") or 20, _solve_config({**ov, "n_eigs": None}),
                              n_eigs=ov.get("n_eigs") or 32, Q=ov.get("Q"))
    header = ("trial", "d", "output_distance", "truth_distance", "ratio", "truth_ratio", "kernel_distance",
              "in_ball", "error")
    _write(cfg.output_path, _csv(header, [(r.trial, r.d, r.output_distance, r.truth_distance, r.ratio,
                                           r.truth_ratio, r.kernel_distance, r.in_ball, r.error) for r in rows]))
    return EXIT_OK


def _phi_squared_norms(q_left: GridFunction, h: float, lambdas) -> np.ndarray:
    """``int_0^pi phi(x, lam)**2 dx`` by an adaptive Runge-Kutta integration."""
    out = []
    for lam in lambdas:
        def rhs(x, y, lam=lam):
            return [y[1], (q_left.spline(x) - lam) * y[0], y[0] ** 2]
        sol = solve_ivp(rhs, (0.0, np.pi), [1.0, h, 0.0], method="DOP853", rtol=1e-11, atol=1e-12)
        out.append(sol.y[2, -1])
    return np.array(out)


def run_checks(q: GridFunction, h: float, H: float, N: int = 16):
    """Invariant suite on one problem; returns rows ``(name, value, tolerance, passed)``."""
    rows = []
    bp = BoundaryParams(h, H)
    worst = 0.0
    left, right = q.restrict(0.0, np.pi), q.restrict(np.pi, 2 * np.pi)
    for lam in np.linspace(-2.0, 50.0, 14):
        phi = phi_boundary(left, h, float(lam))
        psi = psi_boundary(right, H, float(lam))
        full = integrate_solution(q, float(lam), 1.0, h)
        joint = phi.derivative * psi.value - phi.value * psi.derivative
        scale = 1.0 + abs(phi.derivative * psi.value) + abs(phi.value * psi.derivative)
        worst = max(worst, abs(joint - full.derivative - H * full.value) / scale)
    rows.append(("wronskian_routes_agree", worst, 1e-8, worst <= 1e-8))

    rho = eigenvalues_full(q, bp, 2 * N)
    lam = np.sign(rho) * rho**2
    rows.append(("spectrum_increasing", float(np.min(np.diff(lam))), 0.0, bool(np.all(np.diff(lam) > 0))))

    omega = h + H + 0.5 * q.integral()
    k = decompose_spectrum(rho, omega).kappas
    n = np.arange(1, 2 * N + 1)
    tail_N = float(np.sum(k[(n >= N // 2) & (n <= N)] ** 2))
    tail_2N = float(np.sum(k[n >= N] ** 2))
    rows.append(("kappa_tail_decreases", tail_2N - tail_N, 0.0, tail_2N <= tail_N))

    q_left = q.restrict(0.0, np.pi)
    ed = eigen_data_from_cauchy(cauchy_from_potential(q_left, h, 4 * N), N // 2, norming="derivative")
    quad = _phi_squared_norms(q_left, h, ed.lambdas)
    rel = float(np.max(np.abs(ed.alphas - quad) / quad))
    rows.append(("lagrange_identity_alpha", rel, 1e-6, rel <= 1e-6))

    mu2, nu2 = aux_spectra_lambda(q.restrict(np.pi, 2 * np.pi), H, N)
    shift = choose_shift([mu2, nu2])
    mus, nus = np.sqrt(mu2 + shift), np.sqrt(nu2 + shift)
    target = np.cos(np.arange(N))
    f = solve_moments(MomentSystem(mus, "sine", target))
    err = float(np.max(np.abs(moments_of(f, mus, "sine") - target)))
    rows.append(("moment_solver_exact", err, 1e-8, err <= 1e-8))
    smin = min(riesz_bounds(mus, "sine").smallest_singular_value,
               riesz_bounds(nus, "cosine").smallest_singular_value)
    rows.append(("gram_smallest_singular_value", smin, DEFAULT_FLOOR, smin >= DEFAULT_FLOOR))
    return rows


def cmd_check(cfg: RunConfig) -> int:
    q, h, H = read_problem(cfg.input_path)
    rows = run_checks(q, h, H, cfg.overrides.get("n_eigs") or 16)
    _write(cfg.output_path, _csv(("check", "value", "tolerance", "passed"), rows))
    return EXIT_OK if all(r[3] for r in rows) else EXIT_CHECK_FAILED


_DISPATCH = {"direct": cmd_direct, "synth": cmd_synth, "solve": cmd_solve, "stability": cmd_stability,
             "check": cmd_check}


def run(cfg: RunConfig) -> int:
    try:
        return _DISPATCH[cfg.command](cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except HalfInverseError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


# -- argument parsing -------------------------------------------------------

def version_string() -> str:
    import numba

    return (f"halfinv {__version__} (python {platform.python_version()}, numpy {np.__version__}, "
            f"scipy {scipy.__version__}, numba {numba.__version__})")


def _shift(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'auto' or a number") from None


def _omega_mode(text: str):
    if text in ("exact", "estimate"):
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'exact', 'estimate' or a number") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="halfinv", description="Half-inverse Sturm-Liouville solver")
    parser.add_argument("--version", action="version", version=version_string())
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"direct": "eigenvalues and asymptotic split of a full problem",
             "synth": "mixed data of a full problem",
             "solve": "recover q on (0, pi) and h from mixed data",
             "stability": "empirical Lipschitz sweep around a base problem",
             "check": "invariant suite on a full problem"}
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("input", help="input JSON file, or - for stdin")
        p.add_argument("-o", "--output", default="-", help="output file (default stdout)")
        p.add_argument("--n-eigs", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)
        if name in ("solve", "stability"):
            p.add_argument("--grid-size", type=int, default=None)
            p.add_argument("--shift", type=_shift, default=None, help="'auto' or a fixed shift")
            p.add_argument("--omega-mode", type=_omega_mode, default=None, help="exact, estimate or a number")
            p.add_argument("--n-aux", type=int, default=None)
            p.add_argument("--n-gl", type=int, default=None)
        if name == "solve":
            p.add_argument("--table", default=None, help="also write x,q_left as CSV here")
        if name == "stability":
            p.add_argument("--amplitude", type=float, default=None)
            p.add_argument("--trials", type=int, default=None)
            p.add_argument("--Q", type=float, default=None, help="ball radius for the in_ball column")
            p.add_argument("--region", choices=("left", "right", "both"), default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ov = {k: v for k, v in vars(args).items() if k not in ("command", "input", "output", "seed")}
    try:
        cfg = RunConfig(args.command, args.input, args.output, ov, args.seed)
        return run(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
