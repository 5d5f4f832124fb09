"""End-to-end half-inverse solver, data synthesis and stability sweeps.

Stages of :func:`solve_half_inverse` (numbers are stamped on raised errors):

1. omega and Delta from the spectrum;
2. omega_plus, omega_minus, the auxiliary spectra {mu_n}, {nu_n} and the
   psi-values from the known right half, plus a spectral shift;
3. right-hand sides k_{0,n}, k_n;
4. kernels K0, K from the two moment problems;
5. q on (0, pi) and h from the Cauchy data (K, K0, omega_minus).
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._trig import cos_sqrt, signed_sqrt, signed_square, sin_sqrt
from .asymptotics import MixedData, ball_norms, decompose_spectrum, mixed_distance, omega_pm
from .cauchy import CauchyData, EigenData, eigen_data_from_cauchy, gelfand_levitan_reconstruct
from .char_product import ZeroProductFunction, delta_from_zeros
from .errors import DenominatorUnderflow, HalfInverseError
from .grid import GridFunction, concatenate, default_samples
from .kernels import KERNEL_SAMPLES
from .moments import DEFAULT_FLOOR, MomentSystem, riesz_bounds, solve_moments
from .sl_direct import (DEFAULT_CONFIG, BoundaryParams, IntegratorConfig, aux_spectra_lambda, choose_shift,
                        eigenvalues_full, psi_boundary)

PI = np.pi


@dataclass(frozen=True)
class Tolerances:
    gram_floor: float = DEFAULT_FLOOR
    denominator_floor: float = 1e-8
    integrator: IntegratorConfig = DEFAULT_CONFIG


@dataclass(frozen=True)
class SolveConfig:
    """Solver settings.

    ``shift_policy`` is ``"auto"`` or a float (fixed shift).  ``omega_mode`` is
    ``"exact"`` (use ``MixedData.omega``), ``"estimate"``, or a float.
    ``n_eigs`` of None uses the whole spectrum.  ``n_aux`` (default ``2 N``)
    is the number of auxiliary eigenvalues and hence of moments per kernel;
    past index N the values of Delta rest on the asymptotic tail of the
    zeros.  ``n_gl`` (default ``N``) is the number of eigenpairs handed to
    the Gelfand-Levitan step.
    """

    n_eigs: int | None = None
    grid_size: int = 256
    shift_policy: str | float = "auto"
    omega_mode: str | float = "exact"
    n_aux: int | None = None
    n_gl: int | None = None
    kernel_samples: int = KERNEL_SAMPLES
    tail_factor: int = 8
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.n_eigs is not None and self.n_eigs < 8:
            raise ValueError("n_eigs must be >= 8")
        if self.grid_size < 64:
            raise ValueError("grid_size must be >= 64")
        if not (self.shift_policy == "auto" or isinstance(self.shift_policy, (int, float))):
            raise ValueError(f"bad shift policy {self.shift_policy!r}")


@dataclass
class SolveReport:
    q_left: GridFunction
    h: float
    diagnostics: dict
    cauchy: CauchyData | None = None
    eigen_data: EigenData | None = None
    k0: np.ndarray | None = None
    k: np.ndarray | None = None
    mus: np.ndarray | None = None
    nus: np.ndarray | None = None


@contextlib.contextmanager
def _step(n):
    try:
        yield
    except HalfInverseError as exc:
        if exc.step is None:
            exc.step = n
        raise


def compute_rhs(S: MixedData, delta: ZeroProductFunction, mus, nus, omega_minus: float, shift: float = 0.0,
                floor: float = 1e-8, cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Moments k_{0,n} (sine, at mu_n) and k_n (cosine, at nu_n).

    ``mus``, ``nus``, ``delta`` and ``omega_minus`` refer to the shifted
    problem; psi is integrated for the unshifted data at lam - shift, which is
    the same function.
    """
    mu2 = signed_square(mus)
    nu2 = signed_square(nus)
    psi_mu = np.array([psi_boundary(S.q_right, S.H, lam - shift, cfg).derivative for lam in mu2])
    psi_nu = np.array([psi_boundary(S.q_right, S.H, lam - shift, cfg).value for lam in nu2])
    mus = np.asarray(mus, float)
    if np.any(np.abs(psi_mu) < floor * np.maximum(np.abs(mus), 1.0)):
        i = int(np.argmin(np.abs(psi_mu) / np.maximum(np.abs(mus), 1.0)))
        raise DenominatorUnderflow(f"|psi'(pi, mu_{i + 1})| = {abs(psi_mu[i]):.3e} too small")
    if np.any(np.abs(psi_nu) < floor):
        i = int(np.argmin(np.abs(psi_nu)))
        raise DenominatorUnderflow(f"|psi(pi, nu_{i + 1})| = {abs(psi_nu[i]):.3e} too small")
    d_mu = delta_from_zeros(delta, mu2)
    d_nu = delta_from_zeros(delta, nu2)
    k0 = -mus * (cos_sqrt(mu2, PI) + omega_minus * sin_sqrt(mu2, PI) + d_mu / psi_mu)
    k = nu2 * sin_sqrt(nu2, PI) - omega_minus * cos_sqrt(nu2, PI) + d_nu / psi_nu
    return k0, k


def _omega(S: MixedData, mode, spectrum) -> float:
    if mode == "exact":
        if S.omega is None:
            raise ValueError("omega_mode 'exact' needs MixedData.omega")
        return float(S.omega)
    if mode == "estimate":
        return decompose_spectrum(spectrum).omega
    return float(mode)


def solve_half_inverse(S: MixedData, cfg: SolveConfig = SolveConfig()) -> SolveReport:
    """Recover q on (0, pi) and h from mixed data."""
    tol = cfg.tolerances
    icfg = tol.integrator
    N = S.N if cfg.n_eigs is None else min(cfg.n_eigs, S.N)
    M = cfg.n_aux if cfg.n_aux is not None else 2 * N
    n_gl = min(cfg.n_gl if cfg.n_gl is not None else N, M)
    lam = S.lambdas[:N]

    with _step(1):
        omega = _omega(S, cfg.omega_mode, S.spectrum[:N])

    with _step(2):
        omega_plus = omega_pm(S.q_right, S.H)
        mu2, nu2 = aux_spectra_lambda(S.q_right, S.H, M, icfg)
        s = choose_shift([mu2, nu2]) if cfg.shift_policy == "auto" else float(cfg.shift_policy)
        omega_s = omega + s * PI
        omega_plus_s = omega_plus + s * PI / 2
        omega_minus_s = omega_s - omega_plus_s
        mus = signed_sqrt(mu2 + s)
        nus = signed_sqrt(nu2 + s)
        delta = ZeroProductFunction(signed_sqrt(lam + s), omega_s, tail_factor=cfg.tail_factor)

    with _step(3):
        k0, k = compute_rhs(S, delta, mus, nus, omega_minus_s, shift=s, floor=tol.denominator_floor, cfg=icfg)

    with _step(4):
        K0 = solve_moments(MomentSystem(mus, "sine", k0), tol.gram_floor, cfg.kernel_samples)
        K = solve_moments(MomentSystem(nus, "cosine", k), tol.gram_floor, cfg.kernel_samples)
        sine_cond = riesz_bounds(mus, "sine")
        cos_cond = riesz_bounds(nus, "cosine")

    with _step(5):
        cd = CauchyData(K, K0, omega_minus_s)
        ed = eigen_data_from_cauchy(cd, n_gl)
        q_s, h = gelfand_levitan_reconstruct(ed, cfg.grid_size, reference_shift=2 * omega_minus_s / PI)

    diagnostics = {
        "shift": s,
        "n_eigs": N,
        "n_aux": M,
        "n_gl": n_gl,
        "omega": omega,
        "omega_plus": omega_plus,
        "omega_minus": omega - omega_plus,
        "norm_k0": float(np.linalg.norm(k0)),
        "norm_k": float(np.linalg.norm(k)),
        "norm_K": K.l2_norm(),
        "norm_K0": K0.l2_norm(),
        "gram_sine_min": sine_cond.smallest_singular_value,
        "gram_sine_max": sine_cond.largest_singular_value,
        "gram_cosine_min": cos_cond.smallest_singular_value,
        "gram_cosine_max": cos_cond.largest_singular_value,
        "alpha_min": float(ed.alphas.min()),
    }
    return SolveReport(q_s - s, h, diagnostics, cd, ed, k0, k, mus, nus)


def synthesize_mixed_data(q: GridFunction, h: float, H: float, N: int,
                          cfg: IntegratorConfig = DEFAULT_CONFIG) -> MixedData:
    """Mixed data of (q, h, H) on (0, 2pi), with the exact omega recorded."""
    bp = BoundaryParams(h, H)
    rho = eigenvalues_full(q, bp, N, cfg)
    omega = h + H + 0.5 * q.integral()
    return MixedData(q.restrict(PI, 2 * PI), H, rho, omega)


# -- stability sweeps -------------------------------------------------------

@dataclass(frozen=True)
class Perturbation:
    """Random band-limited perturbation.

    ``q_amplitude`` is the L2 norm of the potential perturbation, built from
    ``modes`` sine modes vanishing at the ends of each perturbed half.
    ``region`` is ``"left"``, ``"right"`` or ``"both"``.
    """

    q_amplitude: float
    H_amplitude: float
    seed: int
    h_amplitude: float | None = None
    modes: int = 8
    region: str = "both"

    def scaled(self, factor: float) -> "Perturbation":
        h_amp = None if self.h_amplitude is None else self.h_amplitude * factor
        return replace(self, q_amplitude=self.q_amplitude * factor, H_amplitude=self.H_amplitude * factor,
                       h_amplitude=h_amp)


def random_perturbation(rng: np.random.Generator, x: np.ndarray, p: Perturbation):
    """Draw ``(dq samples on x, dh, dH)``; the directions do not depend on amplitude."""
    k = np.arange(1, p.modes + 1)
    dq = np.zeros_like(x)
    for lo, name in ((0.0, "left"), (PI, "right")):
        coef = rng.uniform(-1, 1, p.modes)
        if p.region in (name, "both"):
            inside = (x >= lo) & (x <= lo + PI)
            dq += np.where(inside, np.sin(np.multiply.outer(x - lo, k)) @ coef, 0.0)
    unit_h, unit_H = rng.uniform(-1, 1, 2)
    norm = GridFunction(x[0], x[-1], dq).l2_norm()
    if norm > 0:
        dq *= p.q_amplitude / norm
    h_amp = p.H_amplitude if p.h_amplitude is None else p.h_amplitude
    return dq, h_amp * unit_h, p.H_amplitude * unit_H


@dataclass(frozen=True)
class SweepRow:
    trial: int
    d: float
    output_distance: float
    truth_distance: float
    ratio: float
    truth_ratio: float
    kernel_distance: float
    in_ball: bool
    error: str = ""


def _output_distance(q1: GridFunction, h1: float, q2: GridFunction, h2: float) -> float:
    if q1.n != q2.n:
        q2 = GridFunction(q1.a, q1.b, q2(q1.nodes))
    return (q1 - q2).l2_norm() + abs(h1 - h2)


def stability_sweep(base, perturbation: Perturbation, trials: int, cfg: SolveConfig = SolveConfig(),
                    n_eigs: int = 32, Q: float | None = None, base_report: SolveReport | None = None):
    """Empirical Lipschitz constant of the mixed data -> (q|(0,pi), h) map.

    ``base = (q, h, H)`` with q on (0, 2pi).  Every trial compares the base
    with a perturbed copy: both are synthesized, both are solved, and the row
    records the data distance d, the distance between the reconstructions,
    the distance between the ground truths and their ratios to d.
    Failed trials are recorded with the error text instead of aborting.

    Returns ``(rows, max_ratio)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    q0, h0, H0 = base
    icfg = cfg.tolerances.integrator
    mode = "exact" if cfg.omega_mode == "exact" else "estimate"
    S0 = synthesize_mixed_data(q0, h0, H0, n_eigs, icfg)
    rep0 = base_report if base_report is not None else solve_half_inverse(S0, cfg)
    truth0 = q0.restrict(0.0, PI)
    seeds = np.random.SeedSequence(perturbation.seed).spawn(trials)
    rows = []
    for t, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        dq, dh, dH = random_perturbation(rng, q0.nodes, perturbation)
        q1 = GridFunction(q0.a, q0.b, q0.samples + dq)
        h1, H1 = h0 + dh, H0 + dH
        in_ball = Q is None or (ball_norms(q1, h1, H1) <= Q and ball_norms(q0, h0, H0) <= Q)
        truth = _output_distance(truth0, h0, q1.restrict(0.0, PI), h1)
        try:
            S1 = synthesize_mixed_data(q1, h1, H1, n_eigs, icfg)
            d = mixed_distance(S0, S1, mode)
            rep1 = solve_half_inverse(S1, cfg)
        except HalfInverseError as exc:
            rows.append(SweepRow(t, math.nan, math.nan, truth, math.nan, math.nan, math.nan, in_ball, str(exc)))
            continue
        out = _output_distance(rep0.q_left, rep0.h, rep1.q_left, rep1.h)
        kern = ((rep0.cauchy.K - rep1.cauchy.K).l2_norm() + (rep0.cauchy.K0 - rep1.cauchy.K0).l2_norm()
                + abs(rep0.cauchy.omega_minus - rep1.cauchy.omega_minus))
        ratio = out / d if d > 0 else 0.0
        truth_ratio = truth / d if d > 0 else 0.0
        rows.append(SweepRow(t, d, out, truth, ratio, truth_ratio, kern, in_ball))
    ok = [r.ratio for r in rows if not r.error]
    return rows, (max(ok) if ok else math.nan)


def random_problem(rng: np.random.Generator, Q: float, modes: int = 8, fill=(0.3, 0.9)):
    """Random smooth ``(q, h, H)`` with ``||q|| + |h| + |H|`` a random fraction of Q.

    q is a cosine series in ``k x / 2`` (k = 0..modes) with coefficients
    decaying like 1/(1+k), so it is smooth on [0, 2pi].
    """
    k = np.arange(modes + 1)
    coef = rng.uniform(-1, 1, modes + 1) / (1.0 + k)
    h, H = rng.uniform(-1, 1, 2)
    q = GridFunction.from_callable(lambda x: np.cos(np.multiply.outer(x, k / 2)) @ coef, 0.0, 2 * PI)
    scale = rng.uniform(*fill) * Q / ball_norms(q, h, H)
    return q * scale, float(h * scale), float(H * scale)


def cosine_potential(N: int | None = None) -> GridFunction:
    """q(x) = cos x on (0, 2pi); a convenient smooth test potential."""
    return GridFunction.from_callable(np.cos, 0.0, 2 * PI, N or default_samples(0.0, 2 * PI))


def join_halves(left: GridFunction, right: GridFunction) -> GridFunction:
    return concatenate(left, right)
