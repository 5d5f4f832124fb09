"""Direct Sturm-Liouville engine for -y'' + q y = lam y.

The ODE is integrated with the fourth-order Magnus method (two Gauss nodes
per step, exact 2x2 matrix exponential).  The step count grows like
``1 + sqrt(|lam|)`` so that the phase advance per step stays bounded; this
keeps the error uniform along a spectrum and lets the Pruefer angle be
unwrapped reliably, which is what makes eigenvalue indexing exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.optimize import brentq

from ._trig import signed_sqrt
from .errors import BracketFailure, GridTooCoarse, NonFiniteState, WronskianMismatch
from .grid import GridFunction

_GAUSS_OFFSET = math.sqrt(3.0) / 6.0
_NEAR_ZERO = 1e-6


@dataclass(frozen=True)
class BoundaryParams:
    h: float
    H: float

    def __post_init__(self):
        if not (math.isfinite(self.h) and math.isfinite(self.H)):
            raise ValueError("boundary coefficients must be finite")


@dataclass(frozen=True)
class SolutionBoundary:
    value: float
    derivative: float


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-count rule ``ceil(L * (steps_per_unit + steps_per_phase * sqrt|lam|))``."""

    steps_per_unit: float = 256.0
    steps_per_phase: float = 12.0
    step_quantum: int = 64
    min_samples: int = 8
    wronskian_tol: float = 1e-8
    root_xtol: float = 1e-14
    max_expansions: int = 5
    expansion_factor: float = 4.0


DEFAULT_CONFIG = IntegratorConfig()


@numba.njit(cache=True)
def _magnus4(q1, q2, step, lam, y0, dy0, track_angle):
    c = math.sqrt(3.0) / 12.0 * step * step
    y = y0
    dy = dy0
    theta = 0.0
    log_scale = 0.0
    for k in range(q1.shape[0]):
        g1 = q1[k] - lam
        g2 = q2[k] - lam
        a = c * (g1 - g2)
        b = step
        cc = 0.5 * step * (g1 + g2)
        d = a * a + b * cc
        if d < 0.0:
            w = math.sqrt(-d)
            ch = math.cos(w)
            sh = math.sin(w) / w
        elif d > 0.0:
            w = math.sqrt(d)
            ch = math.cosh(w)
            sh = math.sinh(w) / w if w > 1e-300 else 1.0
        else:
            ch = 1.0
            sh = 1.0
        ny = (ch + sh * a) * y + sh * b * dy
        ndy = sh * cc * y + (ch - sh * a) * dy
        if track_angle:
            cross = dy * ny - y * ndy
            dot = dy * ndy + y * ny
            theta += math.atan2(cross, dot)
        y = ny
        dy = ndy
        m = abs(y) + abs(dy)
        if m > 1e100:
            y *= 1e-100
            dy *= 1e-100
            log_scale += 100.0 * math.log(10.0)
        elif not (m == m) or m == math.inf:
            return y, dy, theta, math.inf
    return y, dy, theta, log_scale


def n_steps(length: float, lam: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> int:
    raw = length * (cfg.steps_per_unit + cfg.steps_per_phase * math.sqrt(abs(lam)))
    qn = cfg.step_quantum
    return max(qn, int(math.ceil(raw / qn)) * qn)


def _gauss_values(q: GridFunction, nsteps: int):
    cache = q.__dict__.setdefault("_gauss_cache", {})
    hit = cache.get(nsteps)
    if hit is None:
        step = (q.b - q.a) / nsteps
        left = q.a + step * np.arange(nsteps)
        q1 = np.ascontiguousarray(q(left + step * (0.5 - _GAUSS_OFFSET)))
        q2 = np.ascontiguousarray(q(left + step * (0.5 + _GAUSS_OFFSET)))
        hit = (q1, q2)
        if len(cache) > 64:
            cache.clear()
        cache[nsteps] = hit
    return hit


def _shoot(q: GridFunction, lam: float, y0: float, dy0: float, cfg: IntegratorConfig, track_angle=False):
    """Forward integration over q's interval.

    Returns ``(y, y', winding, log_scale)`` where ``winding`` is the Pruefer
    angle gained relative to its initial value ``atan2(y0, dy0)``.
    """
    if q.n < cfg.min_samples:
        raise GridTooCoarse(f"potential has {q.n} samples, integrator needs {cfg.min_samples}")
    if not (math.isfinite(lam) and math.isfinite(y0) and math.isfinite(dy0)):
        raise NonFiniteState("non-finite spectral parameter or initial data")
    nsteps = n_steps(q.b - q.a, lam, cfg)
    q1, q2 = _gauss_values(q, nsteps)
    return _magnus4(q1, q2, (q.b - q.a) / nsteps, float(lam), float(y0), float(dy0), track_angle)


def integrate_solution(q: GridFunction, lam: float, y0: float, dy0: float,
                       direction: str = "forward", cfg: IntegratorConfig = DEFAULT_CONFIG) -> SolutionBoundary:
    """Solve -y'' + q y = lam y across q's interval.

    ``forward`` starts at ``q.a`` with ``(y0, dy0)`` and returns the state at
    ``q.b``; ``backward`` starts at ``q.b`` and returns the state at ``q.a``.
    """
    if direction == "forward":
        y, dy, _, scale = _shoot(q, lam, y0, dy0, cfg)
    elif direction == "backward":
        y, dy, _, scale = _shoot(q.reflected(), lam, y0, -dy0, cfg)
        dy = -dy
    else:
        raise ValueError(f"unknown direction {direction!r}")
    if scale != 0.0 or not (math.isfinite(y) and math.isfinite(dy)):
        raise NonFiniteState(f"solution overflowed at lam={lam}")
    return SolutionBoundary(y, dy)


def _on_interval(q: GridFunction, a: float, b: float) -> GridFunction:
    if a == q.a and b == q.b:
        return q
    try:
        return q.restrict(a, b)
    except ValueError:
        n = max(q.n * (b - a) / (q.b - q.a), 8)
        return GridFunction.from_callable(q, a, b, int(math.ceil(n)) + 1)


def phi_boundary(q_left: GridFunction, h: float, rho2: float, at: float | None = None,
                 cfg: IntegratorConfig = DEFAULT_CONFIG) -> SolutionBoundary:
    """phi(at), phi'(at) for phi(0) = 1, phi'(0) = h."""
    at = q_left.b if at is None else float(at)
    if not q_left.a < at <= q_left.b + 1e-12:
        raise ValueError(f"evaluation point {at} outside [{q_left.a}, {q_left.b}]")
    return integrate_solution(_on_interval(q_left, q_left.a, min(at, q_left.b)), rho2, 1.0, h, "forward", cfg)


def psi_boundary(q_right: GridFunction, H: float, rho2: float,
                 cfg: IntegratorConfig = DEFAULT_CONFIG) -> SolutionBoundary:
    """psi(a), psi'(a) at the left end of q_right for psi(b) = 1, psi'(b) = -H."""
    return integrate_solution(q_right, rho2, 1.0, -H, "backward", cfg)


def _split(q: GridFunction):
    mid = 0.5 * (q.a + q.b)
    return _on_interval(q, q.a, mid), _on_interval(q, mid, q.b)


def char_value(q: GridFunction, bp: BoundaryParams, rho2: float,
               cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Characteristic function phi'(pi) psi(pi) - phi(pi) psi'(pi).

    Also evaluated as phi'(2pi) + H phi(2pi) by a single sweep; the two must
    agree (Wronskian constancy) or ``WronskianMismatch`` is raised.
    """
    left, right = _split(q)
    phi = phi_boundary(left, bp.h, rho2, cfg=cfg)
    psi = psi_boundary(right, bp.H, rho2, cfg=cfg)
    joint = phi.derivative * psi.value - phi.value * psi.derivative
    full = integrate_solution(q, rho2, 1.0, bp.h, "forward", cfg)
    single = full.derivative + bp.H * full.value
    scale = 1.0 + abs(phi.derivative * psi.value) + abs(phi.value * psi.derivative)
    if abs(joint - single) > cfg.wronskian_tol * scale:
        raise WronskianMismatch(f"routes disagree at lam={rho2}: {joint!r} vs {single!r}")
    return joint


def _robin_beta(H: float) -> float:
    """Pruefer target angle in (0, pi] for y'(end) + H y(end) = 0; Dirichlet is pi."""
    return math.pi / 2 + math.atan(H)


def _eigen_search(q: GridFunction, y0: float, dy0: float, beta: float, guesses, halfwidths,
                  cfg: IntegratorConfig) -> np.ndarray:
    """n-th eigenvalues (n = 1..len(guesses)) of a forward shooting problem.

    ``beta`` is the Pruefer angle of the end condition: the n-th eigenvalue is
    the unique root of the strictly increasing function
    ``theta_end(lam) - beta - (n - 1) pi``.  Brackets start at the guesses and
    expand geometrically; Brent's method refines inside them.
    """

    theta0 = math.atan2(y0, dy0)

    # winding is kept apart from theta0 so a root at lam = 0 resolves below eps
    def angle(lam):
        _, _, winding, _ = _shoot(q, lam, y0, dy0, cfg, track_angle=True)
        if not math.isfinite(winding):
            raise NonFiniteState(f"Pruefer angle diverged at lam={lam}")
        return winding

    out = np.empty(len(guesses))
    for i, (g, w) in enumerate(zip(guesses, halfwidths)):
        n = i + 1
        target = beta + (n - 1) * math.pi - theta0
        lo, hi = g - w, g + w
        f_lo, f_hi = angle(lo) - target, angle(hi) - target
        width = w
        expansions = 0
        while f_lo > 0 or f_hi < 0:
            if expansions == cfg.max_expansions:
                raise BracketFailure(n, f"guess {g:.6g}, final bracket [{lo:.6g}, {hi:.6g}]")
            width *= cfg.expansion_factor
            if f_lo > 0:
                lo -= width
                f_lo = angle(lo) - target
            if f_hi < 0:
                hi += width
                f_hi = angle(hi) - target
            expansions += 1
        if f_lo == 0.0:
            out[i] = lo
        elif f_hi == 0.0:
            out[i] = hi
        else:
            out[i] = brentq(lambda lam: angle(lam) - target, lo, hi,
                            xtol=cfg.root_xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
            if abs(out[i]) < _NEAR_ZERO:
                out[i] = _polish_in_rho(lambda lam: angle(lam) - target, out[i])
    return out


def _polish_in_rho(f, lam):
    """Re-solve in rho = sign(lam) sqrt|lam| so a root near lam = 0 gets full rho accuracy."""
    a, b = lam - _NEAR_ZERO, lam + _NEAR_ZERO
    fa, fb = f(a), f(b)
    if fa * fb > 0:
        return lam
    r = brentq(lambda r: f(r * abs(r)), float(signed_sqrt(a)), float(signed_sqrt(b)),
               xtol=1e-18, rtol=4 * np.finfo(float).eps, maxiter=200)
    return r * abs(r)


def omega_total(q: GridFunction, bp: BoundaryParams) -> float:
    return bp.h + bp.H + 0.5 * q.integral()


def eigenvalues_lambda(q: GridFunction, bp: BoundaryParams, N: int,
                       cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """First N eigenvalues lam_n = rho_n**2 of the Robin-Robin problem on q's interval."""
    if N < 1:
        raise ValueError("N must be >= 1")
    length = q.b - q.a
    n = np.arange(1, N + 1)
    base = (np.pi * (n - 1) / length) ** 2
    gap = (np.pi / length) ** 2 * (2 * n - 1)
    guesses = base + 2 * omega_total(q, bp) / length
    return _eigen_search(q, 1.0, bp.h, _robin_beta(bp.H), guesses, np.maximum(gap / 2, 0.5), cfg)


def eigenvalues_full(q: GridFunction, bp: BoundaryParams, N: int,
                     cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """First N values rho_n with rho_n**2 the eigenvalues.

    A negative eigenvalue is returned as ``-sqrt(-lam)``, so
    ``signed_square(rho)`` recovers lam.
    """
    return signed_sqrt(eigenvalues_lambda(q, bp, N, cfg))


def aux_spectra_lambda(q_right: GridFunction, H: float, N: int, cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Dirichlet-at-left and Neumann-at-left eigenvalues (as lam) with y' + H y = 0 at the right end."""
    if N < 1:
        raise ValueError("N must be >= 1")
    refl = q_right.reflected()
    length = q_right.b - q_right.a
    n = np.arange(1, N + 1)
    k = np.pi / length
    om = H + 0.5 * q_right.integral()
    shift = 2 * om / length
    # reflected frame starts at the Robin end with (1, H)
    mu2 = _eigen_search(refl, 1.0, H, math.pi, (k * (n - 0.5)) ** 2 + shift, np.maximum(k * k * n, 0.5), cfg)
    nu2 = _eigen_search(refl, 1.0, H, math.pi / 2, (k * (n - 1)) ** 2 + shift, np.maximum(k * k * (n - 0.5), 0.5), cfg)
    return mu2, nu2


def aux_spectra(q_right: GridFunction, H: float, N: int, cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Zeros {mu_n} of psi(pi, .) and {nu_n} of psi'(pi, .), signed-root convention."""
    mu2, nu2 = aux_spectra_lambda(q_right, H, N, cfg)
    return signed_sqrt(mu2), signed_sqrt(nu2)


def apply_shift(q: GridFunction, s: float) -> GridFunction:
    return q.shifted(s)


def shift_spectrum(lambdas, s: float) -> np.ndarray:
    return np.asarray(lambdas, dtype=float) + s


def choose_shift(aux_lambdas, margin: float = 0.5) -> float:
    """Smallest shift (with margin) making every auxiliary rho at least 1/2."""
    lam_min = float(np.min(np.concatenate([np.ravel(a) for a in aux_lambdas])))
    return max(0.0, 0.25 - lam_min + margin)
