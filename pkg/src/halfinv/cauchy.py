"""Recovery of q on (0, pi) and h from Cauchy data.

The Cauchy data ``(K, K0, omega_minus)`` give phi(pi, rho) and phi'(pi, rho)
through

    phi(pi)  = cos rho pi + omega_minus sin(rho pi)/rho + (1/rho) int K0(t) sin rho t dt
    phi'(pi) = -rho sin rho pi + omega_minus cos rho pi + int K(t) cos rho t dt

From those we take the eigenvalues and norming constants of the problem
``y'(0) - h y(0) = 0, y'(pi) = 0`` and run a Gelfand-Levitan reconstruction.
Everything is written in lam = rho**2 so that lam <= 0 needs no special case.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import LinAlgWarning, solve
from scipy.optimize import brentq

from ._trig import cos_sqrt, d_cos_sqrt, d_sin_sqrt, sin_sqrt, tail_sum
from .errors import BracketFailure, GridTooCoarse, NonPositiveNorming, PoleProximity, SingularGLSystem
from .grid import GridFunction
from .kernels import KERNEL_SAMPLES, KernelFunction, half_integer_sine_series, integer_cosine_series
from .sl_direct import DEFAULT_CONFIG, IntegratorConfig, SolutionBoundary, phi_boundary

PI = np.pi


@dataclass(frozen=True)
class CauchyData:
    K: KernelFunction
    K0: KernelFunction
    omega_minus: float


@dataclass(frozen=True)
class EigenData:
    lambdas: np.ndarray
    alphas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        al = np.asarray(self.alphas, dtype=float)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "alphas", al)
        if lam.shape != al.shape:
            raise ValueError("lambdas and alphas differ in length")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("eigenvalues must be strictly increasing")
        if np.any(al <= 0):
            raise ValueError("norming constants must be positive")

    @property
    def N(self) -> int:
        return len(self.lambdas)

    def shifted(self, s: float) -> "EigenData":
        return EigenData(self.lambdas + s, self.alphas)

    @classmethod
    def free(cls, N: int, shift: float = 0.0) -> "EigenData":
        n = np.arange(N, dtype=float)
        alphas = np.full(N, PI / 2)
        alphas[0] = PI
        return cls(n**2 + shift, alphas)


def _phi_terms(cd: CauchyData, lam):
    """phi(pi), phi'(pi) and d phi'(pi)/d lam for an array of lam."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    t0, t = cd.K0.nodes, cd.K.nodes
    w0 = cd.K0.weights * cd.K0.samples
    w = cd.K.weights * cd.K.samples
    om = cd.omega_minus
    L = lam[None, :]
    phi = cos_sqrt(lam, PI) + om * sin_sqrt(lam, PI) + w0 @ sin_sqrt(L, t0[:, None])
    dphi = -lam * sin_sqrt(lam, PI) + om * cos_sqrt(lam, PI) + w @ cos_sqrt(L, t[:, None])
    ddphi = (-sin_sqrt(lam, PI) - lam * d_sin_sqrt(lam, PI) + om * d_cos_sqrt(lam, PI)
             + w @ d_cos_sqrt(L, t[:, None]))
    return phi, dphi, ddphi


def _phi_column(cd: CauchyData, lam, column: int, chunk: int = 512) -> np.ndarray:
    """phi(pi) (column 0) or phi'(pi) (column 1) on an array of lam, in chunks."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    kern = cd.K0 if column == 0 else cd.K
    t = kern.nodes[:, None]
    w = kern.weights * kern.samples
    om = cd.omega_minus
    out = np.empty_like(lam)
    for i in range(0, len(lam), chunk):
        L = lam[i:i + chunk]
        if column == 0:
            out[i:i + chunk] = cos_sqrt(L, PI) + om * sin_sqrt(L, PI) + w @ sin_sqrt(L[None, :], t)
        else:
            out[i:i + chunk] = -L * sin_sqrt(L, PI) + om * cos_sqrt(L, PI) + w @ cos_sqrt(L[None, :], t)
    return out


def phi_from_cauchy(cd: CauchyData, rho2: float):
    """``(SolutionBoundary(phi(pi), phi'(pi)), d phi'(pi) / d lam)`` at lam = rho2."""
    phi, dphi, ddphi = _phi_terms(cd, rho2)
    return SolutionBoundary(float(phi[0]), float(dphi[0])), float(ddphi[0])


def weyl_value(cd: CauchyData, rho2: float, pole_tol: float = 1e-10) -> float:
    phi, dphi, _ = _phi_terms(cd, rho2)
    if abs(phi[0]) <= pole_tol * (1.0 + abs(dphi[0])):
        raise PoleProximity(f"phi(pi) = {phi[0]:.3e} at lam = {rho2}")
    return float(dphi[0] / phi[0])


def _scan_zeros(cd: CauchyData, N: int, column: int, scan_step: float) -> np.ndarray:
    """First N zeros (in lam) of phi(pi, .) (column 0) or phi'(pi, .) (column 1).

    Sign scan in signed rho starting below every possible zero (both
    functions are positive for lam -> -inf), refined with Brent's method.
    """
    bound = abs(cd.omega_minus) + float(cd.K.weights @ np.abs(cd.K.samples)) \
        + float(cd.K0.weights @ np.abs(cd.K0.samples)) + 1.0
    # cosh(rho pi) overflows past rho ~ 200; eigenvalues below -30**2 are out of scope
    r_lo, r_hi = -min(bound, 30.0), N + bound
    name = "phi'(pi, .)" if column else "phi(pi, .)"

    def f(x):
        return _phi_column(cd, x, column)[0]

    for _ in range(8):
        r = np.arange(r_lo, r_hi + scan_step, scan_step)
        lam = np.sign(r) * r * r
        vals = _phi_column(cd, lam, column)
        roots: list[float] = []
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]:
            a, b = lam[i], lam[i + 1]
            if vals[i] == 0.0:
                if not roots or roots[-1] != a:
                    roots.append(a)
            elif vals[i + 1] != 0.0:
                roots.append(brentq(f, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps))
        if len(roots) >= N:
            return np.array(roots[:N])
        r_hi += N
    raise BracketFailure(len(roots) + 1, f"{name} has only {len(roots)} zeros below rho = {r_hi:.1f}")


def _free_over_factor(kind: str, m: int, lam: float) -> float:
    """Free function divided by its m-th factor ``(r_m - lam)``, without cancellation.

    ``kind == "dphi"``: ``-rho sin(rho pi)`` with r_m = m**2;
    ``kind == "phi"``: ``cos(rho pi)`` with r_m = (m + 1/2)**2.
    """
    if kind == "dphi":
        if m == 0:
            return float(PI * sin_sqrt(lam, PI) / PI)
        if lam < 0:
            return float(-lam * sin_sqrt(lam, PI) / (m * m - lam))
        rho = math.sqrt(lam)
        return (-1.0) ** m * PI * rho * float(np.sinc(rho - m)) / (m + rho)
    a = m + 0.5
    if lam < 0:
        return float(cos_sqrt(lam, PI) / (a * a - lam))
    rho = math.sqrt(lam)
    return (-1.0) ** m * PI * float(np.sinc(rho - a)) / (a + rho)


def _zero_product(kind: str, zeros: np.ndarray, c: float, lam: float, drop: int | None = None) -> float:
    """``phi(pi, lam)`` or ``phi'(pi, lam)`` rebuilt from its zeros.

    The function is the free one times ``prod (z_m - lam) / (r_m - lam)``;
    zeros past the supplied ones are modelled as ``r_m + c`` and their
    factors summed in closed form.  With ``drop = k`` (and lam = z_k) the
    result is the lam-derivative at that zero.
    """
    M = len(zeros)
    off = 0.0 if kind == "dphi" else 0.5
    ref = (np.arange(M) + off) ** 2
    # split off the reference factor nearest lam, where 0/0 can occur
    m = 0 if lam < 0 else int(min(max(round(math.sqrt(lam) - off), 0), M - 1))
    g = _free_over_factor(kind, m, lam)
    num = zeros - lam
    den = ref - lam
    keep = np.ones(M, dtype=bool)
    keep[m] = False
    if drop is None or drop != m:
        g *= num[m]
    if drop is not None:
        g = -g
        if drop != m:
            keep[drop] = False
            g /= den[drop]
    tail = math.exp(c * float(tail_sum(M + off, lam)[0]))
    return g * float(np.prod(num[keep] / den[keep])) * tail


def eigen_data_from_cauchy(cd: CauchyData, N: int, scan_step: float = 0.05, norming: str = "product",
                           n_zeros: int | None = None) -> EigenData:
    """First N zeros lam_n of phi'(pi, .) and norming constants alpha_n = int phi**2.

    The Lagrange identity gives ``alpha_n = -phi(pi, lam_n) * d phi'(pi, lam_n) / d lam``.
    With ``norming="derivative"`` both factors come straight from the kernel
    representation.  With ``norming="product"`` (default) they come from the
    zero products of phi'(pi, .) and phi(pi, .), using ``n_zeros`` zeros of
    each (default 2N); zeros are far less sensitive to kernel truncation than
    lam-derivatives are.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if norming not in ("product", "derivative"):
        raise ValueError(f"unknown norming rule {norming!r}")
    if norming == "derivative":
        lambdas = _scan_zeros(cd, N, 1, scan_step)
        phi, _, ddphi = _phi_terms(cd, lambdas)
        alphas = -phi * ddphi
    else:
        nz = max(n_zeros or 2 * N, N)
        eta = _scan_zeros(cd, nz, 1, scan_step)
        theta = _scan_zeros(cd, nz, 0, scan_step)
        c = 2 * cd.omega_minus / PI
        lambdas = eta[:N]
        alphas = np.array([-_zero_product("phi", theta, c, lam) * _zero_product("dphi", eta, c, lam, drop=k)
                           for k, lam in enumerate(lambdas)])
    bad = np.nonzero(alphas <= 0)[0]
    if len(bad):
        raise NonPositiveNorming(f"norming constant {alphas[bad[0]]:.3e} at index {bad[0] + 1}: "
                                 "data not generated by a real potential")
    return EigenData(lambdas, alphas)


def default_reference_shift(ed: EigenData) -> float:
    """Mean of ``lam_n - (n-1)**2`` over the last quarter of indices."""
    n = np.arange(ed.N)
    tail = max(1, ed.N // 4)
    return float(np.mean(ed.lambdas[-tail:] - n[-tail:] ** 2))


def gl_kernel_F(ed: EigenData, x, reference_shift: float = 0.0) -> np.ndarray:
    """``F(x_i, x_j)`` for the data relative to the constant-potential reference."""
    ref = EigenData.free(ed.N)
    U = cos_sqrt((ed.lambdas - reference_shift)[None, :], np.asarray(x)[:, None])
    U0 = cos_sqrt(ref.lambdas[None, :], np.asarray(x)[:, None])
    return (U / ed.alphas) @ U.T - (U0 / ref.alphas) @ U0.T


def gelfand_levitan_reconstruct(ed: EigenData, grid_size: int = 256, reference_shift: float | None = None,
                                F: np.ndarray | None = None):
    """Recover (q on [0, pi], h) from eigenvalues and norming constants.

    The reference problem is q = c, h = 0 with c = ``reference_shift``
    (estimated from the data when None); its spectral data are
    ``(n-1)**2 + c`` and the free norming constants.  For every node x_i the
    equation ``K(x,t) + F(x,t) + int_0^x K(x,s) F(s,t) ds = 0`` is discretised
    with the trapezoid rule on the nodes of [0, x_i].  Then
    ``q = c + 2 d/dx K(x,x)`` and ``h = K(0,0)``.

    ``F`` may be supplied directly as a (grid_size+1)-square matrix on the
    output grid, bypassing the spectral data.
    """
    if grid_size < 16:
        raise GridTooCoarse(f"grid_size {grid_size} < 16")
    if reference_shift is None:
        reference_shift = default_reference_shift(ed)
    x = np.linspace(0.0, PI, grid_size + 1)
    dx = x[1] - x[0]
    if F is None:
        rho_max = math.sqrt(max(abs(ed.lambdas[-1] - reference_shift), 1.0))
        if rho_max * dx > PI / 2:
            raise GridTooCoarse(f"grid spacing {dx:.3g} cannot resolve frequency {rho_max:.3g}")
        F = gl_kernel_F(ed, x, reference_shift)
    diag = np.empty(grid_size + 1)
    diag[0] = -F[0, 0]
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        for i in range(1, grid_size + 1):
            Fi = F[: i + 1, : i + 1]
            w = np.full(i + 1, dx)
            w[0] = w[-1] = 0.5 * dx
            A = np.eye(i + 1) + Fi * w[None, :]
            try:
                k = solve(A, -F[i, : i + 1], check_finite=False)
            except (np.linalg.LinAlgError, LinAlgWarning) as exc:
                raise SingularGLSystem(f"Nystrom system singular at x = {x[i]:.4f}: {exc}") from None
            if not np.all(np.isfinite(k)):
                raise SingularGLSystem(f"non-finite kernel at x = {x[i]:.4f}")
            diag[i] = k[-1]
    dq = CubicSpline(x, diag).derivative()(x)
    return GridFunction(0.0, PI, reference_shift + 2.0 * dq), float(diag[0])


def cauchy_from_potential(q_left: GridFunction, h: float, m_max: int, n_samples: int = KERNEL_SAMPLES,
                          cfg: IntegratorConfig = DEFAULT_CONFIG) -> CauchyData:
    """Cauchy data of a known potential on (0, pi), via sampled boundary values.

    rho = m - 1/2 kills cos rho pi in phi(pi) (sine moments of K0); rho = m
    kills rho sin rho pi in phi'(pi) (cosine moments of K).
    """
    if m_max < 4:
        raise ValueError("m_max must be >= 4")
    omega_minus = h + 0.5 * q_left.integral()
    m = np.arange(m_max + 1)
    half = m[1:] - 0.5
    s = (np.array([r * phi_boundary(q_left, h, float(r * r), cfg=cfg).value for r in half])
         - omega_minus * (-1.0) ** (m[1:] + 1))
    c = np.array([phi_boundary(q_left, h, float(k * k), cfg=cfg).derivative for k in m]) - omega_minus * (-1.0) ** m
    return CauchyData(integer_cosine_series(c, n_samples), half_integer_sine_series(s, n_samples), omega_minus)
