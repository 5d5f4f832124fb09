"""Asymptotic splitting of spectra, the mixed-data distance and ball norms.

A spectrum ``rho_1 < rho_2 < ...`` of the problem on (0, 2pi) behaves like
``(n - 1)/2 + omega/(pi n) + kappa_n/n`` with ``kappa`` square summable; the
auxiliary spectra on (pi, 2pi) behave like ``n - 1/2 + omega_plus/(pi n) + xi_n/n``
and ``n - 1 + omega_plus/(pi n) + tau_n/n``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._trig import signed_square
from .errors import TooShort
from .grid import GridFunction, l2_distance

MIN_ESTIMATE_LENGTH = 8


@dataclass(frozen=True)
class SpectrumDecomposition:
    omega: float
    kappas: np.ndarray

    @property
    def N(self) -> int:
        return len(self.kappas)


@dataclass(frozen=True)
class AuxDecomposition:
    omega_plus: float
    xis: np.ndarray
    taus: np.ndarray


@dataclass(eq=False)
class MixedData:
    """Known right-half potential, right boundary coefficient and a spectrum prefix.

    ``spectrum`` holds rho_n; a negative entry encodes the negative eigenvalue
    ``-rho_n**2``.  ``omega`` optionally records the exact asymptotic constant
    (known for synthesized data) so distances can be taken in exact mode.
    """

    q_right: GridFunction
    H: float
    spectrum: np.ndarray
    omega: float | None = None

    def __post_init__(self):
        self.spectrum = np.asarray(self.spectrum, dtype=float)
        self.H = float(self.H)
        lam = self.lambdas
        if not (np.all(np.isfinite(lam)) and np.isfinite(self.H)):
            raise ValueError("mixed data must be finite")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("spectrum must be strictly increasing in rho**2")

    @property
    def lambdas(self) -> np.ndarray:
        return signed_square(self.spectrum)

    @property
    def N(self) -> int:
        return len(self.spectrum)


def _n(N):
    return np.arange(1, N + 1, dtype=float)


def decompose_spectrum(spectrum, omega: float | None = None) -> SpectrumDecomposition:
    """Split a spectrum prefix into ``omega`` and ``kappa_n``.

    With ``omega`` given (exact mode) only the kappas are computed.  Otherwise
    omega is estimated as the mean of ``pi n (rho_n - (n-1)/2)`` over the last
    quarter of the available indices.
    """
    rho = np.asarray(spectrum, dtype=float)
    n = _n(len(rho))
    scaled = n * (rho - (n - 1) / 2)
    if omega is None:
        if len(rho) < MIN_ESTIMATE_LENGTH:
            raise TooShort(f"need at least {MIN_ESTIMATE_LENGTH} eigenvalues to estimate omega, got {len(rho)}")
        tail = max(1, len(rho) // 4)
        omega = float(np.mean(np.pi * scaled[-tail:]))
    return SpectrumDecomposition(float(omega), scaled - omega / np.pi)


def recompose(d: SpectrumDecomposition) -> np.ndarray:
    n = _n(d.N)
    return (n - 1) / 2 + d.omega / (np.pi * n) + np.asarray(d.kappas) / n


def decompose_aux(mus, nus, omega_plus: float) -> AuxDecomposition:
    mus = np.asarray(mus, dtype=float)
    nus = np.asarray(nus, dtype=float)
    if mus.shape != nus.shape:
        raise ValueError("mu and nu sequences must have equal length")
    n = _n(len(mus))
    xis = n * (mus - (n - 0.5)) - omega_plus / np.pi
    taus = n * (nus - (n - 1)) - omega_plus / np.pi
    return AuxDecomposition(float(omega_plus), xis, taus)


def omega_pm(q_half: GridFunction, coeff: float) -> float:
    """``coeff + (1/2) * integral of q`` over the half-interval."""
    return float(coeff) + 0.5 * q_half.integral()


def _decomposition(S: MixedData, mode: str, N: int) -> SpectrumDecomposition:
    rho = S.spectrum[:N]
    if mode == "exact":
        if S.omega is None:
            raise ValueError("exact mode needs MixedData.omega")
        return decompose_spectrum(rho, S.omega)
    if mode == "estimate":
        # estimate from the full available prefix, then truncate
        d = decompose_spectrum(S.spectrum)
        return SpectrumDecomposition(d.omega, d.kappas[:N])
    raise ValueError(f"unknown omega mode {mode!r}")


def mixed_distance(S1: MixedData, S2: MixedData, mode: str = "estimate") -> float:
    """Distance between two mixed data sets on their common spectrum prefix."""
    N = min(S1.N, S2.N)
    d1 = _decomposition(S1, mode, N)
    d2 = _decomposition(S2, mode, N)
    return (l2_distance(S1.q_right, S2.q_right) + abs(S1.H - S2.H) + abs(d1.omega - d2.omega)
            + float(np.linalg.norm(d1.kappas - d2.kappas)))


def ball_norms(q: GridFunction, h: float, H: float) -> float:
    """``||q|| + |h| + |H|``; (q, h, H) lies in the ball of radius Q iff this is <= Q."""
    return q.l2_norm() + abs(h) + abs(H)


def b_omega_norm(d: SpectrumDecomposition) -> float:
    return abs(d.omega) + float(np.linalg.norm(d.kappas))
