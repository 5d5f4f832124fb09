"""Characteristic function rebuilt from its zeros, and kernel extraction.

The product is evaluated as a ratio against the free characteristic function
``-rho sin(2 rho pi)``::

    Delta(rho) = -rho sin(2 rho pi) * prod_n (rho_n**2 - rho**2) / (((n-1)/2)**2 - rho**2)

Each ratio factor is ``1 + O(n**-2)`` on compact rho-sets.  Zeros past the
supplied prefix are replaced by the asymptotic model
``lam_n = ((n-1)/2)**2 + omega/pi`` up to ``M = tail_factor * N``.  It agrees
with ``rho_n = (n-1)/2 + omega/(pi n)`` to first order but leaves no
``O(omega/n)`` bias in lam, which would otherwise add up to ``O(omega/N**2)``.  Beyond M each factor is ``1 + (omega/pi) /
(((n-1)/2)**2 - rho**2)`` to leading order; those are summed in closed form
(digamma) instead of being dropped, which would cost O(omega / M).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from ._trig import signed_square, sin_sqrt, tail_sum
from .asymptotics import decompose_spectrum
from .errors import NearZeroDenominator
from .grid import GridFunction
from .kernels import KERNEL_SAMPLES, KernelFunction, half_integer_sine_series, integer_cosine_series
from .sl_direct import DEFAULT_CONFIG, IntegratorConfig, psi_boundary


@dataclass(frozen=True)
class ZeroProductFunction:
    zeros: np.ndarray
    omega: float
    tail_rule: str = "free-reference-ratio"
    tail_factor: int = 8

    def __post_init__(self):
        object.__setattr__(self, "zeros", np.asarray(self.zeros, dtype=float))
        if self.tail_rule != "free-reference-ratio":
            raise ValueError(f"unknown tail rule {self.tail_rule!r}")
        if np.any(np.diff(signed_square(self.zeros)) <= 0):
            raise ValueError("zeros must be strictly increasing in rho**2")

    @classmethod
    def from_spectrum(cls, spectrum, omega: float | None = None, **kw) -> "ZeroProductFunction":
        if omega is None:
            omega = decompose_spectrum(spectrum).omega
        return cls(np.asarray(spectrum, float), float(omega), **kw)

    @property
    def N(self) -> int:
        return len(self.zeros)

    def all_lambdas(self) -> np.ndarray:
        """Supplied zeros followed by the modelled tail, as rho**2."""
        M = max(self.tail_factor * self.N, self.N)
        n = np.arange(self.N + 1, M + 1, dtype=float)
        tail = ((n - 1) / 2) ** 2 + self.omega / np.pi
        return np.concatenate([signed_square(self.zeros), tail])

    def __call__(self, rho2):
        return delta_from_zeros(self, rho2)


def delta_from_zeros(zpf: ZeroProductFunction, rho2):
    """Delta at ``rho2 = rho**2`` (scalar or array)."""
    lam = np.atleast_1d(np.asarray(rho2, dtype=float))
    zeros = zpf.all_lambdas()
    M = len(zeros)
    ref = (np.arange(M) / 2.0) ** 2

    rho = np.sqrt(np.maximum(lam, 0.0))
    k = np.where(lam >= 0, np.rint(2 * rho), 0).astype(int)
    cancel = k < M
    # removable 0/0: free factor over its own reference zero, in closed form
    eps = rho - k / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        pref_k = np.where(k > 0, rho * (-1.0) ** k * 2 * np.pi * np.sinc(2 * eps) / (k / 2.0 + rho), 0.0)
    pref = np.where(k == 0, sin_sqrt(lam, 2 * np.pi), pref_k)

    num = zeros[None, :] - lam[:, None]
    den = ref[None, :] - lam[:, None]
    idx = np.arange(M)[None, :]
    own = cancel[:, None] & (idx == k[:, None])
    den = np.where(own, 1.0, den)
    if np.any(den == 0.0):
        raise NearZeroDenominator("evaluation point coincides with a reference zero")
    ratio = np.prod(num / den, axis=1) * np.exp(4 * zpf.omega / np.pi * tail_sum(M, 4 * lam))
    out = np.where(cancel, pref * ratio, -lam * sin_sqrt(lam, 2 * np.pi) * ratio)
    return out[0] if np.ndim(rho2) == 0 else out


def extract_M(zpf: ZeroProductFunction, omega: float | None = None, m_max: int | None = None,
              n_samples: int = KERNEL_SAMPLES) -> KernelFunction:
    """Kernel of ``Delta(rho) = -rho sin 2rho pi + omega cos 2rho pi + int M(t) cos 2rho t dt``.

    At rho = m/2 the cosines ``cos(m t)`` are orthogonal on (0, pi), so the
    cosine coefficients are ``Delta(m/2) - omega (-1)**m``.
    """
    omega = zpf.omega if omega is None else float(omega)
    m_max = zpf.N if m_max is None else int(m_max)
    if m_max < 4:
        raise ValueError("m_max must be >= 4")
    m = np.arange(m_max + 1)
    c = delta_from_zeros(zpf, (m / 2.0) ** 2) - omega * (-1.0) ** m
    return integer_cosine_series(c, n_samples)


def extract_right_kernels(q_right: GridFunction, H: float, m_max: int, n_samples: int = KERNEL_SAMPLES,
                          cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Kernels (N, N0) of the psi(pi, .) representations, from direct integration.

    Uses rho = m (kills rho sin rho pi) for the cosine moments of N and
    rho = m - 1/2 (kills cos rho pi) for the sine moments of N0.
    """
    if m_max < 4:
        raise ValueError("m_max must be >= 4")
    omega_plus = H + 0.5 * q_right.integral()
    m = np.arange(m_max + 1)
    c = np.array([psi_boundary(q_right, H, float(k * k), cfg).derivative for k in m]) + omega_plus * (-1.0) ** m
    half = m[1:] - 0.5
    s = (np.array([r * psi_boundary(q_right, H, float(r * r), cfg).value for r in half])
         - omega_plus * (-1.0) ** (m[1:] + 1))
    return integer_cosine_series(c, n_samples), half_integer_sine_series(s, n_samples)
