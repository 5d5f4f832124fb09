"""Nonharmonic trigonometric moment problems on (0, pi).

Given ``int_0^pi f(t) trig(lam_n t) dt = m_n`` for a finite frequency set, the
solution in the span of ``trig(lam_n t)`` has coefficients ``G^{-1} m`` where
``G`` is the Gram matrix of the system.  This is the finite section of the
biorthogonal (dual Riesz basis) expansion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigvalsh

from .errors import IllConditioned
from .kernels import KERNEL_SAMPLES, KernelFunction, TrigSeries, trig

DEFAULT_FLOOR = 1e-8 * np.pi / 2


@dataclass(frozen=True)
class MomentSystem:
    frequencies: np.ndarray
    kind: str
    moments: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        m = np.asarray(self.moments, dtype=float)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "moments", m)
        _check_frequencies(f, self.kind)
        if f.shape != m.shape:
            raise ValueError("frequencies and moments differ in length")


@dataclass(frozen=True)
class GramConditioning:
    smallest_singular_value: float
    largest_singular_value: float


def _check_frequencies(f, kind):
    if kind not in ("sine", "cosine"):
        raise ValueError(f"unknown kind {kind!r}")
    if np.any(np.diff(f) <= 0):
        raise ValueError("frequencies must be strictly increasing")
    if kind == "sine" and np.any(f <= 0):
        raise ValueError("sine frequencies must be positive")
    if kind == "cosine" and np.any(f < 0):
        raise ValueError("cosine frequencies must be non-negative")


def gram_matrix(frequencies, kind: str) -> np.ndarray:
    """``G[m, n] = int_0^pi trig(a_m t) trig(a_n t) dt`` in closed form.

    Product-to-sum gives ``(pi/2) (sinc(a-b) -+ sinc(a+b))`` with the
    normalised sinc, which already contains the coincident-frequency limit.
    """
    f = np.asarray(frequencies, dtype=float)
    _check_frequencies(f, kind)
    diff = np.sinc(f[:, None] - f[None, :])
    summ = np.sinc(f[:, None] + f[None, :])
    sign = -1.0 if kind == "sine" else 1.0
    return 0.5 * np.pi * (diff + sign * summ)


def riesz_bounds(frequencies, kind: str) -> GramConditioning:
    ev = eigvalsh(gram_matrix(frequencies, kind))
    return GramConditioning(float(max(ev[0], 0.0)), float(ev[-1]))


def solve_moments(ms: MomentSystem, floor: float = DEFAULT_FLOOR, n_samples: int = KERNEL_SAMPLES) -> KernelFunction:
    """Function in span{trig(lam_n t)} whose moments are ``ms.moments``."""
    G = gram_matrix(ms.frequencies, ms.kind)
    smallest = eigvalsh(G, subset_by_index=[0, 0])[0]
    if smallest < floor:
        raise IllConditioned(f"smallest Gram singular value {smallest:.3e} below floor {floor:.3e}")
    coef = cho_solve(cho_factor(G), ms.moments)
    return KernelFunction.from_series(TrigSeries(ms.frequencies, coef, ms.kind), n_samples)


def moments_of(f, frequencies, kind: str) -> np.ndarray:
    """``int_0^pi f(t) trig(lam_n t) dt`` by composite quadrature on f's grid."""
    return f.inner(trig(kind, frequencies, f.nodes))
