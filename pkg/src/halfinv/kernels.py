"""Kernel functions on (0, pi) and their trigonometric series."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridFunction

KERNEL_SAMPLES = 4097


def trig(kind: str, freqs, t):
    """Matrix ``trig(freqs[j] * t[i])`` for kind ``"sine"`` or ``"cosine"``."""
    arg = np.multiply.outer(np.asarray(t, float), np.asarray(freqs, float))
    if kind == "sine":
        return np.sin(arg)
    if kind == "cosine":
        return np.cos(arg)
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class TrigSeries:
    """``f(t) = sum_j coefficients[j] * trig(frequencies[j] * t)``."""

    frequencies: np.ndarray
    coefficients: np.ndarray
    kind: str

    def __call__(self, t):
        return trig(self.kind, self.frequencies, t) @ self.coefficients


@dataclass(eq=False, repr=False)
class KernelFunction(GridFunction):
    """A GridFunction on (0, pi), optionally remembering the series it was sampled from."""

    series: TrigSeries | None = field(default=None)

    @classmethod
    def from_series(cls, series: TrigSeries, n: int = KERNEL_SAMPLES) -> "KernelFunction":
        t = np.linspace(0.0, np.pi, n)
        return cls(0.0, np.pi, series(t), series=series)

    @classmethod
    def zero(cls, n: int = KERNEL_SAMPLES) -> "KernelFunction":
        return cls(0.0, np.pi, np.zeros(n))


def half_integer_sine_series(coeffs, n: int = KERNEL_SAMPLES) -> KernelFunction:
    """Function with ``int f(t) sin((m - 1/2) t) dt = coeffs[m-1]``, m = 1..M."""
    coeffs = np.asarray(coeffs, float)
    m = np.arange(1, len(coeffs) + 1)
    return KernelFunction.from_series(TrigSeries(m - 0.5, 2.0 / np.pi * coeffs, "sine"), n)


def integer_cosine_series(coeffs, n: int = KERNEL_SAMPLES) -> KernelFunction:
    """Function with ``int f(t) cos(m t) dt = coeffs[m]``, m = 0..M."""
    coeffs = np.asarray(coeffs, float)
    w = np.full(len(coeffs), 2.0 / np.pi)
    w[0] = 1.0 / np.pi
    return KernelFunction.from_series(TrigSeries(np.arange(len(coeffs), dtype=float), w * coeffs, "cosine"), n)
