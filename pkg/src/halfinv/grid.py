"""Uniformly sampled real functions and composite quadrature."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

SAMPLES_PER_PI = 1024
MIN_SAMPLES = 8


def simpson_weights(n: int, dx: float) -> np.ndarray:
    """Composite Simpson weights for ``n`` equispaced nodes.

    An even node count is handled with Simpson's 3/8 rule on the last three
    intervals, so the rule is fourth order for every ``n >= 4``.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if n == 2:
        return np.array([0.5, 0.5]) * dx
    if n == 3:
        return np.array([1.0, 4.0, 1.0]) * dx / 3.0
    w = np.zeros(n)
    m = n if n % 2 == 1 else n - 3
    w[:m:2] = 2.0
    w[1:m:2] = 4.0
    w[0] = w[m - 1] = 1.0
    w[:m] *= dx / 3.0
    if m < n:
        w[m - 1:] += np.array([1.0, 3.0, 3.0, 1.0]) * 3.0 * dx / 8.0
    return w


def default_samples(a: float, b: float, per_pi: int = SAMPLES_PER_PI) -> int:
    return int(round(per_pi * (b - a) / np.pi)) + 1


@dataclass(eq=False)
class GridFunction:
    """A real function on ``[a, b]`` given by samples on a uniform grid.

    Values between nodes come from a not-a-knot cubic spline; values at the
    nodes are the samples themselves.
    """

    a: float
    b: float
    samples: np.ndarray
    interpolation: str = field(default="cubic-spline")

    def __post_init__(self):
        self.a = float(self.a)
        self.b = float(self.b)
        self.samples = np.array(self.samples, dtype=float)
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not self.b > self.a:
            raise ValueError("need b > a")
        if len(self.samples) < MIN_SAMPLES:
            raise ValueError(f"need at least {MIN_SAMPLES} samples, got {len(self.samples)}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")
        if self.interpolation != "cubic-spline":
            raise ValueError(f"unknown interpolation {self.interpolation!r}")
        self.samples.setflags(write=False)

    @classmethod
    def from_callable(cls, f: Callable, a: float, b: float, n: int | None = None) -> "GridFunction":
        if n is None:
            n = default_samples(a, b)
        x = np.linspace(a, b, n)
        return cls(a, b, np.broadcast_to(np.asarray(f(x), dtype=float), x.shape))

    @classmethod
    def constant(cls, c: float, a: float, b: float, n: int | None = None) -> "GridFunction":
        return cls.from_callable(lambda x: np.full_like(x, c), a, b, n)

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def dx(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)

    @cached_property
    def spline(self) -> CubicSpline:
        return CubicSpline(self.nodes, self.samples)

    @cached_property
    def weights(self) -> np.ndarray:
        return simpson_weights(self.n, self.dx)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.spline(x), dtype=float)
        k = np.rint((x - self.a) / self.dx)
        inside = (k >= 0) & (k <= self.n - 1)
        k = np.where(inside, k, 0).astype(int)
        hit = inside & (x == self.nodes[k])
        return np.where(hit, self.samples[k], out)

    def integral(self) -> float:
        return float(self.weights @ self.samples)

    def inner(self, values: np.ndarray) -> np.ndarray:
        """Quadrature of ``self * values`` where ``values`` is sampled on the nodes.

        ``values`` may carry extra trailing axes; integration is over axis 0.
        """
        return np.tensordot(self.weights * self.samples, values, axes=(0, 0))

    def l2_norm(self) -> float:
        return float(np.sqrt(max(self.weights @ self.samples**2, 0.0)))

    def restrict(self, a: float, b: float) -> "GridFunction":
        """Sub-function on ``[a, b]``; both endpoints must lie on the grid."""
        i = int(round((a - self.a) / self.dx))
        j = int(round((b - self.a) / self.dx))
        if not (0 <= i < j <= self.n - 1) or not (
            np.isclose(self.nodes[i], a, atol=1e-12) and np.isclose(self.nodes[j], b, atol=1e-12)
        ):
            raise ValueError(f"[{a}, {b}] is not a node-aligned subinterval of [{self.a}, {self.b}]")
        return GridFunction(a, b, self.samples[i:j + 1])

    def resample(self, n: int) -> "GridFunction":
        if n == self.n:
            return self
        x = np.linspace(self.a, self.b, n)
        return GridFunction(self.a, self.b, self(x))

    def reflected(self) -> "GridFunction":
        """``x -> q(a + b - x)``, still on ``[a, b]``."""
        return GridFunction(self.a, self.b, self.samples[::-1])

    def shifted(self, s: float) -> "GridFunction":
        return GridFunction(self.a, self.b, self.samples + s)

    def _check_same_grid(self, other: "GridFunction"):
        if (self.a, self.b, self.n) != (other.a, other.b, other.n):
            raise ValueError("grid functions live on different grids")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check_same_grid(other)
            return GridFunction(self.a, self.b, self.samples + other.samples)
        return self.shifted(float(other))

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check_same_grid(other)
            return GridFunction(self.a, self.b, self.samples - other.samples)
        return self.shifted(-float(other))

    def __neg__(self):
        return GridFunction(self.a, self.b, -self.samples)

    def __mul__(self, c):
        return GridFunction(self.a, self.b, self.samples * float(c))

    __rmul__ = __mul__

    def __repr__(self):
        return f"GridFunction([{self.a:.6g}, {self.b:.6g}], n={self.n})"


def concatenate(left: GridFunction, right: GridFunction) -> GridFunction:
    """Join two grid functions sharing an endpoint and grid spacing."""
    if not np.isclose(left.b, right.a) or not np.isclose(left.dx, right.dx):
        raise ValueError("grids do not join")
    return GridFunction(left.a, right.b, np.concatenate([left.samples, right.samples[1:]]))


def l2_distance(f: GridFunction, g: GridFunction) -> float:
    """L2 distance, resampling ``g`` onto the grid of ``f`` when the grids differ."""
    if (f.a, f.b) != (g.a, g.b):
        raise ValueError("functions live on different intervals")
    if f.n != g.n:
        g = GridFunction(f.a, f.b, g(f.nodes))
    return (f - g).l2_norm()
