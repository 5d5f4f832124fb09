"""Free solutions written as entire functions of lam = rho**2.

``cos_sqrt(lam, x) = cos(rho x)`` and ``sin_sqrt(lam, x) = sin(rho x) / rho``
are real for every real ``lam`` (they become cosh/sinh for ``lam < 0``) and
have no singularity at ``lam = 0``.
"""
import numpy as np
from scipy.special import digamma, polygamma

_SERIES_CUTOFF = 0.1


def signed_sqrt(lam):
    lam = np.asarray(lam, dtype=float)
    return np.sign(lam) * np.sqrt(np.abs(lam))


def signed_square(rho):
    rho = np.asarray(rho, dtype=float)
    return np.sign(rho) * rho * rho


def cos_sqrt(lam, x):
    lam, x = np.broadcast_arrays(np.asarray(lam, float), np.asarray(x, float))
    r = np.sqrt(np.abs(lam))
    with np.errstate(over="ignore"):
        return np.where(lam >= 0, np.cos(r * x), np.cosh(r * x))


def sin_sqrt(lam, x):
    lam, x = np.broadcast_arrays(np.asarray(lam, float), np.asarray(x, float))
    r = np.sqrt(np.abs(lam))
    pos = x * np.sinc(r * x / np.pi)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        neg = np.where(r * x > 1e-8, np.sinh(r * x) / np.where(r > 0, r, 1.0), x)
    return np.where(lam >= 0, pos, neg)


def d_cos_sqrt(lam, x):
    """d/dlam of ``cos_sqrt``."""
    return -0.5 * np.asarray(x, float) * sin_sqrt(lam, x)


def d_sin_sqrt(lam, x):
    """d/dlam of ``sin_sqrt``; the point lam = 0 is handled by its Taylor series."""
    lam, x = np.broadcast_arrays(np.asarray(lam, float), np.asarray(x, float))
    z = lam * x * x
    small = np.abs(z) < _SERIES_CUTOFF
    # sum_{k>=1} k (-z)^(k-1) x^3 (-1) / (2k+1)!
    series = np.zeros_like(z)
    fact = 6.0
    for k in range(1, 9):
        series += k * (-1.0) ** k * z ** (k - 1) / fact
        fact *= (2 * k + 2) * (2 * k + 3)
    series *= x**3
    safe = np.where(small, 1.0, lam)
    with np.errstate(over="ignore", invalid="ignore"):
        closed = (x * cos_sqrt(lam, x) - sin_sqrt(lam, x)) / (2.0 * safe)
    return np.where(small, series, closed)


def tail_sum(start, lam):
    """``sum_{j >= 0} 1 / ((start + j)**2 - lam)`` for ``sqrt(lam) < start``, in closed form.

    With ``lam = a**2`` this is ``(digamma(start + a) - digamma(start - a)) / (2a)``;
    for ``lam = -b**2`` it is ``Im digamma(start + i b) / b``.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    a = np.sqrt(np.abs(lam))
    out = np.full_like(lam, polygamma(1, start))
    pos = (lam > 0) & (a > 1e-4)
    neg = (lam < 0) & (a > 1e-4)
    out[pos] = (digamma(start + a[pos]) - digamma(start - a[pos])) / (2 * a[pos])
    out[neg] = digamma(start + 1j * a[neg]).imag / a[neg]
    return out
