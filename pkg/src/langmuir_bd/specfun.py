"""Lower incomplete gamma function.

``lower_incomplete_gamma(z, g)`` is the unregularized integral
``int_0^g s^(z-1) exp(-s) ds``.  The regularized ratio is evaluated by the
power series when ``g < z + 1`` and by a modified-Lentz continued fraction
for the complement otherwise, then scaled by ``exp(lgamma(z))``.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .errors import ParameterError

__all__ = [
    "lower_incomplete_gamma",
    "log_lower_incomplete_gamma",
    "regularized_lower_gamma",
]

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 1000


@njit(cache=True)
def _series(z, x):
    # sum_{n>=0} x^n / (z (z+1) ... (z+n))
    ap = z
    term = 1.0 / z
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total


@njit(cache=True)
def _contfrac(z, x):
    b = x + 1.0 - z
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - z)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _EPS:
            break
    return h


@njit(cache=True)
def _reg_lower(z, x):
    """Regularized P(z, x) for z > 0, x >= 0."""
    if x <= 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    log_pref = -x + z * math.log(x) - math.lgamma(z)
    if x < z + 1.0:
        return min(1.0, math.exp(log_pref) * _series(z, x))
    return 1.0 - math.exp(log_pref) * _contfrac(z, x)


@njit(cache=True)
def _log_lower(z, x):
    # log of the unregularized integral; avoids 1 - Q cancellation on the series side
    log_pref = -x + z * math.log(x)
    if x < z + 1.0:
        return log_pref + math.log(_series(z, x))
    q = math.exp(log_pref - math.lgamma(z)) * _contfrac(z, x)
    return math.lgamma(z) + math.log1p(-q)


@njit(cache=True)
def _reg_lower_array(z, x, out):
    for i in range(x.size):
        out[i] = _reg_lower(z, x[i])


def _check(z: float, g: float) -> None:
    if not (z > 0 and math.isfinite(z)):
        raise ParameterError(f"incomplete gamma needs z > 0, got {z!r}")
    if not g >= 0:
        raise ParameterError(f"incomplete gamma needs gamma >= 0, got {g!r}")


def log_lower_incomplete_gamma(z: float, gamma: float) -> float:
    _check(z, gamma)
    if gamma == 0:
        return -math.inf
    return float(_log_lower(float(z), float(gamma)))


def lower_incomplete_gamma(z: float, gamma: float) -> float:
    """``int_0^gamma s^(z-1) e^(-s) ds`` for ``z > 0``, ``gamma >= 0``."""
    return math.exp(log_lower_incomplete_gamma(z, gamma))


def regularized_lower_gamma(z: float, x):
    """``P(z, x) = lower_incomplete_gamma(z, x) / Gamma(z)``; ``x`` may be an array."""
    _check(z, 0.0)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ParameterError("regularized gamma needs x >= 0")
    if arr.ndim == 0:
        return float(_reg_lower(float(z), float(arr)))
    flat = np.ascontiguousarray(arr).ravel()
    out = np.empty_like(flat)
    _reg_lower_array(float(z), flat, out)
    return out.reshape(arr.shape)
