"""Limit laws of the scaled stationary distributions ``X_N / N``.

* ``LIG(alpha, beta)``: a gamma density truncated to (0, 1), mixed with an
  atom at 1 of mass ``pi = beta^alpha / (beta^alpha + G(alpha, beta) (beta - alpha) e^beta)``
  where ``G`` is the lower incomplete gamma function.  Limit of M1.
* ``1 - LIG(b - a, b)``: limit of M2, with the atom at 0.
* ``Beta(a, b - a)``: limit of M3.

with ``a = c1 / c3`` and ``b = (c1 + c2) / c3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np
from numba import njit
from scipy import special

from .errors import ParameterError
from .model import ModelId, PhysicalParams
from .specfun import _reg_lower, log_lower_incomplete_gamma, regularized_lower_gamma

__all__ = [
    "LigParams",
    "LimitLaw",
    "LigAtTop",
    "LigReflected",
    "BetaLaw",
    "GammaSteadyState",
    "lig_pi",
    "lig_cdf",
    "lig_pdf_continuous_part",
    "lig_moment",
    "lig_quantile",
    "lig_sample",
    "beta_moment",
    "beta_cdf",
    "beta_pdf",
    "limit_law_for",
    "delta_infinity",
    "lemma2_partial_sum",
    "lemma2_limit",
    "gamma_steady_state",
    "gamma_steady_density",
    "make_rng",
    "RNG_NAME",
]

RNG_NAME = "numpy.random.Generator(Philox)"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class LigParams:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (0 < self.alpha < self.beta and math.isfinite(self.beta)):
            raise ParameterError(
                f"LIG needs beta > alpha > 0, got alpha={self.alpha!r}, beta={self.beta!r}"
            )


def _log_delta(alpha: float, beta: float) -> float:
    return (
        alpha * math.log(beta)
        - math.log(beta - alpha)
        - beta
        - log_lower_incomplete_gamma(alpha, beta)
    )


def lig_pi(p: LigParams) -> float:
    """Mass of the atom at 1."""
    # pi = D / (1 + D) with log D = alpha log beta - log(beta - alpha) - beta - log G(alpha, beta)
    return special.expit(_log_delta(p.alpha, p.beta))


def delta_infinity(a: float, b: float) -> float:
    """``b^a / ((b - a) e^b G(a, b))``; ``lig_pi(a, b) == D / (1 + D)``."""
    LigParams(a, b)
    return math.exp(_log_delta(a, b))


def _truncated_cdf(p: LigParams, x: np.ndarray) -> np.ndarray:
    # F(x) = P(alpha, beta x) / P(alpha, beta) on [0, 1]
    return regularized_lower_gamma(p.alpha, p.beta * np.clip(x, 0.0, 1.0)) / _reg_lower(
        p.alpha, p.beta
    )


def _scalar_or_array(x, fn):
    arr = np.asarray(x, dtype=float)
    out = fn(np.atleast_1d(arr))
    return float(out[0]) if arr.ndim == 0 else out


def lig_cdf(p: LigParams, x):
    """Distribution function ``(1 - pi) F(x)`` on [0, 1), 1 from x = 1 on."""
    pi = lig_pi(p)

    def fn(a):
        out = (1.0 - pi) * _truncated_cdf(p, a)
        out[a < 0] = 0.0
        out[a >= 1] = 1.0
        return out

    return _scalar_or_array(x, fn)


def lig_cdf_left(p: LigParams, x):
    """Left limit ``G(x-)``; differs from :func:`lig_cdf` only at x = 1."""
    pi = lig_pi(p)

    def fn(a):
        out = (1.0 - pi) * _truncated_cdf(p, a)
        out[a <= 0] = 0.0
        out[a > 1] = 1.0
        return out

    return _scalar_or_array(x, fn)


def lig_pdf_continuous_part(p: LigParams, x):
    """``(1 - pi) f(x)`` on (0, 1), zero elsewhere; integrates to ``1 - pi``."""
    pi = lig_pi(p)
    log_norm = p.alpha * math.log(p.beta) - log_lower_incomplete_gamma(p.alpha, p.beta)

    def fn(a):
        out = np.zeros_like(a)
        inside = (a > 0) & (a < 1)
        xi = a[inside]
        out[inside] = (1.0 - pi) * np.exp(log_norm + (p.alpha - 1) * np.log(xi) - p.beta * xi)
        return out

    return _scalar_or_array(x, fn)


def lig_moment(p: LigParams, m: int) -> float:
    """``E Z^m`` for ``Z ~ LIG(alpha, beta)``.

    Uses ``E W^m = G(alpha + m, beta) / (beta^m G(alpha, beta))`` for the
    truncated-gamma part.  Running the moment recursion forward instead loses
    digits whenever ``(m + alpha) / beta > 1``; the closed form satisfies it to
    rounding.
    """
    if m < 0:
        raise ParameterError("moment order must be >= 0")
    if m == 0:
        return 1.0
    pi = lig_pi(p)
    log_w = (
        log_lower_incomplete_gamma(p.alpha + m, p.beta)
        - m * math.log(p.beta)
        - log_lower_incomplete_gamma(p.alpha, p.beta)
    )
    return (1.0 - pi) * math.exp(log_w) + pi


@njit(cache=True)
def _bisect_truncated(alpha, beta, p_beta, targets, out, tol):
    for i in range(targets.size):
        t = targets[i]
        lo, hi = 0.0, 1.0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _reg_lower(alpha, beta * mid) / p_beta < t:
                lo = mid
            else:
                hi = mid
        out[i] = 0.5 * (lo + hi)


def lig_quantile(p: LigParams, u, tol: float = 1e-12):
    """Generalized inverse of :func:`lig_cdf` for ``u`` in [0, 1]."""
    pi = lig_pi(p)

    def fn(a):
        if np.any((a < 0) | (a > 1)):
            raise ParameterError("quantile level must lie in [0, 1]")
        out = np.ones_like(a)
        cont = a < 1.0 - pi
        targets = np.ascontiguousarray(a[cont] / (1.0 - pi))
        res = np.empty_like(targets)
        _bisect_truncated(p.alpha, p.beta, _reg_lower(p.alpha, p.beta), targets, res, tol)
        out[cont] = res
        return out

    return _scalar_or_array(u, fn)


def lig_sample(p: LigParams, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` LIG variates; the atom is emitted as exactly ``1.0``."""
    if count < 0:
        raise ParameterError("count must be >= 0")
    u = make_rng(seed).random(count)
    return lig_quantile(p, u) if count else np.empty(0)


def _check_beta(a: float, c: float) -> None:
    if not (a > 0 and c > 0):
        raise ParameterError(f"Beta needs positive parameters, got ({a!r}, {c!r})")


def beta_moment(a: float, c: float, m: int) -> float:
    """``E X^m`` for ``X ~ Beta(a, c)`` via ``mu_{j+1} = (j + a) / (j + a + c) mu_j``."""
    _check_beta(a, c)
    mu = 1.0
    for j in range(m):
        mu *= (j + a) / (j + a + c)
    return mu


def beta_cdf(a: float, c: float, x):
    _check_beta(a, c)
    return special.betainc(a, c, np.clip(x, 0.0, 1.0))


def beta_pdf(a: float, c: float, x):
    _check_beta(a, c)
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xi = np.where(inside, x, 0.5)
    log_pdf = (a - 1) * np.log(xi) + (c - 1) * np.log1p(-xi) - special.betaln(a, c)
    out = np.where(inside, np.exp(log_pdf), 0.0)
    return float(out) if out.ndim == 0 else out


class LimitLaw:
    """Common interface of the three limit laws, all supported on [0, 1]."""

    model: ModelId
    a: float
    b: float

    def cdf(self, x):
        raise NotImplementedError

    def cdf_left(self, x):
        raise NotImplementedError

    def moment(self, m: int) -> float:
        raise NotImplementedError

    @property
    def atom(self) -> tuple[float, float] | None:
        """``(location, mass)`` of the point mass, or None."""
        return None

    def pdf(self, x):
        """Density of the absolutely continuous part (weighted by its mass)."""
        raise NotImplementedError


@dataclass(frozen=True)
class LigAtTop(LimitLaw):
    params: LigParams
    model: ModelId = ModelId.M1

    @property
    def a(self) -> float:
        return self.params.alpha

    @property
    def b(self) -> float:
        return self.params.beta

    def cdf(self, x):
        return lig_cdf(self.params, x)

    def cdf_left(self, x):
        return lig_cdf_left(self.params, x)

    def moment(self, m: int) -> float:
        return lig_moment(self.params, m)

    @property
    def atom(self):
        return 1.0, lig_pi(self.params)

    def pdf(self, x):
        return lig_pdf_continuous_part(self.params, x)


@dataclass(frozen=True)
class LigReflected(LimitLaw):
    """Law of ``Z`` where ``1 - Z ~ LIG(b - a, b)``; ``params`` are ``(b - a, b)``."""

    params: LigParams
    model: ModelId = ModelId.M2

    @property
    def a(self) -> float:
        return self.params.beta - self.params.alpha

    @property
    def b(self) -> float:
        return self.params.beta

    def cdf(self, x):
        # P(1 - W <= x) = 1 - P(W < 1 - x)
        x = np.asarray(x, dtype=float)
        return 1.0 - lig_cdf_left(self.params, 1.0 - x)

    def cdf_left(self, x):
        x = np.asarray(x, dtype=float)
        return 1.0 - lig_cdf(self.params, 1.0 - x)

    def moment(self, m: int) -> float:
        if m == 0:
            return 1.0
        return sum(comb(m, j) * (-1) ** j * lig_moment(self.params, j) for j in range(m + 1))

    @property
    def atom(self):
        return 0.0, lig_pi(self.params)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return lig_pdf_continuous_part(self.params, 1.0 - x)


@dataclass(frozen=True)
class BetaLaw(LimitLaw):
    alpha: float
    c: float
    model: ModelId = ModelId.M3

    def __post_init__(self) -> None:
        _check_beta(self.alpha, self.c)

    @property
    def a(self) -> float:
        return self.alpha

    @property
    def b(self) -> float:
        return self.alpha + self.c

    def cdf(self, x):
        return beta_cdf(self.alpha, self.c, x)

    def cdf_left(self, x):
        return beta_cdf(self.alpha, self.c, x)

    def moment(self, m: int) -> float:
        return beta_moment(self.alpha, self.c, m)

    def pdf(self, x):
        return beta_pdf(self.alpha, self.c, x)


def limit_law_for(model: ModelId | str, a: float, b: float) -> LimitLaw:
    model = ModelId.parse(model)
    if not (0 < a < b):
        raise ParameterError(f"limit law needs b > a > 0, got a={a!r}, b={b!r}")
    if model is ModelId.M1:
        return LigAtTop(LigParams(a, b))
    if model is ModelId.M2:
        return LigReflected(LigParams(b - a, b))
    return BetaLaw(a, b - a)


def _lemma2_log_terms(alpha_n: float, beta_n: float, N: int, upper: int) -> np.ndarray:
    k = np.arange(upper + 1, dtype=float)
    return (
        special.gammaln(alpha_n + k)
        - special.gammaln(k + 1.0)
        + k * math.log1p(-beta_n / N)
        - alpha_n * math.log(N)
    )


def lemma2_partial_sum(alpha_n: float, beta_n: float, N: int, upper: int | None = None) -> float:
    """``N^(-alpha_n) sum_{k=0}^{upper} Gamma(alpha_n + k) / k! (1 - beta_n / N)^k``.

    ``upper`` defaults to ``N``.  Convergence to :func:`lemma2_limit` needs
    ``alpha_n`` non-increasing with ``(alpha_n - alpha) log N -> 0``; that is
    the caller's responsibility and is not checked here.
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    if not alpha_n > 0:
        raise ParameterError("alpha_N must be > 0")
    if not 0 < beta_n < N:
        raise ParameterError(f"need 0 < beta_N < N, got beta_N={beta_n!r}, N={N}")
    upper = N if upper is None else upper
    return float(np.exp(special.logsumexp(_lemma2_log_terms(alpha_n, beta_n, N, upper))))


def lemma2_limit(alpha: float, beta: float) -> float:
    """``int_0^1 x^(alpha-1) e^(-beta x) dx = beta^(-alpha) G(alpha, beta)``."""
    if not (alpha > 0 and beta > 0):
        raise ParameterError("alpha and beta must be positive")
    return math.exp(log_lower_incomplete_gamma(alpha, beta) - alpha * math.log(beta))


@dataclass(frozen=True)
class GammaSteadyState:
    """Stationary gamma law of the boundary-free stochastic Langmuir equation."""

    shape: float
    rate: float

    def pdf(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_pdf = (
                self.shape * math.log(self.rate)
                + (self.shape - 1) * np.log(u)
                - self.rate * u
                - math.lgamma(self.shape)
            )
            out = np.where(u > 0, np.exp(log_pdf), 0.0)
        if self.shape == 1:
            out = np.where(u == 0, self.rate, out)
        elif self.shape < 1:
            out = np.where(u == 0, np.inf, out)
        return float(out) if out.ndim == 0 else out

    def cdf(self, u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, None)
        return regularized_lower_gamma(self.shape, self.rate * u)


def gamma_steady_state(p: PhysicalParams) -> GammaSteadyState:
    """Shape ``2/C`` and rate ``2 (d1 x + d2) / (C d1 x)``."""
    c1 = p.d1 * p.x
    return GammaSteadyState(2.0 / p.C, 2.0 * (c1 + p.d2) / (p.C * c1))


def gamma_steady_density(p: PhysicalParams, u):
    return gamma_steady_state(p).pdf(u)
