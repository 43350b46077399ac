"""Numerical checks of the limit theorem along a grid of state-space sizes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .errors import NotApplicableError, ParameterError
from .export import write_csv
from .limits import (
    LimitLaw,
    LigParams,
    _lemma2_log_terms,
    delta_infinity,
    lig_pi,
    limit_law_for,
)
from .model import ModelId, ModelSpec
from .stationary import Pmf, delta_n, scaled_moments, stationary_pmf

__all__ = [
    "DEFAULT_GRID",
    "ConvergenceRow",
    "ConvergenceReport",
    "spec_sequence",
    "kolmogorov_distance",
    "atom_convergence",
    "moment_convergence",
    "delta_convergence",
    "delta_n_gamma_form",
    "gauss_ratio",
    "sweep",
    "REPORT_COLUMNS",
]

DEFAULT_GRID = (250, 500, 1000, 2000, 4000)

REPORT_COLUMNS = (
    "model", "c1", "c2", "c3", "a", "b", "N",
    "ks", "atom_err", "delta_err", "m1_err", "m2_err", "m3_err", "m4_err",
)


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    kolmogorov: float
    atom_err: float  # nan for M3
    delta_err: float  # nan unless M1
    moment_errs: tuple[float, ...]


@dataclass
class ConvergenceReport:
    model: ModelId
    c1: float
    c2: float
    c3: float
    a: float
    b: float
    rows: list[ConvergenceRow] = field(default_factory=list)

    def csv_rows(self):
        for r in self.rows:
            yield (
                self.model.value, self.c1, self.c2, self.c3, self.a, self.b, r.N,
                r.kolmogorov, r.atom_err, r.delta_err, *r.moment_errs,
            )

    def to_csv(self, path, metadata: dict | None = None) -> None:
        write_csv(path, REPORT_COLUMNS, self.csv_rows(), metadata)


def spec_sequence(model, c1: float, c2: float, c3: float, grid: Iterable[int]) -> list[ModelSpec]:
    return [ModelSpec(model, c1, c2, c3, n) for n in grid]


def _law_for_spec(spec: ModelSpec) -> LimitLaw:
    if spec.c3 == 0:
        raise NotApplicableError("no limit law for c3 = 0")
    return limit_law_for(spec.model, spec.a, spec.b)


def kolmogorov_distance(pmf: Pmf, law: LimitLaw) -> float:
    """Sup-distance between the cdf of ``X / N`` and ``law``.

    The empirical cdf is a step function with jumps at ``k / N``, so the
    supremum is attained at a jump or just before one.
    """
    N = pmf.N
    x = np.arange(N + 1) / N
    F = np.minimum(np.cumsum(pmf.probs), 1.0)
    F_before = np.concatenate(([0.0], F[:-1]))
    G = np.asarray(law.cdf(x), dtype=float)
    G_left = np.asarray(law.cdf_left(x), dtype=float)
    return float(max(np.abs(F - G).max(), np.abs(F_before - G_left).max()))


def atom_convergence(specs: Sequence[ModelSpec]) -> list[tuple[int, float, float, float]]:
    """Rows ``(N, boundary mass, pi, |error|)``; state N for M1, state 0 for M2."""
    rows = []
    for spec in specs:
        if spec.model is ModelId.M3:
            raise NotApplicableError("M3 limit law has no atom")
        law = _law_for_spec(spec)
        pmf = stationary_pmf(spec)
        mass = pmf.probs[-1] if spec.model is ModelId.M1 else pmf.probs[0]
        target = law.atom[1]
        rows.append((spec.N, float(mass), target, abs(float(mass) - target)))
    return rows


def moment_convergence(specs: Sequence[ModelSpec], max_m: int = 4) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """Rows ``(N, finite-N moments, limit moments)`` for ``m = 1..max_m``."""
    if not 1 <= max_m <= 15:
        raise ParameterError("max_m must lie in [1, 15]")
    rows = []
    for spec in specs:
        law = _law_for_spec(spec)
        finite = scaled_moments(stationary_pmf(spec), max_m).raw[1:]
        limit = np.array([law.moment(m) for m in range(1, max_m + 1)])
        rows.append((spec.N, finite, limit))
    return rows


def delta_convergence(specs: Sequence[ModelSpec]) -> list[tuple[int, float, float, float]]:
    """Rows ``(N, delta_N, delta_inf, |error|)`` for M1."""
    rows = []
    for spec in specs:
        if spec.model is not ModelId.M1:
            raise NotApplicableError("delta_N targets the M1 boundary")
        d = delta_n(spec)
        d_inf = delta_infinity(spec.a, spec.b)
        rows.append((spec.N, d, d_inf, abs(d - d_inf)))
    return rows


def gauss_ratio(alpha: float, k: int) -> float:
    """``Gamma(alpha + k) / (k! k^(alpha - 1))``, tending to 1 as ``k`` grows."""
    if k < 1 or not alpha > 0:
        raise ParameterError("gauss_ratio needs k >= 1 and alpha > 0")
    return math.exp(math.lgamma(alpha + k) - math.lgamma(k + 1) - (alpha - 1) * math.log(k))


def delta_n_gamma_form(spec: ModelSpec) -> float:
    """Delta_N for M1 rebuilt from gamma functions instead of the pmf.

    With ``a_N = c1 N / (c3 N - c1)`` and ``b_N = (c1 + c2) N / (c3 N + c2)``::

        Delta_N = (b - a + N) / ((b - a) N) * gauss_ratio(a_N, N)
                  * (1 - b_N / N)^N / S_N

    where ``S_N = N^(-a_N) sum_{k<N} Gamma(k + a_N) / k! (1 - b_N / N)^k``.
    Requires ``c3 N > c1`` so that ``a_N > 0``.
    """
    if spec.model is not ModelId.M1:
        raise NotApplicableError("gamma form of delta_N is derived for M1")
    c1, c2, c3, N = spec.c1, spec.c2, spec.c3, spec.N
    if not c3 * N > c1:
        raise ParameterError("need c3 N > c1")
    a_n = c1 * N / (c3 * N - c1)
    b_n = (c1 + c2) * N / (c3 * N + c2)
    gap = spec.b - spec.a
    log_s = special.logsumexp(_lemma2_log_terms(a_n, b_n, N, N - 1))
    log_delta = (
        math.log((gap + N) / (gap * N))
        + math.log(gauss_ratio(a_n, N))
        + N * math.log1p(-b_n / N)
        - log_s
    )
    return math.exp(log_delta)


def sweep(model, c1: float, c2: float, c3: float, grid: Iterable[int] = DEFAULT_GRID, max_m: int = 4) -> ConvergenceReport:
    """Full per-N convergence table for one set of constants."""
    model = ModelId.parse(model)
    grid = list(grid)
    if any(n2 <= n1 for n1, n2 in zip(grid, grid[1:])):
        raise ParameterError("grid must be strictly increasing")
    specs = spec_sequence(model, c1, c2, c3, grid)
    if not specs:
        raise ParameterError("empty grid")
    law = _law_for_spec(specs[0])
    report = ConvergenceReport(model, specs[0].c1, specs[0].c2, specs[0].c3, specs[0].a, specs[0].b)
    for spec in specs:
        pmf = stationary_pmf(spec)
        moments = scaled_moments(pmf, max_m).raw[1:]
        errs = tuple(float(abs(moments[m - 1] - law.moment(m))) for m in range(1, max_m + 1))
        if model is ModelId.M3:
            atom_err = math.nan
        else:
            mass = pmf.probs[-1] if model is ModelId.M1 else pmf.probs[0]
            atom_err = abs(float(mass) - law.atom[1])
        delta_err = abs(delta_n(spec) - delta_infinity(spec.a, spec.b)) if model is ModelId.M1 else math.nan
        report.rows.append(
            ConvergenceRow(spec.N, kolmogorov_distance(pmf, law), atom_err, delta_err, errs)
        )
    return report
