"""Exact stationary law of an LBD chain via detailed balance.

Weights are accumulated in log space, ``log w(k+1) = log w(k) + log b(k) - log d(k+1)``,
and normalized with log-sum-exp so that ``N`` in the millions neither
overflows nor underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateBoundaryError, IrreducibilityError
from .export import write_csv
from .model import ModelSpec, rate_arrays

__all__ = [
    "Pmf",
    "MomentSet",
    "stationary_pmf",
    "scaled_moments",
    "boundary_masses",
    "delta_n",
]


@dataclass(frozen=True)
class Pmf:
    """Probability mass function on ``{0, ..., N}``."""

    probs: np.ndarray
    log_weights: np.ndarray

    @property
    def n_states(self) -> int:
        return len(self.probs)

    @property
    def N(self) -> int:
        return len(self.probs) - 1

    @classmethod
    def from_probs(cls, probs) -> "Pmf":
        p = np.asarray(probs, dtype=float)
        p = p / p.sum()
        with np.errstate(divide="ignore"):
            return cls(p, np.log(p))

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)

    def rows(self):
        N = self.N
        for k, (p, lw) in enumerate(zip(self.probs, self.log_weights)):
            yield k, k / N, float(p), float(lw)

    def to_csv(self, path, metadata: dict | None = None) -> None:
        write_csv(path, ("k", "k_over_N", "prob", "log_weight"), self.rows(), metadata)


@dataclass(frozen=True)
class MomentSet:
    order: int
    raw: np.ndarray


def _log_weights(spec: ModelSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    birth, death = rate_arrays(spec)
    up, down = birth[:-1], death[1:]
    if np.any(up <= 0) or np.any(down <= 0):
        bad = int(np.flatnonzero((up <= 0) | (down <= 0))[0])
        raise IrreducibilityError(
            f"chain is reducible: b({bad})={up[bad]!r}, d({bad + 1})={down[bad]!r}"
        )
    lw = np.empty(spec.N + 1)
    lw[0] = 0.0
    np.cumsum(np.log(up) - np.log(down), out=lw[1:])
    return lw, birth, death


def stationary_pmf(spec: ModelSpec) -> Pmf:
    lw, _, _ = _log_weights(spec)
    probs = np.exp(lw - logsumexp(lw))
    return Pmf(probs, lw)


def scaled_moments(pmf: Pmf, order: int) -> MomentSet:
    """Moments ``E[(X/N)^m]`` for ``m = 0..order``."""
    if order < 0:
        raise ValueError("order must be >= 0")
    x = np.arange(pmf.n_states) / pmf.N
    raw = np.empty(order + 1)
    power = np.ones_like(x)
    for m in range(order + 1):
        raw[m] = np.dot(power, pmf.probs)
        power = power * x
    return MomentSet(order, raw)


def boundary_masses(pmf: Pmf) -> tuple[float, float]:
    return float(pmf.probs[0]), float(pmf.probs[-1])


def delta_n(spec: ModelSpec) -> float:
    """``[p(N-1) b(N-1) / d(N)] / sum_{k<N} p(k)`` from the exact stationary law.

    Satisfies ``p(N) = delta / (delta + 1)``.
    """
    birth, death = rate_arrays(spec)
    if death[-1] <= 0:
        raise DegenerateBoundaryError("d(N) = 0")
    lw, birth, death = _log_weights(spec)
    log_top = lw[-2] + math.log(birth[-2]) - math.log(death[-1])
    return math.exp(log_top - logsumexp(lw[:-1]))
