"""Langmuir birth-death (LBD) models M1, M2, M3 and their rate functions.

A model lives on the states ``{0, ..., N}`` with

    b(k) = c1 (N - k) + C(k, N)
    d(k) = c2 k       + C(k, N)

where the noise term ``C`` is one of

    M1: c3 N k        for 0 <= k < N,  C(N, N) = 0
    M2: c3 N (N - k)  for 0 < k <= N,  C(0, N) = 0
    M3: c3 k (N - k)

Rate functions accept a scalar state or an integer array of states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "ModelId",
    "PhysicalParams",
    "ModelSpec",
    "map_physical_params",
    "noise_term",
    "birth_rate",
    "death_rate",
    "rate_arrays",
]


class ModelId(str, enum.Enum):
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"

    @classmethod
    def parse(cls, value: "ModelId | str") -> "ModelId":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ParameterError(f"unknown model {value!r}; expected one of M1, M2, M3") from None


def _require_positive(**values: float) -> None:
    for name, v in values.items():
        if not (math.isfinite(v) and v > 0):
            raise ParameterError(f"{name} must be a positive finite number, got {v!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Langmuir kinetics: adsorption constant d1, concentration x, desorption d2, noise C."""

    d1: float
    x: float
    d2: float
    C: float

    def __post_init__(self) -> None:
        _require_positive(d1=self.d1, x=self.x, d2=self.d2, C=self.C)


def map_physical_params(p: PhysicalParams) -> tuple[float, float, float]:
    """Return ``(c1, c2, c3) = (d1 x, d2, C d1 x / 2)``."""
    c1 = p.d1 * p.x
    return c1, p.d2, p.C * c1 / 2.0


@dataclass(frozen=True)
class ModelSpec:
    """An LBD model with constants ``c1, c2 > 0``, ``c3 >= 0`` and size ``N >= 1``.

    ``c3 == 0`` gives the linear Langmuir chain whose stationary law is
    ``Binomial(N, c1 / (c1 + c2))``; the limit parameters ``a`` and ``b``
    are undefined in that case.
    """

    model: ModelId
    c1: float
    c2: float
    c3: float
    N: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", ModelId.parse(self.model))
        _require_positive(c1=self.c1, c2=self.c2)
        if not (math.isfinite(self.c3) and self.c3 >= 0):
            raise ParameterError(f"c3 must be a non-negative finite number, got {self.c3!r}")
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"N must be an integer >= 1, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("c1", "c2", "c3"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_physical(cls, model: ModelId | str, p: PhysicalParams, N: int) -> "ModelSpec":
        c1, c2, c3 = map_physical_params(p)
        return cls(model, c1, c2, c3, N)

    @property
    def a(self) -> float:
        if self.c3 == 0:
            raise ParameterError("a = c1/c3 is undefined for c3 = 0")
        return self.c1 / self.c3

    @property
    def b(self) -> float:
        if self.c3 == 0:
            raise ParameterError("b = (c1+c2)/c3 is undefined for c3 = 0")
        return (self.c1 + self.c2) / self.c3

    def with_N(self, N: int) -> "ModelSpec":
        return ModelSpec(self.model, self.c1, self.c2, self.c3, N)

    def as_dict(self) -> dict:
        return {"model": self.model.value, "c1": self.c1, "c2": self.c2, "c3": self.c3, "N": self.N}


def _states(spec: ModelSpec, k):
    arr = np.asarray(k)
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise IndexError(f"state index must be integral, got {k!r}")
        arr = arr.astype(np.int64)
    if np.any(arr < 0) or np.any(arr > spec.N):
        raise IndexError(f"state index out of range [0, {spec.N}]: {k!r}")
    return arr


def _noise(spec: ModelSpec, k: np.ndarray) -> np.ndarray:
    N, c3 = spec.N, spec.c3
    kf = k.astype(float)
    if spec.model is ModelId.M1:
        return np.where(k < N, c3 * N * kf, 0.0)
    if spec.model is ModelId.M2:
        return np.where(k > 0, c3 * N * (N - kf), 0.0)
    return c3 * kf * (N - kf)


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def noise_term(spec: ModelSpec, k):
    """Noise term ``C(k, N)`` of the spec's model."""
    return _out(_noise(spec, _states(spec, k)))


def birth_rate(spec: ModelSpec, k):
    ks = _states(spec, k)
    return _out(spec.c1 * (spec.N - ks.astype(float)) + _noise(spec, ks))


def death_rate(spec: ModelSpec, k):
    ks = _states(spec, k)
    return _out(spec.c2 * ks.astype(float) + _noise(spec, ks))


def rate_arrays(spec: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Birth and death rates over all states ``0..N`` as two float arrays."""
    k = np.arange(spec.N + 1)
    noise = _noise(spec, k)
    kf = k.astype(float)
    return spec.c1 * (spec.N - kf) + noise, spec.c2 * kf + noise
