"""Stochastic simulation: exact SSA for the LBD chain, Euler-Maruyama for the SDE.

Randomness comes from ``numpy.random.Philox`` (counter-based) seeded by the
caller.  The kernels only consume pre-drawn uniforms, so a run is a pure
function of ``(inputs, seed)``.  Normal variates use the inverse normal cdf,
not a rejection sampler.

The SDE kernel clamps ``u`` at 0 after every step; ``sqrt(g(u))`` is
otherwise undefined for the negative excursions that Euler-Maruyama produces
near the origin.  This is a simulation convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.special import ndtri

from .errors import ParameterError, WindowError
from .export import write_csv
from .limits import RNG_NAME, make_rng
from .model import ModelSpec, PhysicalParams, rate_arrays
from .stationary import Pmf, stationary_pmf

__all__ = [
    "Trajectory",
    "SdePath",
    "EmpiricalPmf",
    "Histogram",
    "DEFAULT_BURN_FRACTION",
    "STREAM_THRESHOLD",
    "gillespie_run",
    "occupation_pmf",
    "required_run_time",
    "total_variation",
    "euler_maruyama",
    "sde_stationary_histogram",
    "empirical_ks",
    "sde_ks",
]

DEFAULT_BURN_FRACTION = 0.2
STREAM_THRESHOLD = 10_000_000
_CHUNK = 1 << 18


@dataclass
class Trajectory:
    """Piecewise-constant CTMC path.

    ``times[0] == 0`` holds the initial state; each later entry is a jump.
    When the run exceeded ``max_events`` the event arrays are dropped
    (``times is None``) and only ``occupation`` -- time per state after
    ``occupation_start`` -- is kept.
    """

    times: np.ndarray | None
    states: np.ndarray | None
    t_end: float
    N: int
    occupation: np.ndarray | None = None
    occupation_start: float = 0.0
    n_events: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def streamed(self) -> bool:
        return self.times is None

    def to_csv(self, path) -> None:
        if self.streamed:
            raise WindowError("trajectory was streamed; no events to export")
        write_csv(path, ("time", "state"), zip(self.times, self.states), self.metadata)


@dataclass(frozen=True)
class EmpiricalPmf:
    probs: np.ndarray
    t_burn: float
    t_used: float


@dataclass(frozen=True)
class SdePath:
    dt: float
    values: np.ndarray
    scheme: str = "euler-maruyama-ito"
    metadata: dict = field(default_factory=dict)

    @property
    def t_end(self) -> float:
        return self.dt * (len(self.values) - 1)

    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.values))

    def to_csv(self, path) -> None:
        write_csv(path, ("time", "u"), zip(self.times(), self.values), self.metadata)


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    density: np.ndarray
    counts: np.ndarray


@njit(cache=True)
def _occupy(occ, k, t0, t1, start):
    lo = t0 if t0 > start else start
    if t1 > lo:
        occ[k] += t1 - lo


@njit(cache=True)
def _ssa_chunk(birth, death, k, t, t_max, occ_start, uniforms, ev_t, ev_k, occ):
    n = uniforms.shape[0] // 2
    for i in range(n):
        rate = birth[k] + death[k]
        t_next = t - math.log(1.0 - uniforms[2 * i]) / rate
        if t_next >= t_max:
            _occupy(occ, k, t, t_max, occ_start)
            return k, t_max, i, True
        _occupy(occ, k, t, t_next, occ_start)
        if uniforms[2 * i + 1] * rate < birth[k]:
            k += 1
        else:
            k -= 1
        t = t_next
        ev_t[i] = t
        ev_k[i] = k
    return k, t, n, False


def gillespie_run(
    spec: ModelSpec,
    k0: int,
    t_max: float,
    seed: int,
    *,
    burn_in: float | None = None,
    max_events: int = STREAM_THRESHOLD,
) -> Trajectory:
    """Simulate the chain exactly (direct method) on ``[0, t_max]``.

    Occupation times after ``burn_in`` (default 20% of ``t_max``) are always
    accumulated.  Events are stored until their number exceeds ``max_events``;
    past that the run continues in streaming mode.
    """
    if not 0 <= k0 <= spec.N:
        raise ParameterError(f"initial state {k0} outside [0, {spec.N}]")
    if not t_max > 0:
        raise ParameterError("t_max must be > 0")
    burn = DEFAULT_BURN_FRACTION * t_max if burn_in is None else float(burn_in)
    if not 0 <= burn < t_max:
        raise WindowError(f"burn-in {burn!r} must lie in [0, t_max)")
    birth, death = rate_arrays(spec)
    if np.any(birth + death <= 0):
        raise ParameterError("total jump rate vanishes at some state")

    rng = make_rng(seed)
    occ = np.zeros(spec.N + 1)
    times, states = [np.zeros(1)], [np.array([k0], dtype=np.int64)]
    stored = 0
    k, t, n_events, done = int(k0), 0.0, 0, False
    ev_t = np.empty(_CHUNK)
    ev_k = np.empty(_CHUNK, dtype=np.int64)
    while not done:
        uniforms = rng.random(2 * _CHUNK)
        k, t, used, done = _ssa_chunk(birth, death, k, t, float(t_max), burn, uniforms, ev_t, ev_k, occ)
        n_events += used
        if times is not None:
            if n_events > max_events:
                times = states = None
            else:
                times.append(ev_t[:used].copy())
                states.append(ev_k[:used].copy())
    meta = {
        "spec": spec.as_dict(),
        "k0": int(k0),
        "t_max": float(t_max),
        "seed": seed,
        "rng": RNG_NAME,
        "burn_in": burn,
    }
    return Trajectory(
        times=None if times is None else np.concatenate(times),
        states=None if states is None else np.concatenate(states),
        t_end=float(t_max),
        N=spec.N,
        occupation=occ,
        occupation_start=burn,
        n_events=n_events,
        metadata=meta,
    )


def occupation_pmf(traj: Trajectory, burn_in: float | None = None) -> EmpiricalPmf:
    """Fraction of time spent in each state on ``[burn_in, t_end]``."""
    if burn_in is None:
        burn_in = traj.occupation_start if traj.occupation is not None else DEFAULT_BURN_FRACTION * traj.t_end
    if burn_in >= traj.t_end:
        raise WindowError(f"burn-in {burn_in!r} leaves no time before t_end={traj.t_end!r}")
    if traj.streamed:
        if burn_in != traj.occupation_start:
            raise WindowError(
                f"streamed trajectory only has occupation after t={traj.occupation_start!r}"
            )
        occ = traj.occupation
    else:
        ends = np.append(traj.times[1:], traj.t_end)
        durations = np.clip(ends, burn_in, None) - np.clip(traj.times, burn_in, None)
        occ = np.bincount(traj.states, weights=durations, minlength=traj.N + 1)
    t_used = traj.t_end - burn_in
    return EmpiricalPmf(occ / occ.sum(), float(burn_in), float(t_used))


def required_run_time(spec: ModelSpec, min_visits: float, burn_fraction: float = DEFAULT_BURN_FRACTION) -> float:
    """Run length giving every state at least ``min_visits`` expected entries after burn-in.

    In stationarity state ``k`` is left at rate ``p(k) (b(k) + d(k))`` per unit time.
    """
    birth, death = rate_arrays(spec)
    flux = stationary_pmf(spec).probs * (birth + death)
    return min_visits / flux.min() / (1.0 - burn_fraction)


def total_variation(p, q) -> float:
    p = p.probs if isinstance(p, (Pmf, EmpiricalPmf)) else np.asarray(p)
    q = q.probs if isinstance(q, (Pmf, EmpiricalPmf)) else np.asarray(q)
    return 0.5 * float(np.abs(p - q).sum())


def _standard_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    # 53-bit uniforms on the open interval (0, 1), then the inverse normal cdf
    bits = rng.integers(0, 1 << 53, size=n, dtype=np.int64)
    return ndtri((bits + 0.5) * 2.0**-53)


@njit(cache=True)
def _em_chunk(u, c1, decay, noise_scale, sqrt_dt, dt, xi, out):
    for i in range(xi.size):
        g = noise_scale * u
        u = u + (c1 - decay * u) * dt + math.sqrt(g if g > 0.0 else 0.0) * sqrt_dt * xi[i]
        if u < 0.0:
            u = 0.0
        out[i] = u
    return u


def euler_maruyama(p: PhysicalParams, u0: float, dt: float, t_max: float, seed: int, *, noise: float | None = None) -> SdePath:
    """Integrate ``du = [d1 x - (d1 x + d2) u] dt + sqrt(C d1 x u) dW`` (Ito).

    ``noise`` overrides the factor ``C d1 x`` in ``g(u)``; ``noise=0`` gives
    the deterministic Langmuir equation.
    """
    if not u0 >= 0:
        raise ParameterError("u0 must be >= 0")
    if not dt > 0:
        raise ParameterError("dt must be > 0")
    if not t_max > 0:
        raise ParameterError("t_max must be > 0")
    c1 = p.d1 * p.x
    decay = c1 + p.d2
    scale = p.C * c1 if noise is None else float(noise)
    n_steps = max(1, int(round(t_max / dt)))
    values = np.empty(n_steps + 1)
    values[0] = u0
    rng = make_rng(seed)
    u, pos = float(u0), 1
    while pos <= n_steps:
        m = min(_CHUNK, n_steps + 1 - pos)
        xi = _standard_normals(rng, m)
        u = _em_chunk(u, c1, decay, scale, math.sqrt(dt), dt, xi, values[pos : pos + m])
        pos += m
    meta = {
        "physical": {"d1": p.d1, "x": p.x, "d2": p.d2, "C": p.C},
        "noise_factor": scale,
        "u0": float(u0),
        "dt": float(dt),
        "t_max": float(t_max),
        "seed": seed,
        "rng": RNG_NAME,
        "scheme": "euler-maruyama-ito",
        "negative_values": "clamped to 0",
    }
    return SdePath(float(dt), values, metadata=meta)


def _post_burn(path: SdePath, burn_in: float | None) -> np.ndarray:
    if burn_in is None:
        burn_in = DEFAULT_BURN_FRACTION * path.t_end
    if not burn_in < path.t_end:
        raise WindowError(f"burn-in {burn_in!r} leaves no samples before t_end={path.t_end!r}")
    return path.values[int(math.ceil(burn_in / path.dt - 1e-9)) :]


def sde_stationary_histogram(path: SdePath, burn_in: float | None = None, bins=50) -> Histogram:
    """Normalized histogram of the post-burn-in values."""
    if isinstance(bins, int) and bins < 1:
        raise ParameterError("bins must be >= 1")
    counts, edges = np.histogram(_post_burn(path, burn_in), bins=bins)
    widths = np.diff(edges)
    density = counts / (counts.sum() * widths)
    return Histogram(edges, density, counts)


def empirical_ks(values, cdf) -> float:
    """``sup_x |F_n(x) - cdf(x)|`` for the empirical cdf of ``values``."""
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    if n == 0:
        raise WindowError("no samples")
    # evaluate at each distinct value: F_n jumps there
    uniq, last = np.unique(x, return_index=False, return_counts=True)
    upper = np.cumsum(last) / n
    lower = upper - last / n
    g = np.asarray(cdf(uniq), dtype=float)
    return float(max(np.abs(upper - g).max(), np.abs(lower - g).max()))


def sde_ks(path: SdePath, cdf, burn_in: float | None = None) -> float:
    return empirical_ks(_post_burn(path, burn_in), cdf)
