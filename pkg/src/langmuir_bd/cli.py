"""Command-line front end.

Every subcommand takes its parameters from flags and/or a flat JSON config
file (``--config``); flags win.  ``--save-config`` writes the resolved
parameters back out so the run can be repeated exactly.  Output is CSV on
stdout, or to ``--out`` with a ``<out>.json`` metadata sidecar.

Exit codes: 0 success, 2 invalid parameters, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .convergence import DEFAULT_GRID, REPORT_COLUMNS, sweep
from .errors import ParameterError, WindowError
from .export import atomic_write_text, csv_text, json_text
from .limits import (
    RNG_NAME,
    LigAtTop,
    delta_infinity,
    gamma_steady_state,
    lemma2_limit,
    lemma2_partial_sum,
    limit_law_for,
)
from .model import ModelId, ModelSpec, PhysicalParams, rate_arrays
from .simulate import (
    euler_maruyama,
    gillespie_run,
    occupation_pmf,
    sde_stationary_histogram,
)
from .stationary import stationary_pmf

SPEC_KEYS = ("c1", "c2", "c3")
PHYSICAL_KEYS = ("d1", "x", "d2", "C")

DEFAULTS = {
    "rates": {"model": "M1"},
    "stationary": {"model": "M1"},
    "limit": {"model": "M1", "moments": 4, "points": 11},
    "simulate": {
        "mode": "ssa", "model": "M1", "seed": 0, "what": "histogram",
        "k0": None, "burn_in": None, "dt": 1e-3, "u0": 0.0, "bins": 50,
    },
    "converge": {"model": "M1", "grid": list(DEFAULT_GRID), "max_m": 4},
    "lemma2": {"grid": [100, 1000, 10000]},
}


class UsageError(ParameterError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _grid(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with parameters (flags override)")
    p.add_argument("--save-config", help="write the resolved parameters to this JSON file")
    p.add_argument("--out", help="output CSV path (default: stdout)")


def _add_model(p: argparse.ArgumentParser, with_n: bool = True) -> None:
    p.add_argument("--model", choices=[m.value for m in ModelId])
    for key in SPEC_KEYS:
        p.add_argument(f"--{key}", type=float)
    for key in PHYSICAL_KEYS:
        p.add_argument(f"--{key}", type=float, help="physical parameter (alternative to c1..c3)")
    if with_n:
        p.add_argument("--N", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="langmuir-bd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    kw = {"argument_default": argparse.SUPPRESS}

    p = sub.add_parser("rates", help="birth/death rate table", **kw)
    _add_model(p)
    _add_common(p)

    p = sub.add_parser("stationary", help="exact stationary pmf", **kw)
    _add_model(p)
    _add_common(p)

    p = sub.add_parser("limit", help="limit law cdf/pdf/moments", **kw)
    p.add_argument("--model", choices=[m.value for m in ModelId])
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    for key in SPEC_KEYS:
        p.add_argument(f"--{key}", type=float)
    p.add_argument("--moments", type=int)
    p.add_argument("--points", type=int, help="cdf/pdf grid points on [0, 1]")
    _add_common(p)

    p = sub.add_parser("simulate", help="SSA or Euler-Maruyama simulation", **kw)
    p.add_argument("--mode", choices=["ssa", "sde"])
    _add_model(p)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--k0", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--u0", type=float)
    p.add_argument("--bins", type=int)
    p.add_argument("--what", choices=["trajectory", "histogram"])
    _add_common(p)

    p = sub.add_parser("converge", help="convergence sweep over N", **kw)
    p.add_argument("--model", choices=[m.value for m in ModelId])
    for key in SPEC_KEYS:
        p.add_argument(f"--{key}", type=float)
    p.add_argument("--grid", type=_grid)
    p.add_argument("--max-m", dest="max_m", type=int)
    _add_common(p)

    p = sub.add_parser("lemma2", help="partial sums against their limit", **kw)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--grid", type=_grid)
    _add_common(p)
    return parser


def resolve_config(argv: list[str] | None = None) -> tuple[str, dict, dict]:
    """Parse ``argv`` into ``(command, params, io_options)``."""
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    io_opts = {k: ns.pop(k, None) for k in ("config", "save_config", "out")}
    params = dict(DEFAULTS[command])
    if io_opts["config"]:
        with open(io_opts["config"]) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ParameterError("config file must hold a JSON object")
        cfg_command = loaded.pop("command", command)
        if cfg_command != command:
            raise ParameterError(f"config is for command {cfg_command!r}, not {command!r}")
        # a flag from one parameter group replaces the other group from the file
        if any(k in ns for k in PHYSICAL_KEYS):
            for k in SPEC_KEYS:
                loaded.pop(k, None)
        if any(k in ns for k in SPEC_KEYS):
            for k in PHYSICAL_KEYS:
                loaded.pop(k, None)
        params.update(loaded)
    params.update(ns)
    return command, params, io_opts


def _need(params: dict, *keys: str):
    missing = [k for k in keys if params.get(k) is None]
    if missing:
        raise ParameterError("missing parameter(s): " + ", ".join(missing))
    return [params[k] for k in keys]


def _physical(params: dict) -> PhysicalParams | None:
    if all(params.get(k) is None for k in PHYSICAL_KEYS):
        return None
    return PhysicalParams(*_need(params, *PHYSICAL_KEYS))


def _spec(params: dict) -> ModelSpec:
    has_spec = any(params.get(k) is not None for k in SPEC_KEYS)
    phys = _physical(params)
    if has_spec and phys is not None:
        raise ParameterError("give either c1/c2/c3 or d1/x/d2/C, not both")
    (N,) = _need(params, "N")
    if phys is not None:
        return ModelSpec.from_physical(params["model"], phys, N)
    return ModelSpec(params["model"], *_need(params, *SPEC_KEYS), N)


def _cmd_rates(params):
    spec = _spec(params)
    birth, death = rate_arrays(spec)
    rows = zip(range(spec.N + 1), birth, death)
    return ("k", "birth", "death"), rows, {"spec": spec.as_dict()}


def _cmd_stationary(params):
    spec = _spec(params)
    pmf = stationary_pmf(spec)
    return ("k", "k_over_N", "prob", "log_weight"), pmf.rows(), {"spec": spec.as_dict()}


def _cmd_limit(params):
    model = ModelId.parse(params["model"])
    if params.get("a") is not None or params.get("b") is not None:
        a, b = _need(params, "a", "b")
    else:
        c1, c2, c3 = _need(params, *SPEC_KEYS)
        a, b = c1 / c3, (c1 + c2) / c3
    law = limit_law_for(model, a, b)
    n_moments, points = int(params["moments"]), int(params["points"])
    if n_moments < 0 or points < 2:
        raise ParameterError("need moments >= 0 and points >= 2")
    rows = []
    if law.atom is not None:
        rows.append(("atom", law.atom[0], law.atom[1]))
    if isinstance(law, LigAtTop):
        rows.append(("delta_infinity", "", delta_infinity(a, b)))
    rows += [("moment", m, law.moment(m)) for m in range(1, n_moments + 1)]
    x = np.linspace(0.0, 1.0, points)
    rows += [("cdf", xi, float(v)) for xi, v in zip(x, np.atleast_1d(law.cdf(x)))]
    rows += [("pdf", xi, float(v)) for xi, v in zip(x, np.atleast_1d(law.pdf(x)))]
    return ("kind", "x", "value"), rows, {"a": a, "b": b}


def _cmd_simulate(params):
    (t_max,) = _need(params, "t_max")
    seed = int(params["seed"])
    what = params["what"]
    if params["mode"] == "ssa":
        spec = _spec(params)
        k0 = spec.N // 2 if params.get("k0") is None else int(params["k0"])
        traj = gillespie_run(spec, k0, t_max, seed, burn_in=params.get("burn_in"))
        meta = dict(traj.metadata)
        if what == "trajectory":
            if traj.streamed:
                raise WindowError("too many events to export a trajectory; use --what histogram")
            return ("time", "state"), zip(traj.times, traj.states), meta
        emp = occupation_pmf(traj)
        exact = stationary_pmf(spec).probs
        rows = zip(range(spec.N + 1), emp.probs, exact)
        meta.update(t_used=emp.t_used, n_events=traj.n_events)
        return ("k", "occupation_prob", "exact_prob"), rows, meta
    phys = _physical(params)
    if phys is None:
        raise ParameterError("sde mode needs physical parameters d1, x, d2, C")
    path = euler_maruyama(phys, float(params["u0"]), float(params["dt"]), t_max, seed)
    meta = dict(path.metadata)
    if what == "trajectory":
        return ("time", "u"), zip(path.times(), path.values), meta
    hist = sde_stationary_histogram(path, params.get("burn_in"), int(params["bins"]))
    mids = 0.5 * (hist.edges[1:] + hist.edges[:-1])
    target = gamma_steady_state(phys)
    rows = zip(hist.edges[:-1], hist.edges[1:], hist.counts, hist.density, target.pdf(mids))
    meta.update(gamma_shape=target.shape, gamma_rate=target.rate)
    return ("bin_left", "bin_right", "count", "density", "gamma_density"), rows, meta


def _cmd_converge(params):
    c1, c2, c3 = _need(params, *SPEC_KEYS)
    report = sweep(params["model"], c1, c2, c3, params["grid"], int(params["max_m"]))
    max_m = int(params["max_m"])
    header = REPORT_COLUMNS[:10] + tuple(f"m{m}_err" for m in range(1, max_m + 1))
    return header, report.csv_rows(), {"a": report.a, "b": report.b}


def _cmd_lemma2(params):
    alpha, beta = _need(params, "alpha", "beta")
    target = lemma2_limit(alpha, beta)
    rows = []
    for N in params["grid"]:
        s = lemma2_partial_sum(alpha, beta, int(N))
        rows.append((int(N), s, target, abs(s - target)))
    return ("N", "partial_sum", "limit", "abs_err"), rows, {}


COMMANDS = {
    "rates": _cmd_rates,
    "stationary": _cmd_stationary,
    "limit": _cmd_limit,
    "simulate": _cmd_simulate,
    "converge": _cmd_converge,
    "lemma2": _cmd_lemma2,
}


def _one_line(exc: BaseException) -> str:
    return " ".join(str(exc).split()) or type(exc).__name__


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    try:
        command, params, io_opts = resolve_config(argv)
        header, rows, extra = COMMANDS[command](params)
        text = csv_text(header, rows)
    except OSError as exc:
        print(f"error: io: {_one_line(exc)}", file=sys.stderr)
        return 3
    except (ValueError, IndexError, KeyError, TypeError) as exc:
        print(f"error: parameter: {_one_line(exc)}", file=sys.stderr)
        return 2
    try:
        if io_opts["save_config"]:
            atomic_write_text(io_opts["save_config"], json_text({"command": command, **params}))
        if io_opts["out"]:
            meta = {
                "command": command,
                "params": params,
                "seed": params.get("seed"),
                "rng": RNG_NAME,
                "version": __version__,
                **extra,
            }
            atomic_write_text(io_opts["out"], text)
            atomic_write_text(io_opts["out"] + ".json", json_text(_jsonable(meta)))
        else:
            stdout.write(text)
    except OSError as exc:
        print(f"error: io: {_one_line(exc)}", file=sys.stderr)
        return 3
    return 0


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def main(argv: list[str] | None = None) -> int:
    return run(argv)
