"""
Command-line experiments.

Each subcommand has a fixed parameter table. Values are resolved as
built-in default < ``QTR_DEFAULT_DIM`` (for ``dim``) < ``--config`` file <
command-line flag, and every value goes through the same converter, so a bad
value reports the same field name wherever it came from.

Exit status: 0 success, 1 tolerance failure, 2 parameter/usage error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .boost import BoostParams, alpha_of, beta_of, boost_state
from .dilation import dilation_series, build_S_operator, gamma, time_to_threshold, verify_dilation
from .errors import ParameterError, QTRError, TruncationError
from .fock import (
    TruncatedOperator,
    coherent_state,
    fidelity,
    ladder_operators,
    min_coherent_dim,
    number_operator,
    vacuum,
)
from .langevin import LangevinSpec, adjoint_drift, drift_norm
from .output import read_config, render_table, write_text
from .register import (
    WalkConfig,
    ensemble_mean,
    ensemble_std,
    fit_mean_slope,
    simulate_walks,
)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_PARAM = 2
EXIT_IO = 3

DIM_ENV = "QTR_DEFAULT_DIM"


def _float(s):
    return float(s)


def _int(s):
    if isinstance(s, int):
        return s
    return int(str(s), 0)


def _u64(s):
    n = _int(s)
    if not 0 <= n < 2 ** 64:
        raise ValueError("must be an unsigned 64-bit integer")
    return n


def _floats(s):
    if isinstance(s, (list, tuple)):
        return [float(x) for x in s]
    parts = [p for p in str(s).replace(" ", "").split(",") if p]
    return [float(p) for p in parts]


def _dim(s):
    if s is None or str(s).lower() == "auto":
        return None
    n = _int(s)
    if n < 2:
        raise ValueError("must be an integer >= 2 or 'auto'")
    return n


def _bool(s):
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError("must be true or false")


def _fmt(s):
    if s not in ("csv", "jsonl"):
        raise ValueError("must be 'csv' or 'jsonl'")
    return s


COMMON = {
    "out": (str, None, "output path (default: stdout)"),
    "format": (_fmt, "csv", "output format: csv or jsonl"),
    "seed": (_u64, 0, "RNG seed (unsigned 64-bit)"),
}

PHYS = {
    "m": (_float, 1.0, "mass"),
    "omega": (_float, 1.0, "angular frequency"),
    "hbar": (_float, 1.0, "reduced Planck constant"),
}

COMMANDS = {
    "martingale": {
        "help": "ensemble of biased Wiener martingales (time register)",
        "params": {
            "theta": (_float, 0.1, "drift mean of the Gaussian increment"),
            "delta2": (_float, 1.0, "diffusion scale"),
            "dt": (_float, 1.0, "step size"),
            "steps": (_int, 100, "number of steps"),
            "walkers": (_int, 1000, "number of walkers"),
            "trajectories": (_bool, False, "also write every walker's trajectory"),
            "jobs": (_int, 1, "worker threads"),
            "tolerance": (_float, 4.0, "max |z-score| of the fitted slope"),
        },
    },
    "dilation-curve": {
        "help": "register growth (eps/gamma) t per frame velocity and threshold crossings",
        "params": {
            "v": (_floats, [0.0, 0.5, 0.8], "comma-separated frame velocities"),
            "eps": (_float, 1.0, "rest-frame register slope"),
            "A": (_float, 1.0, "register threshold"),
            "t_max": (_float, None, "end of the time grid (default 1.25 x latest crossing)"),
            "points": (_int, 101, "time-grid points per curve"),
            "tolerance": (_float, 1e-9, "max deviation of crossing times from gamma A / eps"),
        },
    },
    "verify-theorem": {
        "help": "check <alpha|S|alpha> = eps/gamma over a velocity grid",
        "params": {
            "v": (_floats, [round(0.1 * k, 1) for k in range(1, 10)], "comma-separated velocities"),
            "t": (_floats, [0.0], "comma-separated boost epochs"),
            "eps": (_float, 1.0, "rest-frame register slope"),
            **PHYS,
            "dim": (_dim, None, "Fock truncation or 'auto'"),
            "tolerance": (_float, 1e-5, "max allowed abs_error"),
        },
    },
    "boost-check": {
        "help": "fidelity of the boosted vacuum with the coherent state |alpha>",
        "params": {
            "v": (_float, 0.3, "frame velocity"),
            "t": (_float, 1.0, "boost epoch"),
            **PHYS,
            "dim": (_dim, None, "Fock truncation or 'auto'"),
            "tolerance": (_float, 1e-8, "max allowed 1 - fidelity"),
        },
    },
    "langevin-check": {
        "help": "adjoint drift of the dilation observable",
        "params": {
            "eps": (_float, 1.0, "rest-frame register slope"),
            **PHYS,
            "t": (_float, 0.0, "boost epoch fixing beta"),
            "dim": (_dim, 32, "Fock truncation"),
            "hamiltonian": (str, "number", "'number', 'zero', or path to a .npy matrix"),
            "jump": (str, "none", "'none', 'a', 'adag', 'number', or path to a .npy matrix"),
            "kappa": (_float, 1.0, "rate multiplying the named jump operator"),
            "tolerance": (_float, 1e-10, "max edge-masked drift norm (default spec only)"),
        },
    },
}


class UsageError(ParameterError):
    pass


@dataclass
class ExperimentConfig:
    name: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"


def _table(name):
    return {**COMMON, **COMMANDS[name]["params"]}


def resolve_config(name: str, file_values: dict, flag_values: dict, env=None) -> ExperimentConfig:
    """Merge defaults, environment, config file and flags for ``name``."""
    env = os.environ if env is None else env
    table = _table(name)
    unknown = sorted(set(file_values) - set(table) - {"config"})
    if unknown:
        raise ParameterError(f"unknown config key(s) for {name}: {', '.join(unknown)}")
    raw = {}
    if "dim" in table and env.get(DIM_ENV):
        raw["dim"] = ("environment " + DIM_ENV, env[DIM_ENV])
    for k, v in file_values.items():
        if k != "config":
            raw[k] = ("config", v)
    for k, v in flag_values.items():
        if v is not None:
            raw[k] = ("flag", v)
    params = {}
    for key, (conv, default, _) in table.items():
        if key in raw:
            src, val = raw[key]
            try:
                params[key] = conv(val)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"parameter '{key}' ({src}): invalid value {val!r}: {exc}")
        else:
            params[key] = default
    out = params.pop("out")
    fmt = params.pop("format")
    return ExperimentConfig(name, params, out, fmt)


# -- commands -----------------------------------------------------------------

def cmd_martingale(cfg: ExperimentConfig):
    p = cfg.params
    wc = WalkConfig(theta=p["theta"], delta2=p["delta2"], dt=p["dt"], steps=p["steps"],
                    walkers=p["walkers"], seed=p["seed"])
    ens = simulate_walks(wc, n_jobs=max(1, p["jobs"]))
    mean, std = ensemble_mean(ens), ensemble_std(ens)
    columns = ["step", "ensemble_mean", "ensemble_std"]
    if p["trajectories"]:
        columns += [f"z{w}" for w in range(wc.walkers)]
    rows = []
    for k in range(wc.steps + 1):
        row = [k, float(mean[k]), float(std[k])]
        if p["trajectories"]:
            row += [float(z) for z in ens.trajectories[:, k]]
        rows.append(row)
    fit = fit_mean_slope(ens)
    summary = {
        "fitted_slope": fit.slope,
        "analytic_slope": fit.analytic,
        "stderr": fit.stderr,
        "z_score": fit.z_score if math.isfinite(fit.stderr) else None,
    }
    ok = True
    if wc.walkers > 1:
        ok = abs(fit.z_score) <= p["tolerance"]
    summary["passed"] = ok
    return columns, rows, summary, ok


def cmd_dilation_curve(cfg: ExperimentConfig):
    p = cfg.params
    vs = p["v"]
    if not vs:
        raise UsageError("parameter 'v': at least one velocity is required")
    for v in vs:
        if not abs(v) < 1:
            raise ParameterError(f"parameter 'v': superluminal velocity {v!r} (need |v| < 1)")
    if p["points"] < 2:
        raise ParameterError("parameter 'points': need at least 2 grid points")
    eps, A = p["eps"], p["A"]
    crossings = [time_to_threshold(A, eps, v) for v in vs]
    t_max = p["t_max"] if p["t_max"] is not None else 1.25 * max(crossings)
    if not t_max > 0:
        raise ParameterError(f"parameter 't_max': must be positive, got {t_max!r}")
    grid = np.linspace(0.0, t_max, p["points"])
    rows = []
    for v in vs:
        slope = eps / gamma(v)
        rows += [["curve", v, float(t), slope * float(t)] for t in grid]
    for v, tc in zip(vs, crossings):
        rows.append(["crossing", v, tc, A])
    worst = max(abs(tc - gamma(v) * A / eps) for v, tc in zip(vs, crossings))
    first = vs[int(np.argmin(crossings))]
    summary = {"first_crossing_v": first, "max_crossing_error": worst,
               "passed": worst <= p["tolerance"]}
    return ["kind", "v", "t", "value"], rows, summary, summary["passed"]


def cmd_verify_theorem(cfg: ExperimentConfig):
    p = cfg.params
    if not p["v"]:
        raise UsageError("parameter 'v': at least one velocity is required")
    rows = []
    for t in p["t"]:
        for v in p["v"]:
            bp = BoostParams(v, p["m"], p["omega"], p["hbar"], t)
            r = verify_dilation(bp, p["eps"], p["dim"])
            rows.append([v, t, r.dim, r.measured, r.target, r.abs_error])
    worst = max(r[-1] for r in rows)
    ok = worst <= p["tolerance"]
    summary = {"max_abs_error": worst, "tolerance": p["tolerance"], "passed": ok}
    return ["v", "t", "dim", "measured", "target", "abs_error"], rows, summary, ok


def cmd_boost_check(cfg: ExperimentConfig):
    p = cfg.params
    bp = BoostParams(p["v"], p["m"], p["omega"], p["hbar"], p["t"])
    alpha = alpha_of(bp)
    dim = p["dim"] if p["dim"] is not None else min_coherent_dim(alpha)
    psi = boost_state(bp, vacuum(dim))
    f = fidelity(psi, coherent_state(alpha, dim))
    ok = f >= 1 - p["tolerance"]
    rows = [[bp.v, bp.t, dim, alpha.real, alpha.imag, f, 1 - f]]
    summary = {"fidelity": f, "passed": ok}
    return ["v", "t", "dim", "alpha_re", "alpha_im", "fidelity", "infidelity"], rows, summary, ok


def _named_operator(spec, dim, kind):
    a, ad = ladder_operators(dim)
    table = {
        "hamiltonian": {"number": None, "zero": TruncatedOperator(np.zeros((dim, dim)))},
        "jump": {"none": None, "a": a, "adag": ad, "number": number_operator(dim)},
    }[kind]
    if spec in table:
        return table[spec], True
    try:
        m = np.load(spec)
    except ValueError as exc:
        raise ParameterError(f"parameter '{kind}': cannot read matrix from {spec!r}: {exc}")
    op = TruncatedOperator(m)
    if op.dim != dim:
        raise ParameterError(f"parameter '{kind}': matrix has dim {op.dim}, expected {dim}")
    return op, False


def cmd_langevin_check(cfg: ExperimentConfig):
    p = cfg.params
    dim = p["dim"]
    if dim is None:
        raise ParameterError("parameter 'dim': langevin-check needs an explicit dimension")
    bp = BoostParams(0.0, p["m"], p["omega"], p["hbar"], p["t"])
    series = dilation_series(p["eps"], beta_of(bp), dim)
    S = build_S_operator(series, dim)
    H, named_h = _named_operator(p["hamiltonian"], dim, "hamiltonian")
    if H is None:
        H = p["hbar"] * p["omega"] * number_operator(dim)
    c, named_c = _named_operator(p["jump"], dim, "jump")
    if c is not None and named_c:
        c = math.sqrt(p["kappa"]) * c
    try:
        spec = LangevinSpec(H, c, p["hbar"])
    except ParameterError as exc:
        raise ParameterError(f"parameter 'hamiltonian': {exc}")
    drift = adjoint_drift(S, spec)
    full, masked = drift_norm(drift), drift_norm(drift, mask_edge=True)
    default = p["hamiltonian"] == "number" and p["jump"] == "none"
    ok = masked <= p["tolerance"] if default else True
    rows = [[dim, p["hamiltonian"], p["jump"], full, masked]]
    summary = {"default_spec": default, "passed": ok}
    return ["dim", "hamiltonian", "jump", "norm_full", "norm_masked"], rows, summary, ok


HANDLERS = {
    "martingale": cmd_martingale,
    "dilation-curve": cmd_dilation_curve,
    "verify-theorem": cmd_verify_theorem,
    "boost-check": cmd_boost_check,
    "langevin-check": cmd_langevin_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtrlab", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"qtrlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name, info in COMMANDS.items():
        sp = sub.add_parser(name, help=info["help"], description=info["help"])
        sp.add_argument("--config", metavar="PATH", help="flat 'key = value' config file")
        for key, (_, default, helptext) in _table(name).items():
            flag = "--" + key.replace("_", "-")
            if key == "trajectories":
                sp.add_argument(flag, action="store_const", const="true", default=None, help=helptext)
                continue
            sp.add_argument(flag, dest=key, default=None, metavar=key.upper(),
                            help=f"{helptext} [default: {default}]")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARAM
    name = args.command
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = read_config(args.config) if args.config else {}
        cfg = resolve_config(name, file_values, flags)
        columns, rows, summary, ok = HANDLERS[name](cfg)
        text = render_table(name, cfg.params, columns, rows, cfg.format, summary)
        write_text(text, cfg.out)
    except TruncationError as exc:
        print(f"qtrlab {name}: truncation error: {exc}"
              + (f" (suggested dim: {exc.required_dim})" if exc.required_dim else ""),
              file=sys.stderr)
        return EXIT_PARAM
    except (ParameterError, QTRError) as exc:
        print(f"qtrlab {name}: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"qtrlab {name}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not ok:
        print(f"qtrlab {name}: tolerance check failed: {summary}", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def run():
    sys.exit(main())
