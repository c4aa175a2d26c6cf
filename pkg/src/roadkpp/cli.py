"""Command-line entry point: ``roadkpp {speed,limits,steady,sweep,simulate,verify}``.

Parameters come from an optional JSON config (``--config``) overridden by
flags.  Results go to stdout as JSON (or CSV for tables); errors go to stderr
as one-line JSON with exit codes 2 (invalid config), 3 (regime), 4 (numerical).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import dispersion as dsp
from . import simulate as sim
from . import speed as spd
from . import steady as sty
from .model import InvalidParameterError, NumericalError, Params, RegimeError, c_kpp, get_reaction, persistence_margin

EXIT_CONFIG, EXIT_REGIME, EXIT_NUMERICAL = 2, 3, 4
WORKERS_ENV = "ROADKPP_WORKERS"
PARAM_KEYS = ("D", "d", "mu", "nu", "L")
DEFAULTS = {"D": 1.0, "d": 1.0, "mu": 1.0, "nu": 1.0, "L": 2.0, "reaction": "logistic"}


class ConfigError(InvalidParameterError):
    pass


def fmt(x):
    """Round floats to 12 significant digits for output; recurse into containers."""
    if isinstance(x, float):
        return x if not math.isfinite(x) else float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    if isinstance(x, np.floating):
        return fmt(float(x))
    return x


def emit(obj, stream=None):
    print(json.dumps(fmt(obj)), file=stream or sys.stdout)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.12g}" if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_out(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


# ------------------------------------------------------------------ arguments

def _common(sp):
    sp.add_argument("--config", help="JSON file with parameters and options; flags override it")
    for k in PARAM_KEYS:
        sp.add_argument(f"--{k}", type=float, default=None)
    sp.add_argument("--reaction", default=None, help="logistic or remark33")
    sp.add_argument("--output", default=None, help="output file (CSV subcommands)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="roadkpp", description="Spreading speeds for a road-strip KPP system.")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    _common(sub.add_parser("speed", help="spreading speed c* and tangency point"))
    _common(sub.add_parser("limits", help="limit speeds and thresholds"))

    sp = sub.add_parser("steady", help="steady-state amplitudes and profile CSV (y,V)")
    _common(sp)
    sp.add_argument("--root-index", type=int, default=None)
    sp.add_argument("--n", type=int, default=None, help="profile grid intervals")

    sp = sub.add_parser("sweep", help="c* over D or L, or curve samples over beta")
    _common(sp)
    sp.add_argument("--var", choices=("D", "L", "beta"), default=None)
    sp.add_argument("--from", dest="start", type=float, default=None)
    sp.add_argument("--to", dest="stop", type=float, default=None)
    sp.add_argument("--points", type=int, default=None)
    sp.add_argument("--spacing", choices=("lin", "log"), default=None)
    sp.add_argument("--c", type=float, default=None, help="speed for --var beta")

    sp = sub.add_parser("simulate", help="finite-difference run with front tracking")
    _common(sp)
    sp.add_argument("--T", type=float, default=None)
    sp.add_argument("--dx", type=float, default=None)
    sp.add_argument("--ny", type=int, default=None)
    sp.add_argument("--datum", choices=("box", "persistence_bump"), default=None)
    sp.add_argument("--amplitude", type=float, default=None)
    sp.add_argument("--halfwidth", type=float, default=None)
    sp.add_argument("--front-level", dest="front_level", type=float, default=None)
    sp.add_argument("--c-guess", dest="c_guess", type=float, default=None)
    sp.add_argument("--no-road", dest="no_road", action="store_const", const=True, default=None)
    sp.add_argument("--prefix", default=None, help="prefix for the _front/_field/_road CSV files")

    sp = sub.add_parser("verify", help="complex roots below c* and subsolution coefficients")
    _common(sp)
    sp.add_argument("--fractions", default=None, help="comma-separated c/c* values")
    return ap


OPTION_DEFAULTS = {
    "speed": {},
    "limits": {},
    "steady": {"root_index": None, "n": 2000},
    "sweep": {"var": "D", "start": None, "stop": None, "points": 40, "spacing": None, "c": None},
    "simulate": {"T": 80.0, "dx": 0.085, "ny": 40, "datum": "box", "amplitude": 0.5, "halfwidth": 2.0,
                 "front_level": 0.5, "c_guess": None, "no_road": False, "prefix": "sim"},
    "verify": {"fractions": "0.99,0.999,0.9999"},
}
# config-file spellings accepted for options whose flag differs from the attribute
ALIASES = {"from": "start", "to": "stop", "front-level": "front_level", "c-guess": "c_guess",
           "no-road": "no_road", "root-index": "root_index"}


def resolve(args) -> dict:
    """Merge defaults, JSON config and flags (flags win); reject unknown config keys."""
    opts = dict(DEFAULTS)
    opts.update(OPTION_DEFAULTS[args.subcommand])
    opts["output"] = None
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config!r}: {e}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        flat = dict(cfg.pop("params", {}) or {})
        flat.update(cfg)
        for k, v in flat.items():
            key = ALIASES.get(k, k)
            if key not in opts:
                raise ConfigError(f"unknown config key {k!r} for subcommand {args.subcommand!r}")
            opts[key] = v
    for k, v in vars(args).items():
        if k in ("config", "subcommand") or v is None:
            continue
        opts[k] = v
    return opts


def params_of(opts) -> Params:
    try:
        return Params(*(float(opts[k]) for k in PARAM_KEYS))
    except (TypeError, ValueError) as e:
        raise InvalidParameterError(str(e)) from None


# ------------------------------------------------------------------ subcommands

def cmd_speed(o):
    p, r = params_of(o), get_reaction(o["reaction"])
    res = spd.compute_c_star(p, r)
    out = res.as_dict()
    out["c_int"] = res.c_int
    out["params"] = p.as_dict()
    out["reaction"] = r.name
    emit(out)


def cmd_limits(o):
    p, r = params_of(o), get_reaction(o["reaction"])
    emit({
        "ell0": spd.compute_ell0(p, r),
        "ell_infinity": spd.compute_ell_infinity(p, r),
        "c_star_halfplane": spd.compute_c_star_halfplane(p, r),
        "c_kpp": c_kpp(r, p.d),
        "c_kpp_dr": spd.c_kpp_dr(p, r),
        "D_kpp": spd.compute_d_kpp(p, r),
        "c_int": dsp.c_int(p, r) if p.D > p.d else None,
    })


def cmd_steady(o):
    p, r = params_of(o), get_reaction(o["reaction"])
    roots = sty.solve_steady_states(p, r)
    emit({"roots": roots, "count": len(roots)})
    if not roots:
        return
    k = o["root_index"]
    k = len(roots) - 1 if k is None else int(k)
    if not 0 <= k < len(roots):
        raise ConfigError(f"root_index {k} out of range for {len(roots)} roots")
    prof = sty.reconstruct_profile(roots[k], p, r, n=int(o["n"]))
    if o["output"]:
        write_out(o["output"], csv_text(["y", "V"], zip(prof.y, prof.V)))


def _sweep_point(task):
    var, val, base, rname = task
    p = Params(**{**base, var: val})
    try:
        res = spd.compute_c_star(p, get_reaction(rname), label=False)
        return [val, res.c_star, res.beta_star, res.alpha_star, res.family]
    except RegimeError:
        return [val, math.nan, math.nan, math.nan, "extinction"]


def _grid(o, default_spacing):
    a, b, n = o["start"], o["stop"], int(o["points"])
    if a is None or b is None or n < 1:
        raise ConfigError("sweep needs --from, --to and --points >= 1")
    a, b = float(a), float(b)
    spacing = o["spacing"] or default_spacing
    if spacing == "log":
        if a <= 0 or b <= 0:
            raise ConfigError("log spacing needs positive bounds")
        return np.geomspace(a, b, n)
    return np.linspace(a, b, n)


def workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer") from None


def cmd_sweep(o):
    p, r = params_of(o), get_reaction(o["reaction"])
    var = o["var"]
    if var == "beta":
        text = csv_text(["family", "branch", "c", "beta", "alpha"], curve_rows(p, r, o))
        write_out(o["output"], text)
        return
    grid = _grid(o, "log" if var == "D" else "lin")
    tasks = [(var, float(v), p.as_dict(), r.name) for v in grid]
    nw = workers()
    if nw > 1:
        with ProcessPoolExecutor(nw) as ex:
            rows = list(ex.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    write_out(o["output"], csv_text([var, "c_star", "beta_star", "alpha_star", "family"], rows))


def curve_rows(p, r, o):
    """Samples of the trig and hyperbolic road/field curves at one speed."""
    c = o["c"]
    if c is None:
        raise ConfigError("sweep --var beta needs --c")
    c = float(c)
    betas = _grid(o, "lin")
    rows = []
    for side, fam in (("road", "trig"), ("road", "hyperbolic"), ("field", "trig"), ("field", "hyperbolic")):
        for br in dsp.BRANCHES:
            for b in betas:
                q = dsp.CurveQuery(fam, br, c, float(b))
                try:
                    a = dsp.alpha_road(q, p) if side == "road" else dsp.alpha_field(q, p, r)
                except dsp.DomainError:
                    continue
                rows.append([f"{side}-{fam}", br, c, float(b), float(a)])
    return rows


def cmd_simulate(o):
    p, r = params_of(o), get_reaction(o["reaction"])
    road = not o["no_road"]
    cg = o["c_guess"]
    if cg is None:
        if road:
            cg = spd.compute_c_star(p, r, label=False).c_star if persistence_margin(p, r) > 0 else 0.0
        else:
            cg = spd.c_kpp_dr(p, r) or 0.0
    datum = sim.make_initial_datum(o["datum"], p, r, float(o["amplitude"]),
                                   float(o["halfwidth"]) if o["datum"] == "box" else None)
    cfg = sim.SimConfig.auto(p, r, float(o["T"]), float(cg), float(o["dx"]), int(o["ny"]), datum=datum,
                             front_level=float(o["front_level"]), road=road)
    res = sim.run(cfg) if road else sim.run_no_road(cfg)
    pre = o["prefix"]
    write_out(f"{pre}_front.csv", csv_text(["t", "x_right", "x_left", "sup_v"], res.front_trace))
    X, Y = np.meshgrid(res.x, res.y, indexing="ij")
    write_out(f"{pre}_field.csv", csv_text(["x", "y", "v"], zip(X.ravel(), Y.ravel(), res.v.ravel())))
    if road:
        write_out(f"{pre}_road.csv", csv_text(["x", "u"], zip(res.x, res.u)))
    emit({"fitted_speed": res.fitted_speed, "outcome": res.outcome, "center_error": res.center_error,
          "level": res.level, "nx": cfg.nx, "ny": cfg.ny, "dt": cfg.dt, "note": res.note})


def cmd_verify(o):
    p, r = params_of(o), get_reaction(o["reaction"])
    try:
        fr = [float(s) for s in str(o["fractions"]).split(",")]
    except ValueError:
        raise ConfigError("fractions must be comma-separated numbers") from None
    res = spd.compute_c_star(p, r, label=False)
    rows = []
    for f in fr:
        root = spd.find_complex_root(p, r, f * res.c_star, res)
        sub = spd.subsolution_coefficients(p, root)
        rows.append([f, root.c, root.beta_re, root.beta_im, root.alpha_re, root.alpha_im, root.residual,
                     sub.gamma1, sub.gamma2])
    header = ["fraction", "c", "beta_re", "beta_im", "alpha_re", "alpha_im", "residual", "gamma1", "gamma2"]
    write_out(o["output"], csv_text(header, rows))


COMMANDS = {"speed": cmd_speed, "limits": cmd_limits, "steady": cmd_steady, "sweep": cmd_sweep,
            "simulate": cmd_simulate, "verify": cmd_verify}


def _fail(kind, code, exc):
    emit({"error": kind, "type": type(exc).__name__, "message": str(exc)}, sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve(args)
        COMMANDS[args.subcommand](opts)
    except RegimeError as e:
        return _fail("regime", EXIT_REGIME, e)
    except (InvalidParameterError, dsp.DomainError) as e:
        return _fail("invalid-config", EXIT_CONFIG, e)
    except (NumericalError, ArithmeticError) as e:
        return _fail("numerical", EXIT_NUMERICAL, e)
    return 0


if __name__ == "__main__":
    sys.exit(main())
