"""Command-line front end.

Every subcommand resolves its parameters as defaults <- preset <- config
file <- explicit flags, runs one module operation and writes a JSON report
or a CSV table.  Both carry the resolved configuration and the sieve
constants.  Exit codes: 0 success, 1 domain/validation error, 2 capacity or
budget error, 64 malformed command line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from . import __version__
from .errors import (
    BudgetExceededError,
    CapacityError,
    ConfigError,
    DiophSieveError,
)
from .limits import DEFAULT_CONSTANTS, F1, F2, F2_MODES, f1
from .objective import (
    DEFAULT_J_LOWER,
    J_LOWER_CONVENTIONS,
    H_direct,
    J_monte_carlo,
    J_rho,
    decomposition_diagnostic,
    j_lower_limit,
)
from .params import derive_params

log = logging.getLogger("diophsieve")

EXIT_OK, EXIT_DOMAIN, EXIT_CAPACITY, EXIT_USAGE = 0, 1, 2, 64
SIG = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- parameter tables ------------------------------------------------------

def _flag(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _real(v) -> float:
    if isinstance(v, bool):
        raise ValueError("booleans are not reals")
    if isinstance(v, (int, float)):
        return float(v)
    return float(Fraction(str(v).strip()))


def _int(v) -> int:
    if isinstance(v, bool):
        raise ValueError("booleans are not integers")
    if isinstance(v, int):
        return v
    x = float(Fraction(str(v).strip()))
    if x != int(x):
        raise ValueError(f"not an integer: {v!r}")
    return int(x)


def _text(v) -> str:
    if isinstance(v, (dict, list)):
        raise ValueError("expected a scalar")
    return str(v)


def _choice(options):
    def conv(v):
        s = str(v)
        if s not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {s!r}")
        return s
    return conv


def _grid(v) -> list:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return [float(v)]
    return [_real(t) for t in str(v).split(",") if t.strip()]


# name -> (converter, default, help)
COMMON = {
    "format": (_choice(("json", "csv")), None, "output format (each subcommand has its own default)"),
    "threads": (_int, None, "worker threads (default: available CPUs)"),
    "seed": (_int, 0, "random seed (Monte-Carlo oracles only)"),
}

PARAMS: dict = {
    "limits": {
        "s_min": (_real, 0.5, "first s"),
        "s_max": (_real, 7.0, "last s"),
        "points": (_int, 66, "number of s values"),
        "f2_mode": (_choice(F2_MODES), "clamp", "F2 continuation past beta2 + 2"),
    },
    "jrho": {
        "rho": (_real, 1.0 / 118.0, "rho"),
        "j_lower": (_choice(("printed", "sieve-level", "custom")), "printed", "outer lower limit convention"),
        "vartheta": (_real, 4.07, "vartheta, for the sieve-level limit 1/a"),
        "lower": (_real, None, "explicit lower limit (j_lower=custom)"),
        "mc_samples": (_int, 0, "Monte-Carlo samples for the oracle (0 = skip)"),
    },
    "objective": {
        "rho": (_real, 1.0 / 118.0, "rho"),
        "vartheta": (_real, 4.07, "vartheta"),
        "b": (_real, 1.0, "b"),
        "c": (_real, 3.98, "c"),
        "delta": (_real, None, "delta (default: the delta0 crossover, clipped to the window)"),
        "f2_mode": (_choice(F2_MODES), "clamp", "F2 continuation"),
        "j_lower": (_choice(J_LOWER_CONVENTIONS), DEFAULT_J_LOWER, "J lower-limit convention"),
    },
    "optimize": {
        "rho": (_real, 1.0 / 118.0, "rho"),
        "vartheta": (_real, 4.07, "vartheta"),
        "b": (_real, 1.0, "b"),
        "c": (_real, 3.98, "c"),
        "f2_mode": (_choice(F2_MODES), "clamp", "F2 continuation"),
        "j_lower": (_choice(J_LOWER_CONVENTIONS), DEFAULT_J_LOWER, "J lower-limit convention"),
        "harman": (_flag, False, "freeze delta at b/vartheta"),
        "search": (_flag, False, "also bisect the feasibility boundary in rho"),
        "vartheta_grid": (_grid, None, "comma-separated vartheta grid for --search"),
        "b_grid": (_grid, None, "comma-separated b grid for --search"),
        "c_grid": (_grid, None, "comma-separated c grid for --search"),
    },
    "ps": {
        "c": (_real, 1.0 + 2e-10, "Piatetski-Shapiro exponent c"),
        "r": (_int, 13, "almost-prime order r"),
        "rho": (_real, None, "rho (default: rho(c))"),
    },
    "hunt": {
        "lambda0": (_text, "0", "lambda0 (decimal, p/q or [k*]sqrt(n))"),
        "lambda1": (_text, "sqrt(2)", "lambda1"),
        "lambda2": (_text, "-1", "lambda2"),
        "tau": (_real, 1.0 / 118.0, "exponent tau of the bound p^-tau"),
        "abs_bound": (_real, None, "absolute bound; overrides tau"),
        "X": (_int, 10**6, "largest prime p"),
        "r": (_int, 3, "almost-prime order r"),
        "ps_c": (_real, None, "restrict p to floor(n^c) primes"),
        "convention": (_choice(("multiplicity", "distinct")), "multiplicity", "prime-factor count"),
    },
    "density": {
        "lambda0": (_text, "0", "lambda0"),
        "lambda1": (_text, "sqrt(2)", "lambda1"),
        "X": (_int, 10**6, "X"),
        "rho": (_real, 1.0 / 118.0, "rho (xi = X^-rho)"),
        "d_max": (_int, 20, "largest d"),
        "rounding": (_choice(("floor", "nearest")), "floor", "member rounding"),
        "p_fixed": (_int, None, "prime p for the two-dimensional table (omit to skip)"),
        "d_list": (_grid, None, "d values for the two-dimensional table"),
    },
    "verify": {
        "x": (_int, 10**6, "Mertens checkpoint"),
        "v_grid": (_grid, None, "dimension-check grid (default: doubling 1e3..1e6)"),
        "ps_n": (_int, 10**4, "n range of the PS equivalence check"),
        "ps_c": (_real, 1.1, "c for the PS checks"),
        "pi_x": (_int, 10**6, "x for the pi_c ratio"),
    },
    "windows": {
        "delta0": (_real, 0.1, "half-width of the Selberg interval"),
        "N": (_int, 100, "Selberg degree"),
        "alpha": (_real, 0.2, "smooth window left end"),
        "beta": (_real, 0.7, "smooth window right end"),
        "Delta": (_real, 0.05, "smoothing width"),
        "order": (_int, 2, "smoothing order r"),
        "grid_points": (_int, 10_000, "evaluation grid size"),
        "coeffs": (_int, 200, "smooth-window coefficients to tabulate"),
    },
}

DEFAULT_FORMAT = {
    "limits": "csv", "jrho": "json", "objective": "json", "optimize": "json", "ps": "json",
    "hunt": "csv", "density": "csv", "verify": "json", "windows": "csv",
}

PRESETS = {
    "paper-118": {"rho": 1.0 / 118.0, "vartheta": 4.07, "b": 1.0, "c": 3.98, "f2_mode": "clamp"},
    "harman-147": {"rho": 1.0 / 147.0, "vartheta": 4.07, "b": 1.0, "c": 3.98, "f2_mode": "clamp",
                   "harman": True},
    "ps-180": {"c": 1.0 + 2e-10, "r": 13},
}


# -- output ----------------------------------------------------------------

def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG}g}")
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    return _num(obj)


def _cell(x) -> str:
    v = _num(x)
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{SIG}g}"
    return str(v)


def render(fmt: str, header: dict, result: Any, table: Optional[tuple] = None) -> str:
    if fmt == "json":
        doc = dict(header)
        doc["result"] = result
        if table is not None:
            cols, rows = table
            doc["table"] = [dict(zip(cols, r)) for r in rows]
        return json.dumps(_clean(doc), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    for key, val in header.items():
        buf.write(f"# {key}: {json.dumps(_clean(val), sort_keys=True)}\n")
    if result is not None:
        buf.write(f"# result: {json.dumps(_clean(result), sort_keys=True)}\n")
    if table is not None:
        cols, rows = table
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(v) for v in r])
    return buf.getvalue()


# -- subcommand bodies (each returns (result, table-or-None)) -------------

def _limits(cfg, ctx):
    ss = np.linspace(cfg["s_min"], cfg["s_max"], cfg["points"])
    rows = []
    for s in ss:
        s = float(s)
        row = [s]
        for fn in (lambda v: f1(v), lambda v: F1(v), lambda v: F2(v, cfg["f2_mode"])):
            try:
                row.append(fn(s))
            except DiophSieveError:
                row.append(float("nan"))
        rows.append(row)
    return None, (["s", "f1", "F1", "F2"], rows)


def _jrho(cfg, ctx):
    conv = cfg["j_lower"]
    rho = cfg["rho"]
    if conv == "printed":
        lower = None
    elif conv == "sieve-level":
        lower = j_lower_limit(derive_params(rho, cfg["vartheta"], 1.0, 1.0), "sieve-level")
    else:
        if cfg["lower"] is None:
            raise ConfigError("j_lower=custom needs --lower")
        lower = cfg["lower"]
    q = J_rho(rho, lower)
    out = {"rho": rho, "lower_limit": rho / 4.0 if lower is None else lower, "J": q.to_dict()}
    if cfg["mc_samples"] > 0:
        mc = J_monte_carlo(rho, lower, cfg["mc_samples"], ctx["seed"])
        out["monte_carlo"] = mc._asdict()
        out["mc_z_score"] = (q.value - mc.value) / mc.std_error if mc.std_error > 0 else None
    return out, None


def _objective(cfg, ctx):
    p = derive_params(cfg["rho"], cfg["vartheta"], cfg["b"], cfg["c"])
    lo, hi = p.b / p.vartheta, p.c / p.vartheta
    delta = cfg["delta"]
    if delta is None:
        delta = min(max(p.delta0_rescaled, lo), hi)
    bd = H_direct(p, delta, cfg["f2_mode"], cfg["j_lower"])
    out = {"params": p.to_dict(), "breakdown": bd.to_dict(),
           "decomposition": decomposition_diagnostic(p, delta, cfg["f2_mode"], cfg["j_lower"])}
    return out, None


def _optimize(cfg, ctx):
    from .feasibility import admissible, search_boundary_rho

    rep = admissible(cfg["rho"], cfg["vartheta"], cfg["b"], cfg["c"], cfg["f2_mode"],
                     cfg["j_lower"], cfg["harman"])
    out = {"report": rep.to_dict()}
    if cfg["search"]:
        grids = [cfg[k] if cfg[k] else [cfg[k.split("_")[0]]]
                 for k in ("vartheta_grid", "b_grid", "c_grid")]
        res = search_boundary_rho(*grids, f2_mode=cfg["f2_mode"], harman=cfg["harman"],
                                  j_lower=cfg["j_lower"], threads=ctx["threads"])
        out["boundary"] = res.to_dict()
        out["boundary"]["rho_star_inverse"] = 1.0 / res.rho_star
    return out, None


def _ps(cfg, ctx):
    from .feasibility import PsParams, laborde_bound, ps_rho, ps_root

    c = cfg["c"]
    ps = PsParams.build(c, cfg["r"], cfg["rho"])
    passed, margin = laborde_bound(ps)
    rho_c = ps_rho(c)
    return {
        "ps_params": ps.to_dict(),
        "rho_c": rho_c,
        "rho_c_inverse": 1.0 / rho_c if rho_c > 0 else None,
        "laborde_margin": margin,
        "laborde_passed": passed,
        "rho_root": ps_root(),
    }, None


def _hunt(cfg, ctx):
    from .hunter import HuntConfig, hunt, hunt_summary

    tau = None if cfg["abs_bound"] is not None else cfg["tau"]
    hc = HuntConfig(
        lambda0=cfg["lambda0"], lambda1=cfg["lambda1"], lambda2=cfg["lambda2"],
        tau=tau, abs_bound=cfg["abs_bound"], X=cfg["X"], r=cfg["r"],
        ps_mode=cfg["ps_c"] is not None, c_exp=cfg["ps_c"], convention=cfg["convention"],
    )
    recs = hunt(hc, threads=ctx["threads"])
    rows = [[r.p, r.m, r.value, r.bound, r.big_omega_m] for r in recs]
    return hunt_summary(recs, hc), (["p", "m", "value", "bound", "big_omega"], rows)


def _density(cfg, ctx):
    from .hunter import build_sifted_set, measure_density, measure_g2, median_abs_error

    s = build_sifted_set(cfg["lambda1"], cfg["X"], cfg["rho"], cfg["lambda0"],
                         rounding=cfg["rounding"])
    rows = measure_density(s, cfg["d_max"])
    table = [["A", r.d, r.observed, r.predicted, r.rel_error] for r in rows]
    out = {"sifted_set": s.summary(), "median_abs_rel_error": median_abs_error(rows)}
    if cfg["p_fixed"] is not None:
        ds = [int(d) for d in (cfg["d_list"] or [1, 2, 3, 5, 6])]
        g_rows = measure_g2(cfg["lambda1"], cfg["X"], cfg["rho"], cfg["p_fixed"], ds, cfg["lambda0"])
        table += [["A2", r.d, r.observed, r.predicted, r.rel_error] for r in g_rows]
    return out, (["set", "d", "observed", "predicted", "rel_error"], table)


def _verify(cfg, ctx):
    from .arith import (
        dimension_check, gamma_of, mertens_checks, pi_c_ratio, prime_table,
        ps_indicator_array, ps_set_bruteforce,
    )
    from .arith.psprimes import as_exact

    ratio, resid = mertens_checks(cfg["x"])
    grid = [int(v) for v in cfg["v_grid"]] if cfg["v_grid"] else [1000 * 2**k for k in range(10)]
    dims = dimension_check(grid)
    c = as_exact(cfg["ps_c"])
    brute = ps_set_bruteforce(cfg["ps_n"], c)
    primes = prime_table(int(brute[-1]))
    ind = ps_indicator_array(primes, gamma_of(c))
    brute_set = set(brute.tolist())
    mism = sum(1 for p, f in zip(primes.tolist(), ind.tolist()) if (p in brute_set) != f)
    out = {
        "mertens": {"x": cfg["x"], "product_ratio": ratio, "sum_residual": resid},
        "dimension": {"v": grid, "residual": dims,
                      "drift": (dims[-1] - dims[0]) if dims else None},
        "ps_equivalence": {"n_max": cfg["ps_n"], "c": cfg["ps_c"], "primes_checked": len(primes),
                           "mismatches": mism},
        "pi_c": {"x": cfg["pi_x"], "c": cfg["ps_c"], "ratio": pi_c_ratio(cfg["pi_x"], c)},
    }
    table = [[v, r] for v, r in zip(grid, dims)]
    return out, (["v", "dimension_residual"], table)


def _windows(cfg, ctx):
    from .windows import check_sandwich, interval_indicator, selberg_pair, smooth_window

    d0 = cfg["delta0"]
    A, B = selberg_pair(d0, cfg["N"])
    chk = check_sandwich(A, B, d0, cfg["grid_points"])
    w = smooth_window(cfg["alpha"], cfg["beta"], cfg["Delta"], cfg["order"])
    h = np.arange(1, cfg["coeffs"] + 1)
    ch = w.coefficients(h)
    bound = np.minimum(1.0 / (np.pi * h), cfg["beta"] - cfg["alpha"])
    out = {
        "selberg": {"K": A.meta["K"], "constant_minorant": A.constant_term,
                    "constant_majorant": B.constant_term, "sandwich": chk._asdict(),
                    "sandwich_holds": chk.holds},
        "smooth": {"mean": w.mean, "H": w.H, "tail": w.tail, "tail_constant": w.tail_constant,
                   "coefficient_bound_holds": bool(np.all(np.abs(ch) <= bound))},
    }
    t = (np.arange(cfg["grid_points"]) + 0.5) / cfg["grid_points"]
    a, b, chi, g = A.evaluate(t), B.evaluate(t), interval_indicator(t, d0), w.value(t)
    rows = [["grid", float(x), float(v1), float(v2), float(v3), float(v4)]
            for x, v1, v2, v3, v4 in zip(t, a, chi, b, g)]
    rows += [["selberg", n, float(ca.real), float(cb.real), "", ""]
             for n, ca, cb in zip(A.freqs, A.coeffs, B.coeffs)]
    rows += [["smooth", int(k), float(c.real), float(c.imag), float(bd), ""]
             for k, c, bd in zip(h, ch, bound)]
    return out, (["section", "x_or_n", "col1", "col2", "col3", "col4"], rows)


COMMANDS: dict = {
    "limits": (_limits, "tabulate f1, F1, F2"),
    "jrho": (_jrho, "the switching integral J(rho), with an optional Monte-Carlo oracle"),
    "objective": (_objective, "H at one delta with its term breakdown"),
    "optimize": (_optimize, "constraint report, delta-maximisation and rho boundary search"),
    "ps": (_ps, "Piatetski-Shapiro exponent arithmetic"),
    "hunt": (_hunt, "enumerate solutions with p <= X"),
    "density": (_density, "sifted-set densities"),
    "verify": (_verify, "Mertens, dimension, PS and pi_c checks"),
    "windows": (_windows, "Selberg pair and smooth window tables"),
}


# -- config resolution -----------------------------------------------------

def load_config(path: str) -> dict:
    """Read a JSON object of scalars; syntax errors report line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: {exc.msg} at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: top level must be a JSON object")
    bad = [k for k, v in data.items() if isinstance(v, (dict, list))]
    if bad:
        raise ConfigError(f"config {path}: values must be scalars ({', '.join(sorted(bad))})")
    return data


def resolve(command: str, preset: Optional[str], file_cfg: dict, flags: dict) -> tuple:
    """Merge layers and type-check; returns (config, provenance)."""
    table = {**PARAMS[command], **COMMON}
    unknown = sorted(k for k in file_cfg if k not in table and k != "preset")
    if unknown:
        raise ConfigError(f"unknown config key(s) for '{command}': {', '.join(unknown)}")
    preset = preset if preset is not None else file_cfg.get("preset")
    layers = []
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        pv = {k: v for k, v in PRESETS[preset].items() if k in table}
        if not pv:
            raise ConfigError(f"preset {preset!r} does not apply to '{command}'")
        layers.append(("preset:" + preset, pv))
    layers.append(("config", {k: v for k, v in file_cfg.items() if k != "preset"}))
    layers.append(("flag", {k: v for k, v in flags.items() if v is not None}))
    cfg = {k: spec[1] for k, spec in table.items()}
    prov = {k: "default" for k in table}
    for source, values in layers:
        for k, v in values.items():
            conv = table[k][0]
            try:
                cfg[k] = conv(v)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad value for {k} from {source}: {exc}") from exc
            if prov[k] != "default" and source == "flag":
                log.info("flag --%s overrides %s", k.replace("_", "-"), prov[k])
            prov[k] = source
    if cfg["format"] is None:
        cfg["format"] = DEFAULT_FORMAT[command]
    if cfg["threads"] is None:
        cfg["threads"] = os.cpu_count() or 1
    return cfg, prov, preset


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diophsieve", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", metavar="PATH", help="JSON object of parameter values")
        sp.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
        sp.add_argument("--preset", choices=sorted(PRESETS), default=None)
        sp.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
        for key, (conv, _default, help_text2) in {**PARAMS[name], **COMMON}.items():
            flag = "--" + key.replace("_", "-")
            if conv is _flag:
                sp.add_argument(flag, dest=key, action="store_const", const=True, default=None,
                                help=help_text2)
            else:
                sp.add_argument(flag, dest=key, default=None, help=help_text2)
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if ns.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    command = ns.command
    table = {**PARAMS[command], **COMMON}
    flags = {k: getattr(ns, k) for k in table}
    try:
        file_cfg = load_config(ns.config) if ns.config else {}
        cfg, prov, preset = resolve(command, ns.preset, file_cfg, flags)
        body = COMMANDS[command][0]
        ctx = {"threads": cfg["threads"], "seed": cfg["seed"]}
        result, out_table = body(cfg, ctx)
    except (CapacityError, BudgetExceededError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DiophSieveError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    # threads only affects scheduling, never the numbers; keep it out of the header
    shown = {k: v for k, v in cfg.items() if k != "threads"}
    header = {
        "command": command,
        "version": __version__,
        "preset": preset,
        "config": shown,
        "provenance": {k: v for k, v in prov.items() if k != "threads"},
        "constants": DEFAULT_CONSTANTS.to_dict(),
    }
    text = render(cfg["format"], header, result, out_table)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if command == "hunt" and cfg["format"] == "csv":
            with open(ns.out + ".summary.json", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(render("json", header, result))
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
