"""Command-line front end.

Every command prints its result as JSON on stdout, writes a full report to
``<output>/<command>.json`` (atomically) and exits with 0 when all checks
pass, 1 on a failed check, 2 on bad configuration and 3 when a numerical
procedure did not converge.

Options may also come from a ``key = value`` file given with ``--config``;
flags on the command line win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import acceptance
from . import chg_symbolic as cs
from . import laurent_ops as lo
from . import local_model as lm
from . import periods_numeric as pn
from . import quadrature
from . import stokes_topology as st
from .report import (EXIT_CONFIG, EXIT_NUMERIC, CheckRecord, ConfigError, NumericalNonConvergence, RunConfig,
                     RunReport, atomic_write, jsonable, read_config_file, timed, write_report)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _points(text: str) -> List[Tuple[complex, complex]]:
    """``"x,y;x,y"`` with complex literals allowed, e.g. ``-1+0.5j,-2``."""
    out = []
    for chunk in str(text).split(";"):
        if chunk.strip():
            x, y = chunk.split(",")
            out.append((complex(x.strip()), complex(y.strip())))
    return out


def _ints(text: str) -> List[int]:
    return [int(v) for v in str(text).split(",") if v.strip()]


# name, type, default, help
Opt = Tuple[str, Callable[[str], Any], Any, str]
_PARAMS: List[Opt] = [
    ("a", Fraction, Fraction(-1, 2), "exponent of u1 (use --a=-1/2 for negative values)"),
    ("b", Fraction, Fraction(-1, 2), "exponent of u2"),
    ("alpha", Fraction, Fraction(1), "coefficient of the exponential; c = -3 - a - b"),
    ("strict_generic", _bool, False, "reject integral exponents"),
]

OPTIONS: Dict[str, List[Opt]] = {
    "dims": [
        ("m1", int, None, "pole order along x1"),
        ("m2", int, None, "pole order along x2"),
        ("stratum", str, "crossing", "crossing, component or smooth"),
        ("u0", complex, 1 + 0j, "u(0)"),
    ],
    "stokes": [
        ("m1", int, None, "pole order along x1"),
        ("m2", int, None, "pole order along x2"),
        ("u0", complex, 1 + 0j, "u(0)"),
        ("samples", int, 512, "grid cells per torus axis"),
    ],
    "homology": [
        ("model", str, "radial", "radial, wedge-bundle, wedge, sphere or torus"),
        ("m1", int, 1, "first order (radial)"),
        ("m2", int, 1, "second order (radial)"),
        ("m", int, 1, "number of circles (wedge, wedge-bundle)"),
        ("n", int, None, "sectors per torus axis (radial; default 4(m1+m2))"),
        ("dump_complex", _bool, False, "include boundary matrices in the report"),
    ],
    "truncdim": [
        ("op", str, "D", "operator: " + ", ".join(sorted(lo.OPERATORS))),
        ("m1", int, 1, "first order"),
        ("m2", int, 1, "second order"),
        ("m", int, None, "order for one-variable operators (default m1)"),
        ("T0", int, None, "base window (default: smallest allowed)"),
        ("steps", int, 4, "maximum window enlargements"),
        ("cokernel", _bool, False, "also report the stabilized cokernel"),
        ("dump_matrix", str, None, "write the T0 truncation as 'row col value' lines to this file"),
    ],
    "chg-verify": _PARAMS + [
        ("x", Fraction, Fraction(-1), "x coordinate"),
        ("y", Fraction, Fraction(-2), "y coordinate"),
        ("instantiations", int, 5, "total parameter instantiations (given one plus seeded random)"),
    ],
    "chg-periods": _PARAMS + [
        ("points", _points, [(-1 + 0j, -2 + 0j), (-2 + 0j, -1 + 0j), (-1.5 + 0j, -0.7 + 0j)], "x,y;x,y;..."),
        ("tol", float, 1e-10, "relative tolerance"),
        ("abs_tol", float, 1e-14, "absolute tolerance"),
        ("precision", int, 25, "working digits"),
        ("max_level", int, 8, "maximum mesh level"),
        ("oracle", _bool, True, "cross-check with nested QUADPACK"),
        ("agree_tol", float, 1e-8, "required engine agreement"),
    ],
    "gm-check": _PARAMS + [
        ("x", complex, -1 + 0j, "x coordinate"),
        ("y", complex, -2 + 0j, "y coordinate"),
        ("step", float, 1e-3, "finite-difference step"),
        ("tol", float, 1e-10, "quadrature relative tolerance"),
        ("precision", int, 25, "working digits"),
        ("gm_tol", float, 1e-4, "allowed relative residual"),
    ],
    "full-suite": [
        ("criteria", _ints, list(range(1, 9)), "comma-separated criterion numbers"),
    ],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdperiods", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, opts in OPTIONS.items():
        p = sub.add_parser(cmd)
        p.add_argument("--config", default=argparse.SUPPRESS, help="key = value file")
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--output", default=argparse.SUPPRESS, help="report directory")
        for name, typ, default, help_ in opts:
            flag = "--" + name.replace("_", "-")
            p.add_argument(flag, dest=name, type=typ, default=argparse.SUPPRESS, help=f"{help_} (default {default})")
    return parser


def resolve_config(argv: Sequence[str]) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    cmd = ns.pop("command")
    opts = {name: (typ, default) for name, typ, default, _ in OPTIONS[cmd]}
    values: Dict[str, Any] = {name: default for name, (_, default) in opts.items()}
    seed, output = 0, None
    if "config" in ns:
        for key, text in read_config_file(ns.pop("config")).items():
            if key == "seed":
                seed = int(text)
            elif key == "output":
                output = text
            elif key == "command":
                continue
            elif key in opts:
                try:
                    values[key] = opts[key][0](text)
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"config key {key}: {exc}") from exc
            else:
                raise ConfigError(f"unknown config key {key!r} for {cmd}")
    seed = ns.pop("seed", seed)
    output = ns.pop("output", output)
    values.update(ns)
    return RunConfig(cmd, values, seed, output)


# --------------------------------------------------------------------------
# commands


def _params(o) -> cs.CHGParams:
    return cs.CHGParams.from_abalpha(o["a"], o["b"], o["alpha"], allow_integral=not o["strict_generic"])


def cmd_dims(cfg: RunConfig, report: RunReport) -> dict:
    o = cfg.options
    if o["m1"] is None or o["m2"] is None:
        raise ConfigError("dims needs --m1 and --m2")
    model = lm.make_model(o["m1"], o["m2"], o["u0"])
    stratum = lm.StratumKind.parse(o["stratum"])
    rd = lm.table_json(lm.rd_dimensions(model, stratum))
    dr = lm.table_json(lm.dr_dimensions(model, stratum))
    dual = lm.duality_check(model, stratum)
    d = math.gcd(model.m1, model.m2) if stratum is lm.StratumKind.CROSSING else model.m1
    exp_rd = {"2": d, "3": d} if stratum is lm.StratumKind.CROSSING else (
        {"1": d, "2": d} if stratum is lm.StratumKind.COMPONENT else {"1": d})
    inputs = {"m1": model.m1, "m2": model.m2, "stratum": stratum.value}
    report.add(CheckRecord("rd dimensions", inputs, exp_rd, "formula", rd, rd == exp_rd))
    report.add(CheckRecord("duality", inputs, True, "formula", dual, dual))
    return {"dims_rd": rd, "dims_dr": dr, "duality": dual}


def cmd_stokes(cfg: RunConfig, report: RunReport) -> dict:
    o = cfg.options
    if o["m1"] is None or o["m2"] is None:
        raise ConfigError("stokes needs --m1 and --m2")
    model = lm.make_model(o["m1"], o["m2"], o["u0"])
    n = lm.stokes_component_count(model, o["samples"])
    d = lm.gcd0(model.m1, model.m2)
    report.add(CheckRecord("Stokes components", {"m1": model.m1, "m2": model.m2, "samples": o["samples"]},
                           d, "formula: gcd", n, n == d))
    return {"components": n, "gcd": d, "samples": o["samples"]}


def cmd_homology(cfg: RunConfig, report: RunReport) -> dict:
    o = cfg.options
    kind = o["model"].replace("_", "-").lower()
    if kind == "radial":
        n = o["n"] if o["n"] is not None else 4 * (o["m1"] + o["m2"])
        spec = st.RadialSheetQuotient(o["m1"], o["m2"], n)
        d = math.gcd(o["m1"], o["m2"])
        expected = {"2": d, "3": d}
    elif kind == "wedge-bundle":
        spec = st.WedgeBundleOverCircle(o["m"])
        expected = {"1": o["m"], "2": o["m"]}
    elif kind == "wedge":
        spec = st.WedgeOfCircles(o["m"])
        expected = {"0": 1, "1": o["m"]}
    elif kind == "sphere":
        spec = st.Sphere2()
        expected = {"0": 1, "2": 1}
    elif kind == "torus":
        spec = st.Torus2()
        expected = {"0": 1, "1": 2, "2": 1}
    else:
        raise ConfigError(f"unknown cell model {o['model']!r}")
    complex_ = st.build_complex(spec)
    h = {str(k): v for k, v in st.homology_dims(complex_).items()}
    report.add(CheckRecord("homology", {"model": repr(spec)}, expected, "formula", h, h == expected))
    out = {"model": repr(spec), "reduced": complex_.reduced, "cells": complex_.dims, "homology": h,
           "euler": complex_.euler_from_cells()}
    if o["dump_complex"]:
        out["complex"] = complex_.to_json()
    return out


_EXPECTED_KERNEL = {
    "D": lambda m1, m2, m: math.gcd(m1, m2),
    "D_crossing": lambda m1, m2, m: math.gcd(m1, m2),
    "E_on_P": lambda m1, m2, m: math.gcd(m1, m2) + 2,
    "rho": lambda m1, m2, m: m,
    "rho_onevar": lambda m1, m2, m: m,
    "A": lambda m1, m2, m: 4,
    "A_op": lambda m1, m2, m: 4,
}


def cmd_truncdim(cfg: RunConfig, report: RunReport) -> dict:
    o = cfg.options
    name = o["op"]
    if name not in lo.OPERATORS:
        raise ConfigError(f"unknown operator {name!r}")
    m = o["m"] if o["m"] is not None else o["m1"]
    one_var = name in ("rho", "rho_onevar", "phi_smooth", "psi_smooth")
    op = lo.OPERATORS[name](m) if one_var else lo.OPERATORS[name](o["m1"], o["m2"])
    T0 = o["T0"] if o["T0"] is not None else op.min_window
    if T0 < op.min_window:
        raise lo.WindowTooSmall(f"T0={T0} below {op.min_window} for {op.name}")
    k = lo.kernel_stabilization(op, T0, o["steps"])
    out = {"kernel_dim": k.value, "stabilized": k.stabilized}
    inputs = {"op": op.name, "m1": o["m1"], "m2": o["m2"], "m": m, "T0": T0, "windows": k.windows, "values": k.values}
    if name in _EXPECTED_KERNEL:
        want = _EXPECTED_KERNEL[name](o["m1"], o["m2"], m)
        report.add(CheckRecord("stabilized kernel", inputs, want, "formula", k.value, k.value == want))
    else:
        report.add(CheckRecord("stabilized kernel", inputs, None, "no closed form", k.value, True))
    if o["cokernel"]:
        c = lo.cokernel_stabilization(op, T0, o["steps"])
        out["cokernel_dim"] = c.value
        report.add(CheckRecord("stabilized cokernel", {**inputs, "windows": c.windows}, None, "reported", c.value, True))
    if o["dump_matrix"]:
        atomic_write(Path(o["dump_matrix"]), lo.build_system(op, T0).to_triplet_text())
    return out


def cmd_chg_verify(cfg: RunConfig, report: RunReport) -> dict:
    o = cfg.options
    first = (_params(o), (o["x"], o["y"]))
    extra = max(o["instantiations"] - 1, 0)
    rand = acceptance.symbolic_instantiations(cfg.seed, extra=extra)[3:]
    counts = {"relations": 0, "matrices": 0, "integrability": 0, "failed": 0}
    for params, (x, y) in [first] + rand:
        inst = {**params.to_json(), "x": str(x), "y": str(y)}
        for r in cs.check_gm_relations(params, x, y, strict=False):
            report.add(CheckRecord(r.name, inst, "0", "exact expansion", r.residual, r.passed))
            counts["relations" if r.passed else "failed"] += 1
        try:
            cs.gm_matrix(params)
            ok, detail = True, "entrywise equal"
        except cs.MatrixMismatch as exc:
            ok, detail = False, str(exc)
        report.add(CheckRecord("connection matrices", params.to_json(), "entrywise equal", "derived columns", detail, ok))
        counts["matrices" if ok else "failed"] += 1
        try:
            cs.check_integrability(params, acceptance.INTEGRABILITY_POINTS)
            ok, detail = True, "zero residual"
        except cs.IntegrabilityFailed as exc:
            ok, detail = False, str(exc)
        report.add(CheckRecord("integrability", params.to_json(), "zero residual", "exact evaluation", detail, ok))
        counts["integrability" if ok else "failed"] += 1
    basis = {str(m): [str(v) for v in cs.reduce_to_basis(first[0], *first[1], m)] for m in ((1, 1), (2, 0), (0, 2))}
    return {"instantiations": 1 + len(rand), "passed": counts, "reductions": basis,
            "all_pass": counts["failed"] == 0}


def cmd_chg_periods(cfg: RunConfig, report: RunReport) -> Tuple[dict, str]:
    o = cfg.options
    params = _params(o)
    spec = pn.QuadratureSpec(o["tol"], o["abs_tol"], o["max_level"], o["precision"])
    vectors = []
    rows = []
    for x, y in o["points"]:
        pt = pn.EvaluationPoint.make(params, x, y)
        with timed() as t:
            pv = pn.period_vector(params, pt, spec)
        vectors.append(pv)
        inputs = {"x": x, "y": y, **params.to_json()}
        report.add(CheckRecord("quadrature error", inputs, f"<= {o['tol']:g} relative", "level difference",
                               {"values": list(pv.as_array()), "err": list(pv.err)},
                               all(e <= max(o["tol"] * abs(v), o["abs_tol"]) for e, v in zip(pv.err, pv.as_array())),
                               t.seconds, o["tol"]))
        row = {"x": x, "y": y, "F": list(pv.as_array()), "err": list(pv.err), "level": pv.mesh.level}
        if o["oracle"]:
            ov, _ = pn.oracle_period_vector(params, pt)
            agree = max(abs(a - b) / abs(b) for a, b in zip(pv.as_array(), ov))
            report.add(CheckRecord("engines agree", inputs, f"<= {o['agree_tol']:g}", "oracle: QUADPACK",
                                   agree, agree <= o["agree_tol"], tolerance=o["agree_tol"]))
            row["oracle_rel_diff"] = agree
        rows.append(row)
    return {"periods": rows}, pn.period_table_csv(vectors)


def cmd_gm_check(cfg: RunConfig, report: RunReport) -> dict:
    o = cfg.options
    params = _params(o)
    spec = pn.QuadratureSpec(rel_tol=o["tol"], precision=o["precision"])
    pt = pn.EvaluationPoint.make(params, o["x"], o["y"])
    g = pn.gm_residual(params, pt, o["step"], spec)
    ex = pn.exactness_residual(params, pt, spec)
    inputs = {"x": o["x"], "y": o["y"], "step": o["step"], **params.to_json()}
    report.add(CheckRecord("connection residual", inputs, f"<= {o['gm_tol']:g}", "closed-form matrices",
                           g.to_json(), g.plain[0] <= o["gm_tol"], tolerance=o["gm_tol"]))
    report.add(CheckRecord("exact forms integrate to zero", inputs, "<= 1e-8", "Stokes on the chamber",
                           ex.relative, ex.max_relative() <= 1e-8, tolerance=1e-8))
    return {"gm_residual": g.to_json(), "exactness": ex.relative}


def cmd_full_suite(cfg: RunConfig, report: RunReport) -> dict:
    lines = {}
    for n in cfg.options["criteria"]:
        if n not in acceptance.CRITERIA:
            raise ConfigError(f"no criterion {n}")
        fn = acceptance.CRITERIA[n]
        res = fn(cfg.seed) if n == 6 else fn()
        for r in res.records:
            r.name = f"[{n}] {r.name}"
            report.add(r)
        report.add(CheckRecord(f"[{n}] runtime", {}, f"< {res.time_limit:g}s", "budget", round(res.seconds, 3),
                               res.seconds < res.time_limit))
        lines[str(n)] = res.line()
        print(res.line(), file=sys.stderr)
    return {"criteria": lines}


COMMANDS: Dict[str, Callable] = {
    "dims": cmd_dims, "stokes": cmd_stokes, "homology": cmd_homology, "truncdim": cmd_truncdim,
    "chg-verify": cmd_chg_verify, "chg-periods": cmd_chg_periods, "gm-check": cmd_gm_check,
    "full-suite": cmd_full_suite,
}

CONFIG_ERRORS = (ConfigError, lm.NotGood, lm.NotIrregular, lm.ZeroUnit, lm.InvalidStratum, cs.InvalidParams,
                 lo.WindowTooSmall, pn.ChamberViolation, pn.NotIntegrable, pn.StepTooLarge, st.SpecTooCoarse,
                 ValueError)
NUMERIC_ERRORS = (NumericalNonConvergence, quadrature.NoConvergence, lo.NotStabilized, lm.ResolutionTooCoarse)


def run(cfg: RunConfig) -> Tuple[RunReport, int]:
    """Execute one command; returns the report and the exit status."""
    report = RunReport(cfg.to_json())
    code = None
    csv_text = None
    try:
        out = COMMANDS[cfg.command](cfg, report)
        if isinstance(out, tuple):
            out, csv_text = out
        report.result = out
    except NUMERIC_ERRORS as exc:
        report.result = {"error": type(exc).__name__, "message": str(exc)}
        code = EXIT_NUMERIC
    except CONFIG_ERRORS as exc:
        report.result = {"error": type(exc).__name__, "message": str(exc)}
        code = EXIT_CONFIG
    if code is not None:
        report.add(CheckRecord("run", {}, "completed", "runner", report.result["error"], False))
    else:
        code = report.exit_code
    outdir = cfg.output_dir()
    write_report(report, outdir / f"{cfg.command}.json")
    if csv_text is not None:
        atomic_write(outdir / "periods.csv", csv_text)
    return report, code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = resolve_config(list(sys.argv[1:] if argv is None else argv))
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    report, code = run(cfg)
    print(json.dumps(jsonable(report.result)))
    return code


if __name__ == "__main__":
    sys.exit(main())
