"""
Command-line front end.

Subcommands: ``space``, ``eigen``, ``spectrum``, ``transform``, ``heat``,
``schrodinger``, ``verify`` and ``report``.  Every artifact is written through
a temporary file and renamed into place.  Exit status is 0 on success, 1 when
a verification fails or a computation raises, and 2 on usage or config errors.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import eigenfunctions
from .config import OUTPUT_ENV, ConfigError, load_config, parse_value
from .output import _fmt, csv_text, dumps_json, write_atomic

__all__ = ["SCHEMA_VERSION", "run", "main"]

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Bad flag value detected after argument parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _parse_lambda(text: str) -> complex:
    parts = text.split(",")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"--lambda: expected <re>[,<im>], got {text!r}") from None
    if len(vals) not in (1, 2) or not all(map(math.isfinite, vals)):
        raise UsageError(f"--lambda: expected <re>[,<im>], got {text!r}")
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def _parse_init(text: str) -> float:
    kind, _, arg = text.partition(":")
    try:
        a = float(arg)
    except ValueError:
        a = float("nan")
    if kind != "gaussian" or not a > 0 or not math.isfinite(a):
        raise UsageError(f"--init: expected gaussian:<a> with a > 0, got {text!r}")
    return a


def _parse_set(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--set: expected key=value, got {item!r}")
        out[key.strip()] = parse_value(value)
    return out


def _common(points_flag: bool) -> argparse.ArgumentParser:
    """Shared options; on sampling commands ``--n`` counts points instead."""
    common = _Parser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("--config", help="plain-text config file with dotted keys")
    g.add_argument("--space", choices=("hyperbolic", "damek-ricci"), help="model space family")
    if points_flag:
        g.add_argument("--dim", dest="dim", type=int, help="dimension of the hyperbolic space")
    else:
        g.add_argument("--n", "--dim", dest="dim", type=int, help="dimension of the hyperbolic space")
    g.add_argument("--m", type=int, help="Damek-Ricci dimension m")
    g.add_argument("--k", type=int, help="Damek-Ricci centre dimension k")
    g.add_argument("--out", help=f"output directory (overrides {OUTPUT_ENV})")
    g.add_argument("--format", choices=("csv", "json", "both"), help="output format")
    g.add_argument("--jobs", type=int, default=1, help="worker threads for eigenfunction blocks")
    g.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")
    return common


def build_parser() -> argparse.ArgumentParser:
    common, sampling = _common(False), _common(True)
    p = _Parser(prog="rankone", description="Radial harmonic analysis on rank-one harmonic manifolds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("space", parents=[common], help="describe the model space")

    e = sub.add_parser("eigen", parents=[sampling], help="tabulate a spherical function")
    e.add_argument("--lambda", dest="lam", required=True, help="spectral parameter <re>[,<im>]")
    e.add_argument("--rmax", type=float, default=10.0)
    e.add_argument("--n", "--points", dest="points", type=int, default=201, help="number of radii")

    s = sub.add_parser("spectrum", parents=[sampling], help="Plancherel density table")
    s.add_argument("--lmax", type=float, help="largest lambda in the table")
    s.add_argument("--n", "--points", dest="points", type=int, help="number of lambda samples")

    t = sub.add_parser("transform", parents=[common], help="spherical transform of sampled data")
    t.add_argument("--in", dest="infile", required=True, help="CSV with columns r,re,im")
    t.add_argument("--output", dest="outfile", help="output CSV (default <out>/fhat.csv)")

    h = sub.add_parser("heat", parents=[common], help="heat kernel")
    h.add_argument("--t", type=float, required=True)

    q = sub.add_parser("schrodinger", parents=[common], help="Schrodinger evolution of a Gaussian")
    q.add_argument("--t", type=float, required=True)
    q.add_argument("--init", default="gaussian:1", help="initial datum gaussian:<a>")

    v = sub.add_parser("verify", parents=[common], help="run verification checks")
    v.add_argument("name", help="check name or 'all'")

    sub.add_parser("report", parents=[common], help="figures and CSV tables for the space")
    return p


def _flags(args) -> dict:
    flags = _parse_set(args.set)
    direct = {
        "space.kind": args.space,
        "space.n": args.dim,
        "space.m": args.m,
        "space.k": args.k,
        "output.dir": args.out,
        "output.format": args.format,
    }
    if getattr(args, "lmax", None) is not None:
        direct["grid.lambda_max"] = args.lmax
    if getattr(args, "points", None) is not None and args.command == "spectrum":
        direct["grid.lambda_points"] = args.points
    flags.update({k: v for k, v in direct.items() if v is not None})
    return flags


# ---------------------------------------------------------------- commands


def _emit(cfg, name, header, rows, meta) -> list:
    out = cfg.output_dir
    fmt = cfg["output.format"]
    written = []
    if fmt in ("csv", "both"):
        written.append(write_atomic(out / f"{name}.csv", csv_text(header, rows)))
    if fmt in ("json", "both") or meta is not None:
        doc = {"schema_version": SCHEMA_VERSION, **(meta or {})}
        if fmt == "json":
            doc["columns"] = list(header)
            doc["rows"] = [[float(x) for x in row] for row in rows]
        written.append(write_atomic(out / f"{name}.json", dumps_json(doc)))
    return written


def _pdata(cfg):
    from .spectral_measure import build_plancherel

    return build_plancherel(cfg.space(), cfg["grid.lambda_max"])


def cmd_space(cfg, args) -> int:
    from .model_space import density_at, log_derivative_at

    space = cfg.space()
    r = np.array([0.5, 1.0, 2.0, 5.0])
    doc = {
        "schema_version": SCHEMA_VERSION,
        "label": space.label,
        "space": space.descriptor(),
        "samples": [{"r": float(x), "A": float(a), "A_prime_over_A": float(d)}
                    for x, a, d in zip(r, density_at(space, r), log_derivative_at(space, r))],
    }
    text = dumps_json(doc)
    write_atomic(cfg.output_dir / "space.json", text)
    sys.stdout.write(text)
    return 0


def cmd_eigen(cfg, args) -> int:
    from .eigenfunctions import phi

    lam = _parse_lambda(args.lam)
    if not args.rmax > 0 or args.points < 2:
        raise UsageError("--rmax must be positive and --n at least 2")
    r = np.linspace(0.0, args.rmax, args.points)
    lam_arg = lam if lam.imag != 0 else lam.real
    vals = np.asarray(phi(cfg.space(), lam_arg, r, tol=cfg["ode.tolerance"]), dtype=complex)
    meta = {"space": cfg.space().descriptor(), "lambda": [lam.real, lam.imag], "tolerance": cfg["ode.tolerance"]}
    _emit(cfg, "eigen", ("r", "re_phi", "im_phi"), zip(r, vals.real, vals.imag), meta)
    return 0


def cmd_spectrum(cfg, args) -> int:
    pdata = _pdata(cfg)
    lam = np.linspace(0.0, cfg["grid.lambda_max"], cfg["grid.lambda_points"])
    dens = pdata.density(lam)
    meta = pdata.header()
    _emit(cfg, "spectrum", ("lambda", "density"), zip(lam, dens), meta)
    return 0


def _read_samples(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise UsageError(f"--in: {exc}") from None
    if not rows or not {"r", "re"} <= set(rows[0]):
        raise UsageError("--in: expected a CSV with columns r,re[,im]")
    try:
        r = np.array([float(row["r"]) for row in rows])
        re = np.array([float(row["re"]) for row in rows])
        im = np.array([float(row.get("im") or 0.0) for row in rows])
    except ValueError as exc:
        raise UsageError(f"--in: {exc}") from None
    return r, re + 1j * im if np.any(im) else re


def cmd_transform(cfg, args) -> int:
    from .transforms import from_samples, lp_norm, spectral_l2, spherical_ft, tail_ratio

    space = cfg.space()
    r, vals = _read_samples(args.infile)
    try:
        f = from_samples(space, r, vals)
    except ValueError as exc:
        raise UsageError(f"--in: {exc}") from None
    pdata = _pdata(cfg)
    fh = spherical_ft(space, f, pdata, tol=cfg["ode.tolerance"])
    lam = np.linspace(0.0, cfg["grid.lambda_max"], cfg["grid.lambda_points"])
    out_vals = fh.source(lam)
    sidecar = {
        "space": space.descriptor(),
        "norms": {
            "L1": lp_norm(space, f, 1.0, math.inf),
            "L2": lp_norm(space, f, 2.0, math.inf),
            "spectral_L2": spectral_l2(pdata, fh),
            "sup": lp_norm(space, f, math.inf),
        },
        "quadrature": {
            "r_max": f.r_max,
            "radial_panels": f.grid.n_panels,
            "points_per_panel": f.grid.order,
            "lambda_nodes": int(fh.lam.size),
            "lambda_top": fh.lam_top,
            "tail_ratio_L1": tail_ratio(space, f, 1.0),
            "C0": pdata.C0,
        },
    }
    out = Path(args.outfile) if args.outfile else cfg.output_dir / "fhat.csv"
    write_atomic(out, csv_text(("lambda", "re", "im"), zip(lam, np.real(out_vals), np.imag(out_vals))))
    write_atomic(out.with_suffix(".json"), dumps_json({"schema_version": SCHEMA_VERSION, **sidecar}))
    return 0


def _output_grid(cfg, default_r_max):
    from .transforms import radial_grid

    r_max = cfg["grid.r_max"] or default_r_max
    return radial_grid(r_max, 0.5, cfg["grid.points_per_panel"])


def cmd_heat(cfg, args) -> int:
    from .kernels import heat_kernel, heat_l2_norm
    from .transforms import lp_norm, radius_for

    if not args.t > 0:
        raise UsageError("--t must be positive")
    pdata = _pdata(cfg)
    space = cfg.space()
    h = heat_kernel(pdata, args.t, _output_grid(cfg, radius_for(space, "gaussian", 1.0 / (4.0 * args.t))))
    meta = {
        "space": space.descriptor(),
        "t": args.t,
        "norms": {
            "L1": lp_norm(space, h, 1.0, math.inf),
            "L2": lp_norm(space, h, 2.0, math.inf),
            "L2_spectral": heat_l2_norm(pdata, args.t),
            "sup": lp_norm(space, h, math.inf),
        },
        "r_max": h.r_max,
    }
    _emit(cfg, "heat", ("r", "re", "im"), zip(h.r, np.real(h.values), np.imag(h.values)), meta)
    return 0


def cmd_schrodinger(cfg, args) -> int:
    from .kernels import schrodinger_evolve
    from .transforms import gaussian, lp_norm, radius_for

    a = _parse_init(args.init)
    pdata = _pdata(cfg)
    space = cfg.space()
    f = gaussian(space, a)
    beta = a / (1.0 + 16.0 * a * a * args.t * args.t)
    grid = _output_grid(cfg, radius_for(space, "gaussian", beta))
    u = schrodinger_evolve(pdata, f, args.t, grid)
    meta = {
        "space": space.descriptor(),
        "t": args.t,
        "init": {"kind": "gaussian", "a": a},
        "norms": {
            "L2_initial": lp_norm(space, f, 2.0),
            "L2": lp_norm(space, u, 2.0, math.inf),
            "sup": lp_norm(space, u, math.inf),
        },
        "r_max": u.r_max,
    }
    _emit(cfg, "schrodinger", ("r", "re", "im"), zip(u.r, np.real(u.values), np.imag(u.values)), meta)
    return 0


def summary_rows(reports):
    """Long-format summary: one row per tolerance rule (no timings)."""
    rows = []
    for rep in reports:
        values = {k: v["value"] for k, v in rep.metrics.items()}
        if not rep.tolerances:
            rows.append((rep.check_name, "", "", "", "", "true" if rep.passed else "false"))
        for key, rule in rep.tolerances.items():
            rows.append((rep.check_name, rule.metric, _fmt(values[rule.metric]), rule.op, _fmt(rule.bound),
                         "true" if rule.holds(rep.metrics) else "false"))
    return rows


def cmd_verify(cfg, args) -> int:
    from .verifiers import CHECKS, run_check

    names = list(CHECKS) if args.name == "all" else [args.name]
    if args.name != "all" and args.name not in CHECKS:
        raise UsageError(f"unknown check {args.name!r}; choose from {['all', *CHECKS]}")
    pdata = _pdata(cfg)
    space = cfg.space()
    outdir = cfg.output_dir / "verify" / space.label.replace("(", "").replace(")", "").replace(",", "_")
    reports = []
    for name in names:
        t0 = time.perf_counter()
        rep = run_check(name, pdata, cfg.tolerance_overrides.get(name))
        reports.append(rep)
        doc = {"schema_version": SCHEMA_VERSION, **rep.to_dict()}
        if cfg["output.format"] in ("json", "both"):
            write_atomic(outdir / f"{name}.json", dumps_json(doc))
        status = "PASS" if rep.passed else "FAIL"
        extra = "" if rep.passed else f"  failing: {', '.join(rep.failures())}"
        print(f"{status}  {name:<26s} {time.perf_counter() - t0:7.1f} s{extra}", flush=True)
    if cfg["output.format"] in ("csv", "both"):
        header = ("check_name", "metric", "value", "op", "bound", "pass")
        write_atomic(outdir / "summary.csv", csv_text(header, summary_rows(reports)))
    return 0 if all(r.passed for r in reports) else 1


def cmd_report(cfg, args) -> int:
    from .report import build_report

    written = build_report(_pdata(cfg), cfg.output_dir / "report", s_max=cfg["grid.s_max"],
                           n_lambda=cfg["grid.lambda_points"])
    for path in written:
        print(path)
    return 0


COMMANDS = {
    "space": cmd_space,
    "eigen": cmd_eigen,
    "spectrum": cmd_spectrum,
    "transform": cmd_transform,
    "heat": cmd_heat,
    "schrodinger": cmd_schrodinger,
    "verify": cmd_verify,
    "report": cmd_report,
}


def run(argv=None) -> int:
    """Parse ``argv`` and execute; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        from .verifiers import CHECKS

        cfg = load_config(args.config, _flags(args), known_checks=tuple(CHECKS))
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)
    except (UsageError, ConfigError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    eigenfunctions.set_workers(args.jobs)
    try:
        return COMMANDS[args.command](cfg, args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"rankone: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical failures are reported, not raised
        print(f"rankone: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
