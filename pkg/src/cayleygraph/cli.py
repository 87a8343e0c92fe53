"""Command-line front end.

    cayleygraph angles --config run.json --out angles.csv
    cayleygraph catalog list --format json

Exit codes: 0 ok, 2 config error, 3 I/O error, 4 numeric failure (only with --strict).
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .catalog import catalog_entries
from .config import RunConfig, load_config
from .curvature import DENSITY_NAMES, TRIPLES
from .errors import CayleyGraphError, ComplexPoint, ConfigError, NearComplex, NearLagrangian
from .fields import (cos2_at, parallel_map, pde_residual, richardson, scan, shell_integral_d_eta,
                     transgression_residual, tube_integral_eta)
from .report import render

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

POINT = ["x", "y", "z", "w"]
GUARDS = (NearComplex, NearLagrangian, ComplexPoint)


@dataclass
class Outcome:
    command: str
    columns: list
    records: list
    failures: list  # human-readable strict-mode violations


def _status_failures(records) -> list:
    return [f"node {i}: {r['status']}" for i, r in enumerate(records) if r["status"].startswith("error:")]


# ---------------------------------------------------------------- commands


def cmd_angles(cfg: RunConfig, threads: int, seed: int) -> Outcome:
    spec = cfg.build_immersion(seed)
    grid = scan(spec, cfg.grid, ("angles",), cfg.tolerances, threads, cfg.mask_radius)
    cols = POINT + ["cos1", "cos2", "sin2", "classification", "status"]
    return Outcome("angles", cols, grid.samples, _status_failures(grid.samples))


def cmd_calibrate(cfg: RunConfig, threads: int, seed: int) -> Outcome:
    spec = cfg.build_immersion(seed)
    grid = scan(spec, cfg.grid, ("angles", "calibration", "omega_triangle"), cfg.tolerances, threads,
                cfg.mask_radius)
    cols = POINT + ["cos1", "cos2", "classification", "defect_Omega", "defect_OmegaPrime",
                    "triangle_orth_err", "triangle_det", "status"]
    failures = _status_failures(grid.samples)
    key = f"defect_{cfg.variant}"
    for i, r in enumerate(grid.samples):
        if r["status"] == "ok" and r["classification"] != "Lagrangian" and abs(r[key]) > cfg.max_defect:
            failures.append(f"node {i}: {key} = {r[key]:.3e} exceeds {cfg.max_defect:g}")
    return Outcome("calibrate", cols, grid.samples, failures)


def curvature_columns(fields) -> list:
    cols = list(POINT)
    if "angles" in fields:
        cols += ["cos1", "cos2", "sin2", "classification"]
    if "mean_curvature" in fields:
        cols.append("H_norm")
    if "scalar" in fields:
        cols.append("scalar")
    if "densities" in fields:
        cols += list(DENSITY_NAMES)
    if "eta" in fields:
        cols += ["eta_" + "".join(str(i) for i in t) for t in TRIPLES]
    return cols + ["status"]


def cmd_curvature(cfg: RunConfig, threads: int, seed: int) -> Outcome:
    spec = cfg.build_immersion(seed)
    grid = scan(spec, cfg.grid, cfg.fields, cfg.tolerances, threads, cfg.mask_radius)
    return Outcome("curvature", curvature_columns(cfg.fields), grid.samples, _status_failures(grid.samples))


def sample_points(spec, cfg: RunConfig, seed: int) -> np.ndarray:
    """Deterministic accepted draws from the domain box."""
    req = cfg.sample
    rng = np.random.default_rng(seed)
    lo, hi = np.array(cfg.grid.lower), np.array(cfg.grid.upper)
    margin = 4.0 * cfg.nested_step
    out = []
    for _ in range(1000 * req.count):
        p = rng.uniform(lo + margin, hi - margin)
        if np.linalg.norm(p) < req.min_norm or spec.distance_to_singular(p) <= cfg.mask_radius + margin:
            continue
        c2 = cos2_at(spec, p)
        if c2 < req.min_cos2 or 1.0 - c2 < req.min_sin2:
            continue
        out.append(p)
        if len(out) == req.count:
            return np.array(out)
    raise ConfigError(f"config field 'sample': only {len(out)} of {req.count} points pass the filters")


def cmd_pde_check(cfg: RunConfig, threads: int, seed: int) -> Outcome:
    spec = cfg.build_immersion(seed)
    points = sample_points(spec, cfg, seed) if cfg.sample else cfg.grid.nodes()
    h = cfg.step
    tol = cfg.tolerances

    def node(p):
        rec = {"x": p[0], "y": p[1], "z": p[2], "w": p[3], "status": "ok"}
        try:
            rec["cos2"] = cos2_at(spec, p)
            if "pde" in cfg.checks:
                r = richardson(lambda s: pde_residual(spec, p, s, tol), cfg.nested_step)
                rec.update(pde_coarse=r.coarse, pde_fine=r.fine, pde_order=r.order)
            if "transgression" in cfg.checks:
                r = richardson(lambda s: transgression_residual(spec, p, s, tol, cfg.eta_form), h)
                rec.update(transgression_coarse=r.coarse, transgression_fine=r.fine,
                           transgression_order=r.order)
        except GUARDS as exc:
            rec["status"] = f"skipped:{exc.code}"
        except CayleyGraphError as exc:
            rec["status"] = f"error:{exc.code}"
        return rec

    records = parallel_map(node, list(points), threads)
    cols = POINT + ["cos2"]
    for c in cfg.checks:
        cols += [f"{c}_coarse", f"{c}_fine", f"{c}_order"]
    cols.append("status")
    failures = _status_failures(records)
    for i, r in enumerate(records):
        for c in cfg.checks:
            order = r.get(f"{c}_order")
            if r["status"] == "ok" and order is not None and order < cfg.min_order:
                failures.append(f"node {i}: {c} order {order:.3f} below {cfg.min_order:g}")
    return Outcome("pde-check", cols, records, failures)


def cmd_tube(cfg: RunConfig, threads: int, seed: int) -> Outcome:
    spec = cfg.build_immersion(seed)
    center = np.array(cfg.center)
    records = []
    prev = None
    for radius in cfg.radii:
        rec = {"cx": center[0], "cy": center[1], "cz": center[2], "cw": center[3], "radius": radius,
               "order": cfg.quadrature_order, "status": "ok"}
        try:
            val = tube_integral_eta(spec, center, radius, cfg.quadrature_order, cfg.tolerances,
                                    cfg.eta_form, True, cfg.quadrature_tol, threads)
            rec["tube_integral"] = val
            if prev is not None:
                r0, v0 = prev
                lo, hi, sign = (r0, radius, 1.0) if radius > r0 else (radius, r0, -1.0)
                shell = sign * shell_integral_d_eta(spec, center, lo, hi, cfg.quadrature_order,
                                                    cfg.tolerances, cfg.eta_form, threads)
                rec["shell_integral"] = shell
                rec["stokes_residual"] = abs((val - v0) - shell)
            prev = (radius, val)
        except GUARDS as exc:
            rec["status"] = f"skipped:{exc.code}"
            prev = None
        except CayleyGraphError as exc:
            rec["status"] = f"error:{exc.code}"
            prev = None
        records.append(rec)
    cols = ["cx", "cy", "cz", "cw", "radius", "order", "tube_integral", "shell_integral",
            "stokes_residual", "status"]
    failures = _status_failures(records)
    for i, r in enumerate(records):
        res = r.get("stokes_residual")
        if res is not None and res > 1e-2 * abs(r["shell_integral"]) + cfg.quadrature_tol:
            failures.append(f"radius {r['radius']:g}: Stokes residual {res:.3e}")
    return Outcome("tube", cols, records, failures)


def cmd_catalog_list() -> Outcome:
    records = []
    for e in catalog_entries():
        records.append({
            "id": e.id,
            "codomain_dim": e.codomain_dim,
            "parameters": ";".join(f"{k}={v:g}" for k, v in e.defaults.items()),
            "loci": ";".join(f"{loc.kind}:{loc.description}" for loc in e.declared_loci),
            "expected": "yes" if e.expected else "no",
            "tags": ";".join(sorted(e.tags)),
            "description": e.description,
        })
    cols = ["id", "codomain_dim", "parameters", "loci", "expected", "tags", "description"]
    return Outcome("catalog", cols, records, [])


COMMANDS = {
    "angles": cmd_angles,
    "calibrate": cmd_calibrate,
    "curvature": cmd_curvature,
    "pde-check": cmd_pde_check,
    "tube": cmd_tube,
}


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: config output.path, else stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output encoding")
    common.add_argument("--threads", type=int, default=1, help="worker threads, 0 = one per CPU")
    common.add_argument("--seed", type=int, default=0, help="seed for random samples and polynomials")
    common.add_argument("--strict", action="store_true", help="exit 4 when a numeric check fails")

    parser = argparse.ArgumentParser(prog="cayleygraph", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--config", required=True, help="JSON run configuration")
    cat = sub.add_parser("catalog", help="catalog operations")
    cat_sub = cat.add_subparsers(dest="action", required=True)
    cat_sub.add_parser("list", parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 0:
        print("error: --threads must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed < 0 or args.seed >= 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG

    out_path, fmt = args.out, args.format
    try:
        if args.command == "catalog":
            outcome = cmd_catalog_list()
        else:
            cfg = load_config(args.config)
            out_path = out_path or cfg.output_path
            fmt = fmt or cfg.output_format
            outcome = COMMANDS[args.command](cfg, args.threads, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    text = render(outcome.command, outcome.columns, outcome.records, fmt or "csv")
    try:
        if out_path:
            with open(out_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    if outcome.failures:
        for line in outcome.failures[:20]:
            print(f"check failed: {line}", file=sys.stderr)
        if len(outcome.failures) > 20:
            print(f"... {len(outcome.failures) - 20} more", file=sys.stderr)
        if args.strict:
            return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
