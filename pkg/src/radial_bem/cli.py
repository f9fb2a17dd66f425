"""Command-line harness for the boundary-integral experiments.

    radial-bem optimal-points --nodes 16
    radial-bem sweep-s --basis linear --elements 40 --nodes 8 --exact poly
    radial-bem table --domain flower --out table3.csv
    radial-bem compare --domain square --h-values "0,0;1,0;1,1"
    radial-bem parity --exact expcos

Every command writes a CSV (to --out, or stdout) and a short summary (to
stdout when --out is given, stderr otherwise). Exit codes: 0 success,
1 invalid configuration, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .basis import ALL_KINDS
from .experiments import ConfigError, ExperimentConfig, run_case, run_parity
from .quadrature import gauss_legendre
from .singular_opt import error_profile, find_err0_zeros, optimal_offset

log = logging.getLogger("radial_bem")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

TABLE_BASES = ("gaussian", "imq", "tps", "phs", "c0")
TABLE_SIZES = (8, 16, 32, 64, 128)
COMPARE_SIZES = (40, 80, 120, 160, 200)

def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None or math.isnan(x):
        return "nan"
    return f"{x:.5e}"


def read_config_file(path) -> dict:
    """key = value lines; '#' starts a comment. Keys use flag names
    (dashes or underscores)."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _parse_list(text, cast):
    return [cast(x) for x in str(text).split(",") if x.strip()]


def _parse_h_values(text):
    pairs = []
    for chunk in str(text).split(";"):
        if chunk.strip():
            a, b = _parse_list(chunk, float)
            pairs.append((a, b))
    return pairs


def _settings(args) -> dict:
    """Defaults < config file < explicit flags."""
    merged = {}
    if args.config:
        merged.update(read_config_file(args.config))
    for key, val in vars(args).items():
        if val is not None and key not in ("config", "out", "command", "func", "jobs"):
            merged[key] = val
    return merged


def build_config(settings: dict) -> ExperimentConfig:
    def get(key, cast, default=None):
        val = settings.get(key)
        return default if val is None else cast(val)

    offset = get("offset", str, "auto")
    return ExperimentConfig(
        domain=get("domain", str, "square"),
        pde=get("pde", str, "laplace"),
        h1=get("h1", float, 0.0),
        h2=get("h2", float, 0.0),
        lam=get("lambda", float),
        basis=get("basis", str, "gaussian"),
        N=get("elements", int, 40),
        n=get("nodes", int, 16),
        s=offset if offset in ("auto", "optimal") else float(offset),
        bc=get("bc", str, "dirichlet"),
        exact=get("exact", str, "expcos"),
        eps2=get("eps2", float),
    )


def _emit(args, header, rows, summary):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        sink = sys.stdout
    else:
        sys.stdout.write(text)
        sink = sys.stderr
    for line in summary:
        print(line, file=sink)


def _map(func, items, jobs):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


# commands

def cmd_optimal_points(args):
    settings = _settings(args)
    n = int(settings.get("nodes", 16))
    zeros = find_err0_zeros(gauss_legendre(n))
    choice = optimal_offset(n)
    rows = [(i + 1, z) for i, z in enumerate(zeros)]
    _emit(args, ["zero_index", "s"], rows,
          [f"n={n}: {len(zeros)} zeros; s_opt={choice.s_opt:.6g} ({choice.provenance})"])
    return EXIT_OK


def cmd_error_profile(args):
    n = int(_settings(args).get("nodes", 16))
    prof = error_profile(gauss_legendre(n), samples=args.samples)
    rows = zip(prof.s, prof.err0, prof.err1, prof.err2)
    _emit(args, ["s", "err0", "err1", "err2"], rows, [f"n={n}: {len(prof.s)} samples"])
    return EXIT_OK


def s_grid(spec: str, n: int):
    """'start:stop:count' uniform grid, nudged by 1e-6 off Gauss nodes."""
    parts = str(spec).split(":")
    if len(parts) == 1:
        grid = np.array([float(parts[0])])
    else:
        a, b, c = float(parts[0]), float(parts[1]), int(parts[2])
        grid = np.linspace(a, b, c)
    nodes = gauss_legendre(n).nodes
    for i, s in enumerate(grid):
        if np.min(np.abs(nodes - s)) < 1e-6:
            grid[i] = s + 1e-6
    return grid


def _sweep_point(job):
    cfg, s = job
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return run_case(cfg, s).flux_error, None
    except Exception as err:  # recorded per point, the sweep goes on
        return float("nan"), f"s={s:.6g}: {err}"


def cmd_sweep_s(args):
    cfg = build_config(_settings(args))
    grid = s_grid(args.s_grid, cfg.n)
    results = _map(_sweep_point, [(cfg, s) for s in grid], args.jobs)
    rows, notes = [], []
    for s, (err, problem) in zip(grid, results):
        rows.append((s, err))
        if problem:
            log.warning(problem)
            notes.append(problem)
    finite = [(e, s) for s, (e, _) in zip(grid, results) if np.isfinite(e)]
    summary = [f"{len(rows)} offsets, {len(notes)} failures"]
    if finite:
        best = min(finite)
        summary.append(f"minimum flux error {best[0]:.3e} at s={best[1]:.4f}")
    _emit(args, ["s", "flux_error"], rows, summary)
    return EXIT_OK


def _table_cell(cfg):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return run_case(cfg).interior_error
    except Exception as err:
        reason = str(err).replace(",", ";").replace("\n", " ")
        return f"FAIL({reason})"


def cmd_table(args):
    settings = _settings(args)
    base = build_config(settings)
    bases = _parse_list(args.bases, str)
    sizes = _parse_list(args.sizes, int)
    bcs = _parse_list(args.bcs, str)
    cfgs = [base.with_(bc=bc, basis=b, N=N) for bc in bcs for b in bases for N in sizes]
    errors = _map(_table_cell, cfgs, args.jobs)
    rows = [(c.bc, c.basis, c.N, e) for c, e in zip(cfgs, errors)]
    fails = sum(isinstance(e, str) for e in errors)
    _emit(args, ["bc", "rbf", "N", "error"], rows, [f"{len(rows)} cells, {fails} failed"])
    return EXIT_OK


def _compare_cell(cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        radial = run_case(cfg.with_(basis="gaussian")).interior_error
        linear = run_case(cfg.with_(basis="linear")).interior_error
    return radial, linear


def cmd_compare(args):
    settings = _settings(args)
    settings.setdefault("pde", "advdiff")
    settings.setdefault("exact", "expsum")
    base = build_config(settings)
    hs = _parse_h_values(args.h_values)
    sizes = _parse_list(args.sizes, int)
    cfgs = []
    for h1, h2 in hs:
        lam = -(2.0 + h1 + h2) if settings.get("lambda") is None else float(settings["lambda"])
        for N in sizes:
            cfgs.append(base.with_(pde="advdiff", h1=h1, h2=h2, lam=lam, N=N))
    results = _map(_compare_cell, cfgs, args.jobs)
    rows, losses = [], []
    for c, (radial, linear) in zip(cfgs, results):
        lam = c.coefficients().lam
        rows.append((c.domain, c.h1, c.h2, lam, "radial", c.N, radial))
        rows.append((c.domain, c.h1, c.h2, lam, "linear", c.N, linear))
        if not radial < linear:
            losses.append(f"h=({c.h1:g},{c.h2:g}) N={c.N}: radial {radial:.3e} >= linear {linear:.3e}")
    for msg in losses:
        log.warning("radial did not beat linear: %s", msg)
    _emit(args, ["domain", "h1", "h2", "lambda", "method", "N", "error"], rows,
          [f"{len(cfgs)} cases, radial better in {len(cfgs) - len(losses)}"])
    return EXIT_OK


def cmd_parity(args):
    settings = _settings(args)
    settings.setdefault("basis", "linear")
    settings.setdefault("exact", "poly")
    cfg = build_config(settings)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = run_parity(cfg)
    ok = res["relative_difference"] < args.tolerance
    rows = [(cfg.exact, res["s"], res["error_quadrature"], res["error_reference"],
             res["relative_difference"], "pass" if ok else "fail")]
    _emit(args, ["exact", "s", "error_quadrature", "error_reference", "relative_difference", "status"],
          rows, [f"relative difference {res['relative_difference']:.3%} ({'pass' if ok else 'fail'})"])
    return EXIT_OK


def _add_common(p):
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--domain", choices=["square", "flower"])
    p.add_argument("--pde", choices=["laplace", "advdiff"])
    p.add_argument("--h1", type=float)
    p.add_argument("--h2", type=float)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--basis", choices=ALL_KINDS)
    p.add_argument("--elements", type=int, help="number of boundary elements N")
    p.add_argument("--nodes", type=int, help="Gauss nodes per element n")
    p.add_argument("--offset", help="'auto' or a source offset s in (0, 1)")
    p.add_argument("--bc", choices=["dirichlet", "mixed"])
    p.add_argument("--exact", choices=["poly", "expcos", "expsum"])
    p.add_argument("--eps2", type=float, help="shape parameter (default K^2/1000)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def make_parser():
    parser = argparse.ArgumentParser(prog="radial-bem", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimal-points", help="zeros of the order-0 log-quadrature error")
    _add_common(p)
    p.set_defaults(func=cmd_optimal_points)

    p = sub.add_parser("error-profile", help="order 0-2 log-quadrature errors over s in (0, 1)")
    _add_common(p)
    p.add_argument("--samples", type=int, default=500)
    p.set_defaults(func=cmd_error_profile)

    p = sub.add_parser("sweep-s", help="flux error versus source offset")
    _add_common(p)
    p.add_argument("--s-grid", default="0.01:0.99:200", help="start:stop:count or a single value")
    p.set_defaults(func=cmd_sweep_s)

    p = sub.add_parser("table", help="interior error over basis x N x boundary condition")
    _add_common(p)
    p.add_argument("--bases", default=",".join(TABLE_BASES))
    p.add_argument("--sizes", default=",".join(map(str, TABLE_SIZES)))
    p.add_argument("--bcs", default="dirichlet,mixed")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("compare", help="radial (Gaussian) versus linear BEM on advection-diffusion")
    _add_common(p)
    p.add_argument("--h-values", default="0,0;1,0;1,1", help="semicolon-separated h1,h2 pairs")
    p.add_argument("--sizes", default=",".join(map(str, COMPARE_SIZES)))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("parity", help="Gauss-rule versus reference element integrals")
    _add_common(p)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.set_defaults(func=cmd_parity)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as err:
        # LinAlgError is a ValueError subclass, so this must come first
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
