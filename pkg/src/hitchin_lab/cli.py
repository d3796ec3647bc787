"""Command-line front end.

Exit codes: 0 success, 1 invariant failure or solver non-convergence,
2 configuration or usage error.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, bessel, verify
from .config import (ConfigError, build_background, build_curves, build_quartic, build_surface,
                     entropy_cutoffs, load_config, solver_options, tolerance, with_defaults)
from .domain import DomainError
from .entropy import count_closed_geodesics, entropy_fit
from .flat.geodesic import CorridorError, MoveBudgetExceeded, geodesic_length
from .flat.saddles import BudgetExceeded, systole_and_saddles
from .flat.surface import SurfaceError
from .io import fmt, write_csv, write_json
from .metric import bound_report, induced_metric, ray_sweep
from .solver import NonConvergence, SolverError, solve_hitchin

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class Failure(Exception):
    """An invariant or convergence failure; the message names what broke and where."""


class _Out:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, msg: str = ""):
        if not self.quiet:
            print(msg)


def _config(args) -> dict:
    return load_config(args.config) if args.config else with_defaults(None)


def _require(cfg: dict, *keys: str):
    for k in keys:
        if k not in cfg:
            raise ConfigError(f"config field {k}: required by this subcommand")


def _outdir(args) -> Path:
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _grid_rows(bg, *fields):
    J, I = np.nonzero(bg.active)
    for j, i in zip(J, I):
        yield (bg.x[j, i], bg.y[j, i]) + tuple(f[j, i] for f in fields)


# -- subcommands -------------------------------------------------------------

def cmd_solve(args, say) -> int:
    cfg = _config(args)
    _require(cfg, "domain", "differential")
    bg = build_background(cfg)
    q = build_quartic(cfg, bg)
    opts = solver_options(cfg, args.tol)
    out = _outdir(args)
    write_csv(out / "background.csv", ["x", "y", "sigma", "kappa"], _grid_rows(bg, bg.sigma, bg.kappa),
              preamble=["kind,h,nx,ny", f"{bg.kind},{fmt(bg.h)},{bg.shape[1]},{bg.shape[0]}"])
    sol = solve_hitchin(bg, q, opts)
    write_csv(out / "solution.csv", ["x", "y", "psi1", "psi2"], _grid_rows(bg, sol.psi1, sol.psi2))
    eps = tolerance(cfg, "bounds", 1e-6)
    rep = bound_report(sol, bg, q)
    im = induced_metric(sol, bg, q)
    summary = {"schema_version": 1, "command": "solve", "name": cfg.get("name", ""),
               "domain": bg.descriptor(), "solver": sol.summary(), "bounds": rep.as_dict(),
               "checks": {k: {"value": v, "ok": ok} for k, (v, ok) in rep.checks(eps).items()},
               "g_min": float(np.min(im.g[bg.interior])), "g_max": float(np.max(im.g[bg.interior]))}
    write_json(out / "summary.json", summary)
    say(f"solve: residual {sol.residual_inf:.3e} after {sol.iterations} iterations")
    for k, (v, ok) in rep.checks(eps).items():
        say(f"  {'PASS' if ok else 'FAIL'}  {k}: {fmt(v)}")
    bad = rep.failures(eps)
    if bad:
        raise Failure(f"bound invariant(s) violated: {', '.join(bad)}")
    return EXIT_OK


def cmd_sweep(args, say) -> int:
    cfg = _config(args)
    _require(cfg, "domain", "differential", "t_list")
    bg = build_background(cfg)
    q = build_quartic(cfg, bg)
    rep = ray_sweep(bg, q, cfg["t_list"], solver_options(cfg, args.tol), warm_start=cfg.get("warm_start", True))
    out = _outdir(args)
    write_csv(out / "ray.csv", ["t", "min_increment", "ratio_deviation", "area_ratio"], rep.rows())
    errors = [f"t={fmt(s.t)}: {s.error}" for s in rep.steps if s.error]
    write_json(out / "summary.json", {
        "schema_version": 1, "command": "sweep", "name": cfg.get("name", ""), "domain": bg.descriptor(),
        "t": rep.t_values, "increments_positive": rep.increments_positive(),
        "deviation_shrinking": rep.deviation_shrinking(), "errors": errors})
    for t, inc, dev, area in rep.rows():
        say(f"t={fmt(t)}  min_increment={fmt(inc)}  ratio_deviation={fmt(dev)}  area_ratio={fmt(area)}")
    if errors:
        raise Failure("solve failed along the ray: " + "; ".join(errors))
    if not rep.increments_positive():
        bad = [s.t for s in rep.steps[1:] if not s.min_increment > 0]
        raise Failure(f"monotonicity of psi1-psi2 violated at t={', '.join(fmt(t) for t in bad)}")
    if not rep.deviation_shrinking():
        raise Failure("far-mask conformal ratio deviation is not shrinking along the ray")
    return EXIT_OK


def cmd_verify(args, say) -> int:
    cfg = _config(args)
    case = None
    if "domain" in cfg and "differential" in cfg:
        bg = build_background(cfg)
        case = (bg, build_quartic(cfg, bg))
    report = verify.run(args.suite, case, seed=args.seed, tol=args.tol,
                        progress=lambda c: say(c.line()))
    if args.out:
        write_json(_outdir(args) / "verify.json", report.as_dict())
    n_bad = len(report.failures)
    say(f"verify [{args.suite}]: {len(report.checks) - n_bad}/{len(report.checks)} passed "
        f"in {report.timings['total']:.1f} s")
    if n_bad:
        for c in report.failures:
            print(f"FAIL {c.suite}: {c.name} = {c.value} ({c.threshold}) {c.detail}".rstrip(), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_flat(args, say) -> int:
    cfg = _config(args)
    _require(cfg, "surface")
    surf = build_surface(cfg)
    out = _outdir(args)
    L = float(cfg.get("saddle_length", 2.0 * math.sqrt(surf.area)))
    rep = systole_and_saddles(surf, L)
    write_csv(out / "saddles.csv", ["dx", "dy", "length", "endpoints"],
              [(s.vector.real, s.vector.imag, s.length, f"{s.start_class}-{s.end_class}") for s in rep.saddles])
    rows, lengths = [], {}
    for label, curve in build_curves(cfg, surf):
        try:
            r = geodesic_length(surf, curve)
        except (CorridorError, MoveBudgetExceeded) as exc:
            raise Failure(f"curve {label}: {exc}") from None
        lengths[label] = r.length
        rows.append((label, r.length, len(r.bends), " ".join(str(c) for c in r.incidences)))
    write_csv(out / "geodesics.csv", ["curve", "length", "bends", "cone_classes"], rows)
    write_json(out / "summary.json", {"schema_version": 1, "command": "flat", "name": cfg.get("name", ""),
                                      "surface": surf.describe(), "saddle_length": L,
                                      "n_saddles": len(rep.saddles), "systole": rep.systole,
                                      "geodesics": lengths})
    d = surf.describe()
    say(f"flat: genus {d['genus']}, area {fmt(d['area'])}, sum k {d['sum_k']}, "
        f"{len(rep.saddles)} saddle connections <= {fmt(L)}, systole {fmt(rep.systole)}")
    for label, length in lengths.items():
        say(f"  {label}: {fmt(length)}")
    return EXIT_OK


def cmd_entropy(args, say) -> int:
    cfg = _config(args)
    _require(cfg, "surface", "entropy")
    surf = build_surface(cfg)
    L, cut = entropy_cutoffs(cfg)
    e = cfg["entropy"]
    tab = count_closed_geodesics(surf, L, cut, budget=e.get("budget", 20_000_000))
    fit = entropy_fit(tab, e.get("tail_fraction", 0.25))
    out = _outdir(args)
    write_csv(out / "counts.csv", ["L", "N"], tab.rows())
    write_csv(out / "windows.csv", ["L", "slope"], fit.windows)
    write_json(out / "summary.json", {"schema_version": 1, "command": "entropy", "name": cfg.get("name", ""),
                                      "surface": surf.describe(), "fit": fit.as_dict()})
    say(f"entropy: estimate {fmt(fit.headline)} at L={fmt(L)}, spread {fmt(fit.spread)} over {fit.tail} windows")
    return EXIT_OK


def cmd_bessel(args, say) -> int:
    cfg = _config(args)
    xs = cfg.get("bessel", {}).get("x", [0, 1, 5, 10, 20, 30, 50])
    rows = bessel.bessel_table(xs)
    out = _outdir(args)
    write_csv(out / "bessel.csv", ["x", "series", "asymptotic"], rows)
    for x, s, a in rows:
        say(f"x={fmt(x)}  series={fmt(s)}  asymptotic={fmt(a)}")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "verify": cmd_verify,
            "flat": cmd_flat, "entropy": cmd_entropy, "bessel": cmd_bessel}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hitchin-lab", description="Sp(4) Hitchin solver and flat-surface tools")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", metavar="PATH")
        s.add_argument("--out", metavar="DIR", default=None if name == "verify" else "out")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--tol", type=float, default=None)
        s.add_argument("--quiet", action="store_true")
        if name == "verify":
            s.add_argument("--suite", default="all", choices=verify.SUITE_NAMES + ("all",))
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_CONFIG
    say = _Out(args.quiet)
    try:
        return COMMANDS[args.command](args, say)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, SurfaceError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (SolverError, Failure, BudgetExceeded, ValueError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
