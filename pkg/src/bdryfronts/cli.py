"""Command-line interface.

Subcommands: riemann | boundary-riemann | front-track | viscous | compare |
estimate-suite.  Global flags --seed, --out-dir, --jobs (also via the
BDRY_FRONTS_JOBS environment variable).  Exit codes: 0 success, 1 usage or
validation error, 2 solver diagnostic (variation blow-up, front explosion,
failed boundary solve).
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from pathlib import Path

import numpy as np

from .boundary import (RELATION_STAR, RELATION_VISCOUS,
                       BoundaryRiemannError, solve_boundary_riemann)
from .harness import (compare_limits, estimate_suite, fmt, run_scenario,
                      write_csv)
from .riemann import RiemannSolverError, sample_fan, solve_riemann
from .scenario import ScenarioError, load_scenario, parse_state, \
    parse_system_arg
from .tracking import (FrontExplosionError, SmallDataGuardError,
                       VariationBlowupError)
from .viscous import ViscousRegimeError, viscous_solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIAGNOSTIC = 2


_GLOBAL_DEFAULTS = {
    "seed": 0,
    "out_dir": "out",
    "jobs": None,       # resolved against BDRY_FRONTS_JOBS at run time
    "no_figures": False,
}


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized components")
    common.add_argument("--out-dir", default=argparse.SUPPRESS,
                        help="directory for delimited output and figures")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="worker count for independent runs "
                             "(or BDRY_FRONTS_JOBS)")
    common.add_argument("--no-figures", action="store_true",
                        default=argparse.SUPPRESS,
                        help="skip figure rendering")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="bdry-fronts",
        description="Front tracking for conservation laws on the half-line "
                    "with viscosity-consistent boundary conditions.",
        parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add_parser("riemann", help="solve an interior Riemann problem")
    p.add_argument("--system", required=True,
                   help="catalogue name or inline JSON spec")
    p.add_argument("--left", required=True, help="left state, comma separated")
    p.add_argument("--right", required=True, help="right state")
    p.add_argument("--sample-grid", default="-2,2,401",
                   help="lo,hi,count for the self-similar sampling")

    p = add_parser("boundary-riemann",
                   help="solve a boundary Riemann problem")
    p.add_argument("--system", required=True)
    p.add_argument("--interior", required=True, help="interior state")
    p.add_argument("--boundary-datum", required=True, help="datum state")
    p.add_argument("--relation", choices=[RELATION_VISCOUS, RELATION_STAR],
                   default=RELATION_VISCOUS)

    p = add_parser("front-track", help="run the front-tracking solver")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--delta", type=float, help="override accuracy parameter")
    p.add_argument("--t-end", type=float, help="override end time")
    p.add_argument("--sample-times", help="comma-separated override")

    p = add_parser("viscous", help="run the viscous reference solver")
    p.add_argument("--scenario", required=True)
    p.add_argument("--system", help="override the scenario system")
    p.add_argument("--epsilon", type=float, help="override viscosity scale")
    p.add_argument("--dx", type=float, help="override grid spacing")
    p.add_argument("--t-end", type=float, help="override end time")

    p = add_parser("compare",
                   help="compare inviscid limits across viscosities")
    p.add_argument("--scenario", required=True)

    p = add_parser("estimate-suite",
                   help="randomized boundary interaction estimates")
    p.add_argument("--system", default="burgers",
                   choices=["burgers", "lagrangian-euler"])
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--delta", type=float, default=1e-2)
    return parser


def _cmd_riemann(args) -> int:
    sys = parse_system_arg(args.system)
    left = parse_state(args.left, sys.dimension)
    right = parse_state(args.right, sys.dimension)
    fan = solve_riemann(sys, left, right)
    lo, hi, count = (float(p) for p in args.sample_grid.split(","))
    xi = np.linspace(lo, hi, int(count))
    samples = np.array([sample_fan(fan, x) for x in xi])
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "riemann_samples.csv",
              ["xi"] + [f"v{i + 1}" for i in range(sys.dimension)],
              [[x] + list(s) for x, s in zip(xi, samples)])
    write_csv(out / "riemann_fan.csv",
              ["family", "kind", "speed", "strength"],
              [[w.family + 1, w.kind, w.speed, w.strength]
               for w in fan.waves])
    if not args.no_figures:
        from .figures import render_fan_figure
        render_fan_figure(xi, samples, out / "riemann_fan.png")
    for w in fan.waves:
        print(f"family {w.family + 1} {w.kind}: speed {fmt(w.speed)} "
              f"strength {fmt(w.strength)}")
    return EXIT_OK


def _cmd_boundary_riemann(args) -> int:
    sys = parse_system_arg(args.system)
    interior = parse_state(args.interior, sys.dimension)
    datum = parse_state(args.boundary_datum, sys.dimension)
    fan = solve_boundary_riemann(sys, interior, datum,
                                 relation=args.relation)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [[w.family + 1, w.kind, w.speed, w.strength] for w in fan.waves]
    if fan.boundary_shock is not None:
        w = fan.boundary_shock
        rows.insert(0, [w.family + 1, f"parked-{w.kind}", w.speed,
                        w.strength])
    write_csv(out / "boundary_fan.csv",
              ["family", "kind", "speed", "strength"], rows)
    if fan.layer is not None:
        write_csv(out / "layer_profile.csv",
                  ["y"] + [f"w{i + 1}" for i in range(sys.dimension)],
                  [[y] + list(w) for y, w in zip(fan.layer.y, fan.layer.w)])
        if not args.no_figures:
            from .figures import render_layer_figure
            render_layer_figure(fan.layer, out / "layer_profile.png")
    print(f"relation {fan.relation}: trace "
          + ",".join(fmt(v) for v in fan.trace)
          + f"  char size {fmt(fan.char_size)}  template {fan.template}")
    return EXIT_OK


def _cmd_front_track(args) -> int:
    raw = json.loads(Path(args.scenario).read_text())
    if args.delta is not None:
        raw["delta"] = args.delta
    if args.t_end is not None:
        raw["t_end"] = args.t_end
    if args.sample_times:
        raw["sample_times"] = [float(t) for t in
                               args.sample_times.split(",")]
    raw.pop("epsilon", None)     # front tracking only
    report = run_scenario(raw, out_dir=args.out_dir, seed=args.seed,
                          jobs=args.jobs, figures=not args.no_figures)
    bad = [r for r in report.runs if r.get("status") != "ok"]
    for r in report.runs:
        if r.get("status") == "ok":
            print(f"{r['label']}: {r['events']} events, sup TV "
                  f"{fmt(r['sup_tv'])}, C0 {fmt(r['c0'])}")
        else:
            print(f"{r['label']}: {r.get('error')}")
    return EXIT_DIAGNOSTIC if bad else EXIT_OK


def _cmd_viscous(args) -> int:
    raw = json.loads(Path(args.scenario).read_text())
    if args.system:
        raw["system"] = json.loads(args.system) \
            if args.system.strip().startswith("{") \
            else {"name": args.system}
    if args.epsilon is not None:
        raw["epsilon"] = [args.epsilon]
    if args.t_end is not None:
        raw["t_end"] = args.t_end
    if args.dx is not None:
        raw.setdefault("options", {})["dx"] = args.dx
    raw["delta"] = []            # viscous only
    report = run_scenario(raw, out_dir=args.out_dir, seed=args.seed,
                          jobs=args.jobs, figures=not args.no_figures)
    bad = [r for r in report.runs if r.get("status") != "ok"]
    for r in report.runs:
        if r.get("status") == "ok":
            print(f"{r['label']}: trace estimate "
                  + ",".join(fmt(v) for v in r["trace_estimate"]))
        else:
            print(f"{r['label']}: {r.get('error')}")
    return EXIT_DIAGNOSTIC if bad else EXIT_OK


def _cmd_compare(args) -> int:
    table = compare_limits(args.scenario, out_dir=args.out_dir,
                           jobs=args.jobs, figures=not args.no_figures)
    for row in table:
        print(f"{row['label']}: front-tracking trace "
              + ",".join(fmt(v) for v in row["ft_trace"])
              + f"  discrepancy {fmt(row['discrepancy'])}")
    return EXIT_OK


def _cmd_estimate_suite(args) -> int:
    summary = estimate_suite(args.system, seed=args.seed, n_runs=args.runs,
                             delta=args.delta, out_dir=args.out_dir,
                             figures=not args.no_figures)
    print(f"{summary['system']}: {summary['hits']} boundary hits from "
          f"{summary['n_runs']} runs ({summary['aborted']} aborted), "
          f"fitted constant {fmt(summary['fitted_constant'])}")
    return EXIT_OK


_COMMANDS = {
    "riemann": _cmd_riemann,
    "boundary-riemann": _cmd_boundary_riemann,
    "front-track": _cmd_front_track,
    "viscous": _cmd_viscous,
    "compare": _cmd_compare,
    "estimate-suite": _cmd_estimate_suite,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    for key, default in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, default)
    if args.jobs is None:
        args.jobs = int(os.environ.get("BDRY_FRONTS_JOBS", "1"))
    try:
        return _COMMANDS[args.command](args)
    except (ScenarioError, ValueError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except (VariationBlowupError, FrontExplosionError, SmallDataGuardError,
            BoundaryRiemannError, RiemannSolverError,
            ViscousRegimeError) as exc:
        print(f"solver diagnostic: {exc}", file=_sys.stderr)
        return EXIT_DIAGNOSTIC


if __name__ == "__main__":
    _sys.exit(main())
