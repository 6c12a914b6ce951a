"""Experiment orchestration and flat-file persistence.

Runs the solvers requested by a scenario, writes delimited outputs with a
fixed float format (re-running with the same seed and configuration
reproduces every file byte for byte), and collects the per-run metrics into
a report.  Figures are rendered next to the delimited files.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .boundary import (RELATION_STAR, RELATION_VISCOUS,
                       solve_boundary_riemann)
from .riemann import sample_fan, solve_riemann
from .scenario import Scenario, load_scenario
from .systems import SystemDef
from .tracking import (BOUNDARY_HIT, FrontExplosionError, StepFunction,
                       TrackerConfig, Trajectory, VariationBlowupError,
                       functional_slack, run_front_tracking)
from .viscous import viscous_solve

FLOAT_FMT = "%.17g"


def fmt(x) -> str:
    return FLOAT_FMT % float(x)


def write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(c) if isinstance(c, (int, float, np.floating))
                              and not isinstance(c, bool) else str(c)
                              for c in row))
    path.write_text("\n".join(lines) + "\n")


def config_hash(obj) -> str:
    text = json.dumps(obj, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _state_header(prefix, dim):
    return [f"{prefix}{i + 1}" for i in range(dim)]


# ----------------------------------------------------------------------
# Individual runs
# ----------------------------------------------------------------------

def front_tracking_run(scn: Scenario, delta: float, out: Path,
                       label: Optional[str] = None,
                       viscosity_override=None) -> dict:
    """One front-tracking run; writes profile, interaction, and functional
    files and returns the metric record."""
    sys = scn.build_system(viscosity_override)
    tag = label or f"delta{fmt(delta)}"
    cfg = TrackerConfig(delta=delta, t_end=scn.t_end, relation=scn.relation,
                        guard=scn.options.get("guard", 0.1),
                        override_guard=scn.options.get("override_guard",
                                                       False),
                        tv_cap_factor=scn.options.get("tv_cap_factor", 10.0),
                        c0=scn.options.get("c0"))
    entry = {
        "kind": "front-tracking", "delta": delta, "label": tag,
        "relation": scn.relation,
        "config_hash": config_hash({"scenario": scn.raw, "delta": delta,
                                    "label": tag}),
    }
    try:
        traj = run_front_tracking(sys, scn.initial, scn.boundary, cfg)
    except (VariationBlowupError, FrontExplosionError) as exc:
        entry.update(error=str(exc), status="diagnostic")
        return entry

    dim = sys.dimension
    rows = []
    for t in scn.sample_times:
        t = min(t, traj.t_end)
        xs, states = traj.profile(t)
        span = scn.options.get("sample_span",
                               float(xs[-1]) + 1.0 if len(xs) else 1.0)
        grid = np.linspace(0.0, span, int(scn.options.get("sample_points",
                                                          401)))
        for x in grid:
            rows.append([t, x] + list(traj.eval(t, x)))
    write_csv(out / f"profiles_{tag}.csv",
              ["t", "x"] + _state_header("v", dim), rows)

    rows = []
    for r in traj.records:
        rows.append([r.time, r.kind,
                     -1 if r.hit_family is None else r.hit_family + 1,
                     r.hit_strength, r.hit_speed, r.pre_char_size,
                     r.delta_tv, r.bound, r.n_outgoing])
    write_csv(out / f"interactions_{tag}.csv",
              ["tau", "type", "family", "strength", "hit_speed",
               "char_size_pre", "delta_tv", "bound", "n_outgoing"], rows)

    rows = [[s.time, s.linear, s.quadratic, s.boundary, s.total]
            for s in traj.functional]
    write_csv(out / f"functional_{tag}.csv",
              ["t", "V", "Q", "Q_b", "Upsilon"], rows)

    snaps = traj.functional
    slack = functional_slack(delta)
    increases = sum(1 for a, b in zip(snaps, snaps[1:])
                    if b.total > a.total + slack)
    hits = [r for r in traj.records if r.kind == BOUNDARY_HIT]
    ratios = [r.delta_tv / (r.bound + slack) for r in hits
              if np.isfinite(r.bound)]
    tv_values = [traj.total_variation(seg.t0) for seg in traj.segments]
    entry.update(
        status="ok",
        events=len(traj.records),
        boundary_hits=len(hits),
        c0=traj.c0,
        data_size=traj.data_size,
        sup_tv=max(tv_values) if tv_values else 0.0,
        functional_increases=increases,
        functional_events=max(len(snaps) - 1, 0),
        fitted_interaction_constant=max(ratios) if ratios else 0.0,
        final_trace=[float(v) for v in traj.segments[-1].trace],
    )
    entry["trajectory"] = traj
    return entry


def viscous_run(scn: Scenario, epsilon: float, out: Path,
                label: Optional[str] = None,
                viscosity_override=None) -> dict:
    sys = scn.build_system(viscosity_override)
    tag = label or f"eps{fmt(epsilon)}"
    opts = scn.options
    dx = opts.get("dx", min(epsilon / 4.0, 2e-3))
    length = opts.get("length")
    entry = {
        "kind": "viscous", "epsilon": epsilon, "label": tag,
        "config_hash": config_hash({"scenario": scn.raw,
                                    "epsilon": epsilon, "label": tag}),
    }
    try:
        sol = viscous_solve(sys, lambda x: scn.initial(x),
                            lambda t: scn.boundary(t), epsilon,
                            scn.t_end, dx=dx, length=length,
                            sample_times=scn.sample_times)
    except Exception as exc:   # keep sibling runs alive
        entry.update(error=str(exc), status="diagnostic")
        return entry
    dim = sys.dimension
    rows = []
    for it, t in enumerate(sol.times):
        stride = max(1, sol.x.size // int(opts.get("sample_points", 401)))
        for i in range(0, sol.x.size, stride):
            rows.append([t, sol.x[i]] + list(sol.profiles[it][i]))
    write_csv(out / f"viscous_profile_{tag}.csv",
              ["t", "x"] + _state_header("v", dim), rows)
    rows = [[t] + list(tr) for t, tr in zip(sol.times, sol.trace_estimates)]
    write_csv(out / f"viscous_trace_{tag}.csv",
              ["t"] + _state_header("vbar", dim), rows)
    entry.update(
        status="ok",
        conservation_defect=sol.conservation_defect,
        trace_estimate=[float(v) for v in sol.trace_estimates[-1]],
    )
    entry["solution"] = sol
    return entry


# ----------------------------------------------------------------------
# Scenario orchestration
# ----------------------------------------------------------------------

@dataclass(eq=False)
class ExperimentReport:
    scenario_hash: str
    runs: list
    passes: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        runs = []
        for r in self.runs:
            r = {k: v for k, v in r.items()
                 if k not in ("trajectory", "solution")}
            runs.append(r)
        return {"scenario_hash": self.scenario_hash, "runs": runs,
                "passes": self.passes, "metadata": self.metadata}


def run_scenario(source, out_dir=None, seed: Optional[int] = None,
                 jobs: int = 1, figures: bool = True) -> ExperimentReport:
    """Execute every solver listed in a scenario and persist the outputs.

    Solver failures are embedded per run without aborting the siblings;
    results are merged in deterministic (config-hash independent) order.
    """
    scn = load_scenario(source)
    if seed is not None:
        scn.seed = seed
    out = Path(out_dir or scn.out_dir or "out")
    out.mkdir(parents=True, exist_ok=True)

    tasks = []
    for delta in scn.deltas:
        tasks.append(("ft", delta))
    for eps in scn.epsilons:
        tasks.append(("visc", eps))

    def execute(task):
        kind, value = task
        if kind == "ft":
            return front_tracking_run(scn, value, out)
        return viscous_run(scn, value, out)

    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(execute, tasks))
    else:
        runs = [execute(t) for t in tasks]

    passes = {}
    ft_ok = [r for r in runs if r["kind"] == "front-tracking"
             and r.get("status") == "ok"]
    if ft_ok:
        passes["finite_events"] = all(r["events"] < 1e9 for r in ft_ok)
        passes["tv_bounded"] = all(
            r["sup_tv"] <= 3.0 * max(r["data_size"], 1e-12) + 1e-9
            for r in ft_ok)
        passes["functional_monotone"] = all(
            r["functional_increases"]
            <= max(0.01 * r["functional_events"], 0) for r in ft_ok)
    report = ExperimentReport(
        scenario_hash=config_hash(scn.raw),
        runs=runs,
        passes=passes,
        metadata={"seed": scn.seed, "relation": scn.relation,
                  "calibrated_c0": ft_ok[0]["c0"] if ft_ok else None,
                  "functional_note": "calibrated surrogate weights"},
    )
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n")
    if figures:
        from . import figures as fig
        fig.render_scenario_figures(scn, report, out)
    return report


def compare_limits(source, out_dir=None, jobs: int = 1,
                   figures: bool = True):
    """Compare inviscid traces across viscosity matrices.

    For each listed viscosity the table holds the front-tracking trace, the
    viscous trace estimates per epsilon, the extrapolated viscous limit, the
    discrepancy between the two, the trace under the Riemann-based relation,
    and the (viscosity-independent) full-line control value.
    """
    scn = load_scenario(source)
    if not scn.compare_viscosities:
        raise ValueError("scenario lists no viscosity matrices to compare")
    out = Path(out_dir or scn.out_dir or "out")
    out.mkdir(parents=True, exist_ok=True)

    base_sys = scn.build_system()
    v0 = scn.initial.initial_value
    vb = scn.boundary.initial_value
    cauchy = sample_fan(solve_riemann(base_sys, vb, v0), 0.0)

    rows = []
    table = []
    for item in scn.compare_viscosities:
        viscosity = item["viscosity"] if isinstance(item, dict) else item
        vlabel = (item.get("label", str(viscosity))
                  if isinstance(item, dict) else str(item))
        sys = scn.build_system(viscosity_override=viscosity)
        ft = front_tracking_run(scn, min(scn.deltas), out,
                                label=f"compare_{vlabel}",
                                viscosity_override=viscosity)
        ft_trace = np.asarray(ft.get("final_trace",
                                     [np.nan] * sys.dimension))
        traces = []
        for eps in scn.epsilons:
            vr = viscous_run(scn, eps, out,
                             label=f"compare_{vlabel}_eps{fmt(eps)}",
                             viscosity_override=viscosity)
            traces.append(np.asarray(vr.get(
                "trace_estimate", [np.nan] * sys.dimension)))
        if len(traces) >= 2:
            # linear-in-epsilon extrapolation from the two finest runs
            e1, e0 = scn.epsilons[-2], scn.epsilons[-1]
            t1, t0 = traces[-2], traces[-1]
            extrapolated = t0 + (t0 - t1) * e0 / (e1 - e0)
        elif traces:
            extrapolated = traces[-1]
        else:
            extrapolated = np.full(sys.dimension, np.nan)
        star = solve_boundary_riemann(sys, v0, vb, relation=RELATION_STAR)
        row = {
            "label": vlabel,
            "ft_trace": ft_trace,
            "viscous_traces": traces,
            "extrapolated": np.asarray(extrapolated),
            "discrepancy": float(np.abs(ft_trace - extrapolated).max()),
            "star_trace": np.asarray(star.trace),
            "cauchy_trace": np.asarray(cauchy),
        }
        table.append(row)
        rows.append([vlabel]
                    + list(ft_trace) + list(np.asarray(extrapolated))
                    + [row["discrepancy"]] + list(star.trace)
                    + list(cauchy))
    dim = base_sys.dimension
    write_csv(out / "compare.csv",
              ["viscosity"] + _state_header("ft_", dim)
              + _state_header("limit_", dim) + ["discrepancy"]
              + _state_header("star_", dim) + _state_header("cauchy_", dim),
              rows)
    if figures:
        from . import figures as fig
        fig.render_compare_figure(table, out)
    return table


# ----------------------------------------------------------------------
# Randomized interaction-estimate suites
# ----------------------------------------------------------------------

def _suite_scenario(sys_name: str, rng) -> dict:
    """One randomized small-data half-line scenario whose waves hit the
    characteristic boundary."""
    if sys_name == "burgers":
        u1 = rng.uniform(0.005, 0.04)
        u2 = -rng.uniform(u1 + 0.005, 0.06)
        ub = -rng.uniform(0.0, 0.04)
        x1 = rng.uniform(0.3, 0.8)
        x2 = x1 + rng.uniform(0.2, 0.6)
        return {
            "system": {"name": "burgers", "shift": 0.0},
            "initial": {"type": "steps", "breakpoints": [x1, x2],
                        "values": [[u1], [u1], [u2]]},
            "boundary": {"type": "constant", "value": [ub]},
            "t_end": 40.0,
            "sample_times": [1.0],
        }
    if sys_name == "lagrangian-euler":
        base = np.array([1.0, 0.0, 2.5])
        vb = base + rng.uniform(-0.02, 0.02, size=3)
        j1 = rng.uniform(-0.012, 0.012, size=3)
        j2 = rng.uniform(-0.012, 0.012, size=3)
        x1 = rng.uniform(0.3, 0.7)
        x2 = x1 + rng.uniform(0.3, 0.7)
        return {
            "system": {"name": "lagrangian-euler"},
            "initial": {"type": "steps", "breakpoints": [x1, x2],
                        "values": [base.tolist(), (base + j1).tolist(),
                                   (base + j1 + j2).tolist()]},
            "boundary": {"type": "constant", "value": vb.tolist()},
            "t_end": 3.0,
            "sample_times": [1.0],
        }
    raise ValueError(f"no interaction suite for system {sys_name!r}")


def estimate_suite(sys_name: str, seed: int, n_runs: int, delta: float,
                   out_dir=None, figures: bool = True) -> dict:
    """Randomized boundary-interaction suite.

    Runs ``n_runs`` small-data scenarios, collects the boundary-hit records
    of the characteristic family (every family when the characteristic speed
    vanishes identically, since those waves never travel), fits the
    interaction constant as the largest ratio of the measured variation
    change to the bound, and writes the scatter file.
    """
    out = Path(out_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    slack = functional_slack(delta)

    scatter = []
    aborted = 0
    for run_idx in range(n_runs):
        raw = _suite_scenario(sys_name, rng)
        raw["delta"] = delta
        raw["seed"] = seed
        raw["options"] = {"override_guard": True}
        scn = load_scenario(raw)
        sys = scn.build_system()
        from .systems import classify_boundary_field, LINEARLY_DEGENERATE
        k = classify_boundary_field(sys, sys.ref_state)
        collect_all = (k is not None
                       and sys.field_kinds[k] == LINEARLY_DEGENERATE)
        cfg = TrackerConfig(delta=delta, t_end=scn.t_end,
                            relation=scn.relation, override_guard=True,
                            c0=scn.options.get("c0"))
        try:
            traj = run_front_tracking(sys, scn.initial, scn.boundary, cfg)
        except Exception:
            aborted += 1
            continue
        for r in traj.records:
            if r.kind != BOUNDARY_HIT or not np.isfinite(r.bound):
                continue
            if not collect_all and r.hit_family != k:
                continue
            ratio = r.delta_tv / (r.bound + slack)
            scatter.append([run_idx, r.hit_strength,
                            max(-r.hit_speed, 0.0), abs(r.pre_char_size),
                            r.delta_tv, r.bound, ratio])
    write_csv(out / f"estimate_scatter_{sys_name}_delta{fmt(delta)}.csv",
              ["run", "strength", "speed_neg_part", "char_size",
               "delta_tv", "bound", "ratio"], scatter)
    fitted = max((row[-1] for row in scatter), default=0.0)
    summary = {
        "system": sys_name, "seed": seed, "n_runs": n_runs, "delta": delta,
        "hits": len(scatter), "aborted": aborted,
        "fitted_constant": fitted,
    }
    (out / f"estimate_summary_{sys_name}_delta{fmt(delta)}.json").write_text(
        json.dumps(summary, sort_keys=True, indent=1) + "\n")
    if figures and scatter:
        from . import figures as fig
        fig.render_estimate_figure(scatter, sys_name, out)
    return summary
