"""Figure rendering for the report path.

Every figure is written next to the delimited output it illustrates; the
delimited files remain the source of truth for all quantitative claims.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path: Path):
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_scenario_figures(scn, report, out: Path):
    ft_runs = [r for r in report.runs
               if r["kind"] == "front-tracking" and r.get("status") == "ok"]
    visc_runs = [r for r in report.runs
                 if r["kind"] == "viscous" and r.get("status") == "ok"]

    if ft_runs:
        traj = ft_runs[0]["trajectory"]
        dim = traj.sys.dimension
        fig, axes = plt.subplots(dim, 1, figsize=(7, 2.2 * dim),
                                 sharex=True, squeeze=False)
        span = max((seg.positions.max() if len(seg.positions) else 1.0)
                   for seg in traj.segments) + 1.0
        grid = np.linspace(0.0, span, 600)
        for t in scn.sample_times:
            t = min(t, traj.t_end)
            vals = np.array([traj.eval(t, x) for x in grid])
            for c in range(dim):
                axes[c, 0].plot(grid, vals[:, c], lw=1.2, label=f"t={t:g}")
        for c in range(dim):
            axes[c, 0].set_ylabel(f"v{c + 1}")
            axes[c, 0].legend(fontsize=8)
        axes[-1, 0].set_xlabel("x")
        fig.suptitle("front-tracking profiles")
        _save(fig, out / "profiles.png")

        fig, ax = plt.subplots(figsize=(7, 3))
        for r in ft_runs:
            snaps = r["trajectory"].functional
            ax.step([s.time for s in snaps], [s.total for s in snaps],
                    where="post", label=r["label"])
        ax.set_xlabel("t")
        ax.set_ylabel("functional")
        ax.legend(fontsize=8)
        _save(fig, out / "functional.png")

    if visc_runs:
        fig, ax = plt.subplots(figsize=(7, 3))
        for r in visc_runs:
            sol = r["solution"]
            for c in range(sol.profiles.shape[2]):
                ax.plot(sol.x, sol.profiles[-1][:, c], lw=1.0,
                        label=f"{r['label']} v{c + 1}")
        ax.set_xlabel("x")
        ax.set_ylabel("v")
        ax.legend(fontsize=7)
        ax.set_title("viscous profiles at final time")
        _save(fig, out / "viscous_profiles.png")


def render_fan_figure(xi, samples, out_path: Path):
    samples = np.asarray(samples)
    fig, ax = plt.subplots(figsize=(6.5, 3))
    for c in range(samples.shape[1]):
        ax.plot(xi, samples[:, c], lw=1.2, label=f"v{c + 1}")
    ax.set_xlabel("x/t")
    ax.set_ylabel("state")
    ax.legend(fontsize=8)
    _save(fig, out_path)


def render_layer_figure(profile, out_path: Path):
    fig, ax = plt.subplots(figsize=(6.5, 3))
    y = np.maximum(profile.y, profile.y[1] if profile.y.size > 1 else 1e-6)
    for c in range(profile.w.shape[1]):
        ax.semilogx(y, profile.w[:, c], lw=1.2, label=f"w{c + 1}")
    ax.set_xlabel("y")
    ax.set_ylabel("layer state")
    ax.legend(fontsize=8)
    _save(fig, out_path)


def render_compare_figure(table, out: Path):
    labels = [row["label"] for row in table]
    dim = len(table[0]["ft_trace"])
    x = np.arange(len(labels))
    width = 0.35
    fig, axes = plt.subplots(dim, 1, figsize=(7, 2.2 * dim), squeeze=False)
    for c in range(dim):
        ax = axes[c, 0]
        ax.bar(x - width / 2, [row["ft_trace"][c] for row in table],
               width, label="front tracking")
        ax.bar(x + width / 2, [row["extrapolated"][c] for row in table],
               width, label="viscous limit")
        ax.set_xticks(x)
        ax.set_xticklabels(labels, fontsize=8)
        ax.set_ylabel(f"trace v{c + 1}")
        ax.legend(fontsize=8)
    fig.suptitle("trace dependence on the viscosity matrix")
    _save(fig, out / "compare.png")


def render_estimate_figure(scatter, sys_name: str, out: Path):
    scatter = np.asarray(scatter, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    bounds = scatter[:, 5]
    dtv = np.abs(scatter[:, 4])
    ax.loglog(np.maximum(bounds, 1e-16), np.maximum(dtv, 1e-16), "o",
              ms=4, alpha=0.6)
    lim = max(bounds.max(), dtv.max(), 1e-12)
    line = np.geomspace(1e-12, lim * 2, 50)
    ax.loglog(line, line, "k--", lw=0.8, label="ratio 1")
    ax.set_xlabel("bound  |s| ([speed]- + |char size|)")
    ax.set_ylabel("|variation change|")
    ax.legend(fontsize=8)
    ax.set_title(f"boundary interaction estimate: {sys_name}")
    _save(fig, out / f"estimate_scatter_{sys_name}.png")
