"""Matplotlib figure rendering for reports and solver traces.

Figures are written as PNG files next to the delimited JSON output when
the CLI is invoked with ``--figures DIR``; nothing here is interactive.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_report_figures(report: dict, outdir) -> list:
    """Summary panels: curvature per vertex, lengths, angles, heights."""
    os.makedirs(outdir, exist_ok=True)
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))

    ids = [v["id"] for v in report["vertices"]]
    curvatures = [v["K"] for v in report["vertices"]]
    axes[0, 0].bar(range(len(ids)), curvatures, color="#4878a8")
    axes[0, 0].set_xticks(range(len(ids)))
    axes[0, 0].set_xticklabels(ids, fontsize=7)
    axes[0, 0].axhline(0.0, color="k", lw=0.6)
    axes[0, 0].set_title("curvature K per vertex")

    lengths = [e["length"] for e in report["edges"]]
    axes[0, 1].hist(lengths, bins=max(5, len(lengths) // 3), color="#6aa66a")
    axes[0, 1].set_title("edge lengths")

    angles = [a for f in report["faces"] for a in f["angles"]]
    axes[1, 0].hist(angles, bins=12, color="#a8784a")
    axes[1, 0].set_title("corner angles")

    heights = [h for f in report["faces"] for h in f["heights"]]
    axes[1, 1].hist(heights, bins=12, color="#8a6aa6")
    axes[1, 1].axvline(0.0, color="k", lw=0.6)
    axes[1, 1].set_title("dual edge heights")

    fig.suptitle(f"{report['background']} surface report")
    fig.tight_layout()
    path = os.path.join(outdir, "report_summary.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]


def render_trace_figure(trace: dict, outdir) -> list:
    """Convergence plot of a prescribed-curvature solve."""
    os.makedirs(outdir, exist_ok=True)
    records = trace["iterations"]
    its = [r["iteration"] for r in records]
    residuals = [max(r["residual_norm"], 1e-17) for r in records]
    steps = [r["step_length"] for r in records]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.semilogy(its, residuals, "o-", color="#4878a8")
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("max |K - K*|")
    ax1.set_title("residual")
    ax2.plot(its, steps, "s-", color="#a8784a")
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("step length")
    ax2.set_ylim(-0.05, 1.1)
    ax2.set_title("accepted steps")
    fig.tight_layout()
    path = os.path.join(outdir, "solve_trace.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]
