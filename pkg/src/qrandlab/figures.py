"""Figure rendering for experiment reports.

Each command gets one summary figure written next to its CSV/JSON
output.  Rendering is headless (Agg) and intentionally plain: a
histogram or trend line of the per-trial column, with reference lines
for the bounds the run was checking.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reports import ExperimentReport, atomic_write_bytes


def _column(report: ExperimentReport, name: str) -> np.ndarray:
    idx = report.columns.index(name)
    return np.array([row[idx] for row in report.rows], dtype=float)


def _hist(ax, values, label):
    ax.hist(values, bins=min(40, max(8, len(values) // 10 + 1)), color="#396a93", alpha=0.85)
    ax.set_xlabel(label)
    ax.set_ylabel("count")


def render_report_figure(report: ExperimentReport, path: str) -> None:
    cmd = report.command
    panels = 2 if cmd == "hide" else 1
    fig, axes = plt.subplots(1, panels, figsize=(6.0 * panels, 3.8), constrained_layout=True)
    ax = axes[0] if panels > 1 else axes
    if cmd == "randomize":
        _hist(ax, _column(report, "deviation"), "scaled sup-norm deviation")
        ax.axvline(report.stats["epsilon_emp"], color="#b0413e", ls="--", label="max")
        ax.legend()
    elif cmd == "pqc":
        _hist(ax, _column(report, "deviation"), "per-input scaled deviation")
        ax.set_title(f"holevo quantity {report.stats['chi_bits']:.3g} bits")
    elif cmd == "hide":
        _hist(ax, _column(report, "delta"), "overlap budget")
        ax.axvline(report.stats["expected_delta"], color="#b0413e", ls="--", label="expected")
        ax.legend()
        _hist(axes[1], _column(report, "fidelity"), "decoded fidelity")
        axes[1].axvline(report.stats["fidelity_floor"], color="#b0413e", ls="--", label="floor")
        axes[1].legend()
    elif cmd == "lock":
        _hist(ax, _column(report, "final_entropy"), "restart final entropy (bits)")
        ax.axvline(report.stats["best_entropy"], color="#b0413e", ls="--", label="best")
        ax.legend()
    elif cmd == "uncertainty":
        _hist(ax, _column(report, "best_entropy"), "per-trial entropy minimum (bits)")
    elif cmd == "bounds":
        _hist(ax, _column(report, "deviation"), "trace-norm deviation")
        ax.axvline(report.stats["bound"], color="#b0413e", ls="--", label="sqrt(d/n)")
        ax.legend()
    elif cmd == "net":
        _hist(ax, _column(report, "nearest_distance"), "nearest-neighbor distance")
        ax.axvline(report.params.get("eps", 0.0), color="#b0413e", ls="--", label="radius")
        ax.legend()
    else:
        _hist(ax, np.array([float(v) for v in report.stats.values()]), "statistic")
    fig.suptitle(f"{cmd} d={report.params.get('d', '?')} seed={report.params.get('seed', '?')}")
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=120)
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())
