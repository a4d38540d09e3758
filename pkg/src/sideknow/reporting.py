"""Figure rendering for the report-producing CLI paths.

Figures are written next to the delimited output; everything uses the Agg
backend so headless runs work.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .experiment import SETUPS, ExperimentResult

_SETUP_LABELS = {
    "mlr": "linear regression",
    "ridge": "ridge",
    "ridge_polygonal": "ridge + polygonal",
    "ridge_quadratic": "ridge + quadratic",
    "ridge_conic": "ridge + conic",
}


def render_experiment_figure(result: ExperimentResult, path) -> Path:
    """Median test RMSE per setup with interquartile whiskers vs train size."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    sizes = list(result.config.train_sizes)
    offsets = {s: i for i, s in enumerate(SETUPS)}
    width = 0.14
    for setup in SETUPS:
        rows = [r for r in result.summary if r.setup == setup]
        rows.sort(key=lambda r: r.train_size)
        xs = [sizes.index(r.train_size) + (offsets[setup] - 2) * width for r in rows]
        med = [r.q50 for r in rows]
        lo = [r.q50 - r.q25 for r in rows]
        hi = [r.q75 - r.q50 for r in rows]
        ax.errorbar(
            xs, med, yerr=[lo, hi], fmt="o", capsize=3, label=_SETUP_LABELS[setup]
        )
    ax.set_xticks(range(len(sizes)))
    ax.set_xticklabels([str(s) for s in sizes])
    ax.set_xlabel("training sample size")
    ax.set_ylabel("test RMSE (median, 25th-75th quantiles)")
    ax.set_title(f"side-knowledge study ({result.config.scale_preset} preset)")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_verify_figure(results, path) -> Path:
    """Horizontal pass/fail bar chart for a verification suite run."""
    names = [r.name for r in results]
    fig_height = max(2.0, 0.4 * len(names) + 1.0)
    fig, ax = plt.subplots(figsize=(7.0, fig_height))
    ys = range(len(names))
    colors = ["#2a9d2a" if r.passed else "#cc3311" for r in results]
    ax.barh(list(ys), [1.0] * len(names), color=colors, alpha=0.8)
    for y, r in zip(ys, results):
        ax.text(0.01, y, f"{'PASS' if r.passed else 'FAIL'}  {r.name}", va="center", fontsize=8)
    ax.set_yticks([])
    ax.set_xticks([])
    ax.set_xlim(0, 1)
    ax.invert_yaxis()
    ax.set_title("verification suite")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
