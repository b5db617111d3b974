"""Figure rendering for report outputs.

Uses the non-interactive backend so figures render to files in headless
runs, next to the delimited data they visualize.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["render_margin_figure", "render_sweep_figure",
           "render_series_figure"]


def render_margin_figure(report, path) -> str:
    """Log-log plot of both sides and the pointwise ratio of a witness check."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    ax1.loglog(report.radii, report.lhs, label="operator side")
    ax1.loglog(report.radii, report.rhs_shape, label="target shape")
    ax1.set_ylabel("value")
    ax1.legend()
    ax1.set_title(f"{report.witness_kind} witness, verdict: {report.verdict}")
    ax2.loglog(report.radii, report.margins, color="tab:green")
    ax2.axhline(report.C_star, ls="--", color="gray",
                label=f"C* = {report.C_star:.4g}")
    ax2.set_xlabel("r")
    ax2.set_ylabel("ratio")
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)


def render_sweep_figure(rows, x_key, y_key, value_key, path) -> str:
    """Scatter of a swept quantity over a 2d parameter grid."""
    xs = np.array([float(r[x_key]) for r in rows])
    ys = np.array([float(r[y_key]) for r in rows])
    raw = [r[value_key] for r in rows]
    if all(isinstance(v, (int, float)) or _floatable(v) for v in raw):
        vals = np.array([float(v) for v in raw])
        labels = None
    else:
        labels = sorted(set(map(str, raw)))
        vals = np.array([labels.index(str(v)) for v in raw], dtype=float)
    fig, ax = plt.subplots(figsize=(7, 6))
    sc = ax.scatter(xs, ys, c=vals, cmap="viridis", s=60)
    cb = fig.colorbar(sc, ax=ax)
    if labels is not None:
        cb.set_ticks(range(len(labels)))
        cb.set_ticklabels(labels)
    ax.set_xlabel(x_key)
    ax.set_ylabel(y_key)
    ax.set_title(value_key)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)


def render_series_figure(x, y, path, xlabel="x", ylabel="y",
                         loglog=True, title="") -> str:
    fig, ax = plt.subplots(figsize=(7, 5))
    (ax.loglog if loglog else ax.plot)(np.asarray(x), np.asarray(y))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)


def _floatable(v) -> bool:
    try:
        float(v)
        return True
    except (TypeError, ValueError):
        return False
