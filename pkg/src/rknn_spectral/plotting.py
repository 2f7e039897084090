"""Static SVG figures. Output is byte-stable for identical inputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SVG_RC = {"svg.hashsalt": "rknn-spectral", "svg.fonttype": "none"}


def _save(fig, path):
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def scatter(points, labels, path, isolated=(), title=None):
    """2-D scatter colored by cluster; isolated vertices drawn as black crosses."""
    points = np.asarray(points)
    labels = np.asarray(labels)
    fig, ax = plt.subplots(figsize=(6, 6))
    cmap = plt.get_cmap("tab10" if labels.max(initial=0) < 10 else "tab20")
    ax.scatter(points[:, 0], points[:, 1], c=labels % cmap.N, cmap=cmap, vmin=0, vmax=cmap.N - 1,
               s=8, linewidths=0)
    iso = np.asarray(isolated, dtype=int)
    if iso.size:
        ax.scatter(points[iso, 0], points[iso, 1], marker="x", c="black", s=18, linewidths=0.8,
                   label="isolated")
        ax.legend(loc="upper right", fontsize=8)
    ax.set_aspect("equal", adjustable="datalim")
    if title:
        ax.set_title(title, fontsize=10)
    _save(fig, path)


def noise_curve(rows, path, metric="ari"):
    """Mean +/- std of ``metric`` against noise fraction, one line per dataset."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in sorted({r["dataset"] for r in rows}):
        sub = sorted((r for r in rows if r["dataset"] == name), key=lambda r: r["noise"])
        x = [r["noise"] * 100 for r in sub]
        ax.errorbar(x, [r[f"{metric}_mean"] for r in sub], yerr=[r[f"{metric}_std"] for r in sub],
                    marker="o", capsize=3, label=name)
    ax.set_xlabel("noise (% of N)")
    ax.set_ylabel(metric.upper().replace("_", " "))
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=8)
    _save(fig, path)


def score_bars(rows, path):
    """Grouped bars of mean ACC / ARI / NMI (with std whiskers) per dataset and C mode."""
    keys = [f"{r['dataset']} ({r['c_mode']})" for r in rows]
    x = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(rows)), 4))
    for k, m in enumerate(("acc", "ari", "nmi")):
        ax.bar(x + (k - 1) * 0.27, [r[f"{m}_mean"] for r in rows], 0.27,
               yerr=[r[f"{m}_std"] for r in rows], capsize=2, label=m.upper())
    ax.set_xticks(x)
    ax.set_xticklabels(keys, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
