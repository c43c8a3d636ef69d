"""Figures rendered next to CLI reports.

All figures use the non-interactive Agg backend and a shared rcParams
dictionary; call :func:`set_config` before plotting.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib as mpl
import matplotlib.pyplot as plt
import numpy as np

report_style = {
    "font.family": "serif",
    "font.size": 10,
    "axes.titlesize": "medium",
    "axes.labelsize": "medium",
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.axisbelow": True,
    "axes.grid": True,
    "grid.linewidth": 0.5,
    "grid.linestyle": "-",
    "grid.alpha": 0.5,
    "legend.frameon": False,
    "legend.fontsize": "small",
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "figure.figsize": (5.0, 3.4),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    "image.cmap": "RdYlBu",
}


def set_config():
    mpl.rcParams.update(report_style)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps reruns byte-identical
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def theta_scan_figure(thetas, gammas, path, gamma_ref: float | None = None, k: int | None = None) -> Path:
    """Inclusion constant along a θ-family, with the closed-form reference line."""
    set_config()
    fig, ax = plt.subplots()
    ax.plot(thetas, gammas, marker="o", markersize=2.5, label=r"$\gamma_X(\theta)$")
    if gamma_ref is not None:
        ax.axhline(gamma_ref, color="k", linestyle="--", linewidth=0.8, label=r"$\gamma(k)$")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel(r"$\gamma$")
    if k is not None:
        ax.set_title(f"θ-scan, k = {k}")
    ax.legend(loc="lower right")
    return _save(fig, path)


def gamma_histogram(gammas, path, gamma_ref: float | None = None, bins: int = 40,
                    title: str | None = None) -> Path:
    """Histogram of observed inclusion constants of sampled extreme points."""
    set_config()
    fig, ax = plt.subplots()
    ax.hist(np.asarray(gammas, dtype=float), bins=bins, color="C0", alpha=0.8)
    if gamma_ref is not None:
        ax.axvline(gamma_ref, color="k", linestyle="--", linewidth=0.8, label=r"$\gamma(k)$")
        ax.legend(loc="upper left")
    ax.set_xlabel(r"$\gamma_X$")
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def bloch_figure(vectors, path, labels=None) -> Path:
    """Bloch vectors of dichotomic qubit measurements drawn in the unit ball."""
    set_config()
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    fig = plt.figure(figsize=(4.0, 4.0))
    ax = fig.add_subplot(projection="3d")
    u, v = np.mgrid[0:2 * np.pi:30j, 0:np.pi:15j]
    ax.plot_wireframe(np.cos(u) * np.sin(v), np.sin(u) * np.sin(v), np.cos(v),
                      color="0.8", linewidth=0.4)
    for i, x in enumerate(V):
        ax.quiver(0, 0, 0, *x, color=f"C{i % 10}", arrow_length_ratio=0.1)
        lab = labels[i] if labels is not None else f"$a_{{{i + 1}}}$"
        ax.text(*(1.1 * x), lab)
    ax.set_box_aspect((1, 1, 1))
    for set_lim in (ax.set_xlim, ax.set_ylim, ax.set_zlim):
        set_lim(-1, 1)
    return _save(fig, path)


def seesaw_figure(histories, path, target: float | None = None) -> Path:
    """Objective value per see-saw round, one line per restart."""
    set_config()
    fig, ax = plt.subplots()
    for h in histories:
        ax.plot(np.arange(len(h)), h, linewidth=0.8, alpha=0.7)
    if target is not None:
        ax.axhline(target, color="k", linestyle="--", linewidth=0.8, label="reference")
        ax.legend(loc="lower right")
    ax.set_xlabel("round")
    ax.set_ylabel(r"$\lambda_{\max}$")
    return _save(fig, path)


def relaxation_figure(levels, values, path, witness: float | None = None) -> Path:
    """Relaxation upper bounds by level, against the best known witness value."""
    set_config()
    fig, ax = plt.subplots()
    ax.plot(levels, values, marker="s", label="relaxation bound")
    if witness is not None:
        ax.axhline(witness, color="k", linestyle="--", linewidth=0.8, label="witness value")
    ax.set_xticks(list(levels))
    ys = list(values) + ([witness] if witness is not None else [])
    lo, hi = min(ys), max(ys)
    if hi - lo < 1e-2:
        # values agreeing to solver accuracy should look flat, not zoomed to noise
        mid = 0.5 * (lo + hi)
        ax.set_ylim(mid - 5e-3, mid + 5e-3)
    ax.ticklabel_format(axis="y", useOffset=False, style="plain")
    ax.set_xlabel("level")
    ax.set_ylabel("value")
    ax.legend(loc="upper right")
    return _save(fig, path)
