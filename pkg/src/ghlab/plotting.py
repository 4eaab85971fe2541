"""Figures for the CSV series the CLI writes. Rendering is headless (Agg)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
}


def figsize(width=4.5):
    golden = (math.sqrt(5) - 1) / 2
    return width, width * golden


def plot_series(path, x, curves: dict, xlabel: str, ylabel: str = "", title: str = "",
                hlines: dict | None = None, vlines: dict | None = None):
    """Line plot of ``curves`` (label -> values) against ``x``, saved to ``path``."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        for label, ys in curves.items():
            ax.plot(x, ys, marker=".", lw=1.2, label=label)
        for label, y in (hlines or {}).items():
            ax.axhline(y, ls="--", lw=0.8, color="gray")
            ax.annotate(label, (x[0], y), textcoords="offset points", xytext=(2, 2), fontsize=7)
        for label, xv in (vlines or {}).items():
            ax.axvline(xv, ls=":", lw=0.8, color="gray")
        ax.set_xlabel(xlabel)
        if ylabel:
            ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(curves) > 1:
            ax.legend(frameon=False)
        fig.tight_layout()
        # fixed metadata keeps repeated renders byte-identical
        fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)
        plt.close(fig)
