"""Figure rendering for reports (PNG files next to the delimited output)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .iid import TauAnalysis, tau_table
from .noniid import fourth_moment_weights


def render_tau_curve(
    a: Sequence[float],
    b: Sequence[float],
    analysis: TauAnalysis | None,
    path: str | Path,
    points: int = 512,
) -> Path:
    """Plot tau over its root-search window with located roots marked."""
    xs, values = tau_table(a, b, points)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.plot(xs, values, lw=1.5)
    if analysis is not None and analysis.roots:
        root_x = [r.x for r in analysis.roots]
        ax.plot(root_x, [0.0] * len(root_x), "o", ms=6, mfc="none", mec="crimson")
        for r in analysis.roots:
            ax.annotate(
                f"{r.x:.4g} ({r.multiplicity.value})",
                (r.x, 0.0),
                textcoords="offset points",
                xytext=(4, 8),
                fontsize=8,
            )
    ax.set_xlabel("x")
    ax.set_ylabel("tau(x)")
    ax.set_title("tau(x) = sum a_j^(2x) - sum b_j^(2x)")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_weight_circle(
    m1: float, m2: float, path: str | Path, step_degrees: float = 0.5
) -> Path:
    """Plot min(w1, w2) against the coefficient angle on the unit circle."""
    angles = np.arange(0.0, 360.0, step_degrees)
    mins = []
    for theta in np.deg2rad(angles):
        alpha, beta = float(np.cos(theta)), float(np.sin(theta))
        _, w1, w2 = fourth_moment_weights(m1, m2, alpha, beta)
        mins.append(min(w1, w2))
    mins = np.asarray(mins)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    finite = np.isfinite(mins)
    clipped = np.clip(mins, -10, 10)
    ax.plot(angles[finite], clipped[finite], lw=1.0)
    ax.axhline(1.0, color="crimson", lw=0.8, ls="--", label="min weight = 1")
    ax.set_xlabel("angle of (alpha, beta), degrees")
    ax.set_ylabel("min(w1, w2), clipped to [-10, 10]")
    ax.set_title(f"fourth-moment weights, m1={m1:g}, m2={m2:g}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
