"""Figures written next to the CLI reports (Agg backend, files only)."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

from .polyhedron import TrapezohedronGeometry  # noqa: E402
from .volume import SchlafliReport  # noqa: E402


def projection_figure(g: TrapezohedronGeometry, path) -> Path:
    """Vertical projection: the quadrilateral P, the circles C_i and the points Q_i."""
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    P = np.array(g.P + [g.P[0]])
    ax.plot(P.real, P.imag, color="black", lw=1.2)
    for i, (c, holed) in enumerate(zip(g.C, g.holed)):
        ax.add_patch(Circle((c.center.real, c.center.imag), c.radius, fill=False, ls="--" if holed else "-", lw=0.8, color=f"C{i}"))
        ax.annotate(f"P{i + 1}", (g.P[i].real, g.P[i].imag), textcoords="offset points", xytext=(4, 4), fontsize=8)
    Q = np.array(g.Q)
    ax.scatter(Q.real, Q.imag, s=14, color="crimson", zorder=3, label="Q")
    ax.scatter([0], [0], s=14, color="black", zorder=3, label="O")
    ax.set_aspect("equal")
    ax.autoscale_view()
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title("b = (" + ", ".join(f"{v:.3g}" for v in g.b.as_list()) + ")", fontsize=9)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def schlafli_figure(report: SchlafliReport, path) -> Path:
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 5), sharex=True, gridspec_kw={"height_ratios": [2, 1]})
    top.plot(report.s, report.dV, label="dV/ds", lw=1.5)
    top.plot(report.s, report.predicted, label="-1/2 sum l dalpha/ds", lw=1, ls="--")
    top.legend(fontsize=8)
    top.set_ylabel("derivative")
    bottom.semilogy(report.s, np.maximum(report.rel_error, 1e-17), lw=0.8, color="C3")
    bottom.set_ylabel("relative error")
    bottom.set_xlabel("s")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def schlafli_csv(report: SchlafliReport, path) -> Path:
    out = Path(path)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "dV", "predicted", "rel_error"])
        for row in report.rows():
            w.writerow([f"{v:.17g}" for v in row])
    return out
