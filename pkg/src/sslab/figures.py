"""Figure rendering (PNG files, headless backend).

Three views cover what the text reports cannot show: where the collision
locus sits in the parameter plane, how the metric length of rays into a
puncture grows or shrinks, and the shape of a sampled mesh under one of the
coordinate-dropping projections.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import ParamError  # noqa: E402
from .locus import LocusFinding  # noqa: E402
from .mero import is_infinity  # noqa: E402
from .mesh import _DROPS, SurfaceMesh  # noqa: E402

_DPI = 130


def locus_figure(finding: LocusFinding, path: str, title: str = "") -> str:
    """Scatter the collision locus over its scan window."""
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    for chain in finding.curves:
        pts = np.asarray(chain, dtype=complex)
        ax.plot(pts.real, pts.imag, ".-", ms=3, lw=0.8)
    if finding.points:
        pts = np.array([p.z for p in finding.points], dtype=complex)
        ax.plot(pts.real, pts.imag, "o", ms=6, mfc="none")
        for p in finding.points:
            if p.index is not None:
                ax.annotate(f"{p.index:+d}", (p.z.real, p.z.imag),
                            textcoords="offset points", xytext=(5, 4), fontsize=8)
    w = finding.window
    if finding.is_empty and w is not None:
        # nothing to autoscale around: frame the scanned window itself
        if w.shape == "rect":
            ax.set_xlim(w.x0, w.x1)
            ax.set_ylim(w.y0, w.y1)
        else:
            r = min(w.r_out, 10.0)
            ax.set_xlim(w.center.real - r, w.center.real + r)
            ax.set_ylim(w.center.imag - r, w.center.imag + r)
    else:
        ax.margins(0.15)
    if finding.is_empty:
        ax.text(0.5, 0.5, "no collision points", transform=ax.transAxes,
                ha="center", va="center", color="0.45")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title(title or f"collision locus: {finding.kind}")
    ax.set_aspect("equal", adjustable="box")
    ax.grid(True, lw=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def ray_figure(probes, path: str, title: str = "") -> str:
    """Metric length of each dyadic step toward the punctures, log scale.

    Divergent ends show flat or growing staircases; an incomplete end decays
    geometrically.  ``probes`` is an iterable of completeness reports.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    drew = False
    for rep in probes:
        tag = "inf" if is_infinity(rep.puncture) else f"{rep.puncture:.3g}"
        for ray in rep.rays:
            steps = np.arange(1, len(ray.increments) + 1)
            ax.semilogy(steps, ray.increments, ".-", lw=0.9, ms=3,
                        label=f"{tag} angle {ray.angle:g} ({ray.verdict})")
            drew = True
    if not drew:
        ax.text(0.5, 0.5, "no usable rays", transform=ax.transAxes,
                ha="center", va="center", color="0.45")
    ax.set_xlabel("dyadic step")
    ax.set_ylabel("metric length of step")
    ax.set_title(title or "completeness probe")
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    if drew:
        ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def wireframe_figure(mesh: SurfaceMesh, path: str, projection: str = "drop-x4",
                     title: str = "") -> str:
    """Row/column wireframe of the mesh under a coordinate-dropping projection."""
    if projection not in _DROPS:
        raise ParamError(
            f"wireframe wants a drop-x* projection, got {projection!r}"
        )
    keep = [k for k in range(4) if k != _DROPS[projection]]
    rows, cols = mesh.grid_index.shape
    pts = np.full((rows, cols, 3), np.nan)
    ok = mesh.grid_index >= 0
    pts[ok] = mesh.positions[mesh.grid_index[ok]][:, keep]

    fig = plt.figure(figsize=(6.0, 5.4))
    ax = fig.add_subplot(111, projection="3d")
    stride = max(1, rows // 48)
    for i in range(0, rows, stride):
        ax.plot(pts[i, :, 0], pts[i, :, 1], pts[i, :, 2], lw=0.4, color="tab:blue")
    for j in range(0, cols, max(1, cols // 48)):
        ax.plot(pts[:, j, 0], pts[:, j, 1], pts[:, j, 2], lw=0.4, color="tab:orange")
    labels = [f"x{k + 1}" for k in keep]
    ax.set_xlabel(labels[0])
    ax.set_ylabel(labels[1])
    ax.set_zlabel(labels[2])
    ax.set_title(title or projection)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
