"""Quad meshes of the immersed surface, mesh export, and a scan for
self-intersections on the four-dimensional coordinates.

A mesh is sampled on one of two chart types: a log-polar rectangle
(log r, theta) when the domain is a punctured plane, or a Cartesian square
when the only puncture sits at infinity.  Vertex positions come from
integrating the tangent components along a spanning tree of grid edges, so
no global unfolding ever happens: if the surface has a translation period
around the annulus, the seam stays open, the mesh lives on the cover
(optionally several sheets), and the per-cut offset is recorded instead of
being silently glued.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Settings
from .errors import ParamError, QuadratureError
from .locus import Window
from .mero import is_infinity
from .weierstrass import (
    PathSpec,
    WeierstrassData,
    circle_integral,
    immerse,
    xz_components,
)

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GAUSS_NODES = (_GAUSS_NODES + 1.0) / 2.0
_GAUSS_WEIGHTS = _GAUSS_WEIGHTS / 2.0


# ---------------------------------------------------------------------------
# chart + mesh containers


@dataclass(frozen=True)
class MeshChart:
    """Parameter rectangle the mesh samples.

    kind "log-annulus": node (i, j) sits at exp(s_i + i*theta_j); the
    theta axis may span several sheets of the cover.  kind "square": node
    (i, j) sits at (x_j + i*y_i).
    """

    kind: str  # "log-annulus" | "square"
    rows: tuple[float, ...]  # s values, or y values
    cols: tuple[float, ...]  # theta values, or x values
    sheets: int = 1

    def grid(self) -> np.ndarray:
        rows = np.asarray(self.rows)[:, None]
        cols = np.asarray(self.cols)[None, :]
        if self.kind == "log-annulus":
            return np.exp(rows + 1j * cols)
        return cols + 1j * rows


@dataclass(frozen=True)
class SurfaceMesh:
    chart: MeshChart
    z: np.ndarray  # (nv,) complex vertex parameters
    positions: np.ndarray  # (nv, 4) float
    density: np.ndarray  # (nv,) float metric density at the vertex
    faces: np.ndarray  # (nf, 4) int, counterclockwise in the chart
    grid_index: np.ndarray  # (rows, cols) int, -1 where the node was masked
    cut_offsets: tuple = ()  # one 4-vector per open cut (annulus seam)
    seam_closed: bool = False
    basepoint: complex = 0j

    @property
    def n_vertices(self) -> int:
        return int(self.z.shape[0])

    def edge_index_pairs(self) -> np.ndarray:
        """Unique vertex index pairs joined by a quad edge."""
        f = self.faces
        e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 3]], f[:, [3, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)


# ---------------------------------------------------------------------------
# sampling


def _comp_hazards(data: WeierstrassData) -> list[complex]:
    """Finite points where some tangent component actually blows up."""
    pts: list[complex] = []
    for comp in xz_components(data):
        try:
            inv = comp.zeros_and_poles()
        except Exception:
            continue
        for p, _ in inv.finite_poles():
            if all(abs(p - q) > 1e-9 * (1.0 + abs(p)) for q in pts):
                pts.append(p)
        for p in inv.essential:
            if not is_infinity(p) and all(abs(p - q) > 1e-9 * (1.0 + abs(p)) for q in pts):
                pts.append(p)
    for p in data.domain.finite_punctures():
        if all(abs(p - q) > 1e-9 * (1.0 + abs(p)) for q in pts):
            pts.append(p)
    return pts


def _chart_for(data: WeierstrassData, window, resolution: int, sheets: int) -> MeshChart:
    punctured_plane = bool(data.domain.finite_punctures())
    if window is not None and getattr(window, "shape", None) == "annulus":
        punctured_plane = True
        r_in, r_out = window.r_in, window.r_out
    elif window is not None and getattr(window, "shape", None) == "rect":
        punctured_plane = False
        x_lo, x_hi, y_lo, y_hi = window.x_lo, window.x_hi, window.y_lo, window.y_hi
    elif window is not None and getattr(window, "shape", None) == "disc":
        punctured_plane = False
        h = window.radius / math.sqrt(2.0)
        c = complex(window.center)
        x_lo, x_hi, y_lo, y_hi = c.real - h, c.real + h, c.imag - h, c.imag + h
    elif window is not None:
        raise ParamError(f"unsupported mesh window {window!r}")
    elif punctured_plane:
        r_in, r_out = 1e-2, 1e2
    else:
        x_lo, x_hi, y_lo, y_hi = -5.0, 5.0, -5.0, 5.0

    if punctured_plane:
        rows = tuple(np.linspace(math.log(r_in), math.log(r_out), resolution))
        dtheta = 2.0 * math.pi / resolution
        # half-step offset keeps rays off theta = 0 features (e.g. roots of
        # unity at the knoid punctures)
        cols = tuple(dtheta / 2.0 + dtheta * np.arange(resolution * sheets))
        return MeshChart("log-annulus", rows, cols, sheets)
    if sheets != 1:
        raise ParamError("sheets > 1 only makes sense on an annulus chart")
    return MeshChart(
        "square",
        tuple(np.linspace(y_lo, y_hi, resolution)),
        tuple(np.linspace(x_lo, x_hi, resolution)),
        1,
    )


def _gauss_panel(comps, z_from: np.ndarray, z_to: np.ndarray) -> np.ndarray:
    """2 Re of one Gauss panel of x_z along straight chords, vectorised."""
    z_from = np.asarray(z_from)
    z_to = np.asarray(z_to)
    dz = z_to - z_from
    pts = z_from[..., None] + dz[..., None] * _GAUSS_NODES
    out = np.empty(np.shape(z_from) + (4,), dtype=float)
    with np.errstate(all="ignore"):
        for k, comp in enumerate(comps):
            vals = comp(pts)
            out[..., k] = 2.0 * ((vals @ _GAUSS_WEIGHTS) * dz).real
    return out


def _refine_edge(comps, a: complex, b: complex, depth: int = 22) -> np.ndarray:
    one = _gauss_panel(comps, a, b)
    mid = 0.5 * (a + b)
    two = _gauss_panel(comps, a, mid) + _gauss_panel(comps, mid, b)
    err = np.max(np.abs(one - two))
    if depth <= 0 or not np.isfinite(err) or err <= 1e-11 * (1.0 + np.max(np.abs(two))):
        return two
    return _refine_edge(comps, a, mid, depth - 1) + _refine_edge(comps, mid, b, depth - 1)


def _edge_increments(comps, z_from: np.ndarray, z_to: np.ndarray, usable=None) -> np.ndarray:
    """Chord integrals of x_z for a whole family of grid edges.

    One Gauss panel is enough on most edges; a two-panel error estimate
    flags the few that pass near an expression pole (edges skirting a masked
    hole) and those are bisected adaptively.  Edges with a masked endpoint
    are never walked, so ``usable`` exempts them from refinement.
    """
    one = _gauss_panel(comps, z_from, z_to)
    mid = 0.5 * (z_from + z_to)
    two = _gauss_panel(comps, z_from, mid) + _gauss_panel(comps, mid, z_to)
    err = np.max(np.abs(one - two), axis=-1)
    scale = 1.0 + np.max(np.abs(two), axis=-1)
    with np.errstate(invalid="ignore"):
        bad = ~(err <= 1e-10 * scale)  # catches nan as well
    if usable is not None:
        bad &= usable
    out = two
    for idx in np.argwhere(bad):
        key = tuple(idx)
        out[key] = _refine_edge(comps, complex(z_from[key]), complex(z_to[key]))
    return out


def _annulus_period(comps, r_lo: float, r_hi: float, settings: Settings) -> tuple[np.ndarray, float]:
    """Real translation period around the annulus cycle, plus the absolute
    integral scale the closed/open decision is measured against."""
    for frac in (0.5371, 0.4483, 0.6127):
        radius = math.exp(math.log(r_lo) + (math.log(r_hi) - math.log(r_lo)) * frac)
        theta = 2.0 * math.pi * (np.arange(1024) + 0.5) / 1024
        ring = radius * np.exp(1j * theta)
        per = np.empty(4)
        scale = 0.0
        ok = True
        for k, comp in enumerate(comps):
            try:
                val = circle_integral(comp, 0j, radius, settings.circle_max_nodes)
                with np.errstate(all="ignore"):
                    mag = np.abs(comp(ring))
            except Exception:
                ok = False
                break
            if not np.isfinite(val) or not np.all(np.isfinite(mag)):
                ok = False
                break
            per[k] = 2.0 * val.real
            scale += 2.0 * math.pi * radius * float(mag.mean())
        if ok:
            return per, scale
    raise QuadratureError("could not evaluate the annulus period on any probe circle")


def sample_mesh(
    entry,
    *,
    window=None,
    resolution: int | None = None,
    sheets: int = 1,
    settings: Settings | None = None,
) -> SurfaceMesh:
    """Sample the immersed surface on a grid chart.

    ``entry`` may be a catalog entry or bare Weierstrass data.  Grid nodes
    within the mesh margin of a point where the tangent components blow up
    are masked out (the chart avoids punctures); positions are integrated
    along a breadth-first spanning tree of the remaining grid edges and
    spot-checked against the adaptive path integrator.
    """
    settings = settings or DEFAULT
    data: WeierstrassData = getattr(entry, "data", entry)
    resolution = settings.mesh_res if resolution is None else int(resolution)
    if resolution < 16:
        raise ParamError("mesh resolution must be at least 16 per axis")
    if sheets < 1:
        raise ParamError("sheets must be a positive integer")
    chart = _chart_for(data, window, resolution, sheets)
    Z = chart.grid()
    n_rows, n_cols = Z.shape

    hazards = _comp_hazards(data)
    margin = settings.mesh_margin
    valid = np.ones(Z.shape, dtype=bool)
    for p in hazards:
        if abs(p) < 1e-12 and chart.kind == "log-annulus":
            continue  # the annulus is anchored at 0; the grid never reaches it
        valid &= np.abs(Z - p) > margin

    comps = xz_components(data)

    # periods and the seam
    seam_closed = False
    cut_offsets: tuple = ()
    if chart.kind == "log-annulus":
        per, per_scale = _annulus_period(
            comps, math.exp(chart.rows[0]), math.exp(chart.rows[-1]), settings
        )
        if np.max(np.abs(per)) <= 1e-8 * (1.0 + per_scale):
            seam_closed = sheets == 1
        else:
            cut_offsets = (per,)

    # all horizontal and vertical edge increments, vectorised
    inc_right = _edge_increments(comps, Z[:, :-1], Z[:, 1:], valid[:, :-1] & valid[:, 1:])
    inc_up = _edge_increments(comps, Z[:-1, :], Z[1:, :], valid[:-1, :] & valid[1:, :])
    inc_wrap = None
    if chart.kind == "log-annulus" and seam_closed:
        inc_wrap = _edge_increments(comps, Z[:, -1], Z[:, 0], valid[:, -1] & valid[:, 0])

    finite_r = np.all(np.isfinite(inc_right), axis=-1)
    finite_u = np.all(np.isfinite(inc_up), axis=-1)

    # breadth-first spanning tree from the basepoint node
    i0, j0 = n_rows // 2, 0
    if not valid[i0, j0]:
        cand = np.argwhere(valid)
        if cand.size == 0:
            raise ParamError("every grid node sits inside the mesh margin of a hazard")
        i0, j0 = min(cand, key=lambda ij: abs(ij[0] - n_rows // 2) + ij[1])
    pos = np.full((n_rows, n_cols, 4), np.nan)
    pos[i0, j0] = 0.0
    seen = np.zeros(Z.shape, dtype=bool)
    seen[i0, j0] = True
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    queue = deque([(i0, j0)])
    while queue:
        i, j = queue.popleft()
        steps = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)]
        if inc_wrap is not None:
            if j == n_cols - 1:
                steps.append((i, 0))
            if j == 0:
                steps.append((i, n_cols - 1))
        for ii, jj in steps:
            wrap = abs(jj - j) > 1
            if not wrap and not (0 <= ii < n_rows and 0 <= jj < n_cols):
                continue
            if seen[ii, jj] or not valid[ii, jj]:
                continue
            if ii != i:  # vertical edge
                lo = min(i, ii)
                if not finite_u[lo, j]:
                    continue
                step = inc_up[lo, j] if ii > i else -inc_up[lo, j]
            elif wrap:
                step = inc_wrap[i] if jj == 0 else -inc_wrap[i]
            else:
                lo = min(j, jj)
                if not finite_r[i, lo]:
                    continue
                step = inc_right[i, lo] if jj > j else -inc_right[i, lo]
            pos[ii, jj] = pos[i, j] + step
            seen[ii, jj] = True
            parent[(ii, jj)] = (i, j)
            queue.append((ii, jj))

    valid &= seen
    if not valid.any():
        raise ParamError("no grid node survived the mesh margin")
    if not np.all(np.isfinite(pos[valid])):
        raise QuadratureError("the immersion integral produced nonfinite positions")

    _spot_check(data, Z, pos, valid, parent, (i0, j0), settings)

    # densities (vectorised; masked nodes may be nan but are dropped below)
    with np.errstate(all="ignore"):
        f = data.phi(Z) - np.conj(data.psi(Z))
        dens = 2.0 * np.abs(f) ** 2 * np.abs(data.dh(Z)) ** 2
    bad_density = valid & ~np.isfinite(dens)
    if bad_density.any():
        raise QuadratureError("metric density is nonfinite at a surviving grid node")

    # compact vertices + quad faces
    grid_index = np.full(Z.shape, -1, dtype=int)
    grid_index[valid] = np.arange(int(valid.sum()))
    faces = []
    for i in range(n_rows - 1):
        for j in range(n_cols - 1):
            q = (grid_index[i, j], grid_index[i, j + 1], grid_index[i + 1, j + 1], grid_index[i + 1, j])
            if min(q) >= 0:
                faces.append(q)
    if seam_closed:
        for i in range(n_rows - 1):
            q = (grid_index[i, -1], grid_index[i, 0], grid_index[i + 1, 0], grid_index[i + 1, -1])
            if min(q) >= 0:
                faces.append(q)
    return SurfaceMesh(
        chart=chart,
        z=Z[valid],
        positions=pos[valid],
        density=dens[valid],
        faces=np.asarray(faces, dtype=int).reshape(-1, 4),
        grid_index=grid_index,
        cut_offsets=cut_offsets,
        seam_closed=seam_closed,
        basepoint=complex(Z[i0, j0]),
    )


def _spot_check(data, Z, pos, valid, parent, root, settings) -> None:
    """Re-integrate a handful of tree paths adaptively and compare."""
    nodes = [tuple(ij) for ij in np.argwhere(valid)]
    if len(nodes) <= 1:
        return
    picks = [nodes[k * (len(nodes) - 1) // 4] for k in range(1, 5)]
    scale = 1.0 + float(np.nanmax(np.abs(pos[valid])))
    for ij in picks:
        chain = [ij]
        while chain[-1] != root and chain[-1] in parent:
            chain.append(parent[chain[-1]])
        if chain[-1] != root:
            continue
        waypoints = tuple(complex(Z[i, j]) for i, j in reversed(chain))
        if len(waypoints) < 2:
            continue
        try:
            x = immerse(data, PathSpec(waypoints), settings)
        except Exception:
            continue  # e.g. clearance against a removable expression pole
        if np.max(np.abs(x - pos[ij])) > 1e-7 * scale:
            raise QuadratureError(
                f"mesh position at z={Z[ij]:.6g} misses the adaptive path integral"
                f" by {np.max(np.abs(x - pos[ij])):.3e}"
            )


def isometry_defect(mesh: SurfaceMesh) -> float:
    """Worst first-order defect of edge lengths against the metric.

    Compares the Lorentz length of each edge against sqrt(2 * density) times
    the parameter step (the tangent-norm identity fixes the constant 2) and
    returns the maximal relative mismatch.  Shrinks linearly with the grid
    spacing on a regular mesh.
    """
    pairs = mesh.edge_index_pairs()
    dx = mesh.positions[pairs[:, 0]] - mesh.positions[pairs[:, 1]]
    q = dx[:, 0] ** 2 + dx[:, 1] ** 2 + dx[:, 2] ** 2 - dx[:, 3] ** 2
    dz = np.abs(mesh.z[pairs[:, 0]] - mesh.z[pairs[:, 1]])
    dens = 0.5 * (mesh.density[pairs[:, 0]] + mesh.density[pairs[:, 1]])
    want = 2.0 * dens * dz**2
    return float(np.max(np.abs(q - want) / (1e-30 + np.abs(want))))


# ---------------------------------------------------------------------------
# export


_DROPS = {"drop-x1": 0, "drop-x2": 1, "drop-x3": 2, "drop-x4": 3}


def export_mesh(mesh: SurfaceMesh, projection: str, path: str) -> None:
    """Write the mesh to ``path`` as ASCII OBJ (or PLY for .ply paths).

    Projections: drop-x1 .. drop-x4 keep the other three coordinates;
    slice-x3=0 and slice-x4=<c> intersect the quads with a hyperplane and
    emit the crossing segments as an OBJ polyline.
    """
    if projection in _DROPS:
        keep = [k for k in range(4) if k != _DROPS[projection]]
        verts = mesh.positions[:, keep]
        if path.endswith(".ply"):
            _write_ply(verts, mesh.faces, path)
        else:
            _write_obj(verts, mesh.faces, path)
        return
    if projection == "slice-x3=0":
        _write_slice(mesh, axis=2, level=0.0, path=path)
        return
    if projection.startswith("slice-x4="):
        try:
            level = float(projection.split("=", 1)[1])
        except ValueError as exc:
            raise ParamError(f"bad slice level in {projection!r}") from exc
        _write_slice(mesh, axis=3, level=level, path=path)
        return
    raise ParamError(
        f"unknown projection {projection!r}; use drop-x1..drop-x4, slice-x3=0 or slice-x4=<c>"
    )


def _write_obj(verts: np.ndarray, faces: np.ndarray, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for v in verts:
            fh.write(f"v {v[0]:.12g} {v[1]:.12g} {v[2]:.12g}\n")
        for f in faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1} {f[3] + 1}\n")


def _write_ply(verts: np.ndarray, faces: np.ndarray, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(verts)}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        fh.write(f"element face {len(faces)}\n")
        fh.write("property list uchar int vertex_indices\nend_header\n")
        for v in verts:
            fh.write(f"{v[0]:.12g} {v[1]:.12g} {v[2]:.12g}\n")
        for f in faces:
            fh.write(f"4 {f[0]} {f[1]} {f[2]} {f[3]}\n")


def _write_slice(mesh: SurfaceMesh, axis: int, level: float, path: str) -> None:
    keep = [k for k in range(4) if k != axis]
    g = mesh.positions[:, axis] - level
    verts: list[np.ndarray] = []
    cache: dict[tuple[int, int], int] = {}
    segments: list[tuple[int, int]] = []

    def crossing(a: int, b: int) -> int | None:
        ga, gb = g[a], g[b]
        if ga == gb or (ga > 0) == (gb > 0):
            return None
        key = (min(a, b), max(a, b))
        if key not in cache:
            t = ga / (ga - gb)
            p = mesh.positions[a] + t * (mesh.positions[b] - mesh.positions[a])
            cache[key] = len(verts)
            verts.append(p[keep])
        return cache[key]

    for f in mesh.faces:
        hits = []
        for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[3]), (f[3], f[0])):
            idx = crossing(int(a), int(b))
            if idx is not None:
                hits.append(idx)
        for a, b in zip(hits[0::2], hits[1::2]):
            segments.append((a, b))
    with open(path, "w", encoding="ascii") as fh:
        for v in verts:
            fh.write(f"v {v[0]:.12g} {v[1]:.12g} {v[2]:.12g}\n")
        for a, b in segments:
            fh.write(f"l {a + 1} {b + 1}\n")


# ---------------------------------------------------------------------------
# self-intersection scan


@dataclass(frozen=True)
class IntersectionCluster:
    position: tuple[float, float, float, float]
    preimages: tuple[complex, ...]
    residual: float


@dataclass(frozen=True)
class IntersectionReport:
    clusters: tuple[IntersectionCluster, ...]
    candidate_pairs: int
    max_edge: float
    refined: bool
    note: str = ""

    @property
    def is_empty(self) -> bool:
        return not self.clusters


def _chart_coords(mesh: SurfaceMesh) -> tuple[np.ndarray, np.ndarray]:
    """(row, col) of every vertex in the chart grid."""
    n_rows, n_cols = mesh.grid_index.shape
    rows = np.empty(mesh.n_vertices, dtype=int)
    cols = np.empty(mesh.n_vertices, dtype=int)
    rr, cc = np.nonzero(mesh.grid_index >= 0)
    rows[mesh.grid_index[rr, cc]] = rr
    cols[mesh.grid_index[rr, cc]] = cc
    return rows, cols


def _local_edge_scale(mesh: SurfaceMesh) -> tuple[np.ndarray, float]:
    """Per-vertex maximum incident edge length, plus the global maximum."""
    p = mesh.positions
    pairs = mesh.edge_index_pairs()
    edge_len = np.linalg.norm(p[pairs[:, 0]] - p[pairs[:, 1]], axis=1)
    local = np.zeros(mesh.n_vertices)
    if len(edge_len):
        np.maximum.at(local, pairs[:, 0], edge_len)
        np.maximum.at(local, pairs[:, 1], edge_len)
    return local, float(edge_len.max()) if len(edge_len) else 0.0


def _candidate_pairs(mesh: SurfaceMesh) -> tuple[np.ndarray, float]:
    """Spatially close vertex pairs whose chart preimages are far apart.

    Returns (pairs, max edge length).
    """
    p = mesh.positions
    # two patches that actually cross pass within the LOCAL edge scale of
    # each other; measuring against the global maximum would flood the scan
    # with far-apart near-misses on strongly non-uniform meshes
    local, max_edge = _local_edge_scale(mesh)
    if max_edge == 0.0:
        return np.empty((0, 2), dtype=int), 0.0
    cell = 2.0 * max_edge
    rows, cols = _chart_coords(mesh)
    n_cols = mesh.grid_index.shape[1]

    keys = np.floor(p / cell).astype(np.int64)
    buckets: dict[tuple[int, ...], list[int]] = {}
    for idx, key in enumerate(map(tuple, keys)):
        buckets.setdefault(key, []).append(idx)

    offsets = [
        (a, b, c, d)
        for a in (-1, 0, 1)
        for b in (-1, 0, 1)
        for c in (-1, 0, 1)
        for d in (-1, 0, 1)
    ]
    chunks: list[np.ndarray] = []
    for key, members in buckets.items():
        neigh: list[int] = []
        for off in offsets:
            neigh.extend(buckets.get((key[0] + off[0], key[1] + off[1], key[2] + off[2], key[3] + off[3]), ()))
        nb = np.asarray(neigh)
        for m_start in range(0, len(members), 512):
            m = np.asarray(members[m_start : m_start + 512])
            for start in range(0, len(nb), 4096):
                blk = nb[start : start + 4096]
                d2 = np.sum((p[m][:, None, :] - p[blk][None, :, :]) ** 2, axis=-1)
                ii, jj = np.nonzero(d2 <= max_edge**2)
                a, b = m[ii], blk[jj]
                keep = (a < b) & (d2[ii, jj] <= np.maximum(local[a], local[b]) ** 2)
                a, b = a[keep], b[keep]
                di = np.abs(rows[a] - rows[b])
                dj = np.abs(cols[a] - cols[b])
                if mesh.seam_closed:
                    dj = np.minimum(dj, n_cols - dj)
                keep = np.maximum(di, dj) >= 4  # drop chart neighbours
                if keep.any():
                    chunks.append(np.stack([a[keep], b[keep]], axis=1))
    if not chunks:
        return np.empty((0, 2), dtype=int), max_edge
    return np.unique(np.concatenate(chunks), axis=0), max_edge


def _newton_refine(data, mesh, v, w, settings):
    """Newton on x(z) - x(w) = 0 in the four real unknowns."""
    comps = xz_components(data)

    def tangent(z):
        vals = np.array([c(z) for c in comps])
        return np.stack([2.0 * vals.real, -2.0 * vals.imag], axis=1)

    z, wz = complex(mesh.z[v]), complex(mesh.z[w])
    xz_pos = mesh.positions[v].astype(float).copy()
    xw_pos = mesh.positions[w].astype(float).copy()
    scale = 1.0 + max(abs(z), abs(wz))
    for _ in range(30):
        F = xz_pos - xw_pos
        res = float(np.linalg.norm(F))
        tol = settings.intersection_residual * (1.0 + np.linalg.norm(xz_pos))
        if res <= tol:
            if abs(z - wz) <= 1e-3 * scale:
                return None  # the pair collapsed onto one parameter point
            return z, wz, 0.5 * (xz_pos + xw_pos), res
        try:
            J = np.hstack([tangent(z), -tangent(wz)])
            step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        except Exception:
            return None
        if not np.all(np.isfinite(step)):
            return None
        cap = 0.25 * scale
        norm = float(np.hypot(*step[:2]) + np.hypot(*step[2:]))
        if norm > cap:
            step *= cap / norm
        dz = complex(step[0], step[1])
        dw = complex(step[2], step[3])
        try:
            xz_pos = xz_pos + immerse(data, PathSpec((z, z + dz)), settings)
            xw_pos = xw_pos + immerse(data, PathSpec((wz, wz + dw)), settings)
        except Exception:
            return None
        z, wz = z + dz, wz + dw
    return None


def self_intersection_scan(
    entry,
    mesh: SurfaceMesh,
    refine: bool = True,
    settings: Settings | None = None,
) -> IntersectionReport:
    """Search the sampled surface for coordinate self-intersections.

    Candidates come from a spatial hash of the 4D positions (plain Euclidean
    distance: coordinate equality does not care about the signature); pairs
    that survive the distant-preimage filter are polished by Newton on
    x(z) = x(w) when ``refine`` is set, then merged into clusters.
    """
    settings = settings or DEFAULT
    data: WeierstrassData = getattr(entry, "data", entry)
    pairs, max_edge = _candidate_pairs(mesh)
    note = ""
    if len(pairs) == 0:
        return IntersectionReport((), 0, max_edge, refine)

    # one representative pair per provisional cluster; tightest pairs first,
    # so genuine crossings (small gap) claim their representative before the
    # coarse near-misses do; the dedup radius follows the pair's local edge
    # scale so that nearby distinct crossings stay separate
    local, _ = _local_edge_scale(mesh)
    mids = 0.5 * (mesh.positions[pairs[:, 0]] + mesh.positions[pairs[:, 1]])
    gaps = np.linalg.norm(mesh.positions[pairs[:, 0]] - mesh.positions[pairs[:, 1]], axis=1)
    order = np.argsort(gaps, kind="stable")
    reps: list[int] = []
    rep_mids = np.empty((0, 4))
    for k in order:
        if len(reps) >= 64:
            note = f"refinement capped at 64 provisional clusters ({len(pairs)} candidate pairs)"
            break
        prov_radius = 3.0 * max(local[pairs[k, 0]], local[pairs[k, 1]], 1e-12)
        if len(reps) == 0 or np.min(np.linalg.norm(rep_mids - mids[k], axis=1)) > prov_radius:
            reps.append(int(k))
            rep_mids = np.vstack([rep_mids, mids[k]])

    clusters: list[IntersectionCluster] = []
    if refine:
        merge = settings.intersection_merge
        refined: list[tuple[complex, complex, np.ndarray, float]] = []
        for k in reps:
            got = _newton_refine(data, mesh, int(pairs[k, 0]), int(pairs[k, 1]), settings)
            if got is not None:
                refined.append(got)
        for z, wz, x, res in refined:
            for c in clusters:
                ref = np.asarray(c.position)
                if np.linalg.norm(x - ref) <= merge * (1.0 + np.linalg.norm(ref)):
                    pre = list(c.preimages)
                    for q in (z, wz):
                        if all(abs(q - p) > 1e-4 * (1.0 + abs(q)) for p in pre):
                            pre.append(q)
                    clusters.remove(c)
                    clusters.append(
                        IntersectionCluster(c.position, tuple(pre), max(c.residual, res))
                    )
                    break
            else:
                clusters.append(IntersectionCluster(tuple(x), (z, wz), res))
    else:
        for k in reps:
            v, w = int(pairs[k, 0]), int(pairs[k, 1])
            clusters.append(
                IntersectionCluster(tuple(mids[k]), (complex(mesh.z[v]), complex(mesh.z[w])), float(gaps[k]))
            )
    clusters.sort(key=lambda c: (c.position[0], c.position[1], c.position[2], c.position[3]))
    return IntersectionReport(tuple(clusters), int(len(pairs)), max_edge, refine, note)
