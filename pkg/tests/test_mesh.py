"""Mesh sampling, export formats, and the self-intersection scan."""

from __future__ import annotations

import math
import os
import tempfile

import numpy as np
import pytest

from sslab import catalog
from sslab import mesh as M
from sslab.errors import ParamError

SQRT3 = math.sqrt(3.0)


def test_validation():
    entry = catalog.enneper_k(1, 1j, 1.0)
    with pytest.raises(ParamError):
        M.sample_mesh(entry, resolution=8)
    with pytest.raises(ParamError):
        M.sample_mesh(entry, resolution=32, sheets=2)  # square chart has no cover
    with pytest.raises(ParamError):
        M.sample_mesh(entry, resolution=32, sheets=0)


def test_catenoid_flat_time_coordinate():
    # t = 0 makes 1 + phi psi vanish identically, so the fourth coordinate
    # never moves: the classical catenoid inside a spacelike 3-plane.
    m = M.sample_mesh(catalog.catenoid(0.0), resolution=64)
    assert m.chart.kind == "log-annulus"
    assert m.seam_closed
    assert m.cut_offsets == ()
    assert np.max(np.abs(m.positions[:, 3])) <= 1e-12
    assert m.n_vertices == 64 * 64


def test_graph1_closed_form():
    m = M.sample_mesh(catalog.graph1(), resolution=48)
    assert m.chart.kind == "square"

    def x(z):
        u, v = z.real, z.imag
        return np.array([
            2 * u,
            -2 * math.sqrt(2) * v,
            2 * math.sinh(u) * math.cos(v),
            2 * math.cosh(u) * math.cos(v),
        ])

    base = x(m.basepoint)
    for k in range(0, m.n_vertices, 61):
        want = x(complex(m.z[k])) - base
        assert np.max(np.abs(m.positions[k] - want)) <= 1e-8


def test_helicoid_cover_offsets():
    # lam = i breaks the period condition: the mesh lives on a 3-sheet cover
    # with one open cut whose offset is the translation period.
    m = M.sample_mesh(catalog.helicoid_family(0.0, 1j), resolution=48, sheets=3)
    assert not m.seam_closed
    assert len(m.cut_offsets) == 1
    per = m.cut_offsets[0]
    assert np.max(np.abs(per[[0, 1, 3]])) <= 1e-9
    assert per[2] != 0.0
    gi = m.grid_index
    for i in range(0, gi.shape[0], 7):
        for j in range(0, gi.shape[1] - 48, 11):
            a, b = gi[i, j], gi[i, j + 48]
            if a >= 0 and b >= 0:
                shift = m.positions[b] - m.positions[a]
                assert np.max(np.abs(shift - per)) <= 1e-9


def test_isometry_defect_shrinks():
    d1 = M.isometry_defect(M.sample_mesh(catalog.catenoid(0.0), resolution=64))
    d2 = M.isometry_defect(M.sample_mesh(catalog.catenoid(0.0), resolution=128))
    assert d2 <= 0.6 * d1  # at least first order in the grid spacing
    assert d1 < 0.1


def test_mesh_masks_interior_hazards():
    # the knoid's punctures sit on the unit circle, inside the default chart;
    # at this density several nodes fall inside the keep-out margin
    m = M.sample_mesh(catalog.knoid(3), resolution=128)
    for k in range(3):
        p = np.exp(2j * math.pi * k / 3)
        assert np.min(np.abs(m.z - p)) > 0.06
    assert m.n_vertices < 128 * 128  # some nodes were masked
    assert np.all(np.isfinite(m.positions))


def test_enneper_two_intersection_points():
    entry = catalog.enneper_k(1, 1j, 1.0)
    mesh = M.sample_mesh(entry, resolution=96)
    rep = M.self_intersection_scan(entry, mesh)
    assert len(rep.clusters) == 2
    for c in rep.clusters:
        assert len(c.preimages) == 2
        for z in c.preimages:
            assert abs(abs(z) - SQRT3) <= 1e-4
        assert c.residual <= 1e-8
    # the two points sit 6 sqrt2 apart along the third axis (hand computation
    # from x = 2 Re(z^3/3 + iz, -iz^3/3 - z, (1-i)z^2/2, (1+i)z^2/2))
    sep = np.array(rep.clusters[1].position) - np.array(rep.clusters[0].position)
    assert np.allclose(np.abs(sep), [0.0, 0.0, 6.0 * math.sqrt(2.0), 0.0], atol=1e-6)
    # preimages of one cluster are antipodal
    for c in rep.clusters:
        assert abs(c.preimages[0] + c.preimages[1]) <= 1e-6 * SQRT3


def test_enneper_raw_scan_without_refine():
    entry = catalog.enneper_k(1, 1j, 1.0)
    mesh = M.sample_mesh(entry, resolution=96)
    rep = M.self_intersection_scan(entry, mesh, refine=False)
    assert len(rep.clusters) == 2
    assert all(c.residual > 1e-3 for c in rep.clusters)  # resolution-limited


def test_embedded_surfaces_scan_empty():
    for entry in (catalog.catenoid(0.5), catalog.knoid(3)):
        mesh = M.sample_mesh(entry, resolution=64)
        rep = M.self_intersection_scan(entry, mesh)
        assert rep.is_empty, entry.name


def test_export_obj_and_ply():
    m = M.sample_mesh(catalog.catenoid(0.0), resolution=24)
    with tempfile.TemporaryDirectory() as td:
        obj = os.path.join(td, "c.obj")
        M.export_mesh(m, "drop-x4", obj)
        lines = open(obj).read().splitlines()
        vs = [l for l in lines if l.startswith("v ")]
        fs = [l for l in lines if l.startswith("f ")]
        assert len(vs) == m.n_vertices
        assert len(fs) == len(m.faces)
        assert all(len(l.split()) == 4 for l in vs)
        assert all(len(l.split()) == 5 for l in fs)
        ply = os.path.join(td, "c.ply")
        M.export_mesh(m, "drop-x1", ply)
        content = open(ply).read().splitlines()
        assert content[0] == "ply"
        assert f"element vertex {m.n_vertices}" in content


def test_export_slice_polyline():
    # x3 = 4 log|z| crosses zero on the unit circle: the slice is a polyline
    m = M.sample_mesh(catalog.catenoid(0.0), resolution=24)
    with tempfile.TemporaryDirectory() as td:
        path = os.path.join(td, "s.obj")
        M.export_mesh(m, "slice-x3=0", path)
        lines = open(path).read().splitlines()
        assert any(l.startswith("v ") for l in lines)
        assert any(l.startswith("l ") for l in lines)


def test_export_errors():
    m = M.sample_mesh(catalog.catenoid(0.0), resolution=24)
    with pytest.raises(ParamError):
        M.export_mesh(m, "drop-x9", "x.obj")
    with pytest.raises(ParamError):
        M.export_mesh(m, "slice-x4=oops", "x.obj")
    with pytest.raises(IOError):
        M.export_mesh(m, "drop-x4", os.path.join(tempfile.gettempdir(), "missing-dir-xyzzy", "x.obj"))
