import math

import numpy as np
import pytest

from sslab import catalog, locus
from sslab.config import DEFAULT
from sslab.errors import JacobianSingular
from sslab.locus import LocusFinding, Window, fourpi_scan, local_data, regularity_verdict, scan
from sslab.mero import INFINITY, MeroExpr
from sslab.weierstrass import PuncturedSphere, WeierstrassData, lorentz_frame_change

RNG = np.random.default_rng(20240811)
GOLDEN = (5**0.5 - 1) / 2  # positive root of u^2 + u - 1


def _synthetic(phi, psi):
    return WeierstrassData(
        phi, psi, MeroExpr.const(1.0), PuncturedSphere((INFINITY,)), label="synthetic"
    )


def _residuals(data, zs):
    return [
        abs(data.phi(z) - np.conj(data.psi(z))) / (1.0 + abs(data.phi(z))) for z in zs
    ]


def test_catenoid_scan_empty():
    f = scan(catalog.catenoid(0.5).data)
    assert f.is_empty and f.kind == locus.KIND_EMPTY


def test_brute_force_floor_backs_empty_verdicts():
    # wherever the scanner reports empty, a much denser grid must show |F|
    # staying clear of zero at its own resolution (nodes adjacent to spinor
    # poles excluded: |F| ~ 1/d and |grad F| ~ 1/d^2 cap the ratio near d/h
    # no matter how fine the grid)
    for entry in (catalog.catenoid(0.5), catalog.enneper2(-1.0, 1j), catalog.singular2()):
        data = entry.data
        f = scan(data)
        assert f.is_empty, entry.name
        w = f.window
        z, spacing, _ = w.grid(2048)
        with np.errstate(all="ignore"):
            fv = np.abs(data.phi(z) - np.conj(data.psi(z)))
            gv = np.abs(data.phi.derivative()(z)) + np.abs(data.psi.derivative()(z))
        bad = ~(np.isfinite(fv) & np.isfinite(gv))
        for h in locus._hazard_points(data):
            bad |= np.abs(z - h) < 12.0 * spacing
        ratio = np.where(bad, np.inf, fv / (spacing * np.maximum(gv, 1e-300)))
        assert ratio.min() > 10.0, (entry.name, float(ratio.min()))


def test_unit_circle_curves():
    for entry in (
        catalog.enneper1(1.0, 1.0, allow_irregular=True),
        catalog.maximal_catenoid(),
    ):
        f = scan(entry.data)
        assert f.kind == locus.KIND_CURVE, entry.name
        assert len(f.curves) == 1
        chain = f.curves[0]
        assert len(chain) >= DEFAULT.curve_min_points
        moduli = np.abs(np.array(chain))
        assert np.max(np.abs(moduli - 1.0)) < 1e-8
        assert max(_residuals(entry.data, chain)) <= 1e-10
        # ordered by arc proximity: consecutive samples stay within the
        # chaining distance used to build the component
        gaps = [
            abs(chain[i + 1] - chain[i])
            for i in range(len(chain) - 1)
        ]
        allowed = [
            3.0 * max(
                f.window.local_spacing(chain[i], f.grid_n),
                f.window.local_spacing(chain[i + 1], f.grid_n),
            )
            for i in range(len(chain) - 1)
        ]
        assert all(g <= a for g, a in zip(gaps, allowed))


def test_curve_midpoints_refine_back_onto_locus():
    entry = catalog.maximal_catenoid()
    f = scan(entry.data)
    chain = f.curves[0]
    dphi = entry.data.phi.derivative()
    dpsi = entry.data.psi.derivative()
    for i in range(0, len(chain) - 1, 7):
        mid = 0.5 * (chain[i] + chain[i + 1])
        refined = locus._refine(entry.data, dphi, dpsi, mid, DEFAULT)
        assert refined is not None
        assert abs(abs(refined) - 1.0) < 1e-8


def test_enneper2_regularity_frontier():
    good = regularity_verdict(catalog.enneper2(-1.0, 1j).data)
    assert good and good.passed and all(f.is_empty for f in good.findings)

    bad = regularity_verdict(catalog.enneper2(1.0, 1j, allow_irregular=True).data)
    assert not bad
    f = bad.findings[0]
    assert f.kind == locus.KIND_ISOLATED and len(f.points) == 2
    expected_roots = sorted((GOLDEN, -1.0 - GOLDEN))
    got = sorted(p.z.real for p in f.points)
    for have, want in zip(got, expected_roots):
        assert abs(have - want) < 1e-8
    for p in f.points:
        assert abs(p.z.imag) < 1e-8
        assert p.degenerate and (p.m, p.n) == (1, 1) and p.index is None


def test_doubled_grid_returns_superset():
    data = catalog.enneper2(1.0, 1j, allow_irregular=True).data
    coarse = scan(data, grid_n=128)
    fine = scan(data, grid_n=256)
    for p in coarse.points:
        assert any(abs(p.z - q.z) < 1e-6 for q in fine.points)


def test_local_data_synthetic_orders():
    m, n, index = local_data(
        _synthetic(MeroExpr.from_poly([0.0, 0.0, 1.0]), MeroExpr.from_poly([0.0, 0.0, 0.0, 1.0])),
        0.0,
    )
    assert (m, n, index) == (2, 3, 2)

    m, n, index = local_data(
        _synthetic(MeroExpr.from_poly([0.0, 0.0, 0.0, 1.0]), MeroExpr.from_poly([0.0, 0.0, 1.0])),
        0.0,
    )
    assert (m, n, index) == (3, 2, -2)

    with pytest.raises(JacobianSingular):
        local_data(
            _synthetic(MeroExpr.from_poly([0.0, 1.0]), MeroExpr.from_poly([0.0, 2.0])),
            0.0,
        )


def test_incomplete_demo_has_fifth_root_points():
    f = scan(catalog.incomplete_demo().data)
    assert f.kind == locus.KIND_ISOLATED and len(f.points) == 5
    roots = np.exp(2j * math.pi * np.arange(5) / 5)
    for p in f.points:
        assert min(abs(p.z - r) for r in roots) < 1e-8
        assert p.degenerate and (p.m, p.n) == (1, 1)


def test_fourpi_family_never_regular():
    for a in (0.5, 2.0 + 1.0j):
        f = fourpi_scan(1, a)
        assert not f.is_empty, a
        samples = f.all_samples()
        assert samples
        # rebuild the family to verify the residual bound on every root
        b = 1.0 - a
        phi = MeroExpr.from_rational([0.0, a, 1.0], [1.0])
        psi = MeroExpr.from_rational([0.0, 0.0, 1.0], [b, 1.0])
        data = _synthetic(phi, psi)
        assert max(_residuals(data, samples)) <= 1e-10


def test_emptiness_verdict_survives_frame_changes():
    empty = catalog.catenoid(0.5).data
    nonempty = catalog.enneper2(1.0, 1j, allow_irregular=True).data
    for _ in range(3):
        a, b, c = (complex(*RNG.normal(size=2)) for _ in range(3))
        d = (1.0 + b * c) / a
        assert scan(lorentz_frame_change(empty, a, b, c, d)).is_empty
        assert not scan(lorentz_frame_change(nonempty, a, b, c, d)).is_empty


def test_window_validation_and_defaults():
    with pytest.raises(ValueError):
        Window.annulus(1.0, 0.5)
    with pytest.raises(ValueError):
        scan(catalog.catenoid(0.5).data, grid_n=32)
    assert locus.default_window(catalog.catenoid(0.5).data).shape == "annulus"
    assert locus.default_window(catalog.enneper1().data).shape == "disc"
    w = Window.rect(-1.0, 2.0, -3.0, 4.0)
    assert w.contains(0.5 + 1j) and not w.contains(3.0 + 0j)
