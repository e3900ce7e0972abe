"""Curvature fields and the two total-curvature routes.

Every expected number below was measured (or derived in closed form) before
being frozen: circle-limit multiples of 2*pi*i were checked against residue
computations, and the catenoid family has an explicit -K.
"""

from __future__ import annotations

import functools
import math

import numpy as np
import pytest

from sslab import catalog
from sslab.curvature import (
    ContourPiece,
    contour_breakdown,
    curvature_at,
    gauss_bonnet_ledger,
    hopf_consistency,
    total_curvature_area,
    total_curvature_contour,
)
from sslab.errors import (
    BadEndError,
    InconsistentLedger,
    NonConvergent,
    NotAlgebraic,
    ParamError,
    PoleError,
    SingularPointError,
    UnsupportedExpr,
)
from sslab.locus import Window
from sslab.mero import INFINITY, MeroExpr, is_infinity
from sslab.weierstrass import (
    PuncturedSphere,
    WeierstrassData,
    lorentz_frame_change,
    metric_density,
)

RNG = np.random.default_rng(20240811)
PI = math.pi
TWO_PI_I = 2j * PI

ENTRIES = {
    "catenoid0": lambda: catalog.catenoid(0.0),
    "catenoid": lambda: catalog.catenoid(0.5),
    "enneper1": lambda: catalog.enneper1(),
    "enneper2": lambda: catalog.enneper2(),
    "enneper_k3": lambda: catalog.enneper_k(3),
    "knoid3": lambda: catalog.knoid(3),
    "graph2_2": lambda: catalog.graph2(2),
    "singular1": lambda: catalog.singular1(),
    "singular2": lambda: catalog.singular2(),
    "alias": lambda: catalog.alias_palmer(),
    "M2": lambda: catalog.essential_M(2, 0.3),
    "M3": lambda: catalog.essential_M(3, 0.3),
}


@functools.lru_cache(maxsize=None)
def _entry(name):
    return ENTRIES[name]()


@functools.lru_cache(maxsize=None)
def _contour(name):
    return total_curvature_contour(_entry(name).data)


def _sample_points(n, scale=1.5):
    pts = scale * (RNG.normal(size=n) + 1j * RNG.normal(size=n))
    return [complex(z) for z in pts]


def _piece_at(pieces, side, point) -> ContourPiece:
    sided = [p for p in pieces if p.side == side]
    if is_infinity(point):
        (hit,) = [p for p in sided if is_infinity(p.point)]
        return hit
    best = min(sided, key=lambda p: math.inf if is_infinity(p.point) else abs(p.point - point))
    assert abs(best.point - point) < 1e-6
    return best


# ---------------------------------------------------------------------------
# pointwise


def test_catenoid_closed_form():
    # t = 0, s = 1:  -K = 2|z|^4 / (1+|z|^2)^4 and Kperp = 0
    data = _entry("catenoid0").data
    for z in _sample_points(30):
        if abs(z) < 1e-3:
            continue
        s = curvature_at(data, z)
        r2 = abs(z) ** 2
        assert abs(-s.K - 2.0 * r2**2 / (1.0 + r2) ** 4) < 1e-12
        assert abs(s.Kperp) < 1e-12
        assert s.conformal > 0


def test_conformal_factor_is_metric_density():
    data = _entry("knoid3").data
    for z in _sample_points(10):
        if min(abs(z), abs(z**3 - 1.0)) < 1e-2:
            continue
        s = curvature_at(data, z)
        assert abs(s.conformal - metric_density(data, z)) <= 1e-12 * (1.0 + s.conformal)


def test_hopf_identity():
    cases = [
        _entry("catenoid").data,
        catalog.knoid(3).data,
        catalog.enneper2(-1.0, 1j).data,
    ]
    for data in cases:
        pts = []
        while len(pts) < 100:
            z = complex(RNG.normal() * 1.5, RNG.normal() * 1.5)
            try:
                curvature_at(data, z)
            except (PoleError, SingularPointError):
                continue
            pts.append(z)
        assert hopf_consistency(data, pts) <= 1e-9


def test_sign_laws():
    # psi = -1/phi embeds the R^3 minimal case: K <= 0, Kperp = 0
    minimal = catalog.enneper1(-1.0, 1.0).data
    for z in _sample_points(40):
        if abs(z) < 1e-3:
            continue
        s = curvature_at(minimal, z)
        assert s.K <= 1e-15
        assert abs(s.Kperp) < 1e-12
    # psi = +1/phi embeds the maximal case: K >= 0 off the collision circle
    maximal = catalog.maximal_catenoid().data
    for z in _sample_points(40):
        if abs(abs(z) - 1.0) < 0.1 or abs(z) < 1e-3:
            continue
        assert curvature_at(maximal, z).K >= -1e-15


def test_constant_psi_is_flat():
    flat = WeierstrassData(
        MeroExpr.from_poly([0.0, 1.0]),
        MeroExpr.const(2.0),
        MeroExpr.const(1.0),
        PuncturedSphere((INFINITY,)),
        label="flat sheet",
        degenerate=True,
    )
    s = curvature_at(flat, 0.3 + 0.7j)
    assert s.K == 0.0 and s.Kperp == 0.0


def test_pointwise_errors():
    with pytest.raises(SingularPointError):
        curvature_at(catalog.incomplete_demo().data, 1.0)  # on the collision locus
    with pytest.raises(PoleError):
        curvature_at(_entry("catenoid").data, 0.5)  # psi pole
    with pytest.raises(PoleError):
        curvature_at(catalog.incomplete_demo().data, 0.0)  # double spinor pole


# ---------------------------------------------------------------------------
# contour route


def test_contour_catenoid_tight():
    for t in (0.0, 0.5):
        tc = total_curvature_contour(catalog.catenoid(t).data)
        assert tc.method == "contour"
        assert tc.certified
        assert abs(tc.K_total + 4.0 * PI) <= 1e-8
        assert abs(tc.Kperp_total) <= 1e-8


def test_contour_essential_family():
    assert abs(_contour("M2").K_total + 8.0 * PI) <= 1e-3
    assert abs(_contour("M2").Kperp_total) <= 1e-3
    assert abs(_contour("M3").K_total + 12.0 * PI) <= 1e-3
    # E and C share the spinors with M, so the totals must coincide
    for build in (catalog.essential_E(2, 0.3), catalog.essential_E(2, 0.0), catalog.essential_C(2, 0.3)):
        tc = total_curvature_contour(build.data)
        assert abs(tc.K_total + 8.0 * PI) <= 1e-3
        assert tc.certified


def test_contour_singular1_piece_table():
    tc = _contour("singular1")
    assert abs(tc.K_total + 8.0 * PI) <= 1e-3
    assert tc.certified

    pieces = contour_breakdown(_entry("singular1").data)
    root = math.sqrt(2.0)
    table = [
        ("phi", 0.0, 2),
        ("phi", INFINITY, -4),
        ("psi", 0.0, 0),
        ("psi", 1j * root, -1),
        ("psi", -1j * root, -1),
        ("psi", INFINITY, 0),
    ]
    assert len(pieces) == len(table)
    for side, point, mult in table:
        got = _piece_at(pieces, side, point).value / TWO_PI_I
        assert abs(got - mult) < 1e-6, (side, point, got)


def test_contour_incomplete_demo_dual_reconciliation():
    # Five isolated equal-contact collision points: invisible to the phi-side
    # circles, +2*pi*i each on the psi side.  Both sides must still agree.
    data = catalog.incomplete_demo().data
    tc = total_curvature_contour(data)
    assert tc.certified
    assert abs(tc.K_total - 8.0 * PI) <= 1e-6
    assert abs(tc.Kperp_total) <= 1e-6

    pieces = contour_breakdown(data)
    assert len([p for p in pieces if p.side == "phi"]) == 7
    assert abs(_piece_at(pieces, "phi", INFINITY).value / TWO_PI_I - 2) < 1e-6
    assert abs(_piece_at(pieces, "psi", 0.0).value / TWO_PI_I + 3) < 1e-6
    assert abs(_piece_at(pieces, "psi", INFINITY).value / TWO_PI_I) < 1e-6
    for j in range(5):
        w = complex(np.exp(2j * PI * j / 5.0))
        assert abs(_piece_at(pieces, "phi", w).value / TWO_PI_I) < 1e-6
        assert abs(_piece_at(pieces, "psi", w).value / TWO_PI_I - 1) < 1e-6


def test_contour_piece_values_are_quantized():
    for name in ("catenoid", "knoid3", "singular2", "graph2_2"):
        for p in contour_breakdown(_entry(name).data):
            q = p.value / TWO_PI_I
            assert abs(q - round(q.real)) < 1e-6


def test_frame_change_invariance():
    rng = np.random.default_rng(20240811)
    for name in ("catenoid", "singular1"):
        base = _contour(name)
        for _ in range(5):
            a, b, c = (complex(*rng.normal(size=2)) for _ in range(3))
            d = (1.0 + b * c) / a
            moved = lorentz_frame_change(_entry(name).data, a, b, c, d)
            tc = total_curvature_contour(moved)
            assert abs(tc.K_total - base.K_total) <= 1e-6
            assert abs(tc.Kperp_total - base.Kperp_total) <= 1e-6


def test_contour_refusals():
    with pytest.raises(BadEndError):
        total_curvature_contour(catalog.catenoid(1.0, allow_degenerate=True).data)
    with pytest.raises(NonConvergent):
        total_curvature_contour(catalog.graph1().data)
    for entry in (catalog.enneper1(1.0, 1.0, allow_irregular=True), catalog.maximal_catenoid()):
        with pytest.raises(NonConvergent):
            total_curvature_contour(entry.data)


# ---------------------------------------------------------------------------
# area route and cross-agreement


def test_area_examples():
    ta = total_curvature_area(_entry("catenoid").data)
    assert ta.method == "area"
    assert ta.certified
    assert abs(ta.K_total + 4.0 * PI) <= 1e-3
    ta = total_curvature_area(_entry("M2").data)
    assert abs(ta.K_total + 8.0 * PI) <= 5e-3
    assert abs(ta.Kperp_total) <= 5e-3


def test_area_agrees_with_contour_everywhere():
    for name in ENTRIES:
        tc = _contour(name)
        ta = total_curvature_area(_entry(name).data)
        tol = max(1e-3, 4.0 * (tc.error_estimate + ta.error_estimate))
        assert abs(tc.K_total - ta.K_total) <= tol, name
        assert abs(tc.Kperp_total - ta.Kperp_total) <= tol, name
        assert abs(ta.Kperp_total) <= 5e-3, name


def test_quantization_of_totals():
    for name in ENTRIES:
        k_hat = _contour(name).K_total / (-4.0 * PI)
        assert abs(k_hat - round(k_hat)) <= 1e-3, name
        assert round(k_hat) >= 1, name


def test_expected_catalog_totals():
    for name in ENTRIES:
        want = _entry(name).expected.k_total
        if want is None:
            continue
        assert abs(_contour(name).K_total - want) <= 1e-3, name


def test_area_refusals():
    with pytest.raises(NonConvergent):
        total_curvature_area(catalog.catenoid(1.0, allow_degenerate=True).data)
    with pytest.raises(NonConvergent):
        total_curvature_area(catalog.graph1().data)
    with pytest.raises(NonConvergent):
        total_curvature_area(catalog.incomplete_demo().data)  # isolated collision points
    with pytest.raises(NonConvergent):
        total_curvature_area(catalog.maximal_catenoid().data)  # collision curve


def test_area_windows():
    data = _entry("catenoid").data
    wa = total_curvature_area(data, window=Window.annulus(1e-3, 1e3))
    assert abs(wa.K_total + 4.0 * PI) <= 2e-4  # truncated tails only
    with pytest.raises(ParamError):
        total_curvature_area(data, window=Window.rect(-1.0, 1.0, -1.0, 1.0))
    with pytest.raises(ParamError):
        total_curvature_area(data, resolution=8)


def test_degenerate_data_refused_for_totals():
    flat = WeierstrassData(
        MeroExpr.from_poly([0.0, 1.0]),
        MeroExpr.const(2.0),
        MeroExpr.const(1.0),
        PuncturedSphere((INFINITY,)),
        degenerate=True,
    )
    with pytest.raises(UnsupportedExpr):
        total_curvature_contour(flat)
    with pytest.raises(UnsupportedExpr):
        total_curvature_area(flat)


# ---------------------------------------------------------------------------
# Gauss-Bonnet ledger


def test_ledger_passes_on_clean_entries():
    for name in ("catenoid", "singular2", "knoid3", "graph2_2", "enneper_k3"):
        ledger = gauss_bonnet_ledger(_entry(name).data, total=_contour(name))
        assert ledger.passed, name
        assert len(ledger.checks) == 8


def test_ledger_singular1_bookkeeping():
    ledger = gauss_bonnet_ledger(_entry("singular1").data, total=_contour("singular1"))
    assert ledger.passed
    assert (ledger.deg_phi, ledger.deg_psi) == (4, 4)
    assert sorted(ledger.indices) == [-2, 2]
    assert sorted(ledger.d_tilde) == [1, 3]
    assert abs(ledger.K_total + 8.0 * PI) < 1e-6
    text = str(ledger)
    assert "jorge_meeks" in text and "consistent" in text
    lines = ledger.lines()
    assert "check.quantization.verdict=pass" in lines
    assert "deg_phi=4" in lines


def test_ledger_incomplete_demo_raises():
    with pytest.raises(InconsistentLedger) as info:
        gauss_bonnet_ledger(catalog.incomplete_demo().data)
    ledger = info.value.ledger
    verdicts = {c.key: c.passed for c in ledger.checks}
    assert verdicts["kperp_vanishes"]
    assert verdicts["phi_degree"]
    for key in ("psi_degree", "index_sum", "degree_sum", "jorge_meeks", "quantization", "chern_osserman"):
        assert not verdicts[key], key
    assert not ledger.passed


def test_ledger_preconditions():
    with pytest.raises(NotAlgebraic):
        gauss_bonnet_ledger(_entry("M2").data)
    with pytest.raises(BadEndError):
        gauss_bonnet_ledger(catalog.catenoid(1.0, allow_degenerate=True).data)
