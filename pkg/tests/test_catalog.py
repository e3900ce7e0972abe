"""Catalog construction: parameter validation, the registry, and a few
properties of the built data that the examples rely on."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sslab import catalog
from sslab import weierstrass as w
from sslab.errors import ParamError
from sslab.mero import is_infinity

FOUR_PI = 4.0 * math.pi


# ---------------------------------------------------------------------------
# parameter validation


def test_catenoid_validation():
    with pytest.raises(ParamError):
        catalog.catenoid(1.0)
    with pytest.raises(ParamError):
        catalog.catenoid(-1.0)
    with pytest.raises(ParamError):
        catalog.catenoid(1.5, allow_degenerate=True)  # flag only admits |t| = 1
    with pytest.raises(ParamError):
        catalog.catenoid(0.5, 0.0)
    catalog.catenoid(0.999)
    limit = catalog.catenoid(1.0, allow_degenerate=True)
    assert limit.expected.ends[0].kind == "bad-singular"
    assert limit.expected.periods_pass


def test_helicoid_validation():
    with pytest.raises(ParamError):
        catalog.helicoid_family(0.0, 0.0)
    with pytest.raises(ParamError):
        catalog.helicoid_family(1.0, 1j)
    entry = catalog.helicoid_family(0.0, 1j)
    assert entry.expected.periods_pass is False
    assert catalog.helicoid_family(0.0, 2.0).expected.periods_pass is True


def test_enneper1_validation():
    with pytest.raises(ParamError):
        catalog.enneper1(0.0)
    with pytest.raises(ParamError):
        catalog.enneper1(-1.0, 0.0)
    with pytest.raises(ParamError):
        catalog.enneper1(1.0)  # positive real c needs the opt-in flag
    flagged = catalog.enneper1(1.0, allow_irregular=True)
    assert flagged.expected.locus == "curve"
    assert catalog.enneper1(1j).expected.locus == "empty"


def test_enneper2_validation():
    # regular iff Re c - (Im c)^2 + 1/4 < 0; the boundary itself is refused
    with pytest.raises(ParamError):
        catalog.enneper2(1.0)
    with pytest.raises(ParamError):
        catalog.enneper2(-0.25)
    with pytest.raises(ParamError):
        catalog.enneper2(0.1j)
    catalog.enneper2(-0.26)
    assert catalog.enneper2(1.0, allow_irregular=True).expected.locus == "isolated"


def test_enneper_k_validation():
    with pytest.raises(ParamError):
        catalog.enneper_k(0)
    with pytest.raises(ParamError):
        catalog.enneper_k(-2)
    with pytest.raises(ParamError):
        catalog.enneper_k(2, 0.0)
    catalog.enneper_k(3)


def test_knoid_validation():
    with pytest.raises(ParamError):
        catalog.knoid(1)
    with pytest.raises(ParamError):
        catalog.knoid(3, 1.0, 0.5)  # a^2 - b^2 != 1
    with pytest.raises(ParamError):
        catalog.knoid(3, 0.6, 0.8j)  # |a|^2 - |b|^2 <= 0
    with pytest.raises(ParamError):
        catalog.knoid(3, math.sqrt(2.0), 1.0)  # a, b real: dependent over R
    entry = catalog.knoid(3)
    a, b = math.sqrt(3) / 2, 0.5j
    assert abs(a * a - b * b - 1.0) < 1e-12
    roots = sorted(entry.data.domain.punctures, key=lambda z: np.angle(z))
    assert all(abs(z**3 - 1.0) < 1e-9 for z in roots)


def test_graph_and_essential_validation():
    with pytest.raises(ParamError):
        catalog.graph2(1)
    catalog.graph2(3)
    with pytest.raises(ParamError):
        catalog.essential_M(2, 0.0)
    with pytest.raises(ParamError):
        catalog.essential_M(2, math.pi / 2)
    with pytest.raises(ParamError):
        catalog.essential_M(1, 0.3)
    catalog.essential_M(1, 0.3, allow_divergent=True)
    catalog.essential_E(2, 0.0)  # a = 0 is fine for the E family
    with pytest.raises(ParamError):
        catalog.essential_C(2, -0.1)


def test_singular_and_alias_validation():
    with pytest.raises(ParamError):
        catalog.singular1(0.0)
    with pytest.raises(ParamError):
        catalog.singular2(b=0.0)
    with pytest.raises(ParamError):
        catalog.alias_palmer(a=0.0)
    with pytest.raises(ParamError):
        catalog.alias_palmer(a=-2.0)
    with pytest.raises(ParamError):
        catalog.alias_palmer(base=catalog.graph1())  # base must have psi = -1/phi


# ---------------------------------------------------------------------------
# registry


def test_registry_build_round_trip():
    entry = catalog.build("catenoid", t=0.25, s=2.0)
    assert "t=0.25" in entry.data.label
    assert entry.expected.k_total == pytest.approx(-FOUR_PI)
    with pytest.raises(ParamError):
        catalog.build("frobnicate")
    with pytest.raises(ParamError):
        catalog.build("catenoid", nope=1)


def test_all_entries_inventory():
    entries = catalog.all_entries()
    names = [e.name for e in entries]
    assert len(names) == len(set(names))
    for required in ("catenoid", "helicoid", "knoid", "graph1", "singular1",
                     "incomplete-demo", "maximal-catenoid"):
        assert required in names
    for e in entries:
        assert e.data.dh is not None
        assert str(e).startswith(e.name)


def test_expected_totals_are_4pi_multiples():
    for e in catalog.all_entries():
        k = e.expected.k_total
        if k is None:
            continue
        ratio = k / FOUR_PI
        assert abs(ratio - round(ratio)) < 1e-9, e.name
        assert round(ratio) != 0


def test_expected_ends_cover_the_punctures():
    for e in catalog.all_entries():
        if e.expected.ends is None:
            continue
        key = lambda p: "inf" if is_infinity(p) else (round(complex(p).real, 9), round(complex(p).imag, 9))
        got = {key(x.puncture) for x in e.expected.ends}
        want = {key(p) for p in e.data.domain.punctures}
        assert got == want, e.name


# ---------------------------------------------------------------------------
# spot checks of the built data


def test_graph1_density_window():
    # The metric density of the first graph example is 3 + cos(2 Im z),
    # pinned here only through its range.
    data = catalog.graph1().data
    rng = np.random.default_rng(20240811)
    pts = [complex(a, b) for a, b in rng.uniform(-4.0, 4.0, size=(1000, 2))]
    dens = np.array([w.metric_density(data, z) for z in pts])
    assert dens.min() >= 2.0 - 1e-9
    assert dens.max() <= 4.0 + 1e-9


def test_knoid_reduces_to_simple_spinors():
    # phi = z^{k-1}/(a+b) and psi = (b-a) z^{-(k-1)} after simplification
    entry = catalog.knoid(3)
    a, b = math.sqrt(3) / 2, 0.5j
    for z in (0.7 + 0.4j, -1.3 + 0.8j):
        assert entry.data.phi(z) == pytest.approx(z**2 / (a + b), rel=1e-12)
        assert entry.data.psi(z) == pytest.approx((b - a) / z**2, rel=1e-12)


def test_catenoid_psi_pole_location():
    entry = catalog.catenoid(0.5)
    inv = entry.data.psi.zeros_and_poles()
    poles = [p for p, _ in inv.finite_poles()]
    assert poles == [pytest.approx(0.5)]
