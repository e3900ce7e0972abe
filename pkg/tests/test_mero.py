"""Tests for the meromorphic expression engine.

Expected values here are either computed by hand (series coefficients,
partial-fraction residues) or are mathematical identities (residue theorem,
degree invariance under fractional-linear maps).
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from sslab.errors import (
    EssentialPointError,
    NotAlgebraic,
    NotIsolated,
    ParseError,
    PoleError,
    UnsupportedExpr,
)
from sslab.mero import (
    INFINITY,
    LaurentPoly,
    MeroExpr,
    RationalPart,
    laurent_to_rational,
)

RNG = np.random.default_rng(20240811)


def _corpus():
    """Mixed bag of expressions exercising every storage class."""
    return [
        MeroExpr.from_poly([0.5, 1.0]),                              # z + 1/2
        MeroExpr.from_rational([-1.0], [-0.5, 1.0]),                 # -1/(z - 1/2)
        MeroExpr.from_rational([-0.5, 1.0], [0.0, 0.0, 1.0]),        # (z-1/2)/z^2
        MeroExpr.from_rational([2.0, 0.0, 1.0], [0, 0, 0, 0, 1.0]),  # (z^2+2)/z^4
        MeroExpr.exp_of(LaurentPoly({1: 0.3}), RationalPart.from_poly([0, 0, 1.0])),
        MeroExpr.exp_of(LaurentPoly({-1: 1.0})),                     # exp(1/z)
        MeroExpr.exp_of(LaurentPoly({1: -0.3}), RationalPart([1.0], [0, 0, 1.0])),
        MeroExpr.from_poly([0.0, 1.0]) + MeroExpr.exp_of(LaurentPoly({1: 1.0})),
    ]


def test_eval_hand_values():
    f = MeroExpr.from_rational([-0.5, 1.0], [0.0, 0.0, 1.0])
    assert abs(f(2.0) - (1.5 / 4.0)) < 1e-15
    g = MeroExpr.exp_of(LaurentPoly({1: 0.3}), RationalPart.from_poly([0, 0, 1.0]))
    assert abs(g(1.0) - math.exp(0.3)) < 1e-14
    # vectorised evaluation agrees with scalar
    zs = np.array([0.5 + 0.2j, -1.0 + 1.0j, 2.0 - 0.3j])
    vals = g(zs)
    for z, v in zip(zs, vals):
        assert abs(g(complex(z)) - v) < 1e-13


def test_eval_errors():
    f = MeroExpr.from_rational([1.0], [0.0, 1.0])
    with pytest.raises(PoleError):
        f(0.0)
    g = MeroExpr.exp_of(LaurentPoly({-1: 1.0}))
    with pytest.raises(EssentialPointError):
        g(0.0)


def test_derivative_matches_finite_differences():
    h = 1e-5
    for f in _corpus():
        df = f.derivative()
        for _ in range(5):
            z = complex(RNG.uniform(0.7, 1.5) * np.exp(1j * RNG.uniform(0, 2 * np.pi)))
            fd = (f(z + h) - f(z - h)) / (2 * h)
            exact = df(z)
            assert abs(fd - exact) <= 1e-6 * (1.0 + abs(exact))


def test_zeros_and_poles_example():
    f = MeroExpr.from_rational([-0.5, 1.0], [0.0, 0.0, 1.0])
    inv = f.zeros_and_poles()
    zeros = inv.finite_zeros()
    poles = inv.finite_poles()
    assert len(zeros) == 1 and abs(zeros[0][0] - 0.5) < 1e-10 and zeros[0][1] == 1
    assert len(poles) == 1 and abs(poles[0][0]) < 1e-10 and poles[0][1] == 2
    assert inv.at_infinity == 1  # degree-2 denominator beats degree-1 numerator


def test_zeros_and_poles_essential_flags():
    f = MeroExpr.exp_of(LaurentPoly({1: -0.3}), RationalPart([1.0], [0, 0, 1.0]))
    inv = f.zeros_and_poles()
    assert inv.essential == (INFINITY,)
    assert inv.at_infinity is None
    assert inv.finite_poles()[0][1] == 2
    g = MeroExpr.exp_of(LaurentPoly({-1: 1.0}))
    inv2 = g.zeros_and_poles()
    assert inv2.essential == (0j,)
    assert inv2.at_infinity == 0  # exp(1/z) -> 1 at infinity


def test_zeros_and_poles_unsupported():
    f = MeroExpr.from_poly([0.0, 1.0]) + MeroExpr.exp_of(LaurentPoly({1: 1.0}))
    with pytest.raises(UnsupportedExpr):
        f.zeros_and_poles()


def test_order_at():
    f = MeroExpr.from_rational([2.0, 0.0, 1.0], [0, 0, 0, 0, 1.0])
    assert f.order_at(0) == -4
    assert f.order_at(INFINITY) == 2
    assert f.order_at(1.0) == 0
    g = MeroExpr.exp_of(LaurentPoly({1: 0.3}), RationalPart.from_poly([0, 0, 1.0]))
    assert g.order_at(0) == 2
    with pytest.raises(EssentialPointError):
        g.order_at(INFINITY)


def test_degree_and_not_algebraic():
    f = MeroExpr.from_rational([1.0, 0.0, 2.0], [3.0, 1.0])
    assert f.degree() == 2
    with pytest.raises(NotAlgebraic):
        MeroExpr.exp_of(LaurentPoly({1: 1.0})).degree()
    with pytest.raises(NotAlgebraic):
        MeroExpr.exp_of(LaurentPoly({1: 1.0})).mobius(1, 0, 0, 1)


def _random_unimodular():
    a = complex(RNG.normal(), RNG.normal())
    while abs(a) < 0.3:
        a = complex(RNG.normal(), RNG.normal())
    b = complex(RNG.normal(), RNG.normal())
    c = complex(RNG.normal(), RNG.normal())
    d = (1.0 + b * c) / a
    return a, b, c, d


def test_degree_invariant_under_mobius():
    f = MeroExpr.from_rational([1.0, -2.0, 0.0, 1.0], [2.0, 1.0, 1.0])
    assert f.degree() == 3
    for _ in range(10):
        a, b, c, d = _random_unimodular()
        g = f.mobius(a, b, c, d)
        assert g.degree() == 3


def test_total_pole_count_preserved_under_mobius():
    # simple poles at well-separated random points; total pole order on the
    # sphere equals the degree, before and after a fractional-linear map.
    for _ in range(5):
        poles = []
        while len(poles) < 3:
            p = complex(RNG.normal(), RNG.normal())
            if all(abs(p - q) > 0.3 for q in poles):
                poles.append(p)
        f = MeroExpr.zero()
        for p in poles:
            c = complex(RNG.normal(), RNG.normal())
            f = f + MeroExpr.from_rational([c], [-p, 1.0])
        deg = f.degree()
        inv = f.zeros_and_poles()
        total = sum(-o for _, o in inv.finite if o < 0) + max(0, -(inv.at_infinity or 0))
        assert total == deg
        a, b, c, d = _random_unimodular()
        g = f.mobius(a, b, c, d)
        inv2 = g.zeros_and_poles()
        total2 = sum(-o for _, o in inv2.finite if o < 0) + max(0, -(inv2.at_infinity or 0))
        assert g.degree() == deg
        assert total2 == deg


def test_residue_hand_values():
    # (z - t)/z^2 = 1/z - t/z^2 has residue 1 at 0
    f = MeroExpr.from_rational([-0.5, 1.0], [0.0, 0.0, 1.0])
    assert abs(f.residue(0) - 1.0) < 1e-9
    # double pole with no 1/z part
    g = MeroExpr.from_rational([3.0], [4.0, -4.0, 1.0])
    assert abs(g.residue(2.0)) < 1e-9
    # exp(1/z) = sum 1/(n! z^n): coefficient of 1/z is 1
    h = MeroExpr.exp_of(LaurentPoly({-1: 1.0}))
    assert abs(h.residue(0) - 1.0) < 1e-9
    # z^2 exp(1/z): coefficient of 1/z in sum z^(2-n)/n! is 1/3! = 1/6
    k = MeroExpr.exp_of(LaurentPoly({-1: 1.0}), RationalPart.from_poly([0, 0, 1.0]))
    assert abs(k.residue(0) - 1.0 / 6.0) < 1e-9


def test_residue_against_partial_fractions():
    # each pole enters as (c (z-p) + c2)/(z-p)^2, so its residue is exactly c.
    for _ in range(10):
        poles, coeffs = [], []
        while len(poles) < 3:
            p = complex(RNG.uniform(-2, 2), RNG.uniform(-2, 2))
            if all(abs(p - q) > 0.2 for q in poles):
                poles.append(p)
        f = MeroExpr.from_poly([complex(RNG.normal(), RNG.normal()), 0.5])
        for p in poles:
            c = complex(RNG.normal(), RNG.normal())
            c2 = complex(RNG.normal(), RNG.normal())
            coeffs.append(c)
            num = np.polynomial.polynomial.polyadd(
                np.polynomial.polynomial.polymul([c], [-p, 1.0]), [c2]
            )
            den = np.polynomial.polynomial.polymul([-p, 1.0], [-p, 1.0])
            f = f + MeroExpr.from_rational(list(num), list(den))
        for p, c in zip(poles, coeffs):
            assert abs(f.residue(p) - c) <= 1e-8 * (1 + abs(c))


def test_redundant_storage_still_reports_true_orders():
    # 1/(z-1) + 1/(z-1)^2 stores a repeated factor once merged; the pointwise
    # order and residue must still come out right.
    f = MeroExpr.from_rational([1.0], [-1.0, 1.0]) + MeroExpr.from_rational(
        [1.0], [1.0, -2.0, 1.0]
    )
    assert f.order_at(1.0) == -2
    assert abs(f.residue(1.0) - 1.0) < 1e-9


def test_residue_theorem_on_random_forms():
    # finite residues plus the residue at infinity (computed in the 1/w chart
    # with the -dw/w^2 form factor) must sum to zero.
    for _ in range(10):
        poles, coeffs = [], []
        while len(poles) < 3:
            p = complex(RNG.uniform(-1.5, 1.5), RNG.uniform(-1.5, 1.5))
            if all(abs(p - q) > 0.2 for q in poles) and abs(p) > 0.1:
                poles.append(p)
        f = MeroExpr.zero()
        for p in poles:
            c = complex(RNG.normal(), RNG.normal())
            coeffs.append(c)
            f = f + MeroExpr.from_rational([c], [-p, 1.0])
        at_inf = f.change_chart_to_infinity(as_form=True).residue(0)
        assert abs(sum(coeffs) + at_inf) < 1e-8


def test_residue_at_infinity_hand_value():
    f = MeroExpr.from_rational([-0.5, 1.0], [0.0, 0.0, 1.0])
    g = f.change_chart_to_infinity(as_form=True)
    assert abs(g.residue(0) - (-1.0)) < 1e-9


def test_residue_not_isolated():
    # two separately-constructed terms with poles 1e-12 apart cannot be
    # separated by any admissible circle.
    f = MeroExpr.from_rational([1.0], [0.0, 1.0]) + MeroExpr.exp_of(
        LaurentPoly({1: 1.0}), RationalPart([1.0], [-1e-12, 1.0])
    )
    with pytest.raises(NotIsolated):
        f.residue(0)


def test_chart_change_is_involutive():
    for f in _corpus():
        g = f.change_chart_to_infinity().change_chart_to_infinity()
        for _ in range(4):
            z = complex(RNG.uniform(0.5, 1.5), RNG.uniform(0.2, 1.0))
            assert abs(f(z) - g(z)) <= 1e-9 * (1 + abs(f(z)))


def test_gcd_normalisation():
    r = RationalPart(
        np.polynomial.polynomial.polymul([1.0, 1.0], [-1.0, 1.0]), [-1.0, 1.0]
    )
    assert r.degrees() == (1, 0)
    assert abs(r(3.0) - 4.0) < 1e-12


def test_logder():
    f = MeroExpr.exp_of(LaurentPoly({1: 0.3}), RationalPart.from_poly([0, 0, 1.0]))
    ld = f.logder()
    z = 1.7 - 0.4j
    assert abs(ld(z) - (2.0 / z + 0.3)) < 1e-12
    with pytest.raises(UnsupportedExpr):
        (f + MeroExpr.var()).logder()


def test_divide_single_term():
    f = MeroExpr.from_poly([0.0, 1.0])
    g = MeroExpr.exp_of(LaurentPoly({1: 1.0}), RationalPart.from_poly([0.0, 2.0]))
    q = f.divide(g)
    z = 0.9 + 0.1j
    assert abs(q(z) - f(z) / g(z)) < 1e-12
    with pytest.raises(UnsupportedExpr):
        f.divide(MeroExpr.var() + MeroExpr.exp_of(LaurentPoly({1: 1.0})))


def test_serialisation_roundtrip():
    for f in _corpus():
        text = f.serialize()
        g = MeroExpr.parse(text)
        assert g.serialize() == text
        for _ in range(3):
            z = complex(RNG.uniform(0.6, 1.4), RNG.uniform(0.3, 0.9))
            assert abs(f(z) - g(z)) <= 1e-12 * (1 + abs(f(z)))


def test_parse_rejects_garbage():
    for bad in ["", "[1] *", "1 / 2", "[1] / [0.0]", "[1] / [1] * exp(", "[a] / [1]"]:
        with pytest.raises((ParseError, ZeroDivisionError)):
            MeroExpr.parse(bad)


def test_laurent_to_rational():
    L = LaurentPoly({-2: 1.0, 1: 3.0})
    r = laurent_to_rational(L)
    z = 0.7 + 0.2j
    assert abs(r(z) - (z**-2 + 3 * z)) < 1e-13


def test_normal_form_merges_exponential_twins():
    # (1/2) e^z + (1/2) e^z collapses to a single term: e^z
    half = RationalPart.const(0.5)
    f = MeroExpr([(half, LaurentPoly({1: 1.0})), (half, LaurentPoly({1: 1.0}))])
    assert len(f.terms) == 1
    assert abs(f(1.0) - math.e) < 1e-14
    # constant exponents fold into the rational factor
    g = MeroExpr.exp_of(LaurentPoly({0: 1.0}), RationalPart.const(2.0))
    assert g.is_algebraic()
    assert abs(g.const_value() - 2 * math.e) < 1e-14
