"""Named example surfaces with validated parameters and expected results.

Every constructor returns a CatalogEntry: the Weierstrass data plus the
analysis results the entry is known to satisfy (total curvature, end table,
period verdict, singular-locus verdict).  The expected records are the test
oracles for the analysis pipeline; each was derived independently (closed
forms, residue computations, or contour limits done by hand) before being
frozen here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParamError
from .ends import (
    KIND_BAD_SINGULAR,
    KIND_GOOD_SINGULAR,
    KIND_REGULAR,
    KIND_TRANSCENDENTAL,
)
from .mero import INFINITY, LaurentPoly, MeroExpr, RationalPart
from .weierstrass import PuncturedSphere, WeierstrassData, from_xz_components

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class ExpectedEnd:
    puncture: complex
    kind: str
    m: int | None = None
    n: int | None = None
    index: int | None = None
    d: int | None = None
    d_tilde: int | None = None


@dataclass(frozen=True)
class Expected:
    """Known-good analysis results used as test oracles (None = not pinned)."""

    k_total: float | None = None
    kperp_total: float | None = None
    ends: tuple[ExpectedEnd, ...] | None = None
    periods_pass: bool | None = None
    locus: str | None = None  # "empty" | "curve" | "isolated"
    complete: bool | None = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    data: WeierstrassData
    expected: Expected = field(default_factory=Expected)

    def __str__(self) -> str:
        return f"{self.name}: {self.data.label}"


def _fmt(x) -> str:
    c = complex(x)
    if c.imag == 0.0:
        return f"{c.real:g}"
    return str(c).strip("()")


def _rat(num, den=(1.0,)) -> MeroExpr:
    return MeroExpr.from_rational(list(num), list(den))


def _monomial_den(k: int) -> list[complex]:
    return [0.0] * k + [1.0]


def catenoid(t: float = 0.5, s: float = 1.0, *, allow_degenerate: bool = False) -> CatalogEntry:
    """Rotational two-ended surface; t deforms the classical catenoid.

    phi = z + t, psi = -1/(z - t), dh = s (z - t)/z^2 dz on the twice
    punctured sphere.  t = +-1 collapses the end at 0 to a bad singular end
    and is only built with allow_degenerate=True.
    """
    t = float(t)
    s = float(s)
    if s == 0.0:
        raise ParamError("catenoid: s must be a nonzero real number")
    if not (-1.0 < t < 1.0):
        if not (allow_degenerate and abs(t) == 1.0):
            raise ParamError("catenoid: t must satisfy -1 < t < 1")
    phi = MeroExpr.from_poly([t, 1.0])
    psi = _rat([-1.0], [-t, 1.0])
    dh = _rat([-s * t, s], [0.0, 0.0, 1.0])
    domain = PuncturedSphere((0.0, INFINITY))
    data = WeierstrassData(phi, psi, dh, domain, label=f"catenoid(t={t:g}, s={s:g})")
    if abs(t) == 1.0:
        expected = Expected(
            ends=(
                ExpectedEnd(0.0, KIND_BAD_SINGULAR),
                ExpectedEnd(INFINITY, KIND_REGULAR, index=0),
            ),
            periods_pass=True,
            notes=("degenerate limit: the end at 0 has equal contact orders",),
        )
    else:
        expected = Expected(
            k_total=-FOUR_PI,
            kperp_total=0.0,
            ends=(
                ExpectedEnd(0.0, KIND_REGULAR, index=0, d=1, d_tilde=1),
                ExpectedEnd(INFINITY, KIND_REGULAR, index=0, d=1, d_tilde=1),
            ),
            periods_pass=True,
            locus="empty",
            complete=True,
            notes=("embedded for every admissible parameter pair",),
        )
    return CatalogEntry("catenoid", data, expected)


def helicoid_family(t: float = 0.0, lam: complex = 1j) -> CatalogEntry:
    """Associated family of the catenoid: dh picks up a complex factor lam.

    The period condition survives exactly when lam is real; purely imaginary
    lam gives the helicoid, which lives on the universal cover.
    """
    t = float(t)
    lam = complex(lam)
    if lam == 0:
        raise ParamError("helicoid_family: lam must be nonzero")
    if not (-1.0 < t < 1.0):
        raise ParamError("helicoid_family: t must satisfy -1 < t < 1")
    phi = MeroExpr.from_poly([t, 1.0])
    psi = _rat([-1.0], [-t, 1.0])
    dh = _rat([-lam * t, lam], [0.0, 0.0, 1.0])
    domain = PuncturedSphere((0.0, INFINITY))
    data = WeierstrassData(
        phi, psi, dh, domain, label=f"helicoid(t={t:g}, lam={_fmt(lam)})"
    )
    real_lam = abs(lam.imag) < 1e-12
    notes = (
        "periods pass iff the dh factor is real",
        "self-intersecting for factors off the real and imaginary axes",
    )
    expected = Expected(
        k_total=-FOUR_PI if real_lam else None,
        kperp_total=0.0 if real_lam else None,
        ends=(
            ExpectedEnd(0.0, KIND_REGULAR, index=0, d=1, d_tilde=1),
            ExpectedEnd(INFINITY, KIND_REGULAR, index=0, d=1, d_tilde=1),
        ),
        periods_pass=real_lam,
        locus="empty",
        complete=True,
        notes=notes,
    )
    return CatalogEntry("helicoid", data, expected)


def _enneper_expected(k: int) -> Expected:
    return Expected(
        k_total=-FOUR_PI * k,
        kperp_total=0.0,
        ends=(
            ExpectedEnd(
                INFINITY, KIND_REGULAR, index=0, d=2 * k + 1, d_tilde=2 * k + 1
            ),
        ),
        periods_pass=True,
        locus="empty",
        complete=True,
        notes=("one embedded-outside-a-compact-set end of multiplicity 2k+1",),
    )


def enneper1(c: complex = -1.0, s: complex = 1.0, *, allow_irregular: bool = False) -> CatalogEntry:
    """One-ended surface phi = z, psi = c/z, dh = s z dz on the plane.

    Regular exactly when c is not zero and not a positive real number
    (c real < 0 recovers the classical one-ended minimal surface).
    """
    c = complex(c)
    s = complex(s)
    if c == 0 or s == 0:
        raise ParamError("enneper1: c and s must be nonzero")
    irregular = c.imag == 0.0 and c.real > 0.0
    if irregular and not allow_irregular:
        raise ParamError(
            "enneper1: c on the positive real axis creates singular points"
            " (pass allow_irregular=True to build anyway)"
        )
    phi = MeroExpr.from_poly([0.0, 1.0])
    psi = _rat([c], [0.0, 1.0])
    dh = MeroExpr.from_poly([0.0, s])
    domain = PuncturedSphere((INFINITY,))
    data = WeierstrassData(phi, psi, dh, domain, label=f"enneper1(c={_fmt(c)}, s={_fmt(s)})")
    if irregular:
        expected = Expected(
            periods_pass=True,
            locus="curve",
            notes=("singular circle |z| = sqrt(c) when c > 0",),
        )
    else:
        expected = _enneper_expected(1)
    return CatalogEntry("enneper1", data, expected)


def enneper2(c: complex = -1.0, s: complex = 1j, *, allow_irregular: bool = False) -> CatalogEntry:
    """Variant with phi = z + 1; regular iff Re c - (Im c)^2 + 1/4 < 0."""
    c = complex(c)
    s = complex(s)
    if c == 0 or s == 0:
        raise ParamError("enneper2: c and s must be nonzero")
    margin = c.real - c.imag**2 + 0.25
    if margin >= 0.0 and not allow_irregular:
        raise ParamError(
            f"enneper2: need Re(c) - Im(c)^2 + 1/4 < 0, got {margin:g}"
            " (pass allow_irregular=True to build anyway)"
        )
    phi = MeroExpr.from_poly([1.0, 1.0])
    psi = _rat([c], [0.0, 1.0])
    dh = MeroExpr.from_poly([0.0, s])
    domain = PuncturedSphere((INFINITY,))
    data = WeierstrassData(phi, psi, dh, domain, label=f"enneper2(c={_fmt(c)}, s={_fmt(s)})")
    if margin >= 0.0:
        expected = Expected(
            periods_pass=True,
            locus="isolated",
            notes=("collision points on the real axis when the margin is >= 0",),
        )
    else:
        expected = _enneper_expected(1)
    return CatalogEntry("enneper2", data, expected)


def enneper_k(k: int = 2, c: complex = -1.0, s: complex = 1.0, *, allow_irregular: bool = False) -> CatalogEntry:
    """Higher-degree analogue: phi = z^k, psi = c/z^k, dh = s z^k dz.

    For c off the real axis it is regular with exactly two self-intersection
    point clusters sitting on |z| = ((2k+1)|c|)^(1/2k).
    """
    k = int(k)
    c = complex(c)
    s = complex(s)
    if k < 1:
        raise ParamError("enneper_k: k must be a positive integer")
    if c == 0 or s == 0:
        raise ParamError("enneper_k: c and s must be nonzero")
    irregular = c.imag == 0.0 and c.real > 0.0
    if irregular and not allow_irregular:
        raise ParamError(
            "enneper_k: c on the positive real axis creates singular points"
            " (pass allow_irregular=True to build anyway)"
        )
    phi = MeroExpr.from_poly(_monomial_den(k))
    psi = _rat([c], _monomial_den(k))
    dh = MeroExpr.from_poly([0.0] * k + [s])
    domain = PuncturedSphere((INFINITY,))
    data = WeierstrassData(
        phi, psi, dh, domain, label=f"enneper_k(k={k}, c={_fmt(c)}, s={_fmt(s)})"
    )
    expected = _enneper_expected(k) if not irregular else Expected(periods_pass=True, locus="curve")
    return CatalogEntry("enneper-k", data, expected)


def knoid(k: int = 3, a: complex = math.sqrt(3) / 2, b: complex = 0.5j) -> CatalogEntry:
    """Deformed k-ended rotational surface, stored via its immersion form.

    Starts from phi = z^(k-1), psi = -1/phi, dh = z^(k-1)/(z^k-1)^2 dz on the
    sphere punctured at the k-th roots of unity, then scales the last two
    immersion components by a and b.  Constraints: a^2 - b^2 = 1,
    |a|^2 > |b|^2, and a, b independent over the reals.
    """
    k = int(k)
    a = complex(a)
    b = complex(b)
    if k < 2:
        raise ParamError("knoid: k must be at least 2")
    if abs(a * a - b * b - 1.0) > 1e-12:
        raise ParamError("knoid: parameters must satisfy a^2 - b^2 = 1")
    if not (abs(a) ** 2 - abs(b) ** 2 > 0.0):
        raise ParamError("knoid: parameters must satisfy |a|^2 - |b|^2 > 0")
    if abs((a.conjugate() * b).imag) < 1e-12:
        raise ParamError("knoid: a and b must be independent over the reals")

    base = [0.0] * (2 * k + 1)
    base[0] = 1.0
    base[k] = -2.0
    base[2 * k] = 1.0  # z^{2k} - 2 z^k + 1
    h = RationalPart(_monomial_den(k - 1), base)
    hexpr = MeroExpr(((h, LaurentPoly.zero()),))
    v1_num = [0.0] * (2 * k - 1)
    v1_num[0] = -1.0
    v1_num[2 * k - 2] = 1.0  # z^{2k-2} - 1
    v2_num = [0.0] * (2 * k - 1)
    v2_num[0] = -1j
    v2_num[2 * k - 2] = -1j  # -i (z^{2k-2} + 1)
    v1 = _rat(v1_num, base)
    v2 = _rat(v2_num, base)
    v3 = hexpr.scaled(2.0 * a)
    v4 = hexpr.scaled(2.0 * b)

    roots = [
        complex(math.cos(2.0 * math.pi * j / k), math.sin(2.0 * math.pi * j / k))
        for j in range(k)
    ]
    domain = PuncturedSphere(tuple(roots))
    data = from_xz_components(
        v1, v2, v3, v4, domain, label=f"knoid(k={k}, a={_fmt(a)}, b={_fmt(b)})"
    )
    ends = tuple(
        ExpectedEnd(r, KIND_REGULAR, index=0, d=1, d_tilde=1) for r in roots
    )
    expected = Expected(
        k_total=FOUR_PI * (1 - k),
        kperp_total=0.0,
        ends=ends,
        periods_pass=True,
        locus="empty",
        complete=True,
        notes=("embedded in the ambient space", "k-fold rotational symmetry"),
    )
    return CatalogEntry("knoid", data, expected)


def graph1() -> CatalogEntry:
    """Entire graph over a spacelike plane with a transcendental end.

    Immersion form (1, sqrt(2) i, cosh z, sinh z) dz; its metric density is
    3 + cos(2 Im z), globally pinched in [2, 4], so the surface is complete
    with unbounded total curvature (the curvature form does not decay).
    """
    r2 = math.sqrt(2.0)
    phi = MeroExpr.exp_of(LaurentPoly({1: -1.0}), RationalPart.const(1.0 - r2))
    psi = MeroExpr.exp_of(LaurentPoly({1: -1.0}), RationalPart.const(1.0 + r2))
    dh = MeroExpr.exp_of(LaurentPoly({1: 1.0}), RationalPart.const(0.5))
    domain = PuncturedSphere((INFINITY,))
    data = WeierstrassData(phi, psi, dh, domain, label="graph1")
    expected = Expected(
        ends=(ExpectedEnd(INFINITY, KIND_TRANSCENDENTAL),),
        periods_pass=True,
        locus="empty",
        complete=True,
        notes=(
            "metric density stays in [2, 4]",
            "total curvature not finite: no k_total recorded",
        ),
    )
    return CatalogEntry("graph1", data, expected)


def graph2(n: int = 2) -> CatalogEntry:
    """Embedded graph over a punctured timelike plane, two planar ends.

    phi = conj(lam) z^n, psi = conj(lam)/z^n, dh = lam dz with the unimodular
    constant lam = (1 + sqrt(3) i)/2; metric density >= 3 everywhere.
    """
    n = int(n)
    if n < 2:
        raise ParamError("graph2: n must be at least 2")
    lam = complex(0.5, math.sqrt(3.0) / 2.0)
    lamc = lam.conjugate()
    phi = MeroExpr.from_poly([0.0] * n + [lamc])
    psi = _rat([lamc], _monomial_den(n))
    dh = MeroExpr.const(lam)
    domain = PuncturedSphere((0.0, INFINITY))
    data = WeierstrassData(phi, psi, dh, domain, label=f"graph2(n={n})")
    expected = Expected(
        k_total=-FOUR_PI * n,
        kperp_total=0.0,
        ends=(
            ExpectedEnd(0.0, KIND_REGULAR, index=0, d=n - 1, d_tilde=n - 1),
            ExpectedEnd(INFINITY, KIND_REGULAR, index=0, d=n + 1, d_tilde=n + 1),
        ),
        periods_pass=True,
        locus="empty",
        complete=True,
        notes=("both ends embedded and planar",),
    )
    return CatalogEntry("graph2", data, expected)


def _essential_core(k: int, a: float, who: str, allow_divergent: bool) -> tuple[MeroExpr, MeroExpr]:
    if k < 2 and not allow_divergent:
        raise ParamError(
            f"{who}: k = 1 has divergent total curvature"
            " (pass allow_divergent=True to build anyway)"
        )
    if k < 1:
        raise ParamError(f"{who}: k must be a positive integer")
    phi = MeroExpr.exp_of(LaurentPoly({1: a}), RationalPart.from_poly(_monomial_den(k)))
    psi = MeroExpr.exp_of(LaurentPoly({1: a}), RationalPart([-1.0], _monomial_den(k)))
    return phi, psi


def essential_M(k: int = 2, a: float = 0.3, *, allow_divergent: bool = False) -> CatalogEntry:
    """Two-ended surface with an essential singularity yet finite curvature.

    phi = z^k e^(az), psi = -e^(az)/z^k, dh = e^(-az) dz on the punctured
    plane; requires k >= 2 and 0 < a < pi/2.
    """
    k = int(k)
    a = float(a)
    if not (0.0 < a < math.pi / 2.0):
        raise ParamError("essential_M: a must satisfy 0 < a < pi/2")
    phi, psi = _essential_core(k, a, "essential_M", allow_divergent)
    dh = MeroExpr.exp_of(LaurentPoly({1: -a}))
    domain = PuncturedSphere((0.0, INFINITY))
    data = WeierstrassData(phi, psi, dh, domain, label=f"essential_M(k={k}, a={a:g})")
    expected = Expected(
        k_total=-FOUR_PI * k,
        kperp_total=0.0,
        ends=(
            ExpectedEnd(0.0, KIND_REGULAR, index=0, d=k - 1, d_tilde=k - 1),
            ExpectedEnd(INFINITY, KIND_TRANSCENDENTAL),
        ),
        periods_pass=True,
        locus="empty",
        complete=True,
        notes=("total curvature converges absolutely despite the essential point",),
    )
    return CatalogEntry("essential-m", data, expected)


def essential_E(k: int = 2, a: float = 0.3, *, allow_divergent: bool = False) -> CatalogEntry:
    """One-ended essential-singularity variant: dh = z^k e^(-az) dz on the plane.

    a = 0 is allowed and gives the classical one-ended surfaces with dihedral
    symmetry.
    """
    k = int(k)
    a = float(a)
    if not (0.0 <= a < math.pi / 2.0):
        raise ParamError("essential_E: a must satisfy 0 <= a < pi/2")
    phi, psi = _essential_core(k, a, "essential_E", allow_divergent)
    dh = MeroExpr.exp_of(LaurentPoly({1: -a}), RationalPart.from_poly(_monomial_den(k)))
    domain = PuncturedSphere((INFINITY,))
    data = WeierstrassData(phi, psi, dh, domain, label=f"essential_E(k={k}, a={a:g})")
    expected = Expected(
        k_total=-FOUR_PI * k,
        kperp_total=0.0,
        ends=(ExpectedEnd(INFINITY, KIND_TRANSCENDENTAL),),
        periods_pass=True,
        locus="empty",
        complete=True,
    )
    return CatalogEntry("essential-e", data, expected)


def essential_C(k: int = 2, a: float = 0.3, *, allow_divergent: bool = False) -> CatalogEntry:
    """Two-ended essential-singularity variant: dh = e^(-az)/z^k dz."""
    k = int(k)
    a = float(a)
    if not (0.0 <= a < math.pi / 2.0):
        raise ParamError("essential_C: a must satisfy 0 <= a < pi/2")
    phi, psi = _essential_core(k, a, "essential_C", allow_divergent)
    dh = MeroExpr.exp_of(LaurentPoly({1: -a}), RationalPart([1.0], _monomial_den(k)))
    domain = PuncturedSphere((0.0, INFINITY))
    data = WeierstrassData(phi, psi, dh, domain, label=f"essential_C(k={k}, a={a:g})")
    expected = Expected(
        k_total=-FOUR_PI * k,
        kperp_total=0.0,
        ends=(
            ExpectedEnd(0.0, KIND_REGULAR, index=0, d=2 * k - 1, d_tilde=2 * k - 1),
            ExpectedEnd(INFINITY, KIND_TRANSCENDENTAL),
        ),
        periods_pass=True,
        locus="empty",
        complete=True,
    )
    return CatalogEntry("essential-c", data, expected)


def singular1(a: complex = 2.0) -> CatalogEntry:
    """Two good singular ends: phi = z^2(z^2+a), psi = z^4/(z^2+a).

    dh = (z^2+a)/z^4 dz on the punctured plane.  Large positive real a keeps
    the interior collision-free; the ends carry indices +2 and -2.
    """
    a = complex(a)
    if a == 0:
        raise ParamError("singular1: a must be nonzero")
    phi = MeroExpr.from_poly([0.0, 0.0, a, 0.0, 1.0])
    psi = _rat([0.0, 0.0, 0.0, 0.0, 1.0], [a, 0.0, 1.0])
    dh = _rat([a, 0.0, 1.0], [0.0, 0.0, 0.0, 0.0, 1.0])
    domain = PuncturedSphere((0.0, INFINITY))
    data = WeierstrassData(phi, psi, dh, domain, label=f"singular1(a={_fmt(a)})")
    expected = Expected(
        k_total=-8.0 * math.pi,
        kperp_total=0.0,
        ends=(
            ExpectedEnd(0.0, KIND_GOOD_SINGULAR, m=2, n=4, index=2, d=3, d_tilde=1),
            ExpectedEnd(INFINITY, KIND_GOOD_SINGULAR, m=4, n=2, index=-2, d=5, d_tilde=3),
        ),
        periods_pass=True,
        locus="empty",
        complete=True,
        notes=("degree 4 spinors; index sum 0",),
    )
    return CatalogEntry("singular1", data, expected)


# Frozen after a locus scan over candidate parameter pairs; see singular2().
_SINGULAR2_A = 4.0
_SINGULAR2_B = 2.0


def singular2(a: complex | None = None, b: complex | None = None) -> CatalogEntry:
    """One good singular end: phi = z(z^2+az+b), psi = z^2/(z^2+az+b).

    dh = (z^2+az+b)/z^7 dz, with the point at infinity an interior point of
    the domain (only 0 is punctured).  The default (a, b) pair was found by
    scanning the collision locus and is collision-free on the whole domain.
    """
    a = _SINGULAR2_A if a is None else complex(a)
    b = _SINGULAR2_B if b is None else complex(b)
    if b == 0:
        raise ParamError("singular2: b must be nonzero (0 would merge with the puncture)")
    phi = MeroExpr.from_poly([0.0, b, a, 1.0])
    psi = _rat([0.0, 0.0, 1.0], [b, a, 1.0])
    dh = _rat([b, a, 1.0], [0.0] * 7 + [1.0])
    domain = PuncturedSphere((0.0,))
    data = WeierstrassData(phi, psi, dh, domain, label=f"singular2(a={_fmt(a)}, b={_fmt(b)})")
    expected = Expected(
        k_total=-8.0 * math.pi,
        kperp_total=0.0,
        ends=(
            ExpectedEnd(0.0, KIND_GOOD_SINGULAR, m=1, n=2, index=1, d=6, d_tilde=5),
        ),
        periods_pass=True,
        locus="empty" if (a, b) == (_SINGULAR2_A, _SINGULAR2_B) else None,
        complete=True,
        notes=("infinity is an interior point carrying a spinor pole of order 3",),
    )
    return CatalogEntry("singular2", data, expected)


def incomplete_demo() -> CatalogEntry:
    """Surface whose end at infinity is incomplete despite |z| -> oo.

    phi = 1/z^2, psi = 1/z^3, dh = dz.  The spinors collide at infinity with
    contact orders (2, 3); the reduced multiplicity there is -1, so metric
    rays toward that end have finite length.
    """
    phi = _rat([1.0], [0.0, 0.0, 1.0])
    psi = _rat([1.0], [0.0, 0.0, 0.0, 1.0])
    dh = MeroExpr.const(1.0)
    domain = PuncturedSphere((0.0, INFINITY))
    data = WeierstrassData(phi, psi, dh, domain, label="incomplete_demo")
    expected = Expected(
        k_total=8.0 * math.pi,
        kperp_total=0.0,
        ends=(
            ExpectedEnd(0.0, KIND_GOOD_SINGULAR, m=2, n=3, index=2, d=4, d_tilde=2),
            ExpectedEnd(INFINITY, KIND_GOOD_SINGULAR, m=2, n=3, index=2, d=1, d_tilde=-1),
        ),
        periods_pass=True,
        locus="isolated",
        complete=False,
        notes=(
            "positive total curvature: the completeness hypotheses of the"
            " quantization and genus-bound identities fail here",
            "the spinors also collide at the five fifth roots of unity"
            " (solve conj(z)**3 = z**2), branch-type points with equal"
            " contact orders",
        ),
    )
    return CatalogEntry("incomplete-demo", data, expected)


def alias_palmer(base: CatalogEntry | None = None, a: complex = 1j) -> CatalogEntry:
    """Deformation psi -> a psi of an entry whose spinors satisfy psi = -1/phi.

    Regularity and periods survive whenever a is not a negative real number.
    """
    a = complex(a)
    if a == 0:
        raise ParamError("alias_palmer: a must be nonzero")
    if a.imag == 0.0 and a.real < 0.0:
        raise ParamError("alias_palmer: a must not be a negative real number")
    if base is None:
        base = enneper1(c=-1.0, s=1.0)
    product = base.data.phi * base.data.psi
    if not (product.is_const() and abs(product.const_value() + 1.0) < 1e-10):
        raise ParamError("alias_palmer: base entry must satisfy psi = -1/phi")
    data = WeierstrassData(
        base.data.phi,
        base.data.psi.scaled(a),
        base.data.dh,
        base.data.domain,
        label=f"alias_palmer({base.name}, a={_fmt(a)})",
    )
    expected = Expected(
        k_total=base.expected.k_total,
        kperp_total=None,
        periods_pass=True,
        locus="empty",
        complete=True,
        notes=("spinor product is the constant -a",),
    )
    return CatalogEntry("alias-palmer", data, expected)


def maximal_catenoid() -> CatalogEntry:
    """Rotational surface in a 3-dimensional timelike slice, with a cone point.

    phi = z, psi = 1/z, dh = dz/z.  The spinors collide along the whole unit
    circle, so this entry deliberately fails the regularity check; it is the
    standard demonstration that curve-shaped collision loci occur.
    """
    phi = MeroExpr.from_poly([0.0, 1.0])
    psi = _rat([1.0], [0.0, 1.0])
    dh = _rat([1.0], [0.0, 1.0])
    domain = PuncturedSphere((0.0, INFINITY))
    data = WeierstrassData(phi, psi, dh, domain, label="maximal_catenoid")
    expected = Expected(
        ends=(
            ExpectedEnd(0.0, KIND_REGULAR, index=0),
            ExpectedEnd(INFINITY, KIND_REGULAR, index=0),
        ),
        periods_pass=True,
        locus="curve",
        complete=True,
        notes=("cone singularity along |z| = 1",),
    )
    return CatalogEntry("maximal-catenoid", data, expected)


# name -> (constructor, {param: parser}) for the command-line interface
REGISTRY: dict = {
    "catenoid": (catenoid, {"t": float, "s": float}),
    "helicoid": (helicoid_family, {"t": float, "lam": complex}),
    "enneper1": (enneper1, {"c": complex, "s": complex}),
    "enneper2": (enneper2, {"c": complex, "s": complex}),
    "enneper-k": (enneper_k, {"k": int, "c": complex, "s": complex}),
    "knoid": (knoid, {"k": int, "a": complex, "b": complex}),
    "graph1": (graph1, {}),
    "graph2": (graph2, {"n": int}),
    "essential-m": (essential_M, {"k": int, "a": float}),
    "essential-e": (essential_E, {"k": int, "a": float}),
    "essential-c": (essential_C, {"k": int, "a": float}),
    "singular1": (singular1, {"a": complex}),
    "singular2": (singular2, {"a": complex, "b": complex}),
    "incomplete-demo": (incomplete_demo, {}),
    "alias-palmer": (alias_palmer, {"a": complex}),
    "maximal-catenoid": (maximal_catenoid, {}),
}


def build(name: str, **params) -> CatalogEntry:
    """Look up a constructor by its registry name and call it."""
    if name not in REGISTRY:
        raise ParamError(f"unknown catalog entry {name!r}; see REGISTRY")
    func, spec = REGISTRY[name]
    kwargs = {}
    for key, value in params.items():
        if key not in spec:
            raise ParamError(f"{name} takes no parameter {key!r}")
        kwargs[key] = spec[key](value) if isinstance(value, str) else value
    return func(**kwargs)


def all_entries() -> list[CatalogEntry]:
    """One instance of every family at its default parameters."""
    return [func() for func, _ in REGISTRY.values()]
