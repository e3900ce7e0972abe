"""Closed arithmetic for the meromorphic expressions the surface data needs.

The working class is a finite sum of terms ``rational(z) * exp(laurent(z))``,
which is closed under addition, multiplication and d/dz and is exactly large
enough to hold every Weierstrass datum this laboratory constructs (rational
maps, and rational multiples of ``exp`` of a Laurent polynomial).  It is
deliberately *not* a CAS: no simplification happens beyond cancelling common
polynomial factors and merging terms whose exponential parts coincide.
Hyperbolic shorthands like cosh of a Laurent argument are not represented;
callers expand them into two exponential terms themselves.

Serialisation grammar (one line, whitespace-insensitive except inside ` + `
which separates terms)::

    expr    := term (" + " term)*
    term    := rat [" * exp(" laurent ")"]
    rat     := poly " / " poly
    poly    := "[" coeff ("," coeff)* "]"        # ascending powers of z
    laurent := "{" int ":" coeff ("," int ":" coeff)* "}"

Coefficients are Python float/complex literals without internal spaces.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npp

from .errors import (
    EssentialPointError,
    NonConvergent,
    NotAlgebraic,
    NotIsolated,
    ParseError,
    PoleError,
    UnsupportedExpr,
)

INFINITY = complex(math.inf, 0.0)

_PAIR_TOL = 1e-7    # root pairing for gcd cancellation (verified by division)
_SCATTER_TOL = 1e-5  # computed roots of multiplicity m scatter like eps**(1/m)
_TRIM_REL = 1e-13   # relative floor below which a coefficient is noise


def is_infinity(p: complex) -> bool:
    p = complex(p)
    return math.isinf(p.real) or math.isinf(p.imag)


def _format_number(c: complex) -> str:
    c = complex(c)
    if c.imag == 0.0:
        return repr(c.real)
    return repr(c)


def _parse_number(text: str) -> complex:
    try:
        return complex(text.strip())
    except ValueError as exc:
        raise ParseError(f"bad coefficient {text!r}") from exc


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Finite Laurent polynomial sum(c_e * z**e), exponents any integers.

    Stored as an exponent->coefficient dict holding no zero coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, complex] | None = None):
        clean: dict[int, complex] = {}
        if coeffs:
            for e, c in coeffs.items():
                c = complex(c)
                if c != 0:
                    clean[int(e)] = clean.get(int(e), 0) + c
        self.coeffs = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def const(cls, c: complex) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def term(cls, exponent: int, coeff: complex = 1.0) -> "LaurentPoly":
        return cls({exponent: coeff})

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return all(e == 0 for e in self.coeffs)

    def const_value(self) -> complex:
        return self.coeffs.get(0, 0.0 + 0.0j)

    def min_exp(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    def max_exp(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def without_const(self) -> "LaurentPoly":
        return LaurentPoly({e: c for e, c in self.coeffs.items() if e != 0})

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        merged = dict(self.coeffs)
        for e, c in other.coeffs.items():
            merged[e] = merged.get(e, 0) + c
        return LaurentPoly(merged)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def scaled(self, s: complex) -> "LaurentPoly":
        return LaurentPoly({e: s * c for e, c in self.coeffs.items()})

    def derivative(self) -> "LaurentPoly":
        return LaurentPoly({e - 1: e * c for e, c in self.coeffs.items() if e != 0})

    def invert_variable(self) -> "LaurentPoly":
        """The substitution z -> 1/w: exponents flip sign."""
        return LaurentPoly({-e: c for e, c in self.coeffs.items()})

    def __call__(self, z):
        if isinstance(z, np.ndarray):
            total = np.zeros_like(z, dtype=complex)
            with np.errstate(all="ignore"):
                for e, c in self.coeffs.items():
                    total = total + c * z**e
            return total
        z = complex(z)
        total = 0.0 + 0.0j
        for e, c in self.coeffs.items():
            if e < 0 and z == 0:
                raise ZeroDivisionError("Laurent evaluation at 0")
            total += c * z**e
        return total

    def signature(self) -> tuple:
        return tuple(sorted((e, complex(c)) for e, c in self.coeffs.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.signature())

    def serialize(self) -> str:
        items = ", ".join(
            f"{e}: {_format_number(c)}" for e, c in sorted(self.coeffs.items())
        )
        return "{" + items + "}"

    __repr__ = serialize


def laurent_to_rational(L: LaurentPoly) -> "RationalPart":
    """Rewrite a Laurent polynomial as a quotient of polynomials."""
    if L.is_zero():
        return RationalPart([0.0], [1.0])
    m = min(0, L.min_exp())
    num = np.zeros(L.max_exp() - m + 1, dtype=complex)
    for e, c in L.coeffs.items():
        num[e - m] = c
    den = np.zeros(-m + 1, dtype=complex)
    den[-1] = 1.0
    return RationalPart(num, den)


# ---------------------------------------------------------------------------
# Rational parts


def _trim(coeffs) -> np.ndarray:
    a = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale > 0:
        a = np.where(np.abs(a) < _TRIM_REL * scale, 0.0, a)
    nz = np.nonzero(a)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return a[: nz[-1] + 1]


def _poly_roots(coeffs: np.ndarray) -> list[complex]:
    if len(coeffs) <= 1:
        return []
    return [complex(r) for r in npp.polyroots(coeffs)]


class RationalPart:
    """Quotient num(z)/den(z) of polynomials with non-negative exponents.

    Coefficients ascend: ``[c0, c1, c2]`` is c0 + c1 z + c2 z^2.  On
    construction common roots of numerator and denominator are cancelled
    (root clustering at 1e-10, verified by polynomial division with a small
    remainder) and the denominator is made monic.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den, *, cancel: bool = True):
        num = _trim(num)
        den = _trim(den)
        if len(den) == 1 and den[0] == 0:
            raise ZeroDivisionError("denominator is identically zero")
        if cancel and len(num) > 1 and len(den) > 1 and not self._is_zero_coeffs(num):
            num, den = _cancel_common(num, den)
        lead = den[-1]
        self.num = num / lead
        self.den = den / lead

    @staticmethod
    def _is_zero_coeffs(a: np.ndarray) -> bool:
        return len(a) == 1 and a[0] == 0

    @classmethod
    def zero(cls) -> "RationalPart":
        return cls([0.0], [1.0], cancel=False)

    @classmethod
    def one(cls) -> "RationalPart":
        return cls([1.0], [1.0], cancel=False)

    @classmethod
    def const(cls, c: complex) -> "RationalPart":
        return cls([complex(c)], [1.0], cancel=False)

    @classmethod
    def from_poly(cls, coeffs) -> "RationalPart":
        return cls(coeffs, [1.0], cancel=False)

    def is_zero(self) -> bool:
        return self._is_zero_coeffs(self.num)

    def is_const(self) -> bool:
        return len(self.num) == 1 and len(self.den) == 1

    def const_value(self) -> complex:
        return complex(self.num[0] / self.den[0])

    def degrees(self) -> tuple[int, int]:
        dn = 0 if self.is_zero() else len(self.num) - 1
        return dn, len(self.den) - 1

    def __add__(self, other: "RationalPart") -> "RationalPart":
        n = npp.polyadd(npp.polymul(self.num, other.den), npp.polymul(other.num, self.den))
        return RationalPart(n, npp.polymul(self.den, other.den))

    def __neg__(self) -> "RationalPart":
        return RationalPart(-self.num, self.den, cancel=False)

    def __sub__(self, other: "RationalPart") -> "RationalPart":
        return self + (-other)

    def __mul__(self, other: "RationalPart") -> "RationalPart":
        return RationalPart(npp.polymul(self.num, other.num), npp.polymul(self.den, other.den))

    def scaled(self, s: complex) -> "RationalPart":
        return RationalPart(np.asarray(self.num) * complex(s), self.den, cancel=False)

    def reciprocal(self) -> "RationalPart":
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero rational")
        return RationalPart(self.den, self.num, cancel=False)

    def derivative(self) -> "RationalPart":
        dn = npp.polyder(self.num) if len(self.num) > 1 else np.zeros(1, dtype=complex)
        dd = npp.polyder(self.den) if len(self.den) > 1 else np.zeros(1, dtype=complex)
        n = npp.polysub(npp.polymul(dn, self.den), npp.polymul(self.num, dd))
        return RationalPart(n, npp.polymul(self.den, self.den))

    def invert_variable(self) -> "RationalPart":
        """Substitute z -> 1/w and clear powers of w."""
        k = max(len(self.num), len(self.den)) - 1
        num = np.zeros(k + 1, dtype=complex)
        num[k - (len(self.num) - 1):] = self.num[::-1]
        den = np.zeros(k + 1, dtype=complex)
        den[k - (len(self.den) - 1):] = self.den[::-1]
        return RationalPart(num, den)

    def __call__(self, z):
        if isinstance(z, np.ndarray):
            with np.errstate(all="ignore"):
                return npp.polyval(z, self.num) / npp.polyval(z, self.den)
        z = complex(z)
        dv = complex(npp.polyval(z, self.den))
        if dv == 0:
            raise PoleError(f"evaluation at pole z={z}")
        return complex(npp.polyval(z, self.num)) / dv

    def zeros(self) -> list[complex]:
        return [] if self.is_zero() else _poly_roots(self.num)

    def poles(self) -> list[complex]:
        return _poly_roots(self.den)

    def order_at(self, p: complex) -> int:
        """Signed vanishing order at finite p (negative at a pole)."""
        if self.is_zero():
            raise UnsupportedExpr("order of the zero function")
        return _poly_vanishing_order(self.num, p) - _poly_vanishing_order(self.den, p)

    def leading_at(self, p: complex) -> tuple[int, complex]:
        """Order o and coefficient c of the local model c*(z-p)**o at finite p."""
        if self.is_zero():
            raise UnsupportedExpr("leading term of the zero function")
        p = complex(p)
        jn = _poly_vanishing_order(self.num, p)
        jd = _poly_vanishing_order(self.den, p)
        cn = complex(npp.polyval(p, npp.polyder(self.num, jn) if jn else self.num))
        cd = complex(npp.polyval(p, npp.polyder(self.den, jd) if jd else self.den))
        coeff = (cn / math.factorial(jn)) / (cd / math.factorial(jd))
        return jn - jd, coeff

    def serialize(self) -> str:
        fmt = lambda a: "[" + ", ".join(_format_number(c) for c in a) + "]"
        return f"{fmt(self.num)} / {fmt(self.den)}"

    __repr__ = serialize


def _poly_gcd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Monic approximate GCD via the Euclidean remainder sequence.

    Root clustering cannot pair high-multiplicity common factors (a root of
    multiplicity m scatters like eps**(1/m)), but the remainder sequence
    finds them whole.  Callers must validate the result by trial division —
    the small-coefficient truncation here is heuristic.
    """
    a = _trim(np.asarray(a, dtype=complex))
    b = _trim(np.asarray(b, dtype=complex))
    while True:
        if len(b) == 1:
            g = a if b[0] == 0 else np.array([1.0 + 0j])
            break
        _, r = npp.polydiv(a, b)
        r = np.asarray(np.atleast_1d(r), dtype=complex)
        cutoff = 1e-11 * max(
            1e-300, float(np.max(np.abs(a))), float(np.max(np.abs(b)))
        )
        r[np.abs(r) <= cutoff] = 0.0
        a, b = b, _trim(r)
    if len(g) == 1:
        return np.array([1.0 + 0j])
    return g / g[-1]


def _poly_norm(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _snap_coeffs(q: np.ndarray) -> np.ndarray:
    """Zero out real/imaginary coefficient parts that are pure rounding noise
    relative to the largest coefficient."""
    q = np.asarray(q, dtype=complex).copy()
    m = _poly_norm(q)
    q.real[np.abs(q.real) <= 1e-9 * m] = 0.0
    q.imag[np.abs(q.imag) <= 1e-9 * m] = 0.0
    return q


def _divide_out(poly: np.ndarray, factor: np.ndarray) -> np.ndarray | None:
    """poly / factor when the division is (numerically) exact, else None.

    Division by an approximate factor amplifies its error into junk quotient
    coefficients, so the quotient is snapped and the snap kept only when
    multiplying back reproduces the input.
    """
    q, rem = npp.polydiv(poly, factor)
    if _poly_norm(rem) > 1e-8 * max(_poly_norm(poly), 1e-300):
        return None
    q2 = _snap_coeffs(q)
    if _poly_norm(npp.polysub(npp.polymul(q2, factor), poly)) <= 1e-7 * _poly_norm(poly):
        return _trim(q2)
    return _trim(np.asarray(q, dtype=complex))


def _gcd_reduce(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Divide out a validated Euclidean GCD (catches high-multiplicity common
    factors whose computed roots scatter too far for pairing)."""
    if len(num) == 1 or len(den) == 1 or _poly_norm(num) == 0.0 or _poly_norm(den) == 0.0:
        return num, den
    g = _poly_gcd(num, den)
    if len(g) <= 1:
        return num, den
    qn = _divide_out(num, g)
    qd = _divide_out(den, g)
    if qn is None or qd is None:
        return num, den
    return qn, qd


def _cancel_common(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cancel matching roots of num and den (clustered within _CLUSTER_TOL).

    Root pairing goes first — paired midpoints of simple common roots are
    more accurate than the Euclidean sequence — and the GCD pass afterwards
    catches high-multiplicity factors whose computed roots scatter too far
    to pair."""
    rn = _poly_roots(num)
    rd = _poly_roots(den)
    common: list[complex] = []
    used = [False] * len(rn)
    for r in rd:
        best, best_d = -1, math.inf
        for i, s in enumerate(rn):
            if used[i]:
                continue
            d = abs(r - s)
            if d < best_d:
                best, best_d = i, d
        if best >= 0 and best_d <= _PAIR_TOL * (1.0 + abs(r)):
            used[best] = True
            common.append((r + rn[best]) / 2.0)
    if not common:
        return _gcd_reduce(num, den)
    factor = npp.polyfromroots(common)
    qn = _divide_out(num, factor)
    qd = _divide_out(den, factor)
    if qn is not None and qd is not None:
        return _gcd_reduce(qn, qd)
    return _gcd_reduce(num, den)


# ---------------------------------------------------------------------------
# Meromorphic expressions


@dataclass(frozen=True)
class ZeroPoleInventory:
    """Finite zeros/poles (order > 0 zero, < 0 pole), behaviour at infinity
    (signed order, or None when infinity is essential / not analysed), and
    essential points (subset of {0, INFINITY})."""

    finite: tuple[tuple[complex, int], ...]
    at_infinity: int | None
    essential: tuple[complex, ...] = ()

    def finite_poles(self) -> list[tuple[complex, int]]:
        return [(p, -o) for p, o in self.finite if o < 0]

    def finite_zeros(self) -> list[tuple[complex, int]]:
        return [(p, o) for p, o in self.finite if o > 0]


def _cluster_points(points: list[complex]) -> list[tuple[complex, int]]:
    """Group nearly identical points, returning (mean, multiplicity).

    Computed roots of multiplicity m scatter like eps**(1/m) around the true
    root, so the grouping tolerance is deliberately loose; positions of
    genuinely distinct singular points in this laboratory are never closer
    than ~1e-2.
    """
    out: list[tuple[complex, int]] = []
    for p in points:
        for i, (q, m) in enumerate(out):
            if abs(p - q) <= _SCATTER_TOL * (1.0 + abs(q)):
                out[i] = ((q * m + p) / (m + 1), m + 1)
                break
        else:
            out.append((p, 1))
    return out


def _poly_vanishing_order(coeffs: np.ndarray, p: complex, zero_tol: float = 1e-10) -> int:
    """Order of vanishing of a polynomial at p via successive derivatives.

    Far more robust than clustering computed roots: a root of multiplicity m
    scatters like eps**(1/m) whereas derivative values are stable.  The zero
    threshold is scaled by the natural evaluation magnitude sum |c_i| |p|^i.
    """
    a = np.asarray(coeffs, dtype=complex)
    deg = len(a) - 1
    p = complex(p)
    for k in range(deg + 1):
        scale = float(np.sum(np.abs(a) * np.abs(p) ** np.arange(len(a))))
        v = complex(npp.polyval(p, a))
        if abs(v) > zero_tol * (1.0 + scale):
            return k
        a = npp.polyder(a)
    return deg + 1  # vanishes beyond its degree: only the zero polynomial


class MeroExpr:
    """Finite sum of rational(z) * exp(laurent(z)) terms.

    Normal form: the constant part of each exponent is folded into the
    rational factor, zero terms are dropped, and terms with equal exponents
    are merged — so an algebraic expression is a single term with zero
    exponent.
    """

    __slots__ = ("terms",)

    def __init__(self, terms):
        merged: list[tuple[RationalPart, LaurentPoly]] = []
        index: dict[tuple, int] = {}
        for rat, expo in terms:
            c0 = expo.const_value()
            if c0 != 0:
                rat = rat.scaled(cmath.exp(c0))
                expo = expo.without_const()
            if rat.is_zero():
                continue
            sig = expo.signature()
            if sig in index:
                i = index[sig]
                merged[i] = (merged[i][0] + rat, expo)
            else:
                index[sig] = len(merged)
                merged.append((rat, expo))
        self.terms = tuple((r, e) for r, e in merged if not r.is_zero())

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "MeroExpr":
        return cls([])

    @classmethod
    def const(cls, c: complex) -> "MeroExpr":
        return cls([(RationalPart.const(c), LaurentPoly.zero())])

    @classmethod
    def var(cls) -> "MeroExpr":
        return cls.from_poly([0.0, 1.0])

    @classmethod
    def from_poly(cls, coeffs) -> "MeroExpr":
        return cls([(RationalPart.from_poly(coeffs), LaurentPoly.zero())])

    @classmethod
    def from_rational(cls, num, den) -> "MeroExpr":
        return cls([(RationalPart(num, den), LaurentPoly.zero())])

    @classmethod
    def exp_of(cls, expo: LaurentPoly, rat: RationalPart | None = None) -> "MeroExpr":
        return cls([(rat if rat is not None else RationalPart.one(), expo)])

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_algebraic(self) -> bool:
        return all(e.is_zero() for _, e in self.terms)

    def is_const(self) -> bool:
        if self.is_zero():
            return True
        return self.is_algebraic() and self.terms[0][0].is_const()

    def const_value(self) -> complex:
        if self.is_zero():
            return 0j
        if not self.is_const():
            raise UnsupportedExpr("not a constant")
        return self.terms[0][0].const_value()

    def as_rational(self) -> RationalPart:
        if self.is_zero():
            return RationalPart.zero()
        if not self.is_algebraic():
            raise NotAlgebraic("expression has a non-constant exponential part")
        return self.terms[0][0]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "MeroExpr") -> "MeroExpr":
        return MeroExpr(list(self.terms) + list(other.terms))

    def __neg__(self) -> "MeroExpr":
        return MeroExpr([(-r, e) for r, e in self.terms])

    def __sub__(self, other: "MeroExpr") -> "MeroExpr":
        return self + (-other)

    def __mul__(self, other: "MeroExpr") -> "MeroExpr":
        prods = []
        for r1, e1 in self.terms:
            for r2, e2 in other.terms:
                prods.append((r1 * r2, e1 + e2))
        return MeroExpr(prods)

    def scaled(self, s: complex) -> "MeroExpr":
        return MeroExpr([(r.scaled(s), e) for r, e in self.terms])

    def divide(self, other: "MeroExpr") -> "MeroExpr":
        """Division by a single-term expression (the only closed case)."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero expression")
        if len(other.terms) != 1:
            raise UnsupportedExpr("can only divide by a single-term expression")
        rat, expo = other.terms[0]
        inv = MeroExpr([(rat.reciprocal(), -expo)])
        return self * inv

    def derivative(self) -> "MeroExpr":
        out = []
        for rat, expo in self.terms:
            out.append((rat.derivative(), expo))
            if not expo.is_zero():
                out.append((rat * laurent_to_rational(expo.derivative()), expo))
        return MeroExpr(out)

    def logder(self) -> "MeroExpr":
        """f'/f, available for single-term expressions (always algebraic)."""
        if len(self.terms) != 1:
            raise UnsupportedExpr("log-derivative needs a single-term expression")
        rat, expo = self.terms[0]
        piece = RationalPart(
            npp.polysub(
                npp.polymul(npp.polyder(rat.num) if len(rat.num) > 1 else [0.0], rat.den),
                npp.polymul(rat.num, npp.polyder(rat.den) if len(rat.den) > 1 else [0.0]),
            ),
            npp.polymul(rat.num, rat.den),
        )
        total = MeroExpr([(piece, LaurentPoly.zero())])
        if not expo.is_zero():
            total = total + MeroExpr(
                [(laurent_to_rational(expo.derivative()), LaurentPoly.zero())]
            )
        return total

    def mobius(self, a: complex, b: complex, c: complex, d: complex) -> "MeroExpr":
        """(a f + b) / (c f + d) for algebraic f."""
        if abs(a * d - b * c) < 1e-14:
            raise ValueError("Mobius matrix is singular")
        rat = self.as_rational()
        n, dd = rat.num, rat.den
        top = npp.polyadd(npp.polymul([complex(a)], n), npp.polymul([complex(b)], dd))
        bot = npp.polyadd(npp.polymul([complex(c)], n), npp.polymul([complex(d)], dd))
        return MeroExpr([(RationalPart(top, bot), LaurentPoly.zero())])

    # -- evaluation ---------------------------------------------------------

    def __call__(self, z):
        if isinstance(z, np.ndarray):
            total = np.zeros(z.shape, dtype=complex)
            with np.errstate(all="ignore"):
                for rat, expo in self.terms:
                    v = npp.polyval(z, rat.num) / npp.polyval(z, rat.den)
                    if not expo.is_zero():
                        v = v * np.exp(expo(z))
                    total = total + v
            return total
        z = complex(z)
        total = 0j
        for rat, expo in self.terms:
            if not expo.is_zero() and expo.min_exp() < 0 and z == 0:
                raise EssentialPointError("evaluation at the essential point 0")
            total += rat(z) * (cmath.exp(expo(z)) if not expo.is_zero() else 1.0)
        return total

    # -- structure ----------------------------------------------------------

    def singular_points(self) -> tuple[list[complex], bool, bool]:
        """Finite singular points, plus essential-at-0 / essential-at-inf flags.

        Works for any expression (used for isolation radii).  Denominator
        roots are clustered *within* each term (a computed root of
        multiplicity m scatters like eps**(1/m), so the members of one cloud
        are a single singularity), but points originating from different
        terms are kept distinct even when very close: they were constructed
        separately and may genuinely differ.
        """
        pts: list[complex] = []
        ess0 = essinf = False
        for rat, expo in self.terms:
            pts.extend(q for q, _ in _cluster_points(rat.poles()))
            if expo.min_exp() < 0:
                ess0 = True
            if expo.max_exp() > 0:
                essinf = True
        merged: list[complex] = []
        for p in pts:
            if all(abs(p - q) > 1e-13 * (1.0 + abs(q)) for q in merged):
                merged.append(p)
        return merged, ess0, essinf

    def zeros_and_poles(self) -> ZeroPoleInventory:
        """Inventory of zeros and poles with orders.

        Supported for algebraic expressions and for single-term expressions
        (whose essential points are flagged); a multi-term transcendental sum
        raises UnsupportedExpr.
        """
        if self.is_zero():
            raise UnsupportedExpr("zero expression has no zero/pole inventory")
        if not self.is_algebraic() and len(self.terms) > 1:
            raise UnsupportedExpr("zeros/poles of a multi-term transcendental sum")
        rat, expo = self.terms[0]
        finite: list[tuple[complex, int]] = []
        for p, m in _cluster_points(rat.zeros()):
            finite.append((p, m))
        for p, m in _cluster_points(rat.poles()):
            finite.append((p, -m))
        ess: list[complex] = []
        if not expo.is_zero():
            if expo.min_exp() < 0:
                ess.append(0j)
                finite = [(p, o) for p, o in finite if abs(p) > 1e-12]
            if expo.max_exp() > 0:
                ess.append(INFINITY)
        dn, dd = rat.degrees()
        at_inf: int | None = dd - dn
        if INFINITY in ess:
            at_inf = None
        return ZeroPoleInventory(tuple(finite), at_inf, tuple(ess))

    def degree(self) -> int:
        """Degree of an algebraic expression as a map of the sphere."""
        rat = self.as_rational()
        if rat.is_zero():
            return 0
        dn, dd = rat.degrees()
        return max(dn, dd)

    def order_at(self, p: complex) -> int:
        """Signed vanishing order at p (poles negative).

        Computed from successive derivatives of the numerator/denominator
        polynomials, never from clustered roots.  Supported for algebraic
        expressions and single-term ones away from their essential points.
        """
        if self.is_zero():
            raise UnsupportedExpr("order of the zero expression")
        if len(self.terms) > 1 and not self.is_algebraic():
            if is_infinity(p):
                if any(expo.max_exp() > 0 for _, expo in self.terms):
                    raise EssentialPointError("essential point at infinity")
                return self.change_chart_to_infinity().order_at(0j)
            return self._order_by_probe(complex(p))
        rat, expo = self.terms[0]
        if is_infinity(p):
            if expo.max_exp() > 0:
                raise EssentialPointError("essential point at infinity")
            return rat.invert_variable().order_at(0j)
        if expo.min_exp() < 0 and abs(p) < 1e-12:
            raise EssentialPointError("essential point at 0")
        return rat.order_at(p)

    def _order_by_probe(self, p: complex, max_order: int = 40) -> int:
        """Order of a transcendental sum at an ordinary finite point.

        The terms cannot be merged symbolically (distinct exponents), but away
        from essential points the sum is an honest meromorphic germ: strip the
        deepest per-term pole, then walk derivatives until one evaluates to a
        certified nonzero.  The zero test is relative to the per-term
        magnitude sum, so exact cross-term cancellation is detected while
        genuinely nonzero values (however produced) are not misread as zero.
        """
        lows = []
        for rat, expo in self.terms:
            if expo.min_exp() < 0 and abs(p) < 1e-12:
                raise EssentialPointError("essential point at 0")
            lows.append(rat.order_at(p))
        low = min(lows)
        expr = self
        if low != 0:
            shift = npp.polypow(np.array([-p, 1.0], dtype=complex), abs(low))
            if low < 0:
                expr = expr * MeroExpr.from_rational(shift, [1.0])
            else:
                expr = expr * MeroExpr.from_rational([1.0], shift)
        cur = expr
        for j in range(max_order + 1):
            total = 0j
            scale = 0.0
            for rat, expo in cur.terms:
                o, lead = rat.leading_at(p)
                if o < 0:
                    raise UnsupportedExpr(
                        "unreduced pole while probing a vanishing order"
                    )
                if o == 0:
                    v = lead * np.exp(complex(expo(p)))
                    total += v
                    scale += abs(v)
            if abs(total) > 1e-9 * (1.0 + scale):
                return low + j
            cur = cur.derivative()
        raise UnsupportedExpr(
            f"vanishing order at {p} not certified within {max_order} derivatives"
        )

    def change_chart_to_infinity(self, as_form: bool = False) -> "MeroExpr":
        """Rewrite under z = 1/w.  For a 1-form coefficient (``as_form``) the
        result includes the substitution factor dz = -dw/w**2."""
        out = []
        for rat, expo in self.terms:
            out.append((rat.invert_variable(), expo.invert_variable()))
        new = MeroExpr(out)
        if as_form:
            new = new * MeroExpr.from_rational([-1.0], [0.0, 0.0, 1.0])
        return new

    def shift_origin(self, p: complex) -> "MeroExpr":
        """Rewrite under z = w + p (local chart centred at finite p)."""
        p = complex(p)
        if p == 0:
            return self
        out = []
        shift = np.array([p, 1.0], dtype=complex)
        for rat, expo in self.terms:
            num = _compose_poly_linear(rat.num, shift)
            den = _compose_poly_linear(rat.den, shift)
            if not expo.is_zero() and expo.min_exp() < 0:
                raise UnsupportedExpr("cannot recentre across an essential point at 0")
            newexpo = LaurentPoly.zero()
            for e, c in expo.coeffs.items():
                # (w + p)^e for e >= 0 expands to a polynomial exponent
                powers = npp.polypow(shift, e) if e > 0 else np.array([1.0])
                newexpo = newexpo + LaurentPoly(
                    {k: c * powers[k] for k in range(len(powers))}
                )
            out.append((RationalPart(num, den), newexpo))
        return MeroExpr(out)

    # -- residues -----------------------------------------------------------

    def residue(self, p: complex, settings=None) -> complex:
        """Residue at finite p by certified circle quadrature.

        The circle radius is half the distance to the nearest other singular
        point (capped at 0.5); the value is accepted when recomputation at
        half the radius agrees to 1e-9 relative.
        """
        from .config import DEFAULT

        settings = settings or DEFAULT
        p = complex(p)
        pts, ess0, _ = self.singular_points()
        if ess0 and abs(p) > _SCATTER_TOL:
            pts = pts + [0j]
        # the singularity nearest to p (within root-scatter distance) is p's
        # own; everything else bounds the admissible radius.
        own_tol = _SCATTER_TOL * (1.0 + abs(p))
        pts = sorted(pts, key=lambda q: abs(q - p))
        others = pts[1:] if (pts and abs(pts[0] - p) <= own_tol) else pts
        radius = 0.5
        if others:
            d = min(abs(q - p) for q in others)
            if d < 1e-8 * (1.0 + abs(p)):
                raise NotIsolated(
                    f"another singularity lies {d:.2e} from {p}: no admissible radius"
                )
            radius = min(d / 2.0, 0.5)
        nodes = settings.circle_nodes
        while True:
            r1 = self._circle_residue(p, radius, nodes)
            r2 = self._circle_residue(p, radius / 2.0, nodes)
            if abs(r1 - r2) <= settings.residue_rel_tol * (1.0 + max(abs(r1), abs(r2))):
                return r2
            nodes *= 2
            if nodes > settings.circle_max_nodes:
                raise NonConvergent(
                    f"residue at {p}: circle values differ by {abs(r1 - r2):.3e}"
                )

    def _circle_residue(self, p: complex, r: float, n: int) -> complex:
        theta = 2.0 * np.pi * np.arange(n) / n
        ring = np.exp(1j * theta)
        vals = self(p + r * ring)
        if not np.all(np.isfinite(vals)):
            raise NonConvergent(f"non-finite samples on circle around {p}")
        return complex(np.mean(vals * ring) * r)

    # -- serialisation ------------------------------------------------------

    def serialize(self) -> str:
        if not self.terms:
            return "[0.0] / [1.0]"
        parts = []
        for rat, expo in self.terms:
            t = rat.serialize()
            if not expo.is_zero():
                t += f" * exp({expo.serialize()})"
            parts.append(t)
        return " + ".join(parts)

    __repr__ = serialize

    @classmethod
    def parse(cls, text: str) -> "MeroExpr":
        text = text.strip()
        if not text:
            raise ParseError("empty expression")
        terms = []
        for chunk in text.split(" + "):
            terms.append(_parse_term(chunk.strip()))
        return cls(terms)


def _compose_poly_linear(coeffs: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """p(shift(w)) for polynomial p and linear shift, by Horner."""
    out = np.array([0.0], dtype=complex)
    for c in coeffs[::-1]:
        out = npp.polyadd(npp.polymul(out, shift), [c])
    return _trim(out)


def _parse_poly(text: str) -> list[complex]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError(f"expected [c0, c1, ...], got {text!r}")
    body = text[1:-1].strip()
    if not body:
        raise ParseError("empty coefficient list")
    return [_parse_number(tok) for tok in body.split(",")]


def _parse_laurent(text: str) -> LaurentPoly:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"expected {{exp: coeff, ...}}, got {text!r}")
    body = text[1:-1].strip()
    coeffs: dict[int, complex] = {}
    if body:
        for item in body.split(","):
            if ":" not in item:
                raise ParseError(f"bad laurent item {item!r}")
            e, _, c = item.partition(":")
            coeffs[int(e.strip())] = _parse_number(c)
    return LaurentPoly(coeffs)


def _parse_term(text: str) -> tuple[RationalPart, LaurentPoly]:
    expo = LaurentPoly.zero()
    if "* exp(" in text:
        ratpart, _, rest = text.partition("* exp(")
        rest = rest.strip()
        if not rest.endswith(")"):
            raise ParseError(f"unterminated exp(...) in {text!r}")
        expo = _parse_laurent(rest[:-1])
    else:
        ratpart = text
    if "/" not in ratpart:
        raise ParseError(f"term {text!r} lacks 'num / den'")
    numtxt, _, dentxt = ratpart.partition("/")
    rat = RationalPart(_parse_poly(numtxt), _parse_poly(dentxt))
    return rat, expo
