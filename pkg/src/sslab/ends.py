"""Classification of surface ends at domain punctures.

A puncture is an end of the immersed surface.  The end is *regular* when the
two spinor functions disagree there as points of the Riemann sphere, and
singular when they collide.  A collision with distinct contact orders (m, n)
still carries a well-defined integer index; equal contact orders do not, and
an essential singularity of either spinor puts the end beyond algebraic
bookkeeping altogether.

The index is computed twice: symbolically from the contact orders and
numerically as a certified winding number of ``phi - conj(psi)`` on small
chart circles.  The two must agree or the computation is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Settings
from .errors import (
    BadEndError,
    EssentialPointError,
    InconsistentLedger,
    NonConvergent,
    NotAlgebraic,
    NotAnInteger,
    ParamError,
)
from .mero import INFINITY, MeroExpr, is_infinity
from .weierstrass import WeierstrassData, xz_components

KIND_REGULAR = "regular"
KIND_GOOD_SINGULAR = "good-singular"
KIND_BAD_SINGULAR = "bad-singular"
KIND_TRANSCENDENTAL = "transcendental"

_VALUE_COLLISION_TOL = 1e-9


@dataclass(frozen=True)
class EndKind:
    """Tagged end class; m and n are contact orders for good-singular ends."""

    name: str
    m: int | None = None
    n: int | None = None

    def __str__(self) -> str:
        if self.name == KIND_GOOD_SINGULAR:
            return f"{KIND_GOOD_SINGULAR}(m={self.m}, n={self.n})"
        return self.name


REGULAR = EndKind(KIND_REGULAR)
BAD_SINGULAR = EndKind(KIND_BAD_SINGULAR)
TRANSCENDENTAL = EndKind(KIND_TRANSCENDENTAL)


def good_singular(m: int, n: int) -> EndKind:
    return EndKind(KIND_GOOD_SINGULAR, m, n)


@dataclass(frozen=True)
class EndRecord:
    """Everything the ledger needs to know about one end.

    ``index`` and ``ind_plus`` are unset for bad-singular and transcendental
    ends; ``d`` (the pole-order multiplicity of the immersion form) and the
    reduced multiplicity ``d_tilde = d - ind_plus`` are unset whenever the
    data is not algebraic at the puncture.
    """

    puncture: complex
    kind: EndKind
    index: int | None
    ind_plus: int | None
    d: int | None
    d_tilde: int | None
    note: str = ""


def _chart_pair(data: WeierstrassData, p: complex) -> tuple[MeroExpr, MeroExpr]:
    """Both spinors rewritten in a local chart centred at the puncture."""
    if is_infinity(p):
        return (
            data.phi.change_chart_to_infinity(),
            data.psi.change_chart_to_infinity(),
        )
    p = complex(p)
    if p == 0:
        return data.phi, data.psi
    return data.phi.shift_origin(p), data.psi.shift_origin(p)


def _essential_at_zero(f: MeroExpr) -> bool:
    _, ess0, _ = f.singular_points()
    return ess0


def _require_puncture(data: WeierstrassData, p: complex) -> None:
    if not data.domain.is_puncture(p):
        raise ParamError(f"{p} is not a puncture of the domain")


def classify_end(data: WeierstrassData, p: complex, settings: Settings = DEFAULT) -> EndKind:
    """Decide regular / good-singular / bad-singular / transcendental at p."""
    _require_puncture(data, p)
    phi, psi = _chart_pair(data, p)
    if _essential_at_zero(phi) or _essential_at_zero(psi):
        return TRANSCENDENTAL

    o_phi = phi.order_at(0.0)
    o_psi = psi.order_at(0.0)
    if o_phi < 0 or o_psi < 0:
        if o_phi >= 0 or o_psi >= 0:
            # exactly one spinor blows up: distinct points on the sphere
            return REGULAR
        # both blow up; compare contact orders of the reciprocals
        m, n = -o_phi, -o_psi
    else:
        v_phi = complex(phi(0.0))
        v_psi = complex(psi(0.0))
        if abs(v_phi - v_psi.conjugate()) > _VALUE_COLLISION_TOL * (1.0 + abs(v_phi)):
            return REGULAR
        diff_phi = phi - MeroExpr.const(v_phi)
        diff_psi = psi - MeroExpr.const(v_psi)
        if diff_phi.is_zero() or diff_psi.is_zero():
            # a constant spinor sitting exactly on the collision value
            return BAD_SINGULAR
        m = diff_phi.order_at(0.0)
        n = diff_psi.order_at(0.0)
    if m == n:
        return BAD_SINGULAR
    return good_singular(m, n)


def predicted_index(kind: EndKind) -> int:
    if kind.name == KIND_REGULAR:
        return 0
    if kind.name != KIND_GOOD_SINGULAR:
        raise BadEndError(f"no index for a {kind.name} end")
    return kind.m if kind.m < kind.n else -kind.n


def phase_winding(
    f,
    center: complex = 0.0,
    radius: float = 1.0,
    nodes: int = 0,
    max_nodes: int = 1 << 17,
    tol: float = 0.0,
    settings: Settings = DEFAULT,
) -> float:
    """Winding number of f around a circle, by summed argument increments.

    f must accept an ndarray of complex points.  Node count doubles until the
    winding stabilises; non-finite or vanishing samples abort with
    NonConvergent (the caller should shrink the radius).
    """
    n = nodes if nodes else settings.winding_nodes
    tol = tol if tol else settings.winding_tol
    prev = None
    while n <= max_nodes:
        theta = np.linspace(0.0, 2.0 * np.pi, n + 1)
        vals = np.asarray(f(center + radius * np.exp(1j * theta)), dtype=complex)
        if not np.all(np.isfinite(vals)) or np.any(vals == 0):
            raise NonConvergent(
                f"winding samples hit a pole or zero on |z-{center}|={radius}"
            )
        increments = np.angle(vals[1:] / vals[:-1])
        w = float(increments.sum() / (2.0 * np.pi))
        if prev is not None and abs(w - prev) < tol:
            return w
        prev = w
        n *= 2
    raise NonConvergent("winding did not stabilise under node doubling")


def _local_hazard_radius(phi: MeroExpr, psi: MeroExpr, shift: float | None) -> float:
    """Largest safe circle radius around 0 in the local chart."""
    hazards: list[complex] = []
    for f in (phi, psi):
        pts, _, _ = f.singular_points()
        hazards.extend(pts)
        if shift is not None:
            # zeros of f - shift are poles of the frame-changed difference
            try:
                inv = (f - MeroExpr.const(shift)).zeros_and_poles()
                hazards.extend(q for q, _ in inv.finite_zeros())
            except Exception:
                pass  # no zero inventory; the radius schedule certifies anyway
    dist = min((abs(q) for q in hazards if abs(q) > 1e-12), default=np.inf)
    return min(0.5, dist / 2.0)


def _frame_shift(phi: MeroExpr, psi: MeroExpr) -> float | None:
    """Pick the frame change that makes both spinor values finite at 0.

    Returns None when both are already finite (no change needed), otherwise a
    real number c for the unimodular map g -> -1/(g - c), under which the
    difference becomes (phi - conj(psi)) / ((phi - c)(conj(psi) - c)).
    """
    o_phi = phi.order_at(0.0)
    o_psi = psi.order_at(0.0)
    if o_phi >= 0 and o_psi >= 0:
        return None
    if o_phi < 0 and o_psi < 0:
        return 0.0
    v = complex(psi(0.0)) if o_phi < 0 else complex(phi(0.0))
    return max((0.0, 1.0, -1.0, 2.0), key=lambda c: abs(v - c))


def _winding_of_difference(
    phi: MeroExpr, psi: MeroExpr, shift: float | None, settings: Settings
) -> int:
    """Certified winding of the frame-normalised phi - conj(psi) around 0."""

    if shift is not None:
        c = shift

        def f(z):
            a = phi(z)
            b = np.conj(psi(z))
            return (a - b) / ((a - c) * (b - c))

    else:
        def f(z):
            return phi(z) - np.conj(psi(z))

    r0 = _local_hazard_radius(phi, psi, shift)
    last: int | None = None
    for j in range(24):
        r = r0 * 0.5**j
        try:
            w = phase_winding(f, 0.0, r, settings=settings)
        except NonConvergent:
            continue
        k = round(w)
        if abs(w - k) > settings.winding_tol:
            continue
        if last is not None and k == last:
            return int(k)
        last = int(k)
    raise NotAnInteger("winding number failed to certify on the radius schedule")


def end_index(data: WeierstrassData, p: complex, settings: Settings = DEFAULT) -> int:
    """Certified integer winding of phi - conj(psi) around the puncture.

    Must match the contact-order prediction (m for m<n, -n for m>n, 0 at a
    regular end) or the whole computation is rejected.
    """
    kind = classify_end(data, p, settings)
    if kind.name in (KIND_BAD_SINGULAR, KIND_TRANSCENDENTAL):
        raise BadEndError(f"end at {p} is {kind.name}: no index is defined")
    expected = predicted_index(kind)
    phi, psi = _chart_pair(data, p)
    got = _winding_of_difference(phi, psi, _frame_shift(phi, psi), settings)
    if got != expected:
        raise NotAnInteger(
            f"numeric winding {got} disagrees with contact-order prediction {expected}"
        )
    return got


def end_multiplicity(
    data: WeierstrassData, p: complex, settings: Settings = DEFAULT
) -> tuple[int, int | None]:
    """Multiplicity d and reduced multiplicity of the end at p.

    d + 1 is the largest pole order at p among the four components of the
    immersion form.  The reduced multiplicity subtracts |index|; it is None
    for a bad-singular end, which has no index.
    """
    kind = classify_end(data, p, settings)
    if kind.name == KIND_TRANSCENDENTAL:
        raise NotAlgebraic(f"data has an essential point at {p}")
    orders = []
    try:
        for comp in xz_components(data):
            if comp.is_zero():
                continue
            if is_infinity(p):
                o = comp.change_chart_to_infinity(as_form=True).order_at(0.0)
            else:
                o = comp.order_at(complex(p))
            orders.append(o)
    except EssentialPointError as exc:
        raise NotAlgebraic(str(exc)) from exc
    if not orders:
        raise NotAlgebraic("immersion form vanishes identically")
    d = max(-o for o in orders) - 1
    if kind.name == KIND_BAD_SINGULAR:
        return d, None
    return d, d - abs(predicted_index(kind))


def end_record(data: WeierstrassData, p: complex, settings: Settings = DEFAULT) -> EndRecord:
    """Assemble the full per-end row used by reports and ledgers."""
    kind = classify_end(data, p, settings)
    if kind.name == KIND_TRANSCENDENTAL:
        return EndRecord(
            p, kind, None, None, None, None,
            note="essential point; index and multiplicity unset",
        )
    if kind.name == KIND_BAD_SINGULAR:
        try:
            d, _ = end_multiplicity(data, p, settings)
        except NotAlgebraic:
            d = None
        return EndRecord(
            p, kind, None, None, d, None,
            note="equal contact orders; index undefined",
        )
    idx = end_index(data, p, settings)
    try:
        d, d_tilde = end_multiplicity(data, p, settings)
    except NotAlgebraic:
        d, d_tilde = None, None
    return EndRecord(p, kind, idx, abs(idx), d, d_tilde)


def _sort_key(p: complex):
    if is_infinity(p):
        return (1, 0.0, 0.0)
    return (0, complex(p).real, complex(p).imag)


def all_end_records(data: WeierstrassData, settings: Settings = DEFAULT) -> list[EndRecord]:
    punctures = sorted(data.domain.punctures, key=_sort_key)
    return [end_record(data, p, settings) for p in punctures]


@dataclass(frozen=True)
class IndexCheck:
    end_indices: tuple[int, ...]
    interior_indices: tuple[int, ...]
    total: int
    deg_phi: int
    deg_psi: int

    @property
    def passed(self) -> bool:
        return self.total == self.deg_phi - self.deg_psi


def index_theorem_check(
    data: WeierstrassData,
    interior_zeros=(),
    settings: Settings = DEFAULT,
) -> IndexCheck:
    """Sum of indices over all zeros of phi - conj(psi) equals deg phi - deg psi.

    interior_zeros: indices of interior collision points (ints, or objects
    with an ``index`` attribute as produced by the locus scanner).
    """
    deg_phi = data.phi.degree()
    deg_psi = data.psi.degree()
    ends = []
    for p in data.domain.punctures:
        kind = classify_end(data, p, settings)
        if kind.name == KIND_BAD_SINGULAR:
            raise BadEndError(f"bad singular end at {p}: index sum undefined")
        if kind.name == KIND_GOOD_SINGULAR:
            ends.append(end_index(data, p, settings))
        # regular ends contribute 0 and are skipped
    interior = tuple(int(getattr(q, "index", q)) for q in interior_zeros)
    total = sum(ends) + sum(interior)
    check = IndexCheck(tuple(ends), interior, total, deg_phi, deg_psi)
    if not check.passed:
        raise InconsistentLedger(
            f"index sum {total} != deg phi - deg psi = {deg_phi - deg_psi}"
        )
    return check
