"""Pointwise curvature fields and total curvature by two independent routes.

Everything here lives on the parameter sphere.  The combination
``-K + i*Kperp`` of the Gaussian and normal curvatures has a closed form in
the two spinors alone::

    -K + i*Kperp = 4 * phi'(z) * conj(psi'(z)) / ((phi - conj psi)**2 * e2w)

with ``e2w`` the conformal factor.  Multiplying by the area element cancels
``e2w``, so both total-curvature routes below work with the bare rational
combination and never touch the height form:

* the *area* route integrates ``4 phi' conj(psi') / F**2`` over an exhaustion
  of the sphere (two unit-disc charts, dyadic log-polar shells), and
* the *contour* route sums small-circle limits of ``phi'/F dz`` (and, as an
  independent cross-check, of ``conj(psi')/F conj(dz)``) around every
  puncture, every pole of the relevant spinor, and every isolated collision
  point of ``F = phi - conj(psi)``.

The two routes share no code past the spinor derivatives, which is the point:
they disagree loudly when an end is incomplete or the data is otherwise
suspect.  ``gauss_bonnet_ledger`` then cross-examines the contour total
against the degree/index bookkeeping of the ends module.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .config import DEFAULT, Settings
from .ends import KIND_BAD_SINGULAR, EndRecord, all_end_records
from .errors import (
    BadEndError,
    EssentialPointError,
    InconsistentLedger,
    NonConvergent,
    NotAlgebraic,
    ParamError,
    PoleError,
    SingularPointError,
    UnsupportedExpr,
)
from .locus import Window, scan
from .mero import MeroExpr, is_infinity
from .weierstrass import WeierstrassData

TWO_PI = 2.0 * math.pi
_FOUR_PI = 4.0 * math.pi

# offset (as a fraction of the node spacing) used when a quadrature node
# lands exactly on a singularity of the integrand
_NUDGE = 0.381966011250105


# ---------------------------------------------------------------------------
# pointwise fields


@dataclass(frozen=True)
class CurvatureSample:
    """Curvature data at one regular point of the parameter domain."""

    z: complex
    conformal: float  # e^(2 omega) > 0
    K: float
    Kperp: float
    Omega: complex
    OmegaStar: complex


def curvature_at(data: WeierstrassData, z: complex, settings: Settings = DEFAULT) -> CurvatureSample:
    """Evaluate K, Kperp and the two rotated Hopf quantities at z.

    Raises PoleError when a spinor or the height form blows up at z (points
    where one spinor has a pole can be perfectly good surface points, but
    this chart cannot see them), and SingularPointError when z lies on the
    collision locus or the metric degenerates there.
    """
    z = complex(z)
    try:
        pv = complex(data.phi(z))
        qv = complex(data.psi(z))
        dp = complex(data.phi.derivative()(z))
        dq = complex(data.psi.derivative()(z))
        hv = complex(data.dh(z))
    except (ZeroDivisionError, OverflowError, EssentialPointError) as exc:
        raise PoleError(f"spinor data blows up at {z}") from exc
    vals = (pv, qv, dp, dq, hv)
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
        raise PoleError(f"spinor data blows up at {z}")

    f = pv - qv.conjugate()
    scale = 1.0 + abs(pv) + abs(qv)
    if abs(f) <= 1e-12 * scale:
        raise SingularPointError(f"{z} lies on the collision locus (phi = conj psi)")
    conformal = 2.0 * abs(f) ** 2 * abs(hv) ** 2
    if conformal == 0.0:
        raise SingularPointError(f"metric degenerates at {z} (dh has a zero there)")

    v = 4.0 * dp * dq.conjugate() / (f * f * conformal)
    phase = f / abs(f)  # e^(i theta), theta = arg(phi - conj psi)
    return CurvatureSample(
        z=z,
        conformal=conformal,
        K=-v.real,
        Kperp=v.imag,
        Omega=hv * dp / phase,
        OmegaStar=hv * dq * phase,
    )


def hopf_consistency(data: WeierstrassData, samples, settings: Settings = DEFAULT) -> float:
    """Max relative residual of -K + i*Kperp against 8 e^(-4w) Omega conj(OmegaStar).

    ``samples`` is an iterable of points.  The identity is algebraic, so
    anything much above 1e-9 means the field evaluation is inconsistent.
    """
    worst = 0.0
    for z in samples:
        s = curvature_at(data, z, settings)
        lhs = complex(-s.K, s.Kperp)
        rhs = 8.0 * s.Omega * s.OmegaStar.conjugate() / (s.conformal * s.conformal)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return worst


# ---------------------------------------------------------------------------
# stable integrand evaluation
#
# For transcendental spinors the raw expressions overflow on the radius
# schedules (e^(a R) at R ~ 4e6), so everything is rewritten through the
# ratio q = conj(psi)/phi:
#
#   phi'/F            = logder(phi) * 1/(1-q)
#   conj(psi')/F      = conj(logder(psi)) * q/(1-q)
#   4 phi' conj(psi')/F^2 = 4 logder(phi) conj(logder(psi)) * q/(1-q)^2
#
# and q is only ever exponentiated on whichever side of |q| = 1 it lives
# (u = 1/q otherwise), keeping every factor bounded.


def _unit(w: np.ndarray) -> np.ndarray:
    a = np.abs(w)
    ok = np.isfinite(a) & (a > 0)
    return np.where(ok, w / np.where(ok, a, 1.0), 1.0)


class _BranchedRatio:
    """log|q| and the phase of q = conj(psi)/phi for single-term spinors."""

    def __init__(self, phi: MeroExpr, psi: MeroExpr):
        (self.rat_p, self.expo_p), = phi.terms
        (self.rat_q, self.expo_q), = psi.terms

    def __call__(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        with np.errstate(all="ignore"):
            top = np.conj(npoly.polyval(z, self.rat_q.num) / npoly.polyval(z, self.rat_q.den))
            bot = npoly.polyval(z, self.rat_p.num) / npoly.polyval(z, self.rat_p.den)
            e = np.conj(self.expo_q(z)) - self.expo_p(z)
            logq = np.log(np.abs(top)) - np.log(np.abs(bot)) + e.real
            phase = _unit(top) * np.conj(_unit(bot)) * np.exp(1j * e.imag)
        return logq, phase


def _branch_factor(logq: np.ndarray, phase: np.ndarray, kind: str) -> np.ndarray:
    """1/(1-q), q/(1-q) or q/(1-q)^2 without ever forming an overflowing q."""
    with np.errstate(all="ignore"):
        low = logq <= 0.0
        qv = np.where(low, np.exp(np.minimum(logq, 0.0)), 0.0) * phase
        uv = np.where(low, 0.0, np.exp(np.minimum(-logq, 0.0))) * np.conj(phase)
        if kind == "phi":
            out = np.where(low, 1.0 / (1.0 - qv), uv / (uv - 1.0))
        elif kind == "psi":
            out = np.where(low, qv / (1.0 - qv), 1.0 / (uv - 1.0))
        else:  # the area integrand's q/(1-q)^2
            out = np.where(low, qv / (1.0 - qv) ** 2, uv / (uv - 1.0) ** 2)
    return out


def _form_factory(data: WeierstrassData, side: str):
    """Coefficient h(z) of the side's boundary form: eta = h dz on the phi
    side, eta* = h conj(dz) on the psi side."""
    phi, psi = data.phi, data.psi
    if phi.is_algebraic() and psi.is_algebraic():
        dphi = phi.derivative()
        dpsi = psi.derivative()

        def h(z):
            with np.errstate(all="ignore"):
                f = phi(z) - np.conj(psi(z))
                return (dphi(z) if side == "phi" else np.conj(dpsi(z))) / f

        return h
    if len(phi.terms) == 1 and len(psi.terms) == 1:
        ratio = _BranchedRatio(phi, psi)
        ld = (phi if side == "phi" else psi).logder()

        def h(z):
            logq, phase = ratio(z)
            b = _branch_factor(logq, phase, side)
            with np.errstate(all="ignore"):
                a = ld(z)
            return (a if side == "phi" else np.conj(a)) * b

        return h
    raise UnsupportedExpr(
        "boundary integrals need algebraic or single-term spinors; "
        f"got {len(phi.terms)} + {len(psi.terms)} terms"
    )


def _area_integrand(data: WeierstrassData):
    """g(z) with  integral of g du dv  =  -total K + i total Kperp."""
    phi, psi = data.phi, data.psi
    if phi.is_algebraic() and psi.is_algebraic():
        dphi = phi.derivative()
        dpsi = psi.derivative()

        def g(z):
            with np.errstate(all="ignore"):
                f = phi(z) - np.conj(psi(z))
                return 4.0 * dphi(z) * np.conj(dpsi(z)) / (f * f)

        return g
    if len(phi.terms) == 1 and len(psi.terms) == 1:
        ratio = _BranchedRatio(phi, psi)
        ld_p = phi.logder()
        ld_q = psi.logder()

        def g(z):
            logq, phase = ratio(z)
            b = _branch_factor(logq, phase, "area")
            with np.errstate(all="ignore"):
                return 4.0 * ld_p(z) * np.conj(ld_q(z)) * b

        return g
    raise UnsupportedExpr("area integration needs algebraic or single-term spinors")


# ---------------------------------------------------------------------------
# circle limits


def _one_circle(h, side: str, center: complex, radius: float, n: int, offset: float) -> complex | None:
    t = offset + TWO_PI * np.arange(n) / n
    ring = radius * np.exp(1j * t)
    z = center + ring
    dz = 1j * ring  # dz/dt
    with np.errstate(all="ignore"):
        vals = h(z) * (dz if side == "phi" else np.conj(dz))
    if not np.all(np.isfinite(vals.real) & np.isfinite(vals.imag)):
        return None
    return complex((TWO_PI / n) * np.sum(vals))


def _circle_value(h, side: str, center: complex, radius: float, settings: Settings) -> complex | None:
    """ccw circle integral with node doubling; None when it will not settle."""
    n = int(settings.circle_nodes)
    prev = None
    while n <= settings.circle_max_nodes:
        v = _one_circle(h, side, center, radius, n, 0.0)
        if v is None:
            v = _one_circle(h, side, center, radius, n, _NUDGE * TWO_PI / n)
        if v is None:
            return None
        if prev is not None and abs(v - prev) <= max(1e-12, settings.residue_rel_tol * (1.0 + abs(v))):
            return v
        prev = v
        n *= 2
    return None


def _accelerated(raw: list[complex]) -> complex:
    """Aitken step on the last three values; falls back to the raw tail when
    the deltas are already at the noise floor or not geometric."""
    if len(raw) < 3:
        return raw[-1]
    d1 = raw[-2] - raw[-3]
    d2 = raw[-1] - raw[-2]
    den = d2 - d1
    if abs(d2) <= 1e-12 * (1.0 + abs(raw[-1])):
        return raw[-1]
    if abs(den) <= 1e-3 * abs(d2):
        return raw[-1]
    return raw[-1] - d2 * d2 / den


@dataclass(frozen=True)
class ContourPiece:
    """One settled circle limit: the boundary form integrated around ``point``
    (counterclockwise; circles at infinity carry the outward orientation, i.e.
    the value is minus the ccw |z| = R integral)."""

    point: complex
    side: str
    value: complex
    error: float
    radii: tuple[float, ...]


def _limit_piece(h, side: str, point, neighbours: list[complex], settings: Settings) -> ContourPiece:
    at_inf = is_infinity(point)
    if at_inf:
        base = settings.schedule_base_infinite
        reach = max((abs(p) for p in neighbours), default=0.0)
        if reach >= 0.95 * base:
            base = 2.0 * reach
    else:
        base = settings.schedule_base_finite
        gap = min((abs(p - point) for p in neighbours if abs(p - point) > 0), default=math.inf)
        if gap < 2.5 * base:
            base = 0.4 * gap

    raw: list[complex] = []
    acc: list[complex] = []
    radii: list[float] = []
    run = 0
    settled_at = None
    for j in range(int(settings.schedule_steps)):
        r = base * (2.0**j) if at_inf else base * (0.5**j)
        v = _circle_value(h, side, 0.0 if at_inf else point, r, settings)
        if v is not None and at_inf:
            v = -v
        if v is None:
            raw.clear()
            acc.clear()
            run = 0
            continue
        raw.append(v)
        radii.append(r)
        a = _accelerated(raw)
        if acc and abs(a - acc[-1]) <= settings.contour_rel_tol * (1.0 + abs(a)):
            run += 1
        else:
            run = 0
        acc.append(a)
        if settled_at is None and run >= 2:
            settled_at = j
        if settled_at is not None and j >= settled_at + 2:
            break
    if settled_at is None:
        raise NonConvergent(
            f"{side}-side circle limit at {'infinity' if at_inf else point} "
            f"did not settle on the radius schedule"
        )
    err = abs(acc[-1] - acc[-2]) + 1e-11 * (1.0 + abs(acc[-1]))
    return ContourPiece(point, side, acc[-1], err, tuple(radii))


def _side_candidates(data: WeierstrassData, side: str, interior: list[complex]) -> list:
    f = data.phi if side == "phi" else data.psi
    pts: list = list(data.domain.finite_punctures())
    has_inf = any(is_infinity(p) for p in data.domain.punctures)
    inv = f.zeros_and_poles()
    for p, _order in inv.finite_poles():
        if all(abs(p - q) > 1e-9 * (1.0 + abs(q)) for q in pts):
            pts.append(p)
    for e in inv.essential:
        if is_infinity(e):
            continue
        if not data.domain.is_puncture(e):
            raise UnsupportedExpr(f"essential point {e} of {side} is not a puncture")
    inf_needed = has_inf
    if inv.at_infinity is None or inv.at_infinity < 0:
        inf_needed = True  # pole or essential behaviour at infinity
    for z in interior:
        if all(abs(z - q) > 1e-9 * (1.0 + abs(q)) for q in pts):
            pts.append(z)
    out: list = sorted(pts, key=lambda p: (abs(p), p.real, p.imag))
    if inf_needed:
        from .mero import INFINITY

        out.append(INFINITY)
    return out


def contour_breakdown(data: WeierstrassData, settings: Settings = DEFAULT) -> tuple[ContourPiece, ...]:
    """All settled circle limits on both sides (the raw material of the
    contour total).  Performs the same pre-checks as total_curvature_contour."""
    _refuse_degenerate(data)
    records = all_end_records(data, settings)
    bad = [r for r in records if r.kind.name == KIND_BAD_SINGULAR]
    if bad:
        raise BadEndError(
            "bad singular end(s) at "
            + ", ".join(str(r.puncture) for r in bad)
            + ": the boundary integral depends on the limiting process there"
        )
    finding = scan(data, settings=settings)
    if finding.curves:
        raise NonConvergent("the collision locus contains curves; no circle decomposition exists")
    interior = [p.z for p in finding.points]

    pieces: list[ContourPiece] = []
    for side in ("phi", "psi"):
        h = _form_factory(data, side)
        cands = _side_candidates(data, side, interior)
        finite = [p for p in cands if not is_infinity(p)]
        for p in cands:
            pieces.append(_limit_piece(h, side, p, finite, settings))
    return tuple(pieces)


@dataclass(frozen=True)
class TotalCurvature:
    K_total: float
    Kperp_total: float
    method: str  # "area" or "contour"
    certified: bool
    error_estimate: float
    note: str = ""


def total_curvature_contour(data: WeierstrassData, settings: Settings = DEFAULT) -> TotalCurvature:
    """Total curvature from circle limits of the boundary form.

    The reported value comes from the phi-side sum; the psi-side sum is an
    independent check and enters only the certification.  Collision curves,
    unsettled radius schedules, and bad singular ends all refuse loudly.
    """
    pieces = contour_breakdown(data, settings)
    phi_pieces = [p for p in pieces if p.side == "phi"]
    psi_pieces = [p for p in pieces if p.side == "psi"]
    s_phi = 2j * sum(p.value for p in phi_pieces)
    s_psi = 2j * sum(p.value for p in psi_pieces)
    err_phi = 2.0 * sum(p.error for p in phi_pieces)
    err_psi = 2.0 * sum(p.error for p in psi_pieces)
    mismatch = abs(s_phi - s_psi)
    tol = max(1e-6 * (1.0 + abs(s_phi)), 4.0 * (err_phi + err_psi))
    return TotalCurvature(
        K_total=-s_phi.real,
        Kperp_total=s_phi.imag,
        method="contour",
        certified=mismatch <= tol,
        error_estimate=err_phi + mismatch,
        note=(
            f"{len(phi_pieces)} phi-side and {len(psi_pieces)} psi-side circle limits; "
            f"dual mismatch {mismatch:.3g}"
        ),
    )


def _refuse_degenerate(data: WeierstrassData) -> None:
    if data.degenerate or data.phi.is_const() or data.psi.is_const():
        raise UnsupportedExpr("total curvature of degenerate (constant-spinor) data is trivial")


# ---------------------------------------------------------------------------
# area route


def _shell(g, center: complex, s_lo: float, s_hi: float, n_s: int, n_theta: int,
           max_theta: int, floor: float):
    """Integrate g over the log-polar box [s_lo, s_hi] x [0, 2pi) around
    ``center``.  Returns (value, abs_value, theta_error) or raises
    NonConvergent when the theta refinement fails at a non-negligible size."""
    s_nodes, s_weights = np.polynomial.legendre.leggauss(n_s)
    s = 0.5 * (s_hi + s_lo) + 0.5 * (s_hi - s_lo) * s_nodes
    w_s = 0.5 * (s_hi - s_lo) * s_weights * np.exp(2.0 * s)

    prev = None
    n = n_theta
    while True:
        t = TWO_PI * (np.arange(n) + 0.5) / n  # midpoint rule: dodges seam nodes
        z = center + np.exp(s[:, None] + 1j * t[None, :])
        with np.errstate(all="ignore"):
            vals = g(z)
        if not np.all(np.isfinite(vals.real) & np.isfinite(vals.imag)):
            raise NonConvergent("area integrand blows up inside a shell")
        col = vals * w_s[:, None]
        v = complex((TWO_PI / n) * np.sum(col))
        va = float((TWO_PI / n) * np.sum(np.abs(col)))
        if prev is not None:
            d = abs(v - prev)
            if d <= max(1e-11, 1e-9 * (1.0 + abs(v))):
                return v, va, d
            if n >= max_theta:
                if max(abs(v), d) <= floor:
                    return v, va, d
                raise NonConvergent(
                    f"theta refinement stalled on shell [{math.exp(s_lo):.3g}, "
                    f"{math.exp(s_hi):.3g}] with residual {d:.3g}"
                )
        prev = v
        n *= 2


def _disc_total(g, center: complex, outer: float, n_s: int, n_theta: int,
                settings: Settings) -> tuple[complex, float]:
    """Exhaust the disc |z - center| <= outer by dyadic shells shrinking onto
    the center.  Returns (value, error allowance)."""
    total = 0j
    err = 0.0
    small = 0
    grow = 0
    prev_abs = None
    top = math.log(outer)
    max_theta = 8192
    for j in range(int(settings.area_max_shells)):
        floor = max(100.0 * settings.area_abs_floor, 1e-5 * (1.0 + abs(total)))
        v, va, d = _shell(g, center, top - (j + 1) * math.log(2.0), top - j * math.log(2.0),
                          n_s, n_theta, max_theta, floor)
        total += v
        err += d
        stop = max(settings.area_abs_floor, 1e-11 * (1.0 + abs(total)))
        small = small + 1 if va <= stop else 0
        if small >= 3:
            err += 3.0 * stop
            return total, err
        if prev_abs is not None and va > 1.2 * prev_abs and va > 1e3 * stop:
            grow += 1
            if grow >= 6:
                raise NonConvergent(
                    f"shell magnitudes keep growing toward {center} "
                    f"(|shell| = {va:.3g}); the integral does not converge absolutely"
                )
        else:
            grow = 0
        prev_abs = va
    raise NonConvergent("shell exhaustion hit the shell cap before the tail decayed")


def _annulus_total(g, center: complex, r_in: float, r_out: float, n_s: int,
                   n_theta: int, settings: Settings) -> tuple[complex, float]:
    lo, hi = math.log(r_in), math.log(r_out)
    panels = max(1, math.ceil((hi - lo) / math.log(2.0)))
    edges = np.linspace(lo, hi, panels + 1)
    total = 0j
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        floor = max(100.0 * settings.area_abs_floor, 1e-5 * (1.0 + abs(total)))
        v, _va, d = _shell(g, center, float(a), float(b), n_s, n_theta, 8192, floor)
        total += v
        err += d
    return total, err


def _area_once(data: WeierstrassData, window: Window | None, n_s: int, n_theta: int,
               settings: Settings) -> tuple[complex, float]:
    g = _area_integrand(data)
    if window is None:
        v1, e1 = _disc_total(g, 0j, 1.0, n_s, n_theta, settings)

        def g_flip(w):  # the |z| > 1 half in the w = 1/z chart
            with np.errstate(all="ignore"):
                return g(1.0 / w) / np.abs(w) ** 4

        v2, e2 = _disc_total(g_flip, 0j, 1.0, n_s, n_theta, settings)
        return v1 + v2, e1 + e2
    if window.shape == "annulus":
        return _annulus_total(g, window.center, window.r_in, window.r_out, n_s, n_theta, settings)
    if window.shape == "disc":
        return _disc_total(g, window.center, window.r_out, n_s, n_theta, settings)
    raise ParamError("area integration supports full-sphere (window=None), annulus and disc windows")


def total_curvature_area(
    data: WeierstrassData,
    window: Window | None = None,
    resolution: int | None = None,
    settings: Settings = DEFAULT,
) -> TotalCurvature:
    """Total curvature by direct integration of 4 phi' conj(psi') / F^2.

    Runs the whole computation at a base resolution and once more with both
    quadrature directions doubled; the error estimate is the difference of
    the two levels plus the per-shell refinement allowances.  A nonempty
    collision locus, a non-decaying shell tail, or a theta refinement that
    stalls at non-negligible size all raise NonConvergent.
    """
    _refuse_degenerate(data)
    n_theta = int(resolution or settings.area_theta_nodes)
    if n_theta < 16:
        raise ParamError("resolution must be at least 16 theta nodes")
    n_s = int(settings.area_rho_nodes)

    finding = scan(data, settings=settings)
    if not finding.is_empty:
        raise NonConvergent(f"collision locus is not empty ({finding}); |F|^-2 is not integrable across it")

    coarse, err_c = _area_once(data, window, n_s, n_theta, settings)
    fine, err_f = _area_once(data, window, 2 * n_s, 2 * n_theta, settings)
    err = abs(fine - coarse) + err_f
    return TotalCurvature(
        K_total=-fine.real,
        Kperp_total=fine.imag,
        method="area",
        certified=True,
        error_estimate=err,
        note=f"two-level difference {abs(fine - coarse):.3g} at {n_theta}/{2 * n_theta} theta nodes",
    )


# ---------------------------------------------------------------------------
# Gauss-Bonnet ledger


@dataclass(frozen=True)
class IdentityCheck:
    key: str
    lhs: float
    rhs: float
    residual: float
    tol: float
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class GaussBonnetLedger:
    label: str
    K_total: float
    Kperp_total: float
    deg_phi: int
    deg_psi: int
    indices: tuple[int, ...]
    d_tilde: tuple[int, ...]
    checks: tuple[IdentityCheck, ...]
    passed: bool

    def lines(self) -> list[str]:
        out = [
            f"entry={self.label or 'unnamed'}",
            f"K_total={self.K_total:.12g}",
            f"Kperp_total={self.Kperp_total:.12g}",
            f"deg_phi={self.deg_phi}",
            f"deg_psi={self.deg_psi}",
            "indices=" + ",".join(str(i) for i in self.indices),
            "d_tilde=" + ",".join(str(d) for d in self.d_tilde),
        ]
        for c in self.checks:
            out.append(f"check.{c.key}.lhs={c.lhs:.12g}")
            out.append(f"check.{c.key}.rhs={c.rhs:.12g}")
            out.append(f"check.{c.key}.residual={c.residual:.12g}")
            out.append(f"check.{c.key}.tol={c.tol:.12g}")
            out.append(f"check.{c.key}.verdict={'pass' if c.passed else 'FAIL'}")
        out.append(f"passed={'true' if self.passed else 'false'}")
        return out

    def __str__(self) -> str:
        rows = [f"Gauss-Bonnet ledger for {self.label or 'unnamed data'}:"]
        for c in self.checks:
            verdict = "pass" if c.passed else "FAIL"
            note = f"  [{c.note}]" if c.note else ""
            rows.append(
                f"  {c.key:<16} {c.lhs:+.9g} vs {c.rhs:+.9g}"
                f"  (residual {c.residual:.2g}, tol {c.tol:.2g})  {verdict}{note}"
            )
        rows.append(f"  overall: {'consistent' if self.passed else 'INCONSISTENT'}")
        return "\n".join(rows)


def gauss_bonnet_ledger(
    data: WeierstrassData,
    end_records: list[EndRecord] | None = None,
    *,
    total: TotalCurvature | None = None,
    settings: Settings = DEFAULT,
) -> GaussBonnetLedger:
    """Cross-check the measured total curvature against the degree and index
    bookkeeping of the punctures.

    Wants algebraic data with no bad singular ends.  Raises InconsistentLedger
    (with the full ledger attached as ``exc.ledger``) when any identity fails;
    interior collision points are NOT folded into the index sums, so data with
    singular interior points fails here by design.
    """
    if not (data.phi.is_algebraic() and data.psi.is_algebraic() and data.dh.is_algebraic()):
        raise NotAlgebraic("the degree identities only apply to algebraic data")
    if end_records is None:
        end_records = all_end_records(data, settings)
    bad = [r for r in end_records if r.kind.name == KIND_BAD_SINGULAR]
    if bad:
        raise BadEndError(f"bad singular end at {bad[0].puncture}: ledger identities do not apply")
    if total is None:
        total = total_curvature_contour(data, settings)

    k = total.K_total
    kperp = total.Kperp_total
    deg_phi = data.phi.degree()
    deg_psi = data.psi.degree()
    r = len(end_records)
    ind = [rec.index or 0 for rec in end_records]
    ind_plus = [rec.ind_plus or 0 for rec in end_records]
    d_tilde = [rec.d_tilde for rec in end_records]
    missing_dt = any(dt is None for dt in d_tilde)
    odd_dt = any(dt is not None and dt < 1 for dt in d_tilde)

    base_tol = max(1e-6 * (1.0 + abs(k)), 4.0 * total.error_estimate + 1e-9)
    checks: list[IdentityCheck] = []

    def add(key, lhs, rhs, tol, *, one_sided=False, note=""):
        residual = (lhs - rhs) if one_sided else abs(lhs - rhs)
        ok = residual <= tol
        checks.append(IdentityCheck(key, float(lhs), float(rhs), float(abs(residual) if not one_sided else residual), float(tol), bool(ok), note))

    add("kperp_vanishes", kperp, 0.0, base_tol)
    add("phi_degree", k, -_FOUR_PI * deg_phi + TWO_PI * sum(p + i for p, i in zip(ind_plus, ind)), base_tol)
    add("psi_degree", k, -_FOUR_PI * deg_psi + TWO_PI * sum(p - i for p, i in zip(ind_plus, ind)), base_tol)
    add("index_sum", float(sum(ind)), float(deg_phi - deg_psi), 0.5,
        note="integer identity; both sides exact")
    add("degree_sum", k, -TWO_PI * (deg_phi + deg_psi - sum(ind_plus)), base_tol)
    if missing_dt:
        checks.append(IdentityCheck("jorge_meeks", k, math.nan, math.inf, base_tol, False,
                                    "end multiplicity unavailable at some end"))
    else:
        add("jorge_meeks", k, TWO_PI * (2.0 - r - sum(d_tilde)), base_tol,
            note="reduced multiplicity below 1 at some end" if odd_dt else "")
    khat = k / (-_FOUR_PI)
    add("quantization", khat, float(round(khat)), 1e-3,
        note="" if round(khat) >= 1 else "quantized value is not a positive integer")
    if round(khat) < 1:
        c = checks[-1]
        checks[-1] = IdentityCheck(c.key, c.lhs, c.rhs, c.residual, c.tol, False, c.note)
    add("chern_osserman", k, _FOUR_PI * (1.0 - r), base_tol, one_sided=True)

    ledger = GaussBonnetLedger(
        label=data.label,
        K_total=k,
        Kperp_total=kperp,
        deg_phi=deg_phi,
        deg_psi=deg_psi,
        indices=tuple(ind),
        d_tilde=tuple(-(10**9) if dt is None else dt for dt in d_tilde),
        checks=tuple(checks),
        passed=all(c.passed for c in checks),
    )
    if not ledger.passed:
        failed = ", ".join(c.key for c in ledger.checks if not c.passed)
        exc = InconsistentLedger(f"identities failed for {data.label or 'data'}: {failed}")
        exc.ledger = ledger
        raise exc
    return ledger
