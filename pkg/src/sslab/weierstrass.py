"""Weierstrass-type data on a punctured sphere and the induced immersion.

A surface is described by a pair of meromorphic functions ``phi``, ``psi``
and a 1-form coefficient ``dh`` (we store h', the coefficient in h' dz) on
the Riemann sphere minus finitely many punctures.  The tangent vector of the
immersion into R^4 with inner product diag(+,+,+,-) is::

    x_z dz = ( (phi+psi) h',  -i(phi-psi) h',  (1-phi psi) h',  (1+phi psi) h' ) dz

and the surface point is x = 2 Re integral of x_z dz from a basepoint.  The
fourth coordinate is the timelike one.  The induced metric density is
2 |phi - conj(psi)|^2 |h'|^2, positive exactly where phi differs from the
conjugate of psi.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .config import DEFAULT, Settings
from .errors import ClearanceError, NonConvergent, ParseError, QuadratureError
from .mero import INFINITY, MeroExpr, is_infinity


@dataclass(frozen=True)
class PuncturedSphere:
    """The Riemann sphere minus finitely many distinct punctures.

    At most one puncture may sit at infinity.
    """

    punctures: tuple[complex, ...]

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.punctures)
        object.__setattr__(self, "punctures", pts)
        if sum(1 for p in pts if is_infinity(p)) > 1:
            raise ValueError("at most one puncture at infinity")
        finite = [p for p in pts if not is_infinity(p)]
        for i, p in enumerate(finite):
            for q in finite[i + 1:]:
                if abs(p - q) < 1e-12 * (1.0 + abs(p)):
                    raise ValueError(f"punctures {p} and {q} coincide")

    def finite_punctures(self) -> list[complex]:
        return [p for p in self.punctures if not is_infinity(p)]

    def has_infinity(self) -> bool:
        return any(is_infinity(p) for p in self.punctures)

    def is_puncture(self, p: complex, tol: float = 1e-9) -> bool:
        if is_infinity(p):
            return self.has_infinity()
        return any(abs(p - q) <= tol * (1.0 + abs(q)) for q in self.finite_punctures())


@dataclass(frozen=True)
class WeierstrassData:
    """phi, psi and the 1-form coefficient dh (that is, h') on a domain."""

    phi: MeroExpr
    psi: MeroExpr
    dh: MeroExpr
    domain: PuncturedSphere
    label: str = ""
    degenerate: bool = False  # opt-in for constant phi/psi (flat/degenerate data)

    def __post_init__(self):
        if not self.degenerate:
            if self.phi.is_const() or self.psi.is_const():
                raise ValueError(
                    "constant phi or psi describes a degenerate surface; "
                    "pass degenerate=True to study it anyway"
                )
        if self.dh.is_zero():
            raise ValueError("dh must not vanish identically")


@dataclass(frozen=True)
class PathSpec:
    """Piecewise-straight integration path with a clearance requirement."""

    waypoints: tuple[complex, ...]
    clearance: float = DEFAULT.clearance


# ---------------------------------------------------------------------------
# components and pointwise checks


def xz_components(data: WeierstrassData) -> tuple[MeroExpr, MeroExpr, MeroExpr, MeroExpr]:
    """The four components of x_z as expressions."""
    phi, psi, dh = data.phi, data.psi, data.dh
    one = MeroExpr.const(1.0)
    prod = phi * psi
    return (
        (phi + psi) * dh,
        (phi - psi).scaled(-1j) * dh,
        (one - prod) * dh,
        (one + prod) * dh,
    )


def from_xz_components(
    v1: MeroExpr,
    v2: MeroExpr,
    v3: MeroExpr,
    v4: MeroExpr,
    domain: PuncturedSphere,
    label: str = "",
    check_points: tuple[complex, ...] = (0.37 + 0.61j, 1.42 - 0.23j, -0.81 + 1.07j),
) -> WeierstrassData:
    """Recover (phi, psi, dh) from explicit tangent components.

    Uses h' = (v3+v4)/2, phi = (v1+i v2)/(2h'), psi = (v1-i v2)/(2h') and
    verifies the leftover identity v4 - v3 = 2 phi psi h' at sample points.
    """
    dh = (v3 + v4).scaled(0.5)
    two_dh = dh.scaled(2.0)
    phi = (v1 + v2.scaled(1j)).divide(two_dh)
    psi = (v1 - v2.scaled(1j)).divide(two_dh)
    residual = (phi * psi) * two_dh - (v4 - v3)
    for z in check_points:
        try:
            r = residual(z)
        except Exception:
            continue
        scale = 1.0 + abs(v4(z)) + abs(v3(z))
        if abs(r) > 1e-8 * scale:
            raise ValueError(
                f"components are not isotropic Weierstrass data: residual {abs(r):.2e} at {z}"
            )
    return WeierstrassData(phi, psi, dh, domain, label)


def lorentz_dot(v, w):
    """diag(+,+,+,-) bilinear pairing, applied componentwise."""
    return v[0] * w[0] + v[1] * w[1] + v[2] * w[2] - v[3] * w[3]


def lorentz_isotropy_check(data: WeierstrassData, points) -> float:
    """Max |<x_z, x_z>| over the sample points (should vanish identically)."""
    comps = xz_components(data)
    worst = 0.0
    for z in points:
        vals = [c(z) for c in comps]
        norm2 = sum(abs(v) ** 2 for v in vals)
        res = abs(lorentz_dot(vals, vals))
        worst = max(worst, res / (1.0 + norm2))
    return worst


def metric_density(data: WeierstrassData, z: complex) -> float:
    """Conformal factor e^(2 omega) = 2 |phi - conj psi|^2 |h'|^2 at z."""
    f = data.phi(z) - data.psi(z).conjugate()
    return 2.0 * abs(f) ** 2 * abs(data.dh(z)) ** 2


# ---------------------------------------------------------------------------
# path integration


_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GAUSS_CACHE:
        _GAUSS_CACHE[n] = leggauss(n)
    return _GAUSS_CACHE[n]


def _segment_point_distance(a: complex, b: complex, p: complex) -> float:
    """Distance from p to the segment [a, b]."""
    ab = b - a
    L2 = abs(ab) ** 2
    if L2 == 0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def _gauss_segment(funcs, a: complex, b: complex, n: int) -> np.ndarray:
    x, w = _gauss(n)
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    zs = mid + half * x.astype(complex)
    return np.array([np.sum(w * f(zs)) * half for f in funcs])


def _adaptive_segment(funcs, a, b, tol, depth, settings) -> np.ndarray:
    coarse = _gauss_segment(funcs, a, b, 16)
    mid = (a + b) / 2.0
    fine = _gauss_segment(funcs, a, mid, 16) + _gauss_segment(funcs, mid, b, 16)
    err = float(np.max(np.abs(fine - coarse)))
    if err <= tol or abs(b - a) < 1e-13:
        return fine
    if depth >= settings.quad_max_depth:
        raise QuadratureError(
            f"segment [{a}, {b}] still off by {err:.2e} at depth {depth}"
        )
    left = _adaptive_segment(funcs, a, mid, tol / 2.0, depth + 1, settings)
    right = _adaptive_segment(funcs, mid, b, tol / 2.0, depth + 1, settings)
    return left + right


def singular_set(data: WeierstrassData) -> tuple[list[complex], bool]:
    """Finite points where some x_z component is singular, plus an
    essential-somewhere-at-0 flag."""
    pts: list[complex] = []
    ess0 = False
    for comp in xz_components(data):
        s, e0, _ = comp.singular_points()
        ess0 = ess0 or e0
        for p in s:
            if all(abs(p - q) > 1e-10 * (1 + abs(q)) for q in pts):
                pts.append(p)
    if ess0 and all(abs(q) > 1e-10 for q in pts):
        pts.append(0j)
    return pts, ess0


def immerse(
    data: WeierstrassData, path: PathSpec, settings: Settings | None = None
) -> np.ndarray:
    """Surface point reached from the first waypoint: 2 Re integral x_z dz.

    Raises ClearanceError when a segment passes within ``path.clearance`` of
    a singular point of the integrand, QuadratureError when the adaptive
    scheme cannot reach tolerance.
    """
    settings = settings or DEFAULT
    pts = [complex(p) for p in path.waypoints]
    if len(pts) < 2:
        return np.zeros(4)
    comps = xz_components(data)
    hazards, _ = singular_set(data)
    hazards.extend(data.domain.finite_punctures())
    total = np.zeros(4, dtype=complex)
    for a, b in zip(pts[:-1], pts[1:]):
        if a == b:
            continue
        for s in hazards:
            d = _segment_point_distance(a, b, s)
            if d < path.clearance:
                raise ClearanceError(
                    f"segment [{a}, {b}] passes {d:.2e} from singular point {s}"
                )
        total += _adaptive_segment(
            comps, a, b, settings.quad_target, 0, settings
        )
    result = 2.0 * np.real(total)
    # sanity: tolerance was distributed per segment, so the accumulated error
    # is a few quad_targets; re-check magnitude for the caller's contract.
    if not np.all(np.isfinite(result)):
        raise QuadratureError("non-finite immersion result")
    return result


# ---------------------------------------------------------------------------
# circle integrals and periods


def circle_integral(f, center: complex, radius: float, nodes: int) -> complex:
    """Counterclockwise contour integral of f over |z - center| = radius."""
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = np.exp(1j * theta)
    vals = f(center + radius * ring)
    return complex(2j * np.pi * radius * np.mean(vals * ring))


def certified_circle_integral(
    f, center: complex, radius: float, settings: Settings | None = None
) -> complex:
    """Circle integral certified by agreement at half the radius."""
    settings = settings or DEFAULT
    nodes = settings.circle_nodes
    while True:
        v1 = circle_integral(f, center, radius, nodes)
        v2 = circle_integral(f, center, radius / 2.0, nodes)
        if abs(v1 - v2) <= settings.residue_rel_tol * (1.0 + max(abs(v1), abs(v2))):
            return v2
        nodes *= 2
        if nodes > settings.circle_max_nodes:
            raise NonConvergent(
                f"circle integral at {center}: radii disagree by {abs(v1 - v2):.2e}"
            )


@dataclass(frozen=True)
class PeriodRecord:
    puncture: complex
    dh_int: complex
    phi_dh_int: complex
    psi_dh_int: complex
    phipsi_dh_int: complex
    conjugation_residual: float  # |phi_dh + conj(psi_dh)|
    real_dh_residual: float      # |Re dh_int|
    real_phipsi_residual: float  # |Re phipsi_dh_int|
    passed: bool


@dataclass(frozen=True)
class PeriodReport:
    records: tuple[PeriodRecord, ...]
    passed: bool
    tol: float


def _period_forms(data: WeierstrassData):
    return (
        data.dh,
        data.phi * data.dh,
        data.psi * data.dh,
        data.phi * data.psi * data.dh,
    )


def _form_singulars(forms, extra=()) -> list[complex]:
    pts: list[complex] = [complex(p) for p in extra]
    for f in forms:
        s, e0, _ = f.singular_points()
        cands = list(s) + ([0j] if e0 else [])
        for p in cands:
            if all(abs(p - q) > 1e-10 * (1 + abs(q)) for q in pts):
                pts.append(p)
    return pts


def period_report(
    data: WeierstrassData, settings: Settings | None = None
) -> PeriodReport:
    """Evaluate the closing conditions on a cycle around every puncture.

    Conditions per cycle: the phi dh and psi dh integrals are negated
    conjugates of each other, and the dh / phi psi dh integrals are purely
    imaginary.  Each circle integral is certified at two radii.
    """
    settings = settings or DEFAULT
    forms = _period_forms(data)
    tol = settings.residue_rel_tol
    records = []
    finite = data.domain.finite_punctures()
    for p in data.domain.punctures:
        if is_infinity(p):
            hazards = _form_singulars(forms, extra=finite)
            reach = max([1.0] + [abs(q) for q in hazards])
            radius = 2.0 * reach
            vals = []
            for f in forms:
                nodes = settings.circle_nodes
                while True:
                    v1 = circle_integral(f, 0j, radius, nodes)
                    v2 = circle_integral(f, 0j, 2.0 * radius, nodes)
                    if abs(v1 - v2) <= tol * (1.0 + max(abs(v1), abs(v2))):
                        vals.append(v2)
                        break
                    nodes *= 2
                    if nodes > settings.circle_max_nodes:
                        raise NonConvergent(f"period circle around infinity for {f!r}")
        else:
            hazards = _form_singulars(forms, extra=[q for q in finite if q != p])
            others = [q for q in hazards if abs(q - p) > 1e-8 * (1 + abs(p))]
            radius = 0.5
            if others:
                radius = min(0.5, min(abs(q - p) for q in others) / 2.0)
            vals = [
                certified_circle_integral(f, p, radius, settings) for f in forms
            ]
        scale = 1.0 + max(abs(v) for v in vals)
        r_conj = abs(vals[1] + vals[2].conjugate())
        r_dh = abs(vals[0].real)
        r_pp = abs(vals[3].real)
        passed = max(r_conj, r_dh, r_pp) <= tol * scale * 10.0
        records.append(
            PeriodRecord(p, vals[0], vals[1], vals[2], vals[3], r_conj, r_dh, r_pp, passed)
        )
    return PeriodReport(tuple(records), all(r.passed for r in records), tol)


# ---------------------------------------------------------------------------
# regularity


@dataclass(frozen=True)
class RegularityReport:
    poles_disjoint: bool
    form_matches_poles: bool
    locus_empty: bool | None
    details: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return bool(self.poles_disjoint and self.form_matches_poles and self.locus_empty)


def _interior_candidates(data: WeierstrassData) -> list[complex]:
    """Finite interior points where dh, phi or psi could be singular/zero."""
    pts: list[complex] = []
    for f in (data.phi, data.psi, data.dh):
        try:
            inv = f.zeros_and_poles()
        except Exception:
            continue
        for q, _ in inv.finite:
            if data.domain.is_puncture(q):
                continue
            if all(abs(q - r) > 1e-8 * (1 + abs(r)) for r in pts):
                pts.append(q)
    return pts


def regularity_report(data: WeierstrassData, scan_locus: bool = True) -> RegularityReport:
    """Structural regularity: disjoint interior poles of phi/psi, dh zeros
    matching those poles in position and order, and (optionally, via the
    locus scanner) no interior solutions of phi = conj(psi)."""
    details: list[str] = []
    ok_disjoint = True
    ok_form = True

    def order(f: MeroExpr, p) -> int:
        try:
            return f.order_at(p)
        except Exception:
            return 0

    for p in _interior_candidates(data):
        o_phi = order(data.phi, p)
        o_psi = order(data.psi, p)
        o_dh = order(data.dh, p)
        if o_phi < 0 and o_psi < 0:
            ok_disjoint = False
            details.append(f"phi and psi share an interior pole at {p}")
        pole_order = max(-o_phi, -o_psi, 0)
        if o_dh != pole_order:
            ok_form = False
            if o_dh < 0:
                details.append(f"dh has an interior pole at {p}")
            else:
                details.append(
                    f"dh vanishes to order {o_dh} at {p} but the phi/psi pole order is {pole_order}"
                )
    # the point at infinity, when interior
    if not data.domain.has_infinity():
        try:
            o_phi = data.phi.order_at(INFINITY)
            o_psi = data.psi.order_at(INFINITY)
            o_dh = data.dh.change_chart_to_infinity(as_form=True).order_at(0j)
        except Exception as exc:
            details.append(f"could not analyse infinity: {exc}")
        else:
            if o_phi < 0 and o_psi < 0:
                ok_disjoint = False
                details.append("phi and psi share an interior pole at infinity")
            pole_order = max(-o_phi, -o_psi, 0)
            if o_dh != pole_order:
                ok_form = False
                details.append(
                    f"at infinity dh has order {o_dh} but the phi/psi pole order is {pole_order}"
                )
    locus_empty: bool | None = None
    if scan_locus:
        from .locus import regularity_verdict

        locus_empty = regularity_verdict(data)
        if not locus_empty:
            details.append("phi = conj(psi) has interior solutions")
    return RegularityReport(ok_disjoint, ok_form, locus_empty, tuple(details))


# ---------------------------------------------------------------------------
# Lorentz frame change


def lorentz_frame_change(
    data: WeierstrassData, a: complex, b: complex, c: complex, d: complex
) -> WeierstrassData:
    """Transform the data by the isometry attached to a unit-determinant
    complex 2x2 matrix: phi and psi move by conjugate fractional-linear maps
    and dh absorbs the compensating factor."""
    a, b, c, d = complex(a), complex(b), complex(c), complex(d)
    det = a * d - b * c
    if abs(det - 1.0) > 1e-9:
        raise ValueError(f"frame matrix must have determinant 1, got {det}")
    ca, cb, cc, cd = a.conjugate(), b.conjugate(), c.conjugate(), d.conjugate()
    if c == 0:
        phi = data.phi.scaled(a / d) + MeroExpr.const(b / d)
        psi = data.psi.scaled(ca / cd) + MeroExpr.const(cb / cd)
    else:
        phi = data.phi.mobius(a, b, c, d)
        psi = data.psi.mobius(ca, cb, cc, cd)
    factor1 = data.phi.scaled(c) + MeroExpr.const(d)
    factor2 = data.psi.scaled(cc) + MeroExpr.const(cd)
    dh = factor1 * factor2 * data.dh
    return WeierstrassData(
        phi, psi, dh, data.domain, data.label, degenerate=data.degenerate
    )


# ---------------------------------------------------------------------------
# completeness probe


@dataclass(frozen=True)
class RayProbe:
    angle: float
    increments: tuple[float, ...]
    median_ratio: float
    verdict: str  # "divergent" | "convergent" | "inconclusive"


@dataclass(frozen=True)
class CompletenessReport:
    puncture: complex
    rays: tuple[RayProbe, ...]
    verdict: str
    note: str = "heuristic: dyadic ray probe of the metric length"


def completeness_probe(
    data: WeierstrassData, puncture: complex, settings: Settings | None = None
) -> CompletenessReport:
    """Estimate whether the metric length of rays into the puncture diverges.

    This is a labelled heuristic: dyadic steps toward the puncture, metric
    length per step by a small trapezoid sum, verdict from the median ratio
    of consecutive step lengths.
    """
    settings = settings or DEFAULT
    hazards, _ = singular_set(data)
    rays = []
    for angle in (0.4, 2.5, 4.6):
        incs = _ray_increments(data, puncture, angle, hazards, settings)
        if incs is None:
            continue
        ratios = [
            incs[j + 1] / incs[j] for j in range(len(incs) - 1) if incs[j] > 0
        ]
        if not ratios:
            continue
        med = float(np.median(ratios))
        if med >= 0.95:
            verdict = "divergent"
        elif med <= 0.8:
            verdict = "convergent"
        else:
            verdict = "inconclusive"
        rays.append(RayProbe(angle, tuple(incs), med, verdict))
    verdicts = {r.verdict for r in rays}
    overall = verdicts.pop() if len(verdicts) == 1 else "inconclusive"
    return CompletenessReport(puncture, tuple(rays), overall)


def _ray_increments(data, puncture, angle, hazards, settings):
    direction = cmath.exp(1j * angle)
    out: list[float] = []
    if is_infinity(puncture):
        base = 2.0 * max([1.0] + [abs(h) for h in hazards])
        radii = [base * 2.0**j for j in range(settings.ray_halvings // 2)]
        points = [r * direction for r in radii]
    else:
        others = [h for h in hazards if abs(h - puncture) > 1e-8]
        others += [q for q in data.domain.finite_punctures() if abs(q - puncture) > 1e-8]
        r0 = 0.5
        if others:
            r0 = min(0.5, min(abs(h - puncture) for h in others) / 2.0)
        radii = [r0 * 2.0 ** (-j) for j in range(settings.ray_halvings)]
        points = [puncture + r * direction for r in radii]
    for a, b in zip(points[:-1], points[1:]):
        # 8-point trapezoid of the metric length along the step
        try:
            ts = np.linspace(0.0, 1.0, 9)
            zs = a + (b - a) * ts
            dens = np.sqrt(np.array([metric_density(data, complex(z)) for z in zs]))
        except Exception:
            break
        if not np.all(np.isfinite(dens)):
            break
        trap = getattr(np, "trapezoid", None) or np.trapz
        val = float(trap(dens, dx=abs(b - a) / 8.0))
        if not np.isfinite(val):
            break
        out.append(val)
    # A step that overflows or hits a hazard ends the march; the finite
    # prefix still decides the verdict as long as it holds >= 2 ratios.
    return out if len(out) >= 3 else None


# ---------------------------------------------------------------------------
# data files


def save_data_file(data: WeierstrassData, path: str) -> None:
    lines = [
        f"label = {data.label}",
        f"phi = {data.phi.serialize()}",
        f"psi = {data.psi.serialize()}",
        f"dh = {data.dh.serialize()}",
        "punctures = "
        + ", ".join("inf" if is_infinity(p) else repr(p) for p in data.domain.punctures),
    ]
    if data.degenerate:
        lines.append("degenerate = true")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_data_file(path: str) -> WeierstrassData:
    """Read the key = value surface description format."""
    fields: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key = value")
            key, _, raw = line.partition("=")
            fields[key.strip().lower()] = raw.strip()
    for needed in ("phi", "psi", "dh", "punctures"):
        if needed not in fields:
            raise ParseError(f"{path}: missing field {needed!r}")
    punctures = []
    for tok in fields["punctures"].split(","):
        tok = tok.strip()
        if tok in ("inf", "infinity", "oo"):
            punctures.append(INFINITY)
        else:
            try:
                punctures.append(complex(tok))
            except ValueError as exc:
                raise ParseError(f"{path}: bad puncture {tok!r}") from exc
    return WeierstrassData(
        phi=MeroExpr.parse(fields["phi"]),
        psi=MeroExpr.parse(fields["psi"]),
        dh=MeroExpr.parse(fields["dh"]),
        domain=PuncturedSphere(tuple(punctures)),
        label=fields.get("label", ""),
        degenerate=fields.get("degenerate", "").lower() in ("true", "1", "yes"),
    )
