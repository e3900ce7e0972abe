"""Search for solutions of phi(z) = conj(psi(z)).

Where the two spinor maps collide the induced metric degenerates, so an empty
finding over a generous window is the computational evidence behind a
regularity verdict.  There is no general structure theory for this equation;
the scanner treats it as plain root finding for F(z) = phi(z) - conj(psi(z))
over the real plane and reports what it finds: isolated roots (with contact
orders and a winding index when one is defined), chains of roots sampling an
arc, or nothing.  Verdicts are grid evidence, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Settings
from .ends import phase_winding
from .errors import (
    InconsistentLedger,
    JacobianSingular,
    NonConvergent,
    NotIsolated,
    PoleError,
)
from .mero import INFINITY, MeroExpr, is_infinity
from .weierstrass import PuncturedSphere, WeierstrassData

KIND_EMPTY = "empty"
KIND_ISOLATED = "isolated-points"
KIND_CURVE = "curve"
KIND_MIXED = "mixed"

_HAZARD_FACTOR = 2.0  # grid nodes closer than this many spacings to a pole are skipped
_CHAIN_FACTOR = 3.0  # roots closer than this many spacings are chained


@dataclass(frozen=True)
class Window:
    """Scan region: log-polar annulus, disc, or axis-aligned rectangle."""

    shape: str
    center: complex = 0j
    r_in: float = 0.0
    r_out: float = 0.0
    x0: float = 0.0
    x1: float = 0.0
    y0: float = 0.0
    y1: float = 0.0

    @classmethod
    def annulus(cls, r_in: float = 1e-2, r_out: float = 1e2, center: complex = 0j) -> "Window":
        if not (0 < r_in < r_out):
            raise ValueError("annulus needs 0 < r_in < r_out")
        return cls("annulus", complex(center), float(r_in), float(r_out))

    @classmethod
    def disc(cls, radius: float = 10.0, center: complex = 0j) -> "Window":
        if radius <= 0:
            raise ValueError("disc needs a positive radius")
        return cls("disc", complex(center), 0.0, float(radius))

    @classmethod
    def rect(cls, x0: float, x1: float, y0: float, y1: float) -> "Window":
        if not (x0 < x1 and y0 < y1):
            raise ValueError("rectangle bounds out of order")
        return cls("rect", 0j, 0.0, 0.0, float(x0), float(x1), float(y0), float(y1))

    def contains(self, z: complex, slack: float = 1e-9) -> bool:
        z = complex(z)
        if self.shape == "annulus":
            r = abs(z - self.center)
            return self.r_in * (1 - slack) <= r <= self.r_out * (1 + slack)
        if self.shape == "disc":
            return abs(z - self.center) <= self.r_out * (1 + slack)
        pad_x = slack * (self.x1 - self.x0)
        pad_y = slack * (self.y1 - self.y0)
        return (self.x0 - pad_x <= z.real <= self.x1 + pad_x) and (
            self.y0 - pad_y <= z.imag <= self.y1 + pad_y
        )

    def grid(self, n: int) -> tuple[np.ndarray, np.ndarray, bool]:
        """Node array, per-node spacing array, and whether axis 1 wraps."""
        if self.shape == "annulus":
            radii = np.geomspace(self.r_in, self.r_out, n)
            theta = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
            r, t = np.meshgrid(radii, theta, indexing="ij")
            z = self.center + r * np.exp(1j * t)
            step = max(2.0 * math.pi / n, math.log(self.r_out / self.r_in) / (n - 1))
            return z, r * step, True
        if self.shape == "disc":
            side = np.linspace(-self.r_out, self.r_out, n)
            x, y = np.meshgrid(side, side, indexing="ij")
            z = self.center + x + 1j * y
            h = 2.0 * self.r_out / (n - 1)
            return z, np.full_like(x, h), False
        xs = np.linspace(self.x0, self.x1, n)
        ys = np.linspace(self.y0, self.y1, n)
        x, y = np.meshgrid(xs, ys, indexing="ij")
        h = max((self.x1 - self.x0), (self.y1 - self.y0)) / (n - 1)
        return x + 1j * y, np.full_like(x, h), False

    def local_spacing(self, z: complex, n: int) -> float:
        if self.shape == "annulus":
            step = max(2.0 * math.pi / n, math.log(self.r_out / self.r_in) / (n - 1))
            return abs(complex(z) - self.center) * step
        if self.shape == "disc":
            return 2.0 * self.r_out / (n - 1)
        return max((self.x1 - self.x0), (self.y1 - self.y0)) / (n - 1)


def default_window(data: WeierstrassData) -> Window:
    """Annulus for punctured-plane domains, origin-centred disc otherwise."""
    if data.domain.finite_punctures():
        return Window.annulus()
    return Window.disc()


@dataclass(frozen=True)
class LocusPoint:
    z: complex
    m: int | None = None
    n: int | None = None
    index: int | None = None
    degenerate: bool = False
    note: str = ""


@dataclass(frozen=True)
class LocusFinding:
    kind: str
    points: tuple[LocusPoint, ...] = ()
    curves: tuple[tuple[complex, ...], ...] = ()
    window: Window | None = None
    grid_n: int = 0

    @property
    def is_empty(self) -> bool:
        return self.kind == KIND_EMPTY

    def all_samples(self) -> list[complex]:
        out = [p.z for p in self.points]
        for chain in self.curves:
            out.extend(chain)
        return out

    def __str__(self) -> str:
        if self.is_empty:
            return "locus: empty"
        bits = []
        if self.points:
            bits.append(f"{len(self.points)} isolated point(s)")
        if self.curves:
            bits.append(
                f"{len(self.curves)} curve chain(s), "
                f"{sum(len(c) for c in self.curves)} samples"
            )
        return "locus: " + ", ".join(bits)


def _hazard_points(data: WeierstrassData) -> list[complex]:
    pts: list[complex] = [complex(p) for p in data.domain.finite_punctures()]
    for f in (data.phi, data.psi, data.dh):
        try:
            inv = f.zeros_and_poles()
        except Exception:
            continue
        pts.extend(complex(q) for q, _order in inv.finite_poles())
        pts.extend(complex(q) for q in inv.essential if not is_infinity(q))
    return pts


def _collision_values(data, z):
    """(F, scale) with F = phi - conj(psi); PoleError propagates."""
    pv = data.phi(z)
    qv = data.psi(z)
    return pv - np.conj(qv), 1.0 + abs(pv)


def _refine(data, dphi, dpsi, z0: complex, settings: Settings) -> complex | None:
    z = complex(z0)
    try:
        f, scale = _collision_values(data, z)
    except (PoleError, ZeroDivisionError):
        return None
    for _ in range(settings.locus_newton_steps):
        if not (math.isfinite(f.real) and math.isfinite(f.imag)):
            return None
        if abs(f) <= settings.locus_residual_tol * scale:
            return z
        try:
            a = dphi(z)
            b = -np.conj(dpsi(z))
        except (PoleError, ZeroDivisionError):
            return None
        jac = np.array(
            [
                [(a + b).real, -(a - b).imag],
                [(a + b).imag, (a - b).real],
            ]
        )
        rhs = np.array([-f.real, -f.imag])
        sol, *_ = np.linalg.lstsq(jac, rhs, rcond=None)
        dz = complex(sol[0], sol[1])
        if dz == 0:
            return None
        stepped = False
        for halving in range(9):
            trial = z + dz * (0.5**halving)
            try:
                ft, st = _collision_values(data, trial)
            except (PoleError, ZeroDivisionError):
                continue
            if abs(ft) < abs(f):
                z, f, scale = trial, ft, st
                stepped = True
                break
        if not stepped:
            return None
    return z if abs(f) <= settings.locus_residual_tol * scale else None


def _dedup(roots: list[complex], tol: float) -> list[complex]:
    kept: list[complex] = []
    for z in sorted(roots, key=lambda w: (w.real, w.imag)):
        if all(abs(z - w) > tol for w in kept):
            kept.append(z)
    return kept


def _components(roots: list[complex], spacings: list[float]) -> list[list[int]]:
    k = len(roots)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if abs(roots[i] - roots[j]) <= _CHAIN_FACTOR * max(spacings[i], spacings[j]):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _order_chain(pts: list[complex], spacings: list[float]) -> list[complex]:
    """Order a chain by arc proximity: greedy walk from an endpoint if the
    chain is open, angle sort around the centroid if it is closed."""
    k = len(pts)
    neigh = [0] * k
    for i in range(k):
        for j in range(k):
            if i != j and abs(pts[i] - pts[j]) <= _CHAIN_FACTOR * max(
                spacings[i], spacings[j]
            ):
                neigh[i] += 1
    start = next((i for i in range(k) if neigh[i] == 1), None)
    if start is None:
        centre = sum(pts) / k
        return sorted(pts, key=lambda z: math.atan2((z - centre).imag, (z - centre).real))
    order = [start]
    used = {start}
    while len(order) < k:
        last = pts[order[-1]]
        nxt = min(
            (i for i in range(k) if i not in used),
            key=lambda i: abs(pts[i] - last),
        )
        order.append(nxt)
        used.add(nxt)
    return [pts[i] for i in order]


def local_data(
    data: WeierstrassData, z0: complex, settings: Settings = DEFAULT
) -> tuple[int, int, int]:
    """Contact orders (m, n) of the two spinors at an isolated collision
    point, and the winding index of phi - conj(psi) there: m when m < n,
    -n when m > n.  Equal orders leave the index undefined."""
    z0 = complex(z0)
    try:
        v = data.phi(z0)
        w = data.psi(z0)
    except PoleError as exc:
        raise NotIsolated(f"spinor pole at {z0}: not a collision point") from exc
    if abs(v - np.conj(w)) > 1e-6 * (1.0 + abs(v)):
        raise NotIsolated(f"{z0} does not lie on the collision locus")
    m = (data.phi + MeroExpr.const(-v)).order_at(z0)
    n = (data.psi + MeroExpr.const(-w)).order_at(z0)
    if m == n:
        exc = JacobianSingular(
            f"equal contact orders m = n = {m} at {z0}: index undefined"
        )
        exc.orders = (m, n)
        raise exc
    index = m if m < n else -n

    # certify by direct winding on shrinking circles
    hazards = [h for h in _hazard_points(data) if abs(h - z0) > 1e-12]
    r0 = 0.25
    if hazards:
        r0 = min(r0, 0.5 * min(abs(h - z0) for h in hazards))

    def diff(zz):
        return data.phi(zz) - np.conj(data.psi(zz))

    seen: int | None = None
    for j in range(14):
        radius = r0 * (0.5**j)
        try:
            w_val = phase_winding(diff, center=z0, radius=radius, settings=settings)
        except NonConvergent:
            seen = None
            continue
        w_int = int(round(w_val))
        if abs(w_val - w_int) > settings.winding_tol:
            seen = None
            continue
        if seen is not None and seen == w_int:
            if w_int != index:
                raise InconsistentLedger(
                    f"winding {w_int} contradicts contact orders ({m}, {n}) at {z0}"
                )
            return m, n, index
        seen = w_int
    raise NotIsolated(f"no certified winding around {z0}; the zero may not be isolated")


def scan(
    data: WeierstrassData,
    window: Window | None = None,
    grid_n: int | None = None,
    settings: Settings = DEFAULT,
) -> LocusFinding:
    """Grid-seeded damped-Newton sweep for the collision locus.

    Grid nodes that are local minima of |F| and lie below a scale-aware
    threshold (10 x spacing x local derivative size) seed Newton iterations
    on the real two-dimensional system; converged roots are deduplicated and
    then split into arc chains and isolated points by nearest-neighbour
    statistics.
    """
    window = window or default_window(data)
    n = int(grid_n or settings.locus_grid_n)
    if n < 64:
        raise ValueError("grid_n must be at least 64")

    z, spacing, wraps = window.grid(n)
    dphi = data.phi.derivative()
    dpsi = data.psi.derivative()
    with np.errstate(all="ignore"):
        fv = data.phi(z) - np.conj(data.psi(z))
        gv = np.abs(dphi(z)) + np.abs(dpsi(z))
    absf = np.abs(fv)
    bad = ~np.isfinite(absf)
    for h in _hazard_points(data):
        bad |= np.abs(z - h) < _HAZARD_FACTOR * spacing
    absf = np.where(bad, np.inf, absf)

    # scale-aware seeding threshold; the tiny absolute floor keeps roots that
    # sit exactly on a node where both derivatives happen to vanish
    thresh = 10.0 * spacing * np.where(np.isfinite(gv), gv, 0.0) + 1e-14
    # seed from one-dimensional minima along each grid axis: a curve crossing
    # the grid leaves a minimum on every line it cuts, so chains stay dense
    padded = np.pad(absf, 1, constant_values=np.inf)
    if wraps:
        padded[1:-1, 0] = absf[:, -1]
        padded[1:-1, -1] = absf[:, 0]
    core = padded[1:-1, 1:-1]
    min_r = (core <= padded[:-2, 1:-1]) & (core <= padded[2:, 1:-1])
    min_t = (core <= padded[1:-1, :-2]) & (core <= padded[1:-1, 2:])
    seeds = z[(min_r | min_t) & (absf < thresh)]

    roots: list[complex] = []
    for z0 in seeds:
        r = _refine(data, dphi, dpsi, complex(z0), settings)
        if r is not None and window.contains(r):
            roots.append(r)
    roots = _dedup(roots, settings.locus_dedup)
    if not roots:
        return LocusFinding(KIND_EMPTY, window=window, grid_n=n)

    spac = [window.local_spacing(r, n) for r in roots]
    curves: list[tuple[complex, ...]] = []
    points: list[LocusPoint] = []
    for comp in _components(roots, spac):
        members = [roots[i] for i in comp]
        msp = [spac[i] for i in comp]
        if len(comp) >= settings.curve_min_points:
            curves.append(tuple(_order_chain(members, msp)))
            continue
        for r in members:
            try:
                dv = abs(dphi(r))
                dw = abs(dpsi(r))
                degen = abs(dv - dw) <= 1e-8 * (dv + dw)
            except (PoleError, ZeroDivisionError):
                degen = True
            try:
                m, nn, index = local_data(data, r, settings)
                points.append(LocusPoint(r, m, nn, index, degen))
            except JacobianSingular as exc:
                em, en = getattr(exc, "orders", (None, None))
                points.append(LocusPoint(r, em, en, None, True, str(exc)))
            except (NotIsolated, InconsistentLedger) as exc:
                points.append(LocusPoint(r, degenerate=degen, note=str(exc)))

    if curves and points:
        kind = KIND_MIXED
    elif curves:
        kind = KIND_CURVE
    else:
        kind = KIND_ISOLATED
    return LocusFinding(kind, tuple(points), tuple(curves), window, n)


@dataclass(frozen=True)
class RegularityVerdict:
    passed: bool
    findings: tuple[LocusFinding, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.passed


def regularity_verdict(
    data: WeierstrassData,
    windows: tuple[Window, ...] | None = None,
    settings: Settings = DEFAULT,
) -> RegularityVerdict:
    """Pass iff the scan comes back empty on every window."""
    if windows is None:
        windows = (default_window(data),)
    findings = tuple(scan(data, w, settings=settings) for w in windows)
    return RegularityVerdict(all(f.is_empty for f in findings), findings)


def fourpi_scan(
    m: int = 1,
    a: complex = 0.5,
    grid_n: int | None = None,
    settings: Settings = DEFAULT,
) -> LocusFinding:
    """Collision scan for the one-parameter family phi = z^m (z + a),
    psi = z^(m+1) / (z + b) with b = 1 - a (the pairing that balances the
    periods).  Every sampled parameter is expected to produce a nonempty
    finding: the family never yields a regular surface.
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer")
    a = complex(a)
    b = 1.0 - a
    phi = MeroExpr.from_rational([0.0] * m + [a, 1.0], [1.0])
    psi = MeroExpr.from_rational([0.0] * (m + 1) + [1.0], [b, 1.0])
    dh = MeroExpr.from_rational([b, 1.0], [0.0] * (m + 2) + [1.0])
    data = WeierstrassData(
        phi,
        psi,
        dh,
        PuncturedSphere((0j, INFINITY)),
        label=f"fourpi-family m={m}",
    )
    return scan(data, Window.annulus(), grid_n, settings)
