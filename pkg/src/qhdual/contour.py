"""Integration paths: the Barnes line, nested J-side loops and the B_m loops.

Every path is a list of segments parametrized by ``tau`` in [0, 1].  Lines may
be *graded* (geometric node spacing, used for the long loop rays).  Arguments
of factors ``s - c`` are continued along segments in closed form:

* on a line the argument change is the principal argument of the ratio of the
  end values (a straight segment cannot turn by pi or more around ``c``);
* on an arc about ``C`` of radius ``r`` one writes
  ``s - c = r e^{i th} (1 - w e^{-i th})`` with ``w = (c - C)/r`` when
  ``|w| < 1`` and ``s - c = -(c - C)(1 - e^{i th}/w)`` otherwise; the
  principal logarithm of the bracket is continuous along the whole arc.

so no step-size control is needed for the production paths.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .params import Params

__all__ = [
    "PathSegment",
    "Contour",
    "PoleReport",
    "PinchError",
    "ContourError",
    "barnes_contour",
    "vertical_line",
    "loops_J",
    "loops_B",
    "loop_around",
    "contour_to_json",
    "clearance_audit",
]


class ContourError(ValueError):
    pass


class PinchError(ContourError):
    """A left-family pole coincides with a right-family pole."""


@dataclass(frozen=True)
class PathSegment:
    """Line ``p0 -> p1`` (``grade`` > 0 gives geometric spacing) or arc.

    Arcs: ``center``, ``radius``, angles ``th0 -> th1``; the sign of
    ``th1 - th0`` is the orientation.
    """

    kind: str
    p0: complex = 0j
    p1: complex = 0j
    grade: float = 0.0
    center: complex = 0j
    radius: float = 0.0
    th0: float = 0.0
    th1: float = 0.0

    @property
    def orientation(self) -> int:
        if self.kind == "arc":
            return 1 if self.th1 > self.th0 else -1
        return 1

    def _g(self, tau):
        lam = self.grade
        if lam == 0.0:
            return tau, np.ones_like(tau)
        e = np.expm1(lam)
        return np.expm1(lam * tau) / e, lam * np.exp(lam * tau) / e

    def point(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "line":
            g, _ = self._g(tau)
            return self.p0 + (self.p1 - self.p0) * g
        th = self.th0 + (self.th1 - self.th0) * tau
        return self.center + self.radius * np.exp(1j * th)

    def deriv(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "line":
            _, dg = self._g(tau)
            return (self.p1 - self.p0) * dg
        th = self.th0 + (self.th1 - self.th0) * tau
        return 1j * self.radius * (self.th1 - self.th0) * np.exp(1j * th)

    @property
    def start(self) -> complex:
        return complex(self.point(0.0))

    @property
    def end(self) -> complex:
        return complex(self.point(1.0))

    def delta_arg(self, c, tau0, tau1):
        """Continuous change of arg(s - c) from ``tau0`` to ``tau1`` (vectorized)."""
        c = np.asarray(c, dtype=complex)
        if self.kind == "line":
            return np.angle((self.point(tau1) - c) / (self.point(tau0) - c))
        dth = self.th1 - self.th0
        t0 = self.th0 + dth * np.asarray(tau0, dtype=float)
        t1 = self.th0 + dth * np.asarray(tau1, dtype=float)
        w = (c - self.center) / self.radius
        aw = np.abs(w)
        if np.any(np.abs(aw - 1.0) < 1e-12):
            raise ContourError("branch point on an arc")
        with np.errstate(divide="ignore", invalid="ignore"):
            inside = (t1 - t0) + np.angle((1 - w * np.exp(-1j * t1)) / (1 - w * np.exp(-1j * t0)))
            winv = np.where(aw > 1, 1.0 / np.where(aw > 1, w, 1.0), 0.0)
            outside = np.angle((1 - np.exp(1j * t1) * winv) / (1 - np.exp(1j * t0) * winv))
        # the bracket keeps positive real part, so its principal arg is continuous
        return np.where(aw < 1, inside, outside)

    def sample(self, n: int = 32) -> np.ndarray:
        return self.point(np.linspace(0.0, 1.0, n))


@dataclass
class Contour:
    """A contiguous path (segments) with an anchor at the start of ``segments[anchor_index]``.

    ``loops`` holds closed sub-paths attached to the main path through
    zero-width channels (used only for the explicit Barnes detours).
    """

    segments: list
    truncation_radius: float
    anchor: complex
    family: str
    anchor_index: int = 0
    loops: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    # -- evaluation helpers (seg index arrays + tau arrays) ------------------
    def points(self, seg, tau):
        seg = np.asarray(seg)
        tau = np.asarray(tau, dtype=float)
        out = np.empty(tau.shape, dtype=complex)
        for k, s in enumerate(self.segments):
            m = seg == k
            if np.any(m):
                out[m] = s.point(tau[m])
        return out

    def derivs(self, seg, tau):
        seg = np.asarray(seg)
        tau = np.asarray(tau, dtype=float)
        out = np.empty(tau.shape, dtype=complex)
        for k, s in enumerate(self.segments):
            m = seg == k
            if np.any(m):
                out[m] = s.deriv(tau[m])
        return out

    def arg_from_anchor(self, c, seg, tau):
        """Continuous change of arg(s - c) from the anchor to (seg, tau).

        ``c`` broadcasts against ``seg``/``tau``.
        """
        seg = np.asarray(seg)
        tau = np.asarray(tau, dtype=float)
        c = np.broadcast_to(np.asarray(c, dtype=complex), tau.shape)
        out = np.zeros(tau.shape)
        ka = self.anchor_index
        for k, s in enumerate(self.segments):
            m = seg == k
            if not np.any(m):
                continue
            cm = c[m]
            acc = np.zeros(cm.shape)
            if k >= ka:
                for j in range(ka, k):
                    acc += self.segments[j].delta_arg(cm, 0.0, 1.0)
                acc += s.delta_arg(cm, 0.0, tau[m])
            else:
                for j in range(k + 1, ka):
                    acc -= self.segments[j].delta_arg(cm, 0.0, 1.0)
                acc -= s.delta_arg(cm, tau[m], 1.0)
            out[m] = acc
        return out

    def sample(self, n: int = 64) -> np.ndarray:
        pts = [s.sample(n) for s in self.segments]
        return np.concatenate(pts) if pts else np.zeros(0, dtype=complex)

    def to_dict(self) -> dict:
        def seg_d(s: PathSegment):
            pts = s.sample(24 if s.kind == "arc" else 2 if s.grade == 0 else 12)
            return {"kind": s.kind, "points": [[float(p.real), float(p.imag)] for p in pts]}

        return {
            "family": self.family,
            "anchor": [self.anchor.real, self.anchor.imag],
            "truncation_radius": self.truncation_radius,
            "segments": [seg_d(s) for s in self.segments],
            "loops": [[seg_d(s) for s in lp] for lp in self.loops],
        }


def contour_to_json(contours, path=None) -> str:
    if isinstance(contours, Contour):
        contours = [contours]
    text = json.dumps([c.to_dict() for c in contours], indent=1)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------------------
# Barnes line


@dataclass
class PoleReport:
    """Pole bookkeeping for the I-side line ``Re t = eps``.

    ``bypassed`` lists right-family points left of the line as tuples
    ``(family, N, value)`` with family ``"z-m2"`` (points z - m2 + kappa N) or
    ``"-m1"`` (points -m1 + kappa N).  ``removable`` lists families whose
    poles are cancelled by zeros of the trigonometric factor (the z - m2
    family when m2 = 0).  ``pinches`` records coincidences of left and right
    points.
    """

    eps: float
    left_families: dict
    right_families: dict
    bypassed: list
    removable: list = field(default_factory=list)
    pinches: list = field(default_factory=list)
    straight: bool = False


def _near_nonneg_int(w: complex, tol: float):
    n = round(w.real)
    if n >= 0 and abs(w - n) < tol:
        return int(n)
    return None


def _choose_eps(p: Params, lo: float, l: int) -> float:
    """A point in (lo, lo + 2] as far as possible from all right-pole real parts."""
    k = p.kappa
    crit = [lo]
    for base in (complex(-p.m1), complex(p.z - p.m2)):
        for j in range(0, max(l, 1)):
            r0 = base.real + j
            nmin = math.floor((lo - 1 - r0) / k)
            for n in range(max(nmin, 0), max(nmin, 0) + int(4 / k) + 4):
                crit.append(r0 + k * n)
    grid = np.linspace(lo, lo + 2.0, 4001)[1:]
    crit = np.asarray(crit)
    d = np.min(np.abs(grid[:, None] - crit[None, :]), axis=1)
    # prefer moderately small eps among near-optimal points
    best = np.max(d)
    i = int(np.argmax(d >= 0.8 * best))
    return float(grid[i])


def _line_extent(p: Params, tol: float, l: int) -> tuple[float, float]:
    """Truncation heights (down, up) for the Barnes line.

    Per variable the integrand decays like exp(-y Im mu / kappa) for y > 0 and
    exp(-|y| (2 pi - Im mu) / kappa) for y < 0, times a power of |y| bounded
    by ``P`` below.
    """
    k = p.kappa
    im = complex(p.mu).imag
    r_up, r_dn = im / k, (2 * math.pi - im) / k
    if r_up <= 0 or r_dn <= 0:
        raise ContourError("Im mu must lie in (0, 2 pi) for the Barnes line")
    power = max(0.0, -complex(p.m1 + p.m2).real / k - 2) + l + l * (l - 1) / 2 + 2
    shift = max(abs(complex(p.z).imag), abs(complex(p.m1).imag), abs(complex(p.m2).imag), 1.0) + 2 * k
    target = math.log(1e3 / tol)

    def solve(rate):
        y = target / rate
        for _ in range(50):
            y = (target + power * math.log(1 + y)) / rate
        return shift + y

    return solve(r_dn), solve(r_up)


def barnes_contour(p: Params, eps: float | None = None, clearance: float | None = None,
                   tol: float = 1e-12) -> tuple[Contour, PoleReport]:
    """The line ``Re t = eps`` plus the right-family points it must bypass.

    For Re m1 < 0, Re m2 < 0 and Re z = 0 the line itself is the contour
    (``eps`` between 0 and min(-Re m1, -Re m2)).  Otherwise ``eps`` exceeds
    every left-family real part and the right-family points to its left are
    returned in ``report.bypassed``; the integral then equals the line integral
    plus residue corrections (computed in :mod:`qhdual.integrals`).
    """
    k = p.kappa
    z = complex(p.z)
    m1 = complex(p.m1)
    m2 = complex(p.m2)
    l = int(p.l2)
    clearance = 1e-3 * k if clearance is None else clearance
    straight = m1.real < 0 and m2.real < 0 and z.real == 0
    if straight:
        upper = min(-m1.real, -m2.real)
        if eps is None:
            eps = 0.5 * upper
        if not 0 < eps < upper:
            raise ContourError(f"eps={eps} must lie in (0, {upper})")
    else:
        lo = max(0.0, z.real)
        if eps is None:
            eps = _choose_eps(p, lo, l)
        if eps <= lo:
            raise ContourError(f"no separating eps: need eps > {lo}")

    zm2 = z - m2
    removable = []
    m2_is_zero = m2 == 0
    if m2_is_zero:
        removable.append("z-m2")
    bypassed = []
    for fam, base in (("z-m2", zm2), ("-m1", -m1)):
        if base.real < eps:
            nmax = math.ceil((eps - base.real) / k)
            for n in range(nmax + 1):
                v = base + k * n
                if v.real < eps:
                    bypassed.append((fam, n, v))
    pinches = []
    tol_p = max(clearance / k, 1e-9)
    for fam, n, v in bypassed:
        for lfam, lbase in (("-kN", 0j), ("z-kN", z)):
            nn = _near_nonneg_int((lbase - v) / k, tol_p)
            if nn is not None and not (fam == "z-m2" and lfam == "z-kN" and m2_is_zero):
                pinches.append(((fam, n), (lfam, nn), v))
        if abs(v.real - eps) < clearance:
            raise ContourError(f"pole {v} within clearance of the line")
    ydn, yup = _line_extent(p, tol, l)
    seg_dn = PathSegment("line", complex(eps, -ydn), complex(eps, 0.0))
    seg_up = PathSegment("line", complex(eps, 0.0), complex(eps, yup))
    c = Contour([seg_dn, seg_up], max(ydn, yup), complex(eps, 0.0), "barnes", anchor_index=1,
                meta={"eps": eps, "y_down": ydn, "y_up": yup})
    report = PoleReport(
        eps=eps,
        left_families={"-kN": 0j, "z-kN": z},
        right_families={"-m1+kN": -m1, "z-m2+kN": zm2},
        bypassed=bypassed,
        removable=removable,
        pinches=pinches,
        straight=straight,
    )
    return c, report


def vertical_line(x0: float, y_down: float, y_up: float, family: str = "line") -> Contour:
    """The upward line Re t = x0 truncated to [-y_down, y_up], anchored on the real axis."""
    seg_dn = PathSegment("line", complex(x0, -y_down), complex(x0, 0.0))
    seg_up = PathSegment("line", complex(x0, 0.0), complex(x0, y_up))
    return Contour([seg_dn, seg_up], max(y_down, y_up), complex(x0, 0.0), family, anchor_index=1,
                   meta={"eps": x0, "y_down": y_down, "y_up": y_up})


def detour_loops(points, radii) -> list:
    """Clockwise square loops around each point (the detours with their
    zero-width channels dropped, since the two channel sides cancel)."""
    loops = []
    for q, r in zip(points, radii):
        corners = [q + r * (1 + 1j), q + r * (1 - 1j), q + r * (-1 - 1j), q + r * (-1 + 1j)]
        segs = [PathSegment("line", corners[i], corners[(i + 1) % 4]) for i in range(4)]
        loops.append(segs)
    return loops


# ---------------------------------------------------------------------------
# loops


def loop_around(center: complex, direction: complex, radius: float, reach: float,
                offset_angle: float = 0.25) -> Contour:
    """Counterclockwise keyhole loop around ``center`` opening towards ``direction``.

    The path comes in from ``center + reach*direction`` on the left side of
    the ray, circles the center and leaves on the right side.  The anchor is
    the arc point opposite to ``direction``.
    """
    d = complex(direction) / abs(direction)
    phi = math.atan2(d.imag, d.real)
    a = offset_angle
    h = radius * math.sin(a)
    x0 = radius * math.cos(a)
    if reach <= x0:
        raise ContourError("loop reach shorter than its radius")
    far_in = center + d * complex(reach, h)
    near_in = center + d * complex(x0, h)
    near_out = center + d * complex(x0, -h)
    far_out = center + d * complex(reach, -h)
    grade = math.log1p((reach - x0) / (0.5 * radius))
    segs = [
        PathSegment("line", far_in, near_in, grade=-grade),
        PathSegment("arc", center=center, radius=radius, th0=phi + a, th1=phi + math.pi),
        PathSegment("arc", center=center, radius=radius, th0=phi + math.pi, th1=phi + 2 * math.pi - a),
        PathSegment("line", near_out, far_out, grade=grade),
    ]
    anchor = center - d * radius
    return Contour(segs, reach, anchor, "loop", anchor_index=2,
                   meta={"center": center, "direction": d, "radius": radius})


def _reach_for_power(center: complex, radius: float, exponent: float, tol: float,
                     scale: float) -> float:
    """Distance along the ray where |s|^exponent tails drop below tol*1e-2."""
    e1 = exponent + 1.0
    if e1 >= -0.05:
        raise ContourError(f"loop integrand decays too slowly (|s|^{exponent:.3g}); outside the convergence region")
    r = max(scale, 1.0) * (tol * 1e-2 * abs(e1)) ** (1.0 / e1)
    return max(r, 4 * radius + abs(center) + 1.0)


def loops_J(q: Params, b: int, l: int | None = None, tol: float = 1e-12, radius: float | None = None,
            nest: float = 2.0) -> list[Contour]:
    """Per-variable loops for the J integral with parameter tuple ``q``.

    ``q.z`` is the z-slot (branch point ``z``), ``q.mu`` the mu-slot.  Variables
    ``0..b-1`` get loops around ``z`` along ``z/|z|``; the remaining ones loops
    around 1 along the positive axis.  Within a family the loop of a smaller
    index lies inside.
    """
    z = complex(q.z)
    l = int(q.l2) if l is None else int(l)
    if not 0 <= b <= l:
        raise ContourError(f"b={b} outside 0..{l}")
    if z == 0 or (z.imag == 0 and z.real > 0):
        raise ContourError("z-slot must satisfy 0 < arg z < 2 pi")
    if l == 0:
        return []
    base = 0.3 * min(1.0, abs(z - 1), abs(z)) / l if radius is None else radius
    k = q.kappa
    expo = (complex(q.mu).real - 1.0) / k - 1.0
    # |t|^alpha varies by ((|c|+r)/(|c|-r))^|alpha| around a circle; keep it O(1)
    alpha = abs((complex(q.mu) + complex(q.m1) + complex(q.m2) - 2 * l + 1).real / k)
    out = []
    for u in range(l):
        if u < b:
            idx = u
            c, d = z, z / abs(z)
        else:
            idx = u - b
            c, d = 1.0 + 0j, 1.0 + 0j
        r0 = base if radius is not None else min(base, abs(c) / (max(1.0, alpha) * nest ** max(b, l - b)))
        r = r0 * nest ** idx
        reach = _reach_for_power(c, r, expo, tol, 1.0 + abs(z)) + abs(c)
        lp = loop_around(c, d, r, reach)
        lp.family = "loops_J"
        lp.meta.update({"variable": u, "around": "z" if u < b else "1"})
        out.append(lp)
    _check_disjoint(out)
    return out


def loops_B(m: int, truncation: float | None = None, kappa: float = 1.0, l: complex = 0.0,
            tol: float = 1e-12, radius: float = 0.25, nest: float = 2.0) -> list[Contour]:
    """Nested loops around 0 along the positive axis for the B_m integral."""
    if m < 0:
        raise ContourError("m must be nonnegative")
    if truncation is None:
        # exp(-s/kappa) decay, with a margin for the power factor
        truncation = kappa * (math.log(1e2 / tol) + 2 * abs(complex(l)) / kappa + 4 * m + 10)
    out = []
    for u in range(m):
        lp = loop_around(0j, 1.0 + 0j, radius * nest ** u, truncation)
        lp.family = "loops_B"
        lp.meta.update({"variable": u, "around": "0"})
        out.append(lp)
    _check_disjoint(out)
    return out


def _check_disjoint(loops, min_gap: float = 1e-6) -> None:
    pts = [lp.sample(80) for lp in loops]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = np.min(np.abs(pts[i][:, None] - pts[j][None, :]))
            if d < min_gap:
                raise ContourError(f"loops {i} and {j} intersect")


def clearance_audit(contour: Contour, points, n: int = 400) -> float:
    """Minimum distance from sampled contour points to ``points``."""
    pts = np.asarray(list(points), dtype=complex)
    if pts.size == 0:
        return math.inf
    s = contour.sample(n)
    for lp in contour.loops:
        s = np.concatenate([s] + [seg.sample(n // 4) for seg in lp])
    return float(np.min(np.abs(s[:, None] - pts[None, :])))
