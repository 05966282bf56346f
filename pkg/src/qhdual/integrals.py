"""The named integrals: I_{a,b} (Barnes type), J_{a,b} (loops), the Selberg
type integrals A_l and B_m, and the leading terms of their asymptotics.

The I integral is computed on a straight line Re t = eps placed to the right
of every left-family pole; right-family poles that end up left of the line
are compensated by exact residues.  For l <= 2 the expansion reads

    I = int_{L^l} f
        + l (-2 pi i) sum_P int_{L^{l-1}} Res_{t_1=P} f
        + 2 (-2 pi i)^2 [ sum_{P<Q} Res Res f + sum_P sum_{Q in D(P)} Res_{t_2=Q} Res_{t_1=P} f ]

where P, Q run over the bypassed fixed poles and D(P) = {P + 1 + kappa N}
are the pair poles created once t_1 sits at P.  When a pair pole coincides
with a left pole (m2 = 1, l2 >= 2) the value is obtained by averaging the
analytic continuation in m2 over a small circle around the integer.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .contour import (ContourError, PinchError, barnes_contour, loops_B, loops_J, vertical_line)
from .integrand import (BASE_M1, BASE_ZM2, BarnesIntegrand, LoopIntegrand, TVar)
from .params import Params
from .quad import IntegralResult, QuadConfig, integrate_path, integrate_product
from .special import arg_in, sinpi_scaled

__all__ = [
    "I_matrix",
    "J_matrix",
    "I_ab",
    "J_ab",
    "SelbergClosedForm",
    "selberg_A",
    "selberg_B",
    "selberg_A_quad",
    "selberg_B_quad",
    "I_asymptotic",
    "J_asymptotic",
    "mu_from_z",
    "PINCH_DELTA",
    "PINCH_POINTS",
]

TWO_PI_I = 2j * math.pi
PINCH_DELTA = 0.02
PINCH_POINTS = 8


def _pairs_for(p: Params, a_list, b_list, kdim):
    if a_list is None:
        a_list = list(range(kdim + 1))
    if b_list is None:
        b_list = list(range(kdim + 1))
    for x in list(a_list) + list(b_list):
        if not 0 <= x <= kdim:
            raise ValueError(f"index {x} is not admissible (0..{kdim})")
    return list(a_list), list(b_list)


def _result(value, err, n, msgs, **meta):
    r = IntegralResult(value, err, n, list(msgs))
    r.meta = meta
    return r


# ---------------------------------------------------------------------------
# I side


def _line_tol(cfg: QuadConfig) -> float:
    return min(cfg.rel_tol, 1e-8) * 1e-2


def _I_direct(p: Params, cfg: QuadConfig, eps, a_list, b_list):
    l = int(p.l2)
    if l > 2:
        raise NotImplementedError("I integrals are implemented for l2 <= 2")
    bi = BarnesIntegrand(p, l, a_list, b_list)
    na, nb = len(a_list), len(b_list)
    line, rep = barnes_contour(p, eps=eps, tol=_line_tol(cfg))
    fixed = []
    for fam, n, _v in rep.bypassed:
        if fam == "z-m2":
            fixed.append(TVar(BASE_ZM2, n, 0, 0j, "zm2"))
        else:
            fixed.append(TVar(BASE_M1, n, 0, 0j, "m1"))
    b0 = [i for i, b in enumerate(b_list) if b == 0]

    def tidy(vals, tv_list):
        # b = 0: the z - m2 family is cancelled by zeros of the sine factor
        vals = np.array(vals, dtype=complex)
        if b0 and any(tv.base == BASE_ZM2 for tv in tv_list):
            vals[:, b0] = 0.0
        return vals

    msgs = []
    n_evals = 0
    if l == 1:
        def f(S, SEG, TAU):
            return bi.evaluate([TVar(off=S[0])]).reshape(na * nb, -1)

        res = integrate_product(f, [line], cfg)
        total = np.asarray(res.value).reshape(na, nb)
        err = np.asarray(res.err_estimate).reshape(na, nb)
        n_evals += res.n_evals
        msgs += res.warnings
        rsum = np.zeros((na, nb), dtype=complex)
        rabs = np.zeros((na, nb))
        for P in fixed:
            v = tidy(bi.evaluate([P])[..., 0], [P])
            rsum += -TWO_PI_I * v
            rabs += np.abs(2 * math.pi * v)
        ncfg = len(fixed)
    else:
        def f2(S, SEG, TAU):
            return bi.evaluate([TVar(off=S[0]), TVar(off=S[1])]).reshape(na * nb, -1)

        res = integrate_product(f2, [line, line], cfg)
        total = np.asarray(res.value).reshape(na, nb)
        err = np.asarray(res.err_estimate).reshape(na, nb)
        n_evals += res.n_evals
        msgs += res.warnings
        ncfg = 0
        if fixed:
            def g1(S, SEG, TAU):
                acc = 0j
                for P in fixed:
                    v = bi.evaluate([P, TVar(off=S[0])])
                    v = tidy(v.reshape(na, nb, -1), [P])
                    acc = acc + v
                return (2 * -TWO_PI_I) * np.asarray(acc).reshape(na * nb, -1)

            r1 = integrate_product(g1, [line], cfg)
            total = total + np.asarray(r1.value).reshape(na, nb)
            err = err + np.asarray(r1.err_estimate).reshape(na, nb)
            n_evals += r1.n_evals
            msgs += r1.warnings
        rsum = np.zeros((na, nb), dtype=complex)
        rabs = np.zeros((na, nb))
        coef = 2 * (-TWO_PI_I) ** 2
        for i, P in enumerate(fixed):
            for Q in fixed[i + 1:]:
                v = tidy(bi.evaluate([P, Q])[..., 0], [P, Q])
                rsum += coef * v
                rabs += np.abs(coef * v)
                ncfg += 1
            # pair poles to the left of the line
            N = 0
            while True:
                qv = bi.value(P) + 1 + p.kappa * N
                if qv.real >= rep.eps:
                    break
                Q = TVar(P.base, P.n + N, P.s + 1, 0j, ("D", 0))
                v = tidy(bi.evaluate([P, Q])[..., 0], [P, Q])
                rsum += coef * v
                rabs += np.abs(coef * v)
                ncfg += 1
                N += 1
    if np.any(np.isnan(rsum)) or np.any(np.isnan(total)):
        raise PinchError("a residue point coincides with a pole of the other family")
    total = total + rsum
    err = err + 1e-14 * rabs * (1 + ncfg)
    return _result(total, err, n_evals, msgs, eps=rep.eps, n_bypassed=len(fixed),
                   n_residue_configs=ncfg, pinch_average=False)


def I_matrix(p: Params, cfg: QuadConfig | None = None, a_list=None, b_list=None, eps=None,
             pinch_delta: float = PINCH_DELTA, pinch_points: int = PINCH_POINTS) -> IntegralResult:
    """All requested I_{a,b}; ``value`` has shape (len(a_list), len(b_list))."""
    cfg = cfg or QuadConfig(rel_tol=1e-8)
    mu = complex(p.mu)
    if not 0 < mu.imag < 2 * math.pi:
        raise ValueError("I integrals need 0 < Im mu < 2 pi")
    l = int(p.l2)
    kdim = min(p.m2_int, l)
    a_list, b_list = _pairs_for(p, a_list, b_list, kdim)
    if l == 0:
        shape = (len(a_list), len(b_list))
        return _result(np.ones(shape, dtype=complex), np.zeros(shape), 0, [], pinch_average=False)
    try:
        return _I_direct(p, cfg, eps, a_list, b_list)
    except PinchError:
        pass
    # analytic continuation in m2 around the integer: mean over a circle
    m2 = p.m2_int
    vals, errs, n, msgs = [], [], 0, []
    for j in range(pinch_points):
        pj = p.with_(m2=m2 + pinch_delta * cmath.exp(TWO_PI_I * j / pinch_points))
        r = _I_direct(pj, cfg, None, a_list, b_list)
        vals.append(r.value)
        errs.append(r.err_estimate)
        n += r.n_evals
        msgs += r.warnings
    value = np.mean(vals, axis=0)
    spread = np.max(np.abs(np.asarray(vals) - value), axis=0)
    # the truncated Taylor remainder is ~ (delta / scale)^points of the spread
    err = np.mean(errs, axis=0) + spread * (pinch_delta ** 2)
    return _result(value, err, n, msgs, pinch_average=True, pinch_delta=pinch_delta,
                   pinch_points=pinch_points)


def I_ab(p: Params, a: int, b: int, cfg: QuadConfig | None = None) -> IntegralResult:
    r = I_matrix(p, cfg, [a], [b])
    return _result(complex(r.value[0, 0]), float(r.err_estimate[0, 0]), r.n_evals, r.warnings, **r.meta)


# ---------------------------------------------------------------------------
# J side


def J_matrix(q: Params, cfg: QuadConfig | None = None, a_list=None, b_list=None,
             radius: float | None = None) -> IntegralResult:
    """All requested J_{a,b} for the J-side tuple ``q`` (dimension ``q.l2``)."""
    cfg = cfg or QuadConfig(rel_tol=1e-8)
    n = int(q.l2)
    kdim = min(n, int(round(complex(q.m2).real)))
    a_list, b_list = _pairs_for(q, a_list, b_list, kdim)
    zq = complex(q.z)
    if zq == 0 or (zq.imag == 0 and zq.real > 0):
        raise ContourError("J integrals need 0 < arg z < 2 pi")
    shape = (len(a_list), len(b_list))
    if n == 0:
        return _result(np.ones(shape, dtype=complex), np.zeros(shape), 0, [])
    value = np.zeros(shape, dtype=complex)
    err = np.zeros(shape)
    nev, msgs = 0, []
    for ib, b in enumerate(b_list):
        cons = loops_J(q, b, n, tol=min(cfg.rel_tol, 1e-8) * 1e-2, radius=radius)
        f = LoopIntegrand(q, cons, a_list)
        r = integrate_product(f, cons, cfg)
        value[:, ib] = r.value
        err[:, ib] = r.err_estimate
        nev += r.n_evals
        msgs += r.warnings
    return _result(value, err, nev, msgs)


def J_ab(p_dual: Params, a: int, b: int, cfg: QuadConfig | None = None, radius=None) -> IntegralResult:
    r = J_matrix(p_dual, cfg, [a], [b], radius=radius)
    return _result(complex(r.value[0, 0]), float(r.err_estimate[0, 0]), r.n_evals, r.warnings)


# ---------------------------------------------------------------------------
# Selberg type integrals


@dataclass(frozen=True)
class SelbergClosedForm:
    log_value: complex
    branch_note: str

    @property
    def value(self) -> complex:
        return cmath.exp(self.log_value)


def _lgamma(x) -> complex:
    x = complex(x)
    if x.imag == 0 and x.real <= 0 and x.real == round(x.real):
        from .special import PoleError
        raise PoleError(f"gamma pole at {x.real:g}")
    return complex(loggamma(x))


def _log1m_exp(mu: complex) -> complex:
    w = 1 - cmath.exp(mu)
    if w.imag == 0 and w.real <= 0:
        raise ValueError("1 - e^mu on the negative real axis (Im mu = pi, Re mu >= 0)")
    return cmath.log(w)


def selberg_A(l: int, m: complex, mu: complex, kappa: float) -> SelbergClosedForm:
    """Closed form of A_l(mu; m)."""
    k = float(kappa)
    m, mu = complex(m), complex(mu)
    if l == 0:
        return SelbergClosedForm(0j, "empty")
    lg = l * complex(math.log(2 * math.pi), math.pi / 2)
    lg += (mu - 1j * math.pi) * (l - 1 - 2 * m) * l / (2 * k)
    lg += l * (m - l + 1) / k * _log1m_exp(mu)
    for j in range(l):
        lg += _lgamma(1 + (j + 1) / k) - _lgamma(1 + 1 / k) + _lgamma((j - m) / k)
    return SelbergClosedForm(lg, "principal log(1 - e^mu), arg in (-pi, pi)")


def selberg_B(m: int, l: complex, kappa: float) -> SelbergClosedForm:
    """Closed form of B_m(l)."""
    k = float(kappa)
    l = complex(l)
    if m == 0:
        return SelbergClosedForm(0j, "empty")
    lg = m * complex(math.log(2 * math.pi), -math.pi / 2)
    lg += m * (m - 1 - l) / k * math.log(k)
    for j in range(m):
        lg += _lgamma(1 - 1 / k) - _lgamma(1 + (l - j) / k) - _lgamma(1 - (j + 1) / k)
    return SelbergClosedForm(lg, "real positive kappa; principal log gamma")


def _extent(rate: float, power: float, tol: float, shift: float) -> float:
    target = math.log(1e3 / tol)
    y = target / rate
    for _ in range(50):
        y = (target + power * math.log(1 + y)) / rate
    return shift + y


def selberg_A_quad(l: int, m: complex, mu: complex, kappa: float,
                   cfg: QuadConfig | None = None) -> IntegralResult:
    """A_l(mu; m) by quadrature on Re s = -Re m / (2 kappa) (needs Re m < 0)."""
    cfg = cfg or QuadConfig(rel_tol=1e-9)
    k = float(kappa)
    m, mu = complex(m), complex(mu)
    if m.real >= 0:
        raise ValueError("the quadrature form needs Re m < 0")
    if not 0 < mu.imag < 2 * math.pi:
        raise ValueError("A_l needs 0 < Im mu < 2 pi")
    if l == 0:
        return IntegralResult(1 + 0j, 0.0, 0, [])
    x0 = -m.real / (2 * k)
    tol = min(cfg.rel_tol, 1e-8) * 1e-2
    power = abs(m.real) / k + 2 * (l - 1) / k + 2
    shift = abs(m.imag) / k + 1
    line = vertical_line(x0, _extent(2 * math.pi - mu.imag, power, tol, shift),
                         _extent(mu.imag, power, tol, shift), "selberg_A")

    def f(S, SEG, TAU):
        lg = (mu - 1j * math.pi) * S.sum(0)
        lg = lg + (loggamma(S) + loggamma(-S - m / k)).sum(0)
        poly = np.ones(S.shape[1:], dtype=complex)
        for u in range(l):
            for v in range(u + 1, l):
                d = S[u] - S[v]
                sc, c = sinpi_scaled(d)
                lg = lg + loggamma(d + 1 / k) + loggamma(-d + 1 / k) + c
                poly = poly * (-d * sc / math.pi)
        return np.exp(lg) * poly

    return integrate_product(f, [line] * l, cfg)


def selberg_B_quad(m: int, l: complex, kappa: float, cfg: QuadConfig | None = None) -> IntegralResult:
    """B_m(l) by quadrature over nested loops around 0."""
    cfg = cfg or QuadConfig(rel_tol=1e-9)
    k = float(kappa)
    l = complex(l)
    if m == 0:
        return IntegralResult(1 + 0j, 0.0, 0, [])
    cons = loops_B(m, kappa=k, l=l, tol=min(cfg.rel_tol, 1e-8) * 1e-2)
    e1 = -1 - l / k
    anchors = [c.anchor for c in cons]

    def f(S, SEG, TAU):
        lg = -S.sum(0) / k
        for u in range(m):
            # arg(-s) = 0 at the anchor; it changes like arg(s)
            d = cons[u].arg_from_anchor(0j, SEG[u], TAU[u])
            lg = lg + e1 * (np.log(np.abs(S[u])) + 1j * d)
        for u in range(m):
            for v in range(u + 1, m):
                d1 = cons[u].arg_from_anchor(anchors[v], SEG[u], TAU[u])
                d2 = cons[v].arg_from_anchor(S[u], SEG[v], TAU[v])
                a0 = arg_in(anchors[u] - anchors[v], "(-pi,pi)")
                lg = lg + 2 / k * (np.log(np.abs(S[u] - S[v])) + 1j * (a0 + d1 + d2))
        return np.exp(lg)

    return integrate_product(f, cons, cfg)


# ---------------------------------------------------------------------------
# asymptotics


def _log_kfact(n: int, k: float) -> complex:
    # log [n]! with [j] = sin_k(j)/sin_k(1)
    out = 0j
    for j in range(1, n + 1):
        out += cmath.log(complex(math.sin(math.pi * j / k))) - cmath.log(complex(math.sin(math.pi / k)))
    return out


def I_asymptotic(p: Params, a: int, b: int, r0: float = 20.0, literal: bool = False) -> complex:
    """Leading term of I_{a,b} as Re z -> -infinity (zero for a != b).

    As for the connection constant, the factor (l2-b)! b! becomes the
    k-factorial [l2-b]! [b]! unless ``literal`` is set.
    """
    z, mu, k = complex(p.z), complex(p.mu), p.kappa
    if z.real > -k * r0:
        warnings.warn("I_asymptotic used outside the asymptotic regime", RuntimeWarning, stacklevel=2)
    if a != b:
        return 0j
    l2, m1, m2 = int(p.l2), complex(p.m1), p.m2_int
    e = (2 * b * b + b * (m1 - m2 - 2 * l2) + m2 * l2) / k
    if literal:
        lg = complex(math.lgamma(l2 - b + 1) + math.lgamma(b + 1))
    else:
        lg = _log_kfact(l2 - b, k) + _log_kfact(b, k)
    lg += math.lgamma(l2 + 1) - l2 * complex(math.log(math.pi), math.pi)
    lg += mu * z * b / k - e * cmath.log(-z / k)
    lg += selberg_A(l2 - b, m1, mu, k).log_value + selberg_A(b, m2, mu, k).log_value
    return cmath.exp(lg)


def mu_from_z(zslot: complex) -> complex:
    """mu with e^mu = zslot and Im mu in (0, 2 pi)."""
    w = complex(zslot)
    return complex(math.log(abs(w)), arg_in(w, "(0,2pi)"))


def J_asymptotic(p_dual: Params, a: int, b: int, r0: float = 20.0) -> complex:
    """Leading term of J_{a,b}(e^mu, z; l1, l2, m1, m2) for the J-side tuple ``p_dual``."""
    q = p_dual
    k = q.kappa
    l1, l2 = complex(q.m1), int(round(complex(q.m2).real))
    m2 = int(q.l2)
    z = complex(q.mu)
    mu = mu_from_z(q.z)
    if z.real > -k * r0:
        warnings.warn("J_asymptotic used outside the asymptotic regime", RuntimeWarning, stacklevel=2)
    if a != b:
        return 0j
    e1 = (2 * b * b + b * (l1 - l2 - 2 * m2) + m2 * l2) / k
    e2 = (2 * b * b + b * (l1 - l2 - 2 * m2) + m2 * (m2 - l1 - 1)) / k
    lg = complex(math.lgamma(m2 - b + 1) + math.lgamma(b + 1))
    lg += 1j * math.pi * (m2 - b) * (2 * b - l2) / k
    lg += mu * b * (z + l1 - 2 * m2 + b) / k
    lg += -e1 * _log1m_exp(mu) - e2 * cmath.log(-z)
    lg += selberg_B(m2 - b, l1, k).log_value + selberg_B(b, l2, k).log_value
    return cmath.exp(lg)
