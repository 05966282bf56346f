"""Integrands of both sides.

I side (Barnes type): the q-master function ``phi_q``, the weights
``w_rat``/``w_trig`` and the factorized form ``xi_pP``.  The production
evaluator :class:`BarnesIntegrand` works with the factorized form, with the
pair factor ``(t_u - t_v) sin_k(t_u - t_v)`` moved from Xi into the
antisymmetrized numerators ``p~``, ``P~``; that way every pole of the
integrand sits in a gamma factor and residues can be taken exactly.

J side (power type): ``psi_master`` on a :class:`BranchState`, ``g_weight``
and the loop evaluator :class:`LoopIntegrand`, which continues all logarithms
in closed form from the contour anchors.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, loggamma

from .params import Params
from .special import PoleError, arg_in, sinpi, sinpi_scaled

__all__ = [
    "SYM_CAP",
    "POLE_TOL",
    "SymExpr",
    "sym",
    "permutations_with_sign",
    "phi_q",
    "w_rat",
    "w_trig",
    "xi_pP",
    "psi_master",
    "g_weight",
    "TVar",
    "BarnesIntegrand",
    "LoopIntegrand",
]

SYM_CAP = 6
POLE_TOL = 1e-8


# ---------------------------------------------------------------------------
# symmetrization


@lru_cache(maxsize=None)
def permutations_with_sign(l: int):
    out = []
    for perm in itertools.permutations(range(l)):
        inv = sum(1 for i in range(l) for j in range(i + 1, l) if perm[i] > perm[j])
        out.append((perm, -1 if inv % 2 else 1))
    return tuple(out)


@dataclass(frozen=True)
class SymExpr:
    """A symmetrized function of ``l`` variables."""

    l: int
    evaluator: object

    def __call__(self, t, p=None, branch=None):
        return self.evaluator(t, p, branch)


def sym(f, l: int, cap: int = SYM_CAP) -> SymExpr:
    """Sum of ``f`` over all permutations of its ``l`` arguments.

    ``f`` takes a sequence of ``l`` values (scalars or equally shaped arrays).
    """
    if l > cap:
        raise ValueError(f"symmetrization over {l} variables exceeds the cap {cap}")
    perms = permutations_with_sign(l)

    def ev(t, p=None, branch=None):
        t = list(t)
        if len(t) != l:
            raise ValueError(f"expected {l} variables, got {len(t)}")
        return sum(f([t[i] for i in perm]) for perm, _ in perms)

    return SymExpr(l, ev)


# ---------------------------------------------------------------------------
# direct I-side functions (cross-checks; moderate arguments only)


def _as_vars(t):
    t = np.asarray(t, dtype=complex)
    if t.ndim == 0:
        t = t[None]
    return t


def _lg(x):
    x = np.asarray(x, dtype=complex)
    n = np.round(x.real)
    near = (n <= 0) & (np.abs(x - n) < POLE_TOL)
    if np.any(near):
        raise PoleError(f"gamma argument within {POLE_TOL} of the pole {n[near].ravel()[0]:.0f}")
    return loggamma(x)


def _pairs(l):
    return [(u, v) for u in range(l) for v in range(u + 1, l)]


def phi_q(t, p: Params):
    """Phi_l(t, z, mu; m1, m2), log space, ``t`` of shape (l,) or (l, n)."""
    t = _as_vars(t)
    k, z, m1, m2, mu = p.kappa, complex(p.z), complex(p.m1), complex(p.m2), complex(p.mu)
    l = t.shape[0]
    if l == 0:
        return 1.0 + 0j
    lg = mu * t.sum(0) / k
    lg = lg + (_lg(t / k) + _lg((t - z) / k) - _lg((t + m1) / k) - _lg((t - z + m2) / k)).sum(0)
    for u, v in _pairs(l):
        d = t[u] - t[v]
        lg = lg + _lg((d + 1) / k) - _lg((d - 1) / k)
    return np.exp(lg)


def _sink(x, k):
    return sinpi(np.asarray(x, dtype=complex) / k)


def w_rat(t, p: Params, a: int):
    t = _as_vars(t)
    z, m1, m2 = complex(p.z), complex(p.m1), complex(p.m2)
    l = t.shape[0]
    if not 0 <= a <= l:
        raise ValueError(f"a={a} outside 0..{l}")
    pre = np.prod(1.0 / (t + m1), axis=0) if l else 1.0
    for u, v in _pairs(l):
        pre = pre * (t[u] - t[v]) / (t[u] - t[v] - 1)

    def f(s):
        val = 1.0
        for u in range(l - a, l):
            val = val * s[u] / (s[u] - z + m2)
        for u, v in _pairs(l):
            val = val * (s[u] - s[v] - 1) / (s[u] - s[v])
        return val

    return pre * sym(f, l)(list(t))


def w_trig(t, p: Params, b: int):
    t = _as_vars(t)
    k, z, m1, m2 = p.kappa, complex(p.z), complex(p.m1), complex(p.m2)
    l = t.shape[0]
    if not 0 <= b <= l:
        raise ValueError(f"b={b} outside 0..{l}")
    pre = np.prod(np.exp(-1j * np.pi * t / k) / _sink(t + m1, k), axis=0) if l else 1.0
    for u, v in _pairs(l):
        pre = pre * _sink(t[u] - t[v], k) / _sink(t[u] - t[v] - 1, k)
    ez = cmath.exp(1j * math.pi * z / k)

    def f(s):
        val = 1.0
        for u in range(l - b, l):
            val = val * ez * _sink(s[u], k) / _sink(s[u] - z + m2, k)
        for u, v in _pairs(l):
            val = val * _sink(s[u] - s[v] - 1, k) / _sink(s[u] - s[v], k)
        return val

    return pre * sym(f, l)(list(t))


def xi_pP(t, p: Params, a: int, b: int):
    """Xi_l * p_{l-a,a} * P_{l-b,b}, evaluated literally."""
    t = _as_vars(t)
    k, z, m1, m2, mu = p.kappa, complex(p.z), complex(p.m1), complex(p.m2), complex(p.mu)
    l = t.shape[0]
    if l == 0:
        return 1.0 + 0j
    lg = -l * (l + 3) / 2 * (math.log(math.pi * k) + 1j * math.pi) + (mu - 1j * math.pi) * t.sum(0) / k
    lg = lg + (_lg(t / k) + _lg(-(m1 + t) / k) + _lg((t - z) / k) + _lg((z - m2 - t) / k)).sum(0)
    xi_extra = 1.0
    for u, v in _pairs(l):
        d = t[u] - t[v]
        lg = lg + _lg((d + 1) / k) + _lg((1 - d) / k)
        xi_extra = xi_extra * d * _sink(d, k)
    xi = np.exp(lg) * xi_extra

    def fp(s):
        val = 1.0
        for u in range(l - a):
            val = val * (s[u] - z + m2)
        for u in range(l - a, l):
            val = val * s[u]
        for u, v in _pairs(l):
            val = val * (s[u] - s[v] - 1) / (s[u] - s[v])
        return val

    def fP(s):
        val = 1.0
        for u in range(l - b):
            val = val * _sink(s[u] - z + m2, k)
        for u in range(l - b, l):
            val = val * _sink(s[u], k)
        for u, v in _pairs(l):
            val = val * _sink(s[u] - s[v] - 1, k) / _sink(s[u] - s[v], k)
        return val

    pv = sym(fp, l)(list(t))
    Pv = cmath.exp(1j * math.pi * b * z / k) * sym(fP, l)(list(t))
    return xi * pv * Pv


# ---------------------------------------------------------------------------
# structured Barnes evaluator

# variable bases: 0 -> 0 (plain points), 1 -> z - m2, 2 -> -m1
BASE_PLAIN, BASE_ZM2, BASE_M1 = 0, 1, 2


@dataclass(frozen=True)
class TVar:
    """t = base + kappa*n + s + off.

    Points of a line have ``base=0`` and ``off`` the (array of) node values.
    Pole points have ``off=0`` so differences with variables of the same
    base are exact lattice numbers.  ``res`` marks the gamma factor whose
    residue is taken in this variable: ``"zm2"``, ``"m1"`` or ``("D", i)``
    for the pair factor Gamma_k(t_i - t_u + 1).
    """

    base: int = BASE_PLAIN
    n: int = 0
    s: int = 0
    off: object = 0j
    res: object = None

    @property
    def structured(self) -> bool:
        return self.base != BASE_PLAIN and np.ndim(self.off) == 0 and self.off == 0


def _res_log(N: int, k: float) -> complex:
    # residue of Gamma((P0 - t)/k) at t = P0 + k N:  -k (-1)^N / N!
    return complex(math.log(k) - gammaln(N + 1), math.pi * ((N + 1) % 2))


class BarnesIntegrand:
    """Xi'' p~ P~ for all requested (a, b) at once.

    ``evaluate(tvars)`` returns an array (len(a_list), len(b_list), npts).
    An undesignated exact pole (a pinch) yields NaN in every entry it
    touches.
    """

    def __init__(self, p: Params, l: int | None = None, a_list=None, b_list=None):
        self.p = p
        self.l = int(p.l2) if l is None else int(l)
        kmax = min(int(round(complex(p.m2).real)), self.l)
        self.a_list = list(range(kmax + 1)) if a_list is None else list(a_list)
        self.b_list = list(range(kmax + 1)) if b_list is None else list(b_list)
        if self.l > SYM_CAP:
            raise ValueError("dimension exceeds the symmetrization cap")
        self.k = float(p.kappa)
        self.z = complex(p.z)
        self.m1 = complex(p.m1)
        self.m2 = complex(p.m2)
        self.mu = complex(p.mu)
        self.bases = {BASE_PLAIN: 0j, BASE_ZM2: self.z - self.m2, BASE_M1: -self.m1}

    def value(self, tv: TVar):
        return self.bases[tv.base] + self.k * tv.n + tv.s + tv.off

    # -- factor helpers -----------------------------------------------------
    def _single(self, tv: TVar, tval, target: int, sign: int, c: complex):
        """(x, N) with x = (sign (t - B_target) + c)/k; N set if x is exactly -N <= 0."""
        if tv.structured and tv.base == target:
            S = sign * tv.s + c
            x = sign * tv.n + S / self.k
            if S == 0 and sign * tv.n <= 0:
                return np.asarray(complex(x)), -sign * tv.n
            return np.asarray(complex(x)), None
        return (sign * (tval - self.bases[target]) + c) / self.k, None

    def _pair(self, tu: TVar, tv: TVar, vu, vv, c: complex):
        if tu.structured and tv.structured and tu.base == tv.base:
            S = tu.s - tv.s + c
            dn = tu.n - tv.n
            x = dn + S / self.k
            if S == 0 and dn <= 0:
                return np.asarray(complex(x)), -dn
            return np.asarray(complex(x)), None
        return (vu - vv + c) / self.k, None

    # -- evaluation -----------------------------------------------------------
    def evaluate(self, tvars):
        l = self.l
        if len(tvars) != l:
            raise ValueError(f"expected {l} variables")
        na, nb = len(self.a_list), len(self.b_list)
        if l == 0:
            return np.ones((na, nb, 1), dtype=complex)
        k, z, m2 = self.k, self.z, self.m2
        vals = [np.atleast_1d(np.asarray(self.value(tv), dtype=complex)) for tv in tvars]
        shape = np.broadcast_shapes(*[v.shape for v in vals])
        vals = [np.broadcast_to(v, shape) for v in vals]
        pinch = np.zeros(shape, dtype=bool)
        used = [False] * l

        lg = np.full(shape, -l * (l + 3) / 2 * complex(math.log(math.pi * k), math.pi))
        lg = lg + (self.mu - 1j * math.pi) * sum(vals) / k

        def add_gamma(x, N, owner):
            nonlocal lg, pinch
            if N is None:
                lg = lg + loggamma(x)
                return
            if owner is not None and not used[owner]:
                used[owner] = True
                lg = lg + _res_log(N, k)
            else:
                pinch = pinch | True

        for u, tv in enumerate(tvars):
            x, N = self._single(tv, vals[u], BASE_PLAIN, 1, 0)
            add_gamma(x, N, None)
            x, N = self._single(tv, vals[u], BASE_M1, -1, 0)
            add_gamma(x, N, u if tv.res == "m1" else None)
            # Gamma_k(t - z) = Gamma((t - (z - m2) - m2)/k)
            x, N = self._single(tv, vals[u], BASE_ZM2, 1, -m2)
            add_gamma(x, N, None)
            x, N = self._single(tv, vals[u], BASE_ZM2, -1, 0)
            add_gamma(x, N, u if tv.res == "zm2" else None)
        for u in range(l):
            for v in range(u + 1, l):
                # Gamma_k(t_u - t_v + 1) has poles in t_v, Gamma_k(t_v - t_u + 1) in t_u
                x, N = self._pair(tvars[u], tvars[v], vals[u], vals[v], 1)
                add_gamma(x, N, v if tvars[v].res == ("D", u) else None)
                x, N = self._pair(tvars[v], tvars[u], vals[v], vals[u], 1)
                add_gamma(x, N, u if tvars[u].res == ("D", v) else None)
        for u, tv in enumerate(tvars):
            if tv.res is not None and not used[u]:
                raise ValueError(f"variable {u} designated for a residue at a regular point")

        # trigonometric numerators: scaled sines
        s1 = [sinpi_scaled(self._single(tv, vals[u], BASE_ZM2, 1, 0)[0]) for u, tv in enumerate(tvars)]
        s2 = [sinpi_scaled(self._single(tv, vals[u], BASE_PLAIN, 1, 0)[0]) for u, tv in enumerate(tvars)]
        sp = {}
        for u in range(l):
            for v in range(l):
                if u != v:
                    sp[u, v] = sinpi_scaled(self._pair(tvars[u], tvars[v], vals[u], vals[v], -1)[0])
        zm = [vals[u] - z + m2 for u in range(l)]

        perms = permutations_with_sign(l)
        pv = np.zeros((na,) + shape, dtype=complex)
        for ia, a in enumerate(self.a_list):
            acc = np.zeros(shape, dtype=complex)
            for perm, sg in perms:
                term = np.full(shape, float(sg), dtype=complex)
                for pos in range(l):
                    u = perm[pos]
                    term = term * (zm[u] if pos < l - a else vals[u])
                for i in range(l):
                    for j in range(i + 1, l):
                        term = term * (vals[perm[i]] - vals[perm[j]] - 1)
                acc = acc + term
            pv[ia] = acc
        Pv = np.zeros((nb,) + shape, dtype=complex)
        Pscale = np.zeros((nb,) + shape)
        for ib, b in enumerate(self.b_list):
            terms, scales = [], []
            for perm, sg in perms:
                s = np.full(shape, float(sg), dtype=complex)
                c = np.zeros(shape)
                for pos in range(l):
                    u = perm[pos]
                    f = s1[u] if pos < l - b else s2[u]
                    s = s * f[0]
                    c = c + f[1]
                for i in range(l):
                    for j in range(i + 1, l):
                        f = sp[perm[i], perm[j]]
                        s = s * f[0]
                        c = c + f[1]
                terms.append(s)
                scales.append(c)
            cmax = np.max(np.stack(scales), axis=0)
            Pv[ib] = sum(s * np.exp(c - cmax) for s, c in zip(terms, scales))
            Pscale[ib] = cmax + (1j * math.pi * b * z / k).real
            Pv[ib] = Pv[ib] * np.exp(1j * (1j * math.pi * b * z / k).imag)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            mag = np.exp(lg[None, ...] + Pscale)
            out = pv[:, None] * (mag * Pv)[None, :]
        if np.any(pinch):
            out = np.where(pinch, np.nan + 0j, out)
        return out


# ---------------------------------------------------------------------------
# J side


def _branch_point_check(t, branch):
    if branch.point is None or np.asarray(branch.point).shape != np.asarray(t).shape or \
            not np.allclose(branch.point, t, rtol=1e-12, atol=1e-14):
        raise ValueError("branch state is not at the evaluation point")


def psi_master(t, p: Params, branch) -> complex:
    """Psi_l(t, z, mu; m1, m2) with the logarithms carried by ``branch``."""
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    _branch_point_check(t, branch)
    l = t.shape[0]
    k = p.kappa
    alpha = (complex(p.mu) + complex(p.m1) + complex(p.m2) - 2 * l + 1) / k
    lg = 0j
    for u in range(l):
        lg += alpha * branch.log_of(("t", u))
        lg += -complex(p.m1) / k * branch.log_of(("1-t", u))
        lg += -complex(p.m2) / k * branch.log_of(("z-t", u))
    for u, v in _pairs(l):
        lg += 2 / k * branch.log_of(("t-t", u, v))
    return cmath.exp(lg)


def g_weight(t, p: Params, a: int):
    t = _as_vars(t)
    l = t.shape[0]
    if not 0 <= a <= l:
        raise ValueError(f"a={a} outside 0..{l}")
    z = complex(p.z)
    if np.any(np.abs(t - 1) < POLE_TOL) or np.any(np.abs(z - t) < POLE_TOL):
        raise PoleError("g_weight evaluated at t = 1 or t = z")

    def f(s):
        val = 1.0
        for u in range(l - a):
            val = val / (1 - s[u])
        for u in range(l - a, l):
            val = val / (z - s[u])
        return val

    return sym(f, l)(list(t))


class LoopIntegrand:
    """Psi * g over per-variable loop contours, with closed-form continuation.

    Anchors follow the fixed branch: arg t in [0, 2pi), arg(1 - t) in
    (-pi, pi), arg(z - t) in (0, 2pi), arg(t_u - t_v) in [0, 2pi) at the
    contour anchors; elsewhere every log is the anchor log plus the continuous
    change of argument along the contours (variable u is moved first, then v,
    for the pair factors).
    """

    def __init__(self, q: Params, contours, a_list=None):
        self.q = q
        self.contours = list(contours)
        self.l = len(self.contours)
        self.a_list = list(range(self.l + 1)) if a_list is None else list(a_list)
        k = q.kappa
        self.z = complex(q.z)
        self.alpha = (complex(q.mu) + complex(q.m1) + complex(q.m2) - 2 * self.l + 1) / k
        self.beta = -complex(q.m1) / k
        self.gamma = -complex(q.m2) / k
        self.delta = 2.0 / k
        anchors = [c.anchor for c in self.contours]
        self.anchors = anchors
        self.a_t = [arg_in(w, "[0,2pi)") for w in anchors]
        self.a_1t = [arg_in(1 - w, "(-pi,pi)") for w in anchors]
        self.a_zt = [arg_in(self.z - w, "(0,2pi)") for w in anchors]
        self.a_tt = {(u, v): arg_in(anchors[u] - anchors[v], "[0,2pi)")
                     for u, v in _pairs(self.l)}

    def log_psi(self, S, SEG, TAU):
        lg = np.zeros(S.shape[1:], dtype=complex)
        for u in range(self.l):
            c = self.contours[u]
            s, sg, tau = S[u], SEG[u], TAU[u]
            arg_t = self.a_t[u] + c.arg_from_anchor(0j, sg, tau)
            arg_1 = self.a_1t[u] + c.arg_from_anchor(1.0 + 0j, sg, tau)
            arg_z = self.a_zt[u] + c.arg_from_anchor(self.z, sg, tau)
            lg = lg + self.alpha * (np.log(np.abs(s)) + 1j * arg_t)
            lg = lg + self.beta * (np.log(np.abs(1 - s)) + 1j * arg_1)
            lg = lg + self.gamma * (np.log(np.abs(self.z - s)) + 1j * arg_z)
        for u, v in _pairs(self.l):
            cu, cv = self.contours[u], self.contours[v]
            d1 = cu.arg_from_anchor(self.anchors[v], SEG[u], TAU[u])
            d2 = cv.arg_from_anchor(S[u], SEG[v], TAU[v])
            arg = self.a_tt[u, v] + d1 + d2
            lg = lg + self.delta * (np.log(np.abs(S[u] - S[v])) + 1j * arg)
        return lg

    def __call__(self, S, SEG, TAU):
        S = np.asarray(S, dtype=complex)
        lg = self.log_psi(S, SEG, TAU)
        psi = np.exp(lg)
        out = np.empty((len(self.a_list),) + S.shape[1:], dtype=complex)
        for i, a in enumerate(self.a_list):
            out[i] = psi * g_weight(S, self.q, a)
        return out
