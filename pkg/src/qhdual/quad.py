"""Adaptive Gauss-Kronrod quadrature along contours, vector valued, iterated in
several variables.

Integrands are called as ``f(s, seg, tau)`` with arrays of points, segment
indices and segment parameters (one row per variable for the multivariate
case) and return an array whose last axis runs over the nodes; leading axes
are independent components, each held to its own relative tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

__all__ = ["QuadConfig", "IntegralResult", "kronrod_rule", "integrate_path", "integrate_product",
           "QuadratureWarning"]


class QuadratureWarning(UserWarning):
    pass


INNER_TOL_FACTOR = 0.1


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 0.0
    max_subdivisions: int = 4000
    nodes_per_panel: int = 21
    max_dim: int = 3

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol >= 0):
            raise ValueError("tolerances must be positive")
        if self.nodes_per_panel % 2 == 0 or self.nodes_per_panel < 3:
            raise ValueError("nodes_per_panel must be an odd number 2n+1 >= 3")


@dataclass
class IntegralResult:
    value: object
    err_estimate: object
    n_evals: int = 0
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if np.any(np.asarray(self.err_estimate) < 0):
            raise ValueError("negative error estimate")


# ---------------------------------------------------------------------------
# Kronrod extension of Gauss-Legendre (Laurie's algorithm)


def _r_kronrod(n: int, a0: np.ndarray, b0: np.ndarray):
    # arrays are 1-based mirrors of the classical formulation
    size = 2 * n + 3
    a = np.zeros(size)
    b = np.zeros(size)
    a[1: math.floor(3 * n / 2) + 2] = a0[: math.floor(3 * n / 2) + 1]
    b[1: math.ceil(3 * n / 2) + 2] = b0[: math.ceil(3 * n / 2) + 1]
    s = np.zeros(n // 2 + 5)
    t = np.zeros(n // 2 + 5)
    t[2] = b[n + 2]
    for m in range(0, n - 1):
        ks = np.arange((m + 1) // 2, -1, -1)
        ls = m - ks
        s[ks + 2] = np.cumsum((a[ks + n + 2] - a[ls + 1]) * t[ks + 2]
                              + b[ks + n + 2] * s[ks + 1] - b[ls + 1] * s[ks + 2])
        s, t = t, s
    js = np.arange(0, n // 2 + 2)
    s[js + 2] = s[js + 1].copy()
    for m in range(n - 1, 2 * n - 2):
        ks = np.arange(m + 1 - n, (m - 1) // 2 + 1)
        ls = m - ks
        js = n - 1 - ls
        s[js + 2] = np.cumsum(-(a[ks + n + 2] - a[ls + 1]) * t[js + 2]
                              - b[ks + n + 2] * s[js + 2] + b[ls + 1] * s[js + 3])
        j = js[-1]
        k = (m + 1) // 2
        if m % 2 == 0:
            a[k + n + 2] = a[k + 1] + (s[j + 2] - b[k + n + 2] * s[j + 3]) / t[j + 3]
        else:
            b[k + n + 2] = s[j + 2] / s[j + 3]
        s, t = t, s
    a[2 * n + 1] = a[n] - b[2 * n + 1] * s[2] / t[2]
    return a[1: 2 * n + 2], b[1: 2 * n + 2]


@lru_cache(maxsize=None)
def kronrod_rule(npts: int):
    """Nodes on [-1, 1] with Kronrod and embedded Gauss weights (zero off the Gauss nodes)."""
    n = (npts - 1) // 2
    kk = np.arange(3 * n + 2, dtype=float)
    a0 = np.zeros(3 * n + 2)
    b0 = np.where(kk == 0, 2.0, kk**2 / np.maximum(4 * kk**2 - 1, 1))
    a, b = _r_kronrod(n, a0, b0)
    jac = np.diag(a) + np.diag(np.sqrt(b[1:]), 1) + np.diag(np.sqrt(b[1:]), -1)
    x, v = np.linalg.eigh(jac)
    wk = b[0] * v[0, :] ** 2
    x = 0.5 * (x - x[::-1])  # exact symmetry
    wk = 0.5 * (wk + wk[::-1])
    xg, wg_ = np.polynomial.legendre.leggauss(n)
    wg = np.zeros_like(wk)
    wg[1::2] = wg_
    x[1::2] = xg
    return x, wk, wg


# ---------------------------------------------------------------------------
# 1D adaptive driver


def _panels_initial(contour, per_segment: int):
    seg, lo, hi = [], [], []
    for k in range(len(contour.segments)):
        edges = np.linspace(0.0, 1.0, per_segment + 1)
        seg.extend([k] * per_segment)
        lo.extend(edges[:-1])
        hi.extend(edges[1:])
    return np.array(seg, dtype=int), np.array(lo), np.array(hi)


def _call(f, s, seg, tau):
    out = f(s, seg, tau)
    if isinstance(out, tuple):
        vals, errs = out
        return np.asarray(vals, dtype=complex), np.asarray(errs, dtype=float)
    return np.asarray(out, dtype=complex), None


def integrate_path(f, contour, cfg: QuadConfig | None = None, initial_panels: int = 4) -> IntegralResult:
    """Adaptive integral of ``f`` along ``contour`` (all segments, in path order).

    ``f`` may return ``(values, node_errors)``; node errors are propagated
    through the Kronrod weights into the error estimate.
    """
    cfg = cfg or QuadConfig()
    x, wk, wg = kronrod_rule(cfg.nodes_per_panel)
    K = len(x)
    seg, lo, hi = _panels_initial(contour, initial_panels)
    n_evals = 0
    msgs = []

    def evaluate(seg, lo, hi):
        nonlocal n_evals
        half = 0.5 * (hi - lo)
        tau = (0.5 * (hi + lo))[:, None] + half[:, None] * x[None, :]
        segn = np.repeat(seg[:, None], K, axis=1)
        s = contour.points(segn.ravel(), tau.ravel())
        ds = contour.derivs(segn.ravel(), tau.ravel())
        vals, nerr = _call(f, s, segn.ravel(), tau.ravel())
        n_evals += s.size
        lead = vals.shape[:-1]
        v = (vals * ds).reshape(lead + (len(seg), K))
        hk = (v * wk).sum(-1) * half
        hg = (v * wg).sum(-1) * half
        absk = (np.abs(v) * wk).sum(-1) * half
        err = np.abs(hk - hg)
        if nerr is not None:
            ne = (nerr.reshape(lead + (len(seg), K)) * np.abs(ds.reshape(len(seg), K)) * wk).sum(-1) * half
        else:
            ne = np.zeros_like(err)
        return hk, err, absk, ne

    val, err, absv, nerr = evaluate(seg, lo, hi)
    nsub = 0
    while True:
        total = val.sum(-1)
        floor = 50 * np.finfo(float).eps * absv.sum(-1)
        target = np.maximum(np.maximum(cfg.rel_tol * np.abs(total), cfg.abs_tol), floor)
        etot = err.sum(-1) + nerr.sum(-1)
        if np.all(etot <= target):
            break
        if nsub >= cfg.max_subdivisions:
            msgs.append(f"tolerance not met after {nsub} subdivisions (err/target={np.max(etot / target):.3g})")
            break
        # inner errors do not shrink under subdivision; stop once they dominate
        qtarget = target - nerr.sum(-1)
        if np.any((qtarget <= 0) & (etot > target)):
            msgs.append(f"inner integration error dominates (err/target={np.max(etot / target):.3g})")
            break
        # priority: worst ratio over components, quadrature error only
        tgt = np.where(qtarget > 0, qtarget, 1.0)
        score = (err / tgt[..., None]).reshape(-1, len(seg)).max(0)
        order = np.argsort(-score, kind="stable")
        # split panels until the remaining excess is under half the budget
        csum = np.cumsum(score[order])
        rest = score.sum() - csum
        nsplit = int(np.searchsorted(-rest, -0.5)) + 1
        nsplit = max(1, min(nsplit, len(order), 512, cfg.max_subdivisions - nsub))
        pick = np.zeros(len(seg), dtype=bool)
        pick[order[:nsplit]] = True
        mid = 0.5 * (lo[pick] + hi[pick])
        nseg = np.concatenate([seg[pick], seg[pick]])
        nlo = np.concatenate([lo[pick], mid])
        nhi = np.concatenate([mid, hi[pick]])
        v2, e2, a2, n2 = evaluate(nseg, nlo, nhi)
        keep = ~pick
        seg = np.concatenate([seg[keep], nseg])
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        val = np.concatenate([val[..., keep], v2], axis=-1)
        err = np.concatenate([err[..., keep], e2], axis=-1)
        absv = np.concatenate([absv[..., keep], a2], axis=-1)
        nerr = np.concatenate([nerr[..., keep], n2], axis=-1)
        nsub += nsplit
    # cancellation: the rounding floor, not the requested tolerance, bounds the error
    total = val.sum(-1)
    etot = err.sum(-1) + nerr.sum(-1)
    lost = etot > np.maximum(cfg.rel_tol * np.abs(total), cfg.abs_tol)
    if np.any(lost) and not msgs:
        msgs.append(f"cancellation limits accuracy (rel err ~{np.max(etot / np.maximum(np.abs(total), 1e-300)):.2g})")
    # fixed summation order: by segment then position
    order = np.lexsort((lo, seg))
    value = val[..., order].sum(-1)
    errv = err[..., order].sum(-1) + nerr[..., order].sum(-1)
    for m in msgs:
        warnings.warn(m, QuadratureWarning, stacklevel=2)
    if np.ndim(value) == 0:
        value, errv = complex(value), float(errv)
    return IntegralResult(value, errv, n_evals, msgs)


# ---------------------------------------------------------------------------
# iterated integration


def integrate_product(f, contours, cfg: QuadConfig | None = None, l: int | None = None,
                      initial_panels: int = 4) -> IntegralResult:
    """Iterated integral over ``contours[0] x ... x contours[l-1]``.

    ``f(S, SEG, TAU)`` receives arrays of shape ``(l, npts)``; the variable
    with index 0 is innermost.  For ``l == 0`` the result is ``f`` evaluated on
    empty arrays (the empty-integral convention gives 1 for ``f = None``).
    """
    cfg = cfg or QuadConfig()
    contours = list(contours)
    l = len(contours) if l is None else l
    if l > cfg.max_dim:
        raise ValueError(f"dimension {l} exceeds the cap {cfg.max_dim}")
    if l == 0:
        if f is None:
            return IntegralResult(1.0 + 0j, 0.0, 0, [])
        v = np.asarray(f(np.zeros((0, 1), complex), np.zeros((0, 1), int), np.zeros((0, 1))))[..., 0]
        return IntegralResult(v if v.ndim else complex(v), np.zeros(v.shape) if v.ndim else 0.0, 1, [])
    if l == 1:
        return integrate_path(lambda s, sg, t: f(s[None, :], sg[None, :], t[None, :]),
                              contours[0], cfg, initial_panels)
    stats = {"n": 0, "warn": []}
    # inner integrals are held tighter so their error does not swamp the outer budget
    icfg = replace(cfg, rel_tol=cfg.rel_tol * INNER_TOL_FACTOR, abs_tol=cfg.abs_tol * INNER_TOL_FACTOR)

    def outer(s, sg, t):
        vals, errs = [], []
        for j in range(s.size):
            def inner(S, SG, T, _s=s[j], _g=sg[j], _t=t[j]):
                n = S.shape[1]
                S2 = np.vstack([S, np.full((1, n), _s)])
                G2 = np.vstack([SG, np.full((1, n), _g)])
                T2 = np.vstack([T, np.full((1, n), _t)])
                return f(S2, G2, T2)

            r = integrate_product(inner, contours[:-1], icfg, l - 1, initial_panels)
            stats["n"] += r.n_evals
            stats["warn"].extend(r.warnings)
            vals.append(np.asarray(r.value))
            errs.append(np.asarray(r.err_estimate))
        return np.stack(vals, axis=-1), np.stack(errs, axis=-1)

    res = integrate_path(outer, contours[-1], cfg, initial_panels)
    msgs = list(dict.fromkeys(res.warnings + stats["warn"]))
    return IntegralResult(res.value, res.err_estimate, stats["n"] + res.n_evals, msgs)
