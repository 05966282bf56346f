"""Acceptance criteria 1-9, one summary line each (see the terminal summary)."""

import cmath
import time
import warnings

import numpy as np
import pytest

from conftest import record
from qhdual.duality import check_S_equation, connection_matrix, gauss_reduction, log_Y, verify_theorem1
from qhdual.glrep import (
    Module,
    R_defining_residual,
    check_commutation,
    check_intertwining,
    check_solution,
    duality_pair,
    gl2_action,
    random_point,
    subspace,
)
from qhdual.integrand import phi_q, w_rat, w_trig, xi_pP
from qhdual.integrals import (
    I_asymptotic,
    I_matrix,
    J_asymptotic,
    J_matrix,
    selberg_A,
    selberg_A_quad,
    selberg_B,
    selberg_B_quad,
)
from qhdual.params import dual_params, make_params
from qhdual.quad import QuadConfig

M1, KAPPA, MU = -0.6 + 0.2j, 1.37, -0.8 + 1.3j
Z_REGION = -30 + 0.4j  # Re z <= -20 kappa = -27.4
REL_TOL = 1e-8
CFG = QuadConfig(rel_tol=REL_TOL)


def _p(m2, l2, **kw):
    d = dict(m1=M1, m2=m2, l2=l2, kappa=KAPPA, z=Z_REGION, mu=MU)
    d.update(kw)
    return make_params(**d)


def _fmt(x):
    return f"{x:.1e}"


# 1 -------------------------------------------------------------------------

GAUSS_SETS = [
    (-0.6, 1.0, -1.1 + 0.3j, -1 + 1.5j),
    (-0.4 + 0.1j, 1.37, -0.8 - 0.2j, -0.7 + 2.0j),
    (-1.2, 0.8, -0.5 + 0.6j, -0.3 + 1.0j),
]


def test_c1_gauss_reduction():
    worst, slowest = 0.0, 0.0
    for m1, k, z, mu in GAUSS_SETS:
        p = make_params(m1, 1, 1, k, z, mu)
        g = gauss_reduction(p)
        assert g["gamma"].real > g["alpha"].real > 0 and g["beta"].real > 0
        t0 = time.time()
        val = I_matrix(p, CFG, [0], [0]).value[0, 0]
        slowest = max(slowest, time.time() - t0)
        worst = max(worst, abs(val - g["I00"]) / abs(g["I00"]))
    ok = worst <= 1e-6 and slowest < 10
    record(1, "Gauss 2F1", ok, f"max rel {_fmt(worst)} (<= 1e-6), slowest {slowest:.2f}s (< 10s)")
    assert ok


# 2 -------------------------------------------------------------------------

THEOREM_CASES = [(0, 0), (1, 1), (1, 2), (2, 1), (2, 2)]


@pytest.mark.parametrize("m2,l2", THEOREM_CASES)
def test_c2_theorem_identity(m2, l2):
    p = _p(m2, l2)
    t0 = time.time()
    rep = verify_theorem1(p, CFG)
    elapsed = time.time() - t0
    bound = 1e-3 if l2 > 1 else 1e-5
    ok = rep["max_residual"] <= bound and elapsed < 1800
    record(2, f"(m2,l2)=({m2},{l2})", ok,
           f"max residual {_fmt(rep['max_residual'])} (<= {bound:g}) in {elapsed:.1f}s")
    assert ok


# 3 -------------------------------------------------------------------------


@pytest.mark.parametrize("l,bound", [(1, 1e-6), (2, 1e-5)])
def test_c3_selberg_A(l, bound):
    m, mu, k = -0.7 + 0.3j, -0.5 + 1.9j, 1.37
    q = selberg_A_quad(l, m, mu, k, CFG).value
    c = selberg_A(l, m, mu, k).value
    rel = abs(q - c) / abs(c)
    record(3, f"A_{l}", rel <= bound, f"rel {_fmt(rel)} (<= {bound:g})")
    assert rel <= bound


@pytest.mark.parametrize("m", [1, 2])
def test_c3_selberg_B(m):
    l, k = 0.7 + 0.4j, 1.37
    q = selberg_B_quad(m, l, k, CFG).value
    c = selberg_B(m, l, k).value
    rel = abs(q - c) / abs(c)
    record(3, f"B_{m}", rel <= 1e-5, f"rel {_fmt(rel)} (<= 1e-5)")
    assert rel <= 1e-5


# 4 -------------------------------------------------------------------------

ASYM_CASES = [(1, 1), (2, 1), (1, 2), (2, 2)]
RE_Z = (-40.0, -80.0)
_asym_cache = {}


def _deviations(side, m2, l2, x):
    key = (side, m2, l2, x)
    if key not in _asym_cache:
        p = _p(m2, l2, z=complex(x, 0.4))
        kd = min(m2, l2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if side == "I":
                M = I_matrix(p, CFG).value
                lead = [I_asymptotic(p, b, b) for b in range(kd + 1)]
            else:
                q = dual_params(p)
                M = J_matrix(q, CFG).value
                lead = [J_asymptotic(q, b, b) for b in range(kd + 1)]
        # off-diagonal entries are measured against the column's leading term
        _asym_cache[key] = np.array([[abs(M[a, b] / lead[b] - (a == b)) for b in range(kd + 1)]
                                     for a in range(kd + 1)])
    return _asym_cache[key]


@pytest.mark.parametrize("side", ["I", "J"])
@pytest.mark.parametrize("m2,l2", ASYM_CASES)
def test_c4_asymptotic_bound(side, m2, l2):
    devs = [_deviations(side, m2, l2, x).max() for x in RE_Z]
    ok = all(d <= 5 / abs(x) for d, x in zip(devs, RE_Z))
    record(4, f"{side} ({m2},{l2}) bound", ok,
           " ".join(f"{_fmt(d)}<={5 / abs(x):.3g}" for d, x in zip(devs, RE_Z)))
    assert ok


@pytest.mark.parametrize("side", ["I", "J"])
@pytest.mark.parametrize("m2,l2", ASYM_CASES)
def test_c4_asymptotic_halving(side, m2, l2):
    ratio = (_deviations(side, m2, l2, RE_Z[1]) / _deviations(side, m2, l2, RE_Z[0])).max()
    ok = ratio <= 0.5
    record(4, f"{side} ({m2},{l2}) halving", ok, f"ratio {ratio:.3f} (<= 0.5)")
    assert ok


# 5 -------------------------------------------------------------------------


def _generic(t, p):
    k, z, m1, m2 = p.kappa, p.z, p.m1, p.m2
    args = [w for x in t for w in (x / k, (x - z) / k, (x + m1) / k, (x - z + m2) / k)]
    args += [(t[u] - t[v] + c) / k for u in range(len(t)) for v in range(len(t)) if u != v for c in (-1, 0, 1)]
    return all(min(abs(a - n) for n in range(-20, 21)) > 1e-3 for a in args)


def test_c5_factorization():
    rng = np.random.default_rng(5)
    worst = 0.0
    for l in (1, 2, 3):
        p = _p(l, l, z=-1.3 + 0.4j)
        for a in range(l + 1):
            for b in range(l + 1):
                n = 0
                while n < 100:
                    t = rng.uniform(-2.5, 2.5, l) + 1j * rng.uniform(-2.5, 2.5, l)
                    if not _generic(t, p):
                        continue
                    lhs = complex(np.ravel(phi_q(t, p) * w_rat(t, p, a) * w_trig(t, p, b))[0])
                    rhs = complex(np.ravel(xi_pP(t, p, a, b))[0])
                    worst = max(worst, abs(lhs - rhs) / abs(lhs))
                    n += 1
    record(5, "100 points per (l,a,b), l<=3", worst <= 1e-10, f"max rel {_fmt(worst)} (<= 1e-10)")
    assert worst <= 1e-10


# 6 -------------------------------------------------------------------------


def test_c6_operator_suite():
    t0 = time.time()
    rng = np.random.default_rng(6)
    parts = {}
    mods = (Module(M1), Module(2, True), Module(1.3 - 0.2j))
    g = 0.0
    for lev in range(4):
        W = subspace(mods, lev)
        comm = gl2_action("E12", W.shifted(1)) @ gl2_action("E21", W)
        if lev:
            comm = comm - gl2_action("E21", W.shifted(-1)) @ gl2_action("E12", W)
        H = gl2_action("E11", W) - gl2_action("E22", W)
        g = max(g, np.max(np.abs(comm - H)) / max(1.0, np.max(np.abs(H))))
    parts["gl2"] = (g, 1e-13)
    r = 0.0
    for _ in range(20):
        t = complex(rng.uniform(-3, 3), rng.uniform(0.3, 3))
        for Wm in (Module(2, True), Module(0.4 + 0.3j)):
            r = max(r, R_defining_residual(t, Module(M1), Wm, 3))
    parts["R"] = (r, 1e-12)
    worst = {}
    for m2, l2 in [(1, 1), (2, 1), (1, 2), (2, 2)]:
        src, _ = duality_pair(M1, m2, l2)
        for _ in range(20):
            z, lam = random_point(rng)
            for name in ("Z_vs_Z", "Q_vs_Q", "nabla_vs_Q", "Z_vs_D"):
                worst[name] = max(worst.get(name, 0.0), check_commutation(name, z, lam, src, KAPPA))
            for name in ("qKZ_vs_Q", "D_vs_KZ"):
                worst[name] = max(worst.get(name, 0.0), check_intertwining(name, M1, m2, l2, z, lam, KAPPA))
    for name, v in worst.items():
        parts[name] = (v, 1e-10)
    elapsed = time.time() - t0
    ok = all(v <= b for v, b in parts.values()) and elapsed < 60
    record(6, "operators", ok, ", ".join(f"{k} {_fmt(v)}" for k, (v, _) in parts.items()) + f", {elapsed:.1f}s")
    assert ok


# 7 -------------------------------------------------------------------------


def test_c7_S_equation():
    rng = np.random.default_rng(7)
    worst = 0.0
    for m2 in range(5):
        p = _p(m2, 1)
        for t in rng.uniform(-4, 4, 100) + 1j * rng.uniform(-4, 4, 100):
            worst = max(worst, check_S_equation(p, t))
    record(7, "S(t+kappa)=G(t)S(t), m2<=4", worst <= 1e-12, f"max rel {_fmt(worst)} (<= 1e-12)")
    assert worst <= 1e-12


# 8 -------------------------------------------------------------------------


@pytest.mark.parametrize("m2,l2", [(1, 1), (2, 1), (1, 2), (2, 2)])
def test_c8_connection_matrix(m2, l2):
    # Re mu = 0 keeps the column scales of I and J comparable
    mu1, mu2 = 1.3j, 2.1j
    p = _p(m2, l2, mu=mu1)
    c1 = connection_matrix(p, CFG)
    c2 = connection_matrix(p.with_(z=p.z - KAPPA), CFG)
    c3 = connection_matrix(p.with_(mu=mu2), CFG)
    G1, G2, G3 = c1["G"], c2["G"], c3["G"]
    norm = np.max(np.abs(G1))
    combined = 10 * 2 * REL_TOL * max(c1["condition_number"], c2["condition_number"])
    zshift = np.max(np.abs(G1 - G2)) / norm
    ratio_Y = cmath.exp(log_Y(mu2, p) - log_Y(mu1, p))
    mu_dev = max(abs(G1[b, b] / G3[b, b] - ratio_Y) / abs(ratio_Y) for b in range(len(G1)))
    ok = c1["offdiag_rel"] <= 1e-3 and zshift <= combined and mu_dev <= combined
    record(8, f"({m2},{l2})", ok, f"offdiag {_fmt(c1['offdiag_rel'])} (<= 1e-3), z-shift {_fmt(zshift)}, "
                                  f"mu-ratio {_fmt(mu_dev)} (<= {_fmt(combined)})")
    assert ok


# 9 -------------------------------------------------------------------------

SOLUTION_CASES = [("qKZ", 1, 1), ("qKZ", 2, 1), ("dynDE", 1, 1), ("dynDE", 2, 1), ("KZ", 1, 1), ("KZ", 1, 2)]


@pytest.mark.parametrize("side,m2,l2", SOLUTION_CASES)
def test_c9_solutions(side, m2, l2):
    worst, gap = 0.0, 0.0
    for b in range(min(m2, l2) + 1):
        r = check_solution(side, _p(m2, l2), b, QuadConfig(rel_tol=1e-10))
        worst = max(worst, r["max_residual"])
        gap = max([gap] + list(r.get("richardson_gap", [])))
    ok = worst <= 1e-3 and gap <= 1e-3
    extra = f", Richardson gap {_fmt(gap)}" if side != "qKZ" else ""
    record(9, f"{side} ({m2},{l2})", ok, f"residual {_fmt(worst)} (<= 1e-3){extra}")
    assert ok
