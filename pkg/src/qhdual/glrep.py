"""gl2 weight subspaces, the rational R-matrix, KZ / qKZ / dynamical operators,
the duality map and the operator-level identity checks.

Basis vectors of a weight subspace of V_1 x ... x V_n are divided powers
E21^{d_1} v_1/d_1! x ... x E21^{d_n} v_n/d_n!, indexed by (d_1, ..., d_n)
with sum d_i = level.  In these coordinates, for n = 2 the vector with
index (level - a, a) is exactly F^a, so the duality map is the identity.

Operators are returned as a matrix part plus one shift or derivative slot.
Indices a (tensor slot) and i (gl2 index) are 1-based as in the formulas.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "SingularParameterError",
    "Module",
    "WeightSubspace",
    "OperatorMatrix",
    "ShiftedOperator",
    "gl2_action",
    "build_R",
    "R_nullity",
    "R_on",
    "B_series",
    "r_matrix_on",
    "build_operator",
    "composed_residual",
    "check_commutation",
    "phi_iso",
    "check_intertwining",
    "duality_pair",
    "check_solution",
    "random_point",
]


class SingularParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Module:
    """Highest weight (m, 0); ``finite`` means L_m (m a nonnegative integer), else Verma M_m."""

    m: complex
    finite: bool = False

    def __post_init__(self):
        if self.finite:
            mr = complex(self.m)
            if mr.imag != 0 or mr.real < 0 or mr.real != round(mr.real):
                raise ValueError("a finite module needs a nonnegative integer highest weight")

    @property
    def top(self):
        return int(round(complex(self.m).real)) if self.finite else None

    def has(self, d: int) -> bool:
        return d >= 0 and (not self.finite or d <= self.top)


def _site_action(i: int, j: int, mod: Module, d: int):
    """(d', coefficient) for E_ij on the divided power of degree d, or None for zero."""
    m = complex(mod.m)
    if (i, j) == (1, 1):
        return d, m - d
    if (i, j) == (2, 2):
        return d, complex(d)
    if (i, j) == (2, 1):
        return (d + 1, complex(d + 1)) if mod.has(d + 1) else None
    if (i, j) == (1, 2):
        return (d - 1, m - d + 1) if d >= 1 else None
    raise ValueError(f"no generator E{i}{j}")


@dataclass(frozen=True)
class WeightSubspace:
    modules: tuple
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.modules)

    @property
    def basis(self) -> tuple:
        return _basis(self.modules, self.level)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def weight(self):
        return (sum(complex(md.m) for md in self.modules) - self.level, complex(self.level))

    def index(self, d) -> int:
        return _index(self.modules, self.level)[tuple(d)]

    def shifted(self, dl: int) -> "WeightSubspace":
        return WeightSubspace(self.modules, self.level + dl)


@lru_cache(maxsize=None)
def _basis(modules, level):
    out = []
    for d in itertools.product(range(level + 1), repeat=len(modules)):
        if sum(d) == level and all(md.has(x) for md, x in zip(modules, d)):
            out.append(d)
    return tuple(out)


@lru_cache(maxsize=None)
def _index(modules, level):
    return {d: k for k, d in enumerate(_basis(modules, level))}


def subspace(modules, level: int) -> WeightSubspace:
    return WeightSubspace(tuple(modules), int(level))


@dataclass
class OperatorMatrix:
    entries: np.ndarray
    meta: dict = field(default_factory=dict)


@dataclass
class ShiftedOperator:
    """Matrix part times one slot: ("T_z", a), ("T_lambda", i), ("zd", a) or ("lambdad", i)."""

    matrix_part: OperatorMatrix
    shift: tuple

    def __post_init__(self):
        if self.shift[0] not in ("T_z", "T_lambda", "zd", "lambdad"):
            raise ValueError(f"unknown slot {self.shift}")


# ---------------------------------------------------------------------------
# words in site generators


def word_matrix(W: WeightSubspace, word) -> np.ndarray:
    """Matrix of E_{i1 j1}^{(s1)} ... E_{ik jk}^{(sk)} (rightmost acts first), W -> target level."""
    dl = sum(1 if (i, j) == (2, 1) else -1 if (i, j) == (1, 2) else 0 for i, j, _ in word)
    if W.level + dl < 0:
        return np.zeros((0, W.dim), dtype=complex)
    tgt = W.shifted(dl)
    M = np.zeros((tgt.dim, W.dim), dtype=complex)
    for col, d in enumerate(W.basis):
        d = list(d)
        c = 1 + 0j
        for i, j, s in reversed(word):
            r = _site_action(i, j, W.modules[s - 1], d[s - 1])
            if r is None:
                c = 0
                break
            d[s - 1], f = r
            c *= f
        if c != 0:
            M[tgt.index(d), col] += c
    return M


def gl2_action(gen: str, W: WeightSubspace, site: int | None = None) -> np.ndarray:
    """E_ij on one tensor slot (1-based) or, for ``site=None``, on the whole product."""
    i, j = int(gen[-2]), int(gen[-1])
    sites = range(1, W.n + 1) if site is None else [site]
    return sum(word_matrix(W, [(i, j, s)]) for s in sites)


def _diag(W: WeightSubspace, f) -> np.ndarray:
    return np.diag([complex(f(d)) for d in W.basis])


# ---------------------------------------------------------------------------
# rational R-matrix


def _pair_space(V: Module, Wm: Module, s: int) -> WeightSubspace:
    return subspace((V, Wm), s)


def _R_system(t, V, Wm, s):
    # R_{s+1} [A | C] = [A R_s | D R_s] for the E21 coproduct and the t-relation
    P = _pair_space(V, Wm, s)
    A = word_matrix(P, [(2, 1, 1)]) + word_matrix(P, [(2, 1, 2)])
    C = word_matrix(P, [(2, 1, 1), (1, 1, 2)]) + word_matrix(P, [(2, 2, 1), (2, 1, 2)]) + t * word_matrix(P, [(2, 1, 1)])
    D = word_matrix(P, [(1, 1, 1), (2, 1, 2)]) + word_matrix(P, [(2, 1, 1), (2, 2, 2)]) + t * word_matrix(P, [(2, 1, 1)])
    return A, C, D


@lru_cache(maxsize=256)
def _R_blocks(t: complex, V: Module, Wm: Module, smax: int):
    blocks = [np.ones((1, 1), dtype=complex)]
    for s in range(smax):
        A, C, D = _R_system(t, V, Wm, s)
        lhs = np.hstack([A, C])
        rhs = np.hstack([A @ blocks[s], D @ blocks[s]])
        if lhs.shape[0] == 0:
            blocks.append(np.zeros((0, 0), dtype=complex))
            continue
        sv = np.linalg.svd(lhs, compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            raise SingularParameterError(f"R-matrix not determined at t={t} (level {s + 1})")
        # R_{s+1} lhs = rhs, solved in the least-squares sense then checked
        Rn = np.linalg.lstsq(lhs.T, rhs.T, rcond=None)[0].T
        res = np.max(np.abs(Rn @ lhs - rhs)) / max(1.0, np.max(np.abs(rhs)))
        if res > 1e-8:
            raise SingularParameterError(f"R-matrix relations inconsistent at t={t} (residual {res:.2e})")
        blocks.append(Rn)
    return tuple(blocks)


def build_R(t, V: Module, Wm: Module, level: int) -> np.ndarray:
    """R_{VW}(t) on the level-``level`` weight subspace of V x W."""
    return _R_blocks(complex(t), V, Wm, int(level))[level]


def R_defining_residual(t, V: Module, Wm: Module, level: int) -> float:
    """Max residual of all defining relations on levels 0..level (scaled)."""
    t = complex(t)
    blocks = _R_blocks(t, V, Wm, level + 1)
    worst = abs(blocks[0][0, 0] - 1)
    for s in range(level + 1):
        P = _pair_space(V, Wm, s)
        R = blocks[s]
        for g in ("E11", "E22"):
            G = gl2_action(g, P)
            worst = max(worst, _rel(R @ G - G @ R, R, G))
        A, C, D = _R_system(t, V, Wm, s)
        Rn = blocks[s + 1]
        if A.shape[0]:
            worst = max(worst, _rel(Rn @ A - A @ R, Rn, A), _rel(Rn @ C - D @ R, Rn, C))
            P1 = _pair_space(V, Wm, s + 1)
            E12 = gl2_action("E12", P1)
            worst = max(worst, _rel(R @ E12 - E12 @ Rn, R, E12))
    return worst


def R_nullity(t, V: Module, Wm: Module, level: int) -> int:
    """Dimension of the solution space of the homogeneous defining system on levels 0..level."""
    t = complex(t)
    dims = [_pair_space(V, Wm, s).dim for s in range(level + 1)]
    offs = np.concatenate([[0], np.cumsum([d * d for d in dims])]).astype(int)
    rows = []

    def unit(s):
        # linear map X -> coefficient vector for the block X_s
        return offs[s], dims[s]

    for s in range(level):
        A, C, D = _R_system(t, V, Wm, s)
        for L, Rm in ((A, A), (C, D)):
            # X_{s+1} L - Rm X_s = 0, vectorized row-major
            n1, n0 = dims[s + 1], dims[s]
            for r in range(n1):
                for c in range(n0):
                    row = np.zeros(offs[-1], dtype=complex)
                    for k in range(n1):
                        row[offs[s + 1] + r * n1 + k] += L[k, c]
                    for k in range(n0):
                        row[offs[s] + k * n0 + c] -= Rm[r, k]
                    rows.append(row)
    if not rows:
        return offs[-1]
    Msys = np.array(rows)
    sv = np.linalg.svd(Msys, compute_uv=False)
    rank = int(np.sum(sv > 1e-9 * sv[0]))
    return offs[-1] - rank


def R_on(W: WeightSubspace, a: int, b: int, t) -> np.ndarray:
    """R_{ab}(t) acting on slots a, b (1-based, a != b, slot a is the first factor)."""
    if a == b:
        raise ValueError("R_{ab} needs a != b")
    V, Wm = W.modules[a - 1], W.modules[b - 1]
    M = np.zeros((W.dim, W.dim), dtype=complex)
    for col, d in enumerate(W.basis):
        s = d[a - 1] + d[b - 1]
        P = _pair_space(V, Wm, s)
        R = build_R(t, V, Wm, s)
        k = P.index((d[a - 1], d[b - 1]))
        for k2, (x, y) in enumerate(P.basis):
            if R[k2, k] != 0:
                d2 = list(d)
                d2[a - 1], d2[b - 1] = x, y
                M[W.index(d2), col] += R[k2, k]
    return M


# ---------------------------------------------------------------------------
# building blocks


def B_series(t, W: WeightSubspace) -> np.ndarray:
    """B(t) on W: sum over s of E21^s E12^s prod_j 1/(j (t - h - j)), h = E11 - E22 on W."""
    t = complex(t)
    w1, w2 = W.weight
    h = w1 - w2
    out = np.eye(W.dim, dtype=complex)
    down = np.eye(W.dim, dtype=complex)  # E12^s: W -> level - s
    cur = W
    coef = 1 + 0j
    for s in range(1, W.level + 1):
        down = gl2_action("E12", cur) @ down
        cur = cur.shifted(-1)
        den = s * (t - h - s)
        if abs(den) < 1e-12:
            raise SingularParameterError(f"B(t) singular at t={t}")
        coef /= den
        up = np.eye(cur.dim, dtype=complex)
        c2 = cur
        for _ in range(s):
            up = gl2_action("E21", c2) @ up
            c2 = c2.shifted(1)
        out = out + coef * (up @ down)
    return out


def r_matrix_on(W: WeightSubspace, a: int, b: int, x) -> np.ndarray:
    """r(x)^{(ab)}, slot a carrying the first tensor factor."""
    x = complex(x)
    if abs(x - 1) < 1e-12:
        raise SingularParameterError("r(x) has a pole at x = 1")
    M = 0.5 * (x + 1) * (word_matrix(W, [(1, 1, a), (1, 1, b)]) + word_matrix(W, [(2, 2, a), (2, 2, b)]))
    M = M + x * word_matrix(W, [(1, 2, a), (2, 1, b)]) + word_matrix(W, [(2, 1, a), (1, 2, b)])
    return M / (x - 1)


def _pow_diag(W, site, ii, logbase):
    # base^{-E_ii^{(site)}} with the logarithm supplied
    return _diag(W, lambda d: cmath.exp(-logbase * _eig(W.modules[site - 1], d[site - 1], ii)))


def _eig(mod, d, ii):
    return complex(mod.m) - d if ii == 1 else complex(d)


def _logs(vals, logs):
    if logs is not None:
        return [complex(v) for v in logs]
    return [cmath.log(complex(v)) for v in vals]


def _Z_matrix(W, a, z, lam, kappa, log_lam):
    n = W.n
    ll = _logs(lam, log_lam)
    left = np.eye(W.dim, dtype=complex)
    for b in range(n, a, -1):  # R_{an} ... R_{a,a+1}
        left = left @ R_on(W, a, b, z[a - 1] - z[b - 1])
    right = np.eye(W.dim, dtype=complex)
    for b in range(1, a):  # R_{1a} ... R_{a-1,a}
        right = right @ R_on(W, b, a, z[b - 1] - z[a - 1] - kappa)
    lamp = _pow_diag(W, a, 1, ll[0]) @ _pow_diag(W, a, 2, ll[1])
    return np.linalg.solve(left, lamp @ right)


def _nabla_matrix(W, a, z, lam):
    n = W.n
    M = np.zeros((W.dim, W.dim), dtype=complex)
    for ii in (1, 2):
        tot = sum(_diag(W, lambda d, s=s: _eig(W.modules[s - 1], d[s - 1], ii)) for s in range(1, n + 1))
        Ea = _diag(W, lambda d: _eig(W.modules[a - 1], d[a - 1], ii))
        M = M - (complex(lam[ii - 1]) * np.eye(W.dim) - 0.5 * tot) @ Ea
    for b in range(1, n + 1):
        if b != a:
            M = M - r_matrix_on(W, a, b, complex(z[a - 1]) / complex(z[b - 1]))
    return M


def _Q_matrix(W, i, z, lam, kappa, log_z):
    lz = _logs(z, log_z)
    dlam = complex(lam[0]) - complex(lam[1])
    P = np.eye(W.dim, dtype=complex)
    for a in range(1, W.n + 1):
        P = P @ _pow_diag(W, a, i, lz[a - 1])
    if i == 1:
        return np.linalg.solve(B_series(dlam, W), P)
    return P @ B_series(dlam - kappa, W)


def _D_matrix(W, i, z, lam):
    n = W.n
    ip = 3 - i
    li, lo = complex(lam[i - 1]), complex(lam[ip - 1])
    if abs(li - lo) < 1e-12:
        raise SingularParameterError("D_i singular at lambda_1 = lambda_2")
    tot = sum(_diag(W, lambda d, s=s: _eig(W.modules[s - 1], d[s - 1], i)) for s in range(1, n + 1))
    M = 0.5 * tot @ tot
    for a in range(1, n + 1):
        M = M - complex(z[a - 1]) * _diag(W, lambda d, a=a: _eig(W.modules[a - 1], d[a - 1], i))
    for j in (1, 2):
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                M = M - word_matrix(W, [(i, j, a), (j, i, b)])
    E21E12 = sum(word_matrix(W, [(2, 1, a), (1, 2, b)]) for a in range(1, n + 1) for b in range(1, n + 1))
    E22 = sum(_diag(W, lambda d, s=s: complex(d[s - 1])) for s in range(1, n + 1))
    return M - lo / (li - lo) * (E21E12 - E22)


def build_operator(name: str, index: int, z, lam, W: WeightSubspace, kappa: float,
                   log_lam=None, log_z=None) -> ShiftedOperator:
    """One of KZ_nabla_a, qKZ_Z_a, dyn_Q_i, dyn_D_i at the point (z, lambda)."""
    z = [complex(x) for x in z]
    lam = [complex(x) for x in lam]
    if len(z) != W.n:
        raise ValueError("need one z per tensor slot")
    if W.n < 2:
        raise ValueError("operators need n >= 2")
    if name == "KZ_nabla_a":
        M, slot = _nabla_matrix(W, index, z, lam), ("zd", index)
    elif name == "qKZ_Z_a":
        M, slot = _Z_matrix(W, index, z, lam, kappa, log_lam), ("T_z", index)
    elif name == "dyn_Q_i":
        M, slot = _Q_matrix(W, index, z, lam, kappa, log_z), ("T_lambda", index)
    elif name == "dyn_D_i":
        M, slot = _D_matrix(W, index, z, lam), ("lambdad", index)
    else:
        raise ValueError(f"unknown operator {name}")
    meta = {"name": name, "index": index, "z": z, "lambda": lam, "kappa": kappa}
    return ShiftedOperator(OperatorMatrix(M, meta), slot)


# ---------------------------------------------------------------------------
# commutation checks


def _rel(diff, *mats) -> float:
    scale = max([1e-300] + [float(np.max(np.abs(m))) if np.size(m) else 0.0 for m in mats])
    return float(np.max(np.abs(diff))) / scale if np.size(diff) else 0.0


def _bump(vals, k, by):
    out = list(vals)
    out[k - 1] = out[k - 1] + by
    return out


def composed_residual(kind: str, ia: int, ib: int, z, lam, W: WeightSubspace, kappa: float) -> float:
    """Residual of a commutator of two shift operators, or of a mixed one.

    kind: "Z_Z" (qKZ operators a, b), "Q_Q" (Q_1 with Q_2), "nabla_Q" (nabla_a with Q_i),
    "Z_D" (Z_a with D_i).  Logs of z and lambda follow a fixed principal anchor at
    the unshifted point, so shifted powers stay on the same sheet.
    """
    z = [complex(x) for x in z]
    lam = [complex(x) for x in lam]
    llam = [cmath.log(x) for x in lam]
    lz = [cmath.log(x) for x in z]

    def shifted_logs(vals, logs, k, by):
        out = list(logs)
        out[k - 1] = logs[k - 1] + cmath.log((vals[k - 1] + by) / vals[k - 1])
        return out

    if kind == "Z_Z":
        a, b = ia, ib
        Ma = _Z_matrix(W, a, z, lam, kappa, llam)
        Mb = _Z_matrix(W, b, z, lam, kappa, llam)
        Mb_a = _Z_matrix(W, b, _bump(z, a, kappa), lam, kappa, llam)
        Ma_b = _Z_matrix(W, a, _bump(z, b, kappa), lam, kappa, llam)
        return _rel(Ma @ Mb_a - Mb @ Ma_b, Ma @ Mb_a)
    if kind == "Q_Q":
        M1 = _Q_matrix(W, 1, z, lam, kappa, lz)
        M2 = _Q_matrix(W, 2, z, lam, kappa, lz)
        M2_1 = _Q_matrix(W, 2, z, _bump(lam, 1, kappa), kappa, lz)
        M1_2 = _Q_matrix(W, 1, z, _bump(lam, 2, kappa), kappa, lz)
        return _rel(M1 @ M2_1 - M2 @ M1_2, M1 @ M2_1)
    if kind == "nabla_Q":
        a, i = ia, ib
        Mi = _Q_matrix(W, i, z, lam, kappa, lz)
        Ea = _diag(W, lambda d: _eig(W.modules[a - 1], d[a - 1], i))
        # kappa z_a d/dz_a of z_a^{-E_ii^{(a)}} is -kappa E_ii^{(a)} times it (diagonal, commutes)
        dM = -kappa * (Mi @ Ea if i == 1 else Ea @ Mi)
        A = _nabla_matrix(W, a, z, lam)
        A_s = _nabla_matrix(W, a, z, _bump(lam, i, kappa))
        return _rel(dM + A @ Mi - Mi @ A_s, A @ Mi, dM)
    if kind == "Z_D":
        a, i = ia, ib
        n = W.n
        left = np.eye(W.dim, dtype=complex)
        for b in range(n, a, -1):
            left = left @ R_on(W, a, b, z[a - 1] - z[b - 1])
        right = np.eye(W.dim, dtype=complex)
        for b in range(1, a):
            right = right @ R_on(W, b, a, z[b - 1] - z[a - 1] - kappa)
        lamp = _pow_diag(W, a, 1, llam[0]) @ _pow_diag(W, a, 2, llam[1])
        Ei = _diag(W, lambda d: _eig(W.modules[a - 1], d[a - 1], i))
        Ma = np.linalg.solve(left, lamp @ right)
        dM = np.linalg.solve(left, -kappa * Ei @ lamp @ right)
        K = _D_matrix(W, i, z, lam)
        K_s = _D_matrix(W, i, _bump(z, a, kappa), lam)
        return _rel(dM + K @ Ma - Ma @ K_s, K @ Ma, dM)
    raise ValueError(f"unknown commutator kind {kind}")


def check_commutation(pairing: str, z, lam, W: WeightSubspace, kappa: float) -> float:
    """Worst residual over all index pairs for "nabla_vs_Q", "Z_vs_D", "Z_vs_Z" or "Q_vs_Q"."""
    n = W.n
    if pairing == "nabla_vs_Q":
        return max(composed_residual("nabla_Q", a, i, z, lam, W, kappa) for a in range(1, n + 1) for i in (1, 2))
    if pairing == "Z_vs_D":
        return max(composed_residual("Z_D", a, i, z, lam, W, kappa) for a in range(1, n + 1) for i in (1, 2))
    if pairing == "Z_vs_Z":
        return max(composed_residual("Z_Z", a, b, z, lam, W, kappa)
                   for a in range(1, n + 1) for b in range(a + 1, n + 1))
    if pairing == "Q_vs_Q":
        return composed_residual("Q_Q", 1, 2, z, lam, W, kappa)
    raise ValueError(f"unknown pairing {pairing}")


# ---------------------------------------------------------------------------
# duality


def duality_pair(m1, m2: int, l2: int):
    """The weight subspaces (M_m1 x L_m2)[l1, l2] and (M_l1 x L_l2)[m1, m2]."""
    l1 = complex(m1) + m2 - l2
    src = subspace((Module(complex(m1)), Module(m2, True)), l2)
    tgt = subspace((Module(l1), Module(l2, True)), m2)
    return src, tgt


def F_index(W: WeightSubspace, a: int) -> int:
    """Position of F^a = e_{level-a} x e_a in the basis of a two-slot subspace."""
    return W.index((W.level - a, a))


def phi_iso(src: WeightSubspace, tgt: WeightSubspace) -> np.ndarray:
    """Matrix of phi: F^a -> F^a."""
    if src.dim != tgt.dim:
        raise ValueError(f"dimension mismatch {src.dim} vs {tgt.dim}")
    P = np.zeros((tgt.dim, src.dim))
    for a in range(src.dim):
        P[F_index(tgt, a), F_index(src, a)] = 1.0
    return P


def G_scalar(t, m1, m2: int) -> complex:
    t, m1 = complex(t), complex(m1)
    out = 1 + 0j
    for j in range(m2):
        if abs(t + j + 1) < 1e-12:
            raise SingularParameterError(f"G has a pole at t={t}")
        out *= (t + j - m1) / (t + j + 1)
    return out


def check_intertwining(which: str, m1, m2: int, l2: int, z, lam, kappa: float) -> float:
    """Residual of phi Z_a = G^{-+1} Q_a phi ("qKZ_vs_Q") or phi D_a = nabla_a phi ("D_vs_KZ")."""
    src, tgt = duality_pair(m1, m2, l2)
    P = phi_iso(src, tgt)
    z = [complex(x) for x in z]
    lam = [complex(x) for x in lam]
    llam = [cmath.log(x) for x in lam]
    worst = 0.0
    if which == "qKZ_vs_Q":
        g1 = G_scalar(z[0] - z[1], m1, m2)
        g2 = G_scalar(z[0] - z[1] - kappa, m1, m2)
        Z1 = _Z_matrix(src, 1, z, lam, kappa, llam)
        Z2 = _Z_matrix(src, 2, z, lam, kappa, llam)
        # the dual operators swap the roles of z and lambda
        Q1 = _Q_matrix(tgt, 1, lam, z, kappa, llam)
        Q2 = _Q_matrix(tgt, 2, lam, z, kappa, llam)
        worst = max(_rel(P @ Z1 - (Q1 / g1) @ P, Z1), _rel(P @ Z2 - g2 * Q2 @ P, Z2))
    elif which == "D_vs_KZ":
        for a in (1, 2):
            D = _D_matrix(src, a, z, lam)
            N = _nabla_matrix(tgt, a, lam, z)
            worst = max(worst, _rel(P @ D - N @ P, D))
    else:
        raise ValueError(f"unknown intertwining {which}")
    return worst


def random_point(rng: np.random.Generator, n: int = 2, lo: float = 0.5, hi: float = 3.0):
    """Random z (n values) and lambda (2 values) with moduli in [lo, hi] and generic differences."""
    def draw(k):
        while True:
            r = rng.uniform(lo, hi, k)
            th = rng.uniform(0, 2 * math.pi, k)
            v = r * np.exp(1j * th)
            ok = all(abs(v[i] - v[j]) > 1e-2 and abs(v[i] / v[j] - 1) > 1e-2
                     for i in range(k) for j in range(k) if i != j)
            if ok:
                return [complex(x) for x in v]

    return draw(n), draw(2)


# ---------------------------------------------------------------------------
# solutions


def _fd(fun, h):
    """Central difference with one Richardson step; returns (estimate, richardson gap)."""
    d1 = (fun(h) - fun(-h)) / (2 * h)
    d2 = (fun(h / 2) - fun(-h / 2)) / h
    est = (4 * d2 - d1) / 3
    return est, float(np.max(np.abs(est - d2)))


def check_solution(side: str, p, b: int, cfg=None, z1=0.25 + 0.1j, mu1=0.15 - 0.05j,
                   h: float | None = None) -> dict:
    """Residuals of the hypergeometric solutions.

    side "qKZ": U_b built from I-bar solves Z_a U = U (l2 <= 1).
    side "dynDE": the same U_b solves D_i U = 0 (l2 <= 1).
    side "KZ": U_b built from J-bar solves nabla_a U = 0 and Q_i U = U (m2 <= 1).
    The integral's own (z, mu) are p.z and p.mu.
    """
    from .integrals import I_matrix, J_matrix
    from .params import Params
    from .quad import QuadConfig

    cfg = cfg or QuadConfig(rel_tol=1e-10)
    k = p.kappa
    m1, m2, l2, l1 = complex(p.m1), p.m2_int, int(p.l2), complex(p.l1)
    kdim = min(m2, l2)
    if not 0 <= b <= kdim:
        raise ValueError("b not admissible")
    h = 1e-4 * k if h is None else h
    src, tgt = duality_pair(m1, m2, l2)

    if side in ("qKZ", "dynDE"):
        if l2 > 1:
            raise ValueError("I-side solution checks are limited to l2 <= 1")
        W = src

        def U(z1_, z2_, mu1_, mu2_):
            pz = p.with_(z=z2_ - z1_, mu=mu2_ - mu1_)
            Ib = I_matrix(pz, cfg, None, [b]).value[:, 0]
            pre = ((mu1_ * (m1 * z1_ + m2 * z2_ - (m1 * m1 + m2 * m2) / 2)
                    - (mu1_ - mu2_) * (l2 * z1_ + l2 / 2)) / k)
            pre = cmath.exp(pre) * cmath.exp(-l2 / k * cmath.log(1 - cmath.exp(mu2_ - mu1_)))
            v = np.zeros(W.dim, dtype=complex)
            for a in range(kdim + 1):
                v[F_index(W, a)] = Ib[a]
            return pre * v

        z1_ = complex(z1)
        z2_ = z1_ + complex(p.z)
        mu1_ = complex(mu1)
        mu2_ = mu1_ + complex(p.mu)
        lam = [cmath.exp(mu1_), cmath.exp(mu2_)]
        u0 = U(z1_, z2_, mu1_, mu2_)
        out = {"side": side, "b": b, "scale": float(np.max(np.abs(u0)))}
        if side == "qKZ":
            res = []
            for a in (1, 2):
                M = _Z_matrix(W, a, [z1_, z2_], lam, k, [mu1_, mu2_])
                zs = _bump([z1_, z2_], a, k)
                u1 = U(zs[0], zs[1], mu1_, mu2_)
                res.append(_rel(M @ u1 - u0, u0))
            out["residuals"] = res
        else:
            res, gaps = [], []
            for i in (1, 2):
                K = _D_matrix(W, i, [z1_, z2_], lam)

                def f(e, i=i):
                    mus = _bump([mu1_, mu2_], i, e)
                    return U(z1_, z2_, mus[0], mus[1])

                d, gap = _fd(f, h)
                res.append(_rel(k * d + K @ u0, k * d, K @ u0))
                gaps.append(gap / max(float(np.max(np.abs(d))), 1e-300))
            out["residuals"] = res
            out["richardson_gap"] = gaps
        out["max_residual"] = max(out["residuals"])
        return out

    if side == "KZ":
        if m2 > 1:
            raise ValueError("J-side solution checks are limited to m2 <= 1")
        W = tgt
        # integral slots: z-slot x = z2/z1, mu-slot = lambda2 - lambda1
        x = cmath.exp(complex(p.mu))
        lam1 = complex(mu1)
        lam2 = lam1 + complex(p.z)
        zz1 = complex(z1) + 1.0
        zz2 = zz1 * x

        def U(z1_, z2_, la1, la2):
            q = Params(l1, l2, m2, k, z2_ / z1_, la2 - la1)
            Jb = J_matrix(q, cfg, None, [b]).value[:, 0]
            e1 = (la1 * (l1 - m2) + la2 * m2 - m2 * m2 - m1 * l1 + l1 * l1 / 2) / k
            e2 = l2 * (la1 - m1 + l2 / 2) / k
            pre = cmath.exp(e1 * cmath.log(z1_) + e2 * cmath.log(z2_) + l1 * l2 / k * cmath.log(z1_ - z2_))
            v = np.zeros(W.dim, dtype=complex)
            for a in range(kdim + 1):
                v[F_index(W, a)] = Jb[a]
            return pre * v

        zs, lams = [zz1, zz2], [lam1, lam2]
        u0 = U(zz1, zz2, lam1, lam2)
        res, gaps = [], []
        for a in (1, 2):
            A = _nabla_matrix(W, a, zs, lams)

            def f(e, a=a):
                zz = list(zs)
                zz[a - 1] = zz[a - 1] * cmath.exp(e)
                return U(zz[0], zz[1], lam1, lam2)

            d, gap = _fd(f, h)
            res.append(_rel(k * d + A @ u0, k * d, A @ u0))
            gaps.append(gap / max(float(np.max(np.abs(d))), 1e-300))
        qres = []
        lz = [cmath.log(zz1), cmath.log(zz2)]
        for i in (1, 2):
            M = _Q_matrix(W, i, zs, lams, k, lz)
            ls = _bump(lams, i, k)
            u1 = U(zz1, zz2, ls[0], ls[1])
            qres.append(_rel(M @ u1 - u0, u0))
        return {"side": side, "b": b, "residuals": res, "dyn_residuals": qres,
                "richardson_gap": gaps, "max_residual": max(res + qres),
                "scale": float(np.max(np.abs(u0)))}
    raise ValueError(f"unknown side {side}")
