"""Connection factors of the I = J identity and its end-to-end verification.

All factors are kept as logarithms; only residuals are formed from
exponentiated values.
"""

from __future__ import annotations

import cmath
import csv
import io
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import loggamma

from .integrals import I_matrix, J_matrix
from .params import Params, dual_params, region_flags
from .quad import QuadConfig
from .special import PoleError, log_sinpi

__all__ = [
    "ConnectionFactors",
    "factors",
    "log_kfactorial",
    "log_X",
    "log_Y",
    "G_factor",
    "check_S_equation",
    "gauss_reduction",
    "verify_theorem1",
    "connection_matrix",
    "report_json",
    "report_csv",
]


@dataclass(frozen=True)
class ConnectionFactors:
    log_C_b: complex
    log_D_b: complex
    log_E_b: complex
    log_X: complex
    log_Y: complex

    @property
    def ratio(self) -> complex:
        """D_b E_b X Y / C_b."""
        return cmath.exp(self.log_D_b + self.log_E_b + self.log_X + self.log_Y - self.log_C_b)


def _lg(x) -> complex:
    x = complex(x)
    if x.imag == 0 and x.real <= 0 and x.real == round(x.real):
        raise PoleError(f"gamma pole at {x.real:g}")
    return complex(loggamma(x))


def _lsin_k(x, k) -> complex:
    v = complex(log_sinpi(complex(x) / k))
    if not np.isfinite(v.real):
        raise PoleError(f"sin_k vanishes at {x}")
    return v


def log_X(t, p: Params) -> complex:
    k, m1 = p.kappa, complex(p.m1)
    t = complex(t)
    return sum((_lg((j - m1 - t) / k) - _lg((j + 1 - t) / k) for j in range(p.m2_int)), 0j)


def log_Y(mu, p: Params) -> complex:
    k, m1, l1, l2 = p.kappa, complex(p.m1), complex(p.l1), int(p.l2)
    mu = complex(mu)
    w = 1 - cmath.exp(mu)
    if w.imag == 0 and w.real <= 0:
        raise ValueError("1 - e^mu on the cut")
    return mu * l2 * (l2 - 2 * m1 - 1) / (2 * k) + (l1 + 1) * l2 / k * cmath.log(w)


def log_kfactorial(n: int, k: float) -> complex:
    """log [n]! with [j] = sin_k(j)/sin_k(1)."""
    return sum((_lsin_k(j, k) - _lsin_k(1, k) for j in range(1, n + 1)), 0j)


def factors(p: Params, b: int, literal: bool = False) -> ConnectionFactors:
    """Log factors of the identity for column b.

    The C_b denominator uses k-factorials [l2-b]! [b]!, which is what the full
    symmetrization of the trigonometric weight produces; ``literal=True``
    gives the ordinary factorials (l2-b)! b! instead.  The two agree for
    l2 - b <= 1 and b <= 1.
    """
    k = p.kappa
    m1, l1 = complex(p.m1), complex(p.l1)
    m2, l2 = p.m2_int, int(p.l2)
    if not 0 <= b <= min(m2, l2):
        raise ValueError(f"b={b} is not admissible")
    lc = -l2 * complex(math.log(2 * math.pi), math.pi / 2) - math.lgamma(l2 + 1)
    if literal:
        lc -= math.lgamma(l2 - b + 1) + math.lgamma(b + 1)
    else:
        lc -= log_kfactorial(l2 - b, k) + log_kfactorial(b, k)
    lc += sum((_lsin_k(m1 - j, k) for j in range(l2 - b)), 0j)
    lc += sum((_lsin_k(m2 - j, k) for j in range(b)), 0j)
    lc += sum((_lg(1 + 1 / k) + _lg(1 + (m1 - j) / k) - _lg(1 + (j + 1) / k) for j in range(l2)), 0j)
    ld = -m2 * complex(math.log(2), math.pi / 2)
    ld -= sum((_lsin_k(j + 1, k) for j in range(m2 - b)), 0j)
    ld -= sum((_lsin_k(j + 1, k) for j in range(b)), 0j)
    ld += sum((_lg(1 + (l1 - j) / k) - _lg(-1 / k) - _lg(1 + (j + 1) / k) for j in range(m2)), 0j)
    le = 1j * math.pi * (b * b - (b - l2) * (l1 + l2) - l2 * (l2 - 1) / 2) / k
    return ConnectionFactors(lc, ld, le, log_X(p.z, p), log_Y(p.mu, p))


def G_factor(t, p: Params) -> complex:
    t = complex(t)
    m1 = complex(p.m1)
    out = 1 + 0j
    for j in range(p.m2_int):
        if t + j + 1 == 0:
            raise PoleError(f"G has a pole at t={t}")
        out *= (t + j - m1) / (t + j + 1)
    return out


def check_S_equation(p: Params, t) -> float:
    """|S(t + kappa)/S(t) - G(t)| / |G(t)| with S(t) = X(-t)."""
    t = complex(t)
    g = G_factor(t, p)
    ratio = cmath.exp(log_X(-t - p.kappa, p) - log_X(-t, p))
    return abs(ratio - g) / abs(g)


def gauss_reduction(p: Params) -> dict:
    """The l2 = m2 = 1, a = b = 0 reduction to a Gauss function.

    With alpha = -m1/k, beta = -(z + m1)/k, gamma = (1 - z - m1)/k one has
    I_00 = -2i e^{(mu - pi i) alpha} Gamma(alpha) Gamma(beta)/Gamma(gamma) 2F1(alpha, beta; gamma; e^mu).
    Returns the parameters and the predicted I_00.
    """
    from .special import hyp2f1

    if p.m2_int != 1 or int(p.l2) != 1:
        raise ValueError("the Gauss reduction needs m2 = l2 = 1")
    k, z, m1, mu = p.kappa, complex(p.z), complex(p.m1), complex(p.mu)
    al, be, ga = -m1 / k, -(z + m1) / k, (1 - z - m1) / k
    x = cmath.exp(mu)
    f = hyp2f1(al, be, ga, x)
    mb = cmath.exp(_lg(al) + _lg(be) - _lg(ga)) * f
    pref = -2j * cmath.exp((mu - 1j * math.pi) * al)
    return {"alpha": al, "beta": be, "gamma": ga, "mellin_barnes": mb, "I00": pref * mb,
            "prefactor": pref}


def _rel(x, y) -> float:
    d = max(abs(x), abs(y))
    return 0.0 if d == 0 else abs(x - y) / d


def verify_theorem1(p: Params, cfg: QuadConfig | None = None, cfg_J: QuadConfig | None = None,
                    r0: float = 20.0) -> dict:
    """Residual matrix of C_b I_ab = D_b E_b X Y J_ab over all admissible pairs."""
    t0 = time.time()
    cfg = cfg or QuadConfig(rel_tol=1e-8)
    cfg_J = cfg_J or cfg
    flags = region_flags(p, r0)
    if not 0 < complex(p.mu).imag < 2 * math.pi:
        raise ValueError("need 0 < Im mu < 2 pi")
    if not flags.j_side_ok:
        warnings.warn("Re z > -kappa*r0: outside the stated verification region", RuntimeWarning, stacklevel=2)
    if not flags.generic_kappa_ok:
        warnings.warn("kappa close to a non-generic value", RuntimeWarning, stacklevel=2)
    kdim = min(p.m2_int, int(p.l2))
    q = dual_params(p)
    Ir = I_matrix(p, cfg)
    Jr = J_matrix(q, cfg_J)
    res = np.zeros((kdim + 1, kdim + 1))
    lhs = np.zeros_like(res, dtype=complex)
    rhs = np.zeros_like(res, dtype=complex)
    facs = {}
    for b in range(kdim + 1):
        f = factors(p, b)
        facs[b] = f
        for a in range(kdim + 1):
            lhs[a, b] = cmath.exp(f.log_C_b) * Ir.value[a, b]
            rhs[a, b] = cmath.exp(f.log_D_b + f.log_E_b + f.log_X + f.log_Y) * Jr.value[a, b]
            res[a, b] = _rel(lhs[a, b], rhs[a, b])
    rel_err_I = np.abs(Ir.err_estimate) / np.maximum(np.abs(Ir.value), 1e-300)
    rel_err_J = np.abs(Jr.err_estimate) / np.maximum(np.abs(Jr.value), 1e-300)
    return {
        "params": p.as_dict(),
        "pairs": [[a, b] for a in range(kdim + 1) for b in range(kdim + 1)],
        "residuals": res.tolist(),
        "max_residual": float(res.max()),
        "I": Ir.value,
        "J": Jr.value,
        "lhs": lhs,
        "rhs": rhs,
        "factor_logs": {b: asdict(f) for b, f in facs.items()},
        "diagnostics": {
            "I_rel_err": rel_err_I.tolist(),
            "J_rel_err": rel_err_J.tolist(),
            "I_evals": Ir.n_evals,
            "J_evals": Jr.n_evals,
            "I_meta": getattr(Ir, "meta", {}),
            "warnings": list(Ir.warnings) + list(Jr.warnings),
            "region": asdict(flags),
        },
        "wall_time": time.time() - t0,
    }


def connection_matrix(p: Params, cfg: QuadConfig | None = None, I=None, J=None) -> dict:
    """Solve X J_{a,b} = sum_c I_{a,c} G_{b,c} for G.

    The expected matrix is diagonal with G_bb = C_b / (D_b E_b Y).
    """
    cfg = cfg or QuadConfig(rel_tol=1e-8)
    kdim = min(p.m2_int, int(p.l2))
    Iv = I_matrix(p, cfg).value if I is None else np.asarray(I)
    Jv = J_matrix(dual_params(p), cfg).value if J is None else np.asarray(J)
    X = cmath.exp(log_X(p.z, p))
    # rows and columns of I differ by exponential factors; equilibrate first
    r = 1 / np.max(np.abs(Iv), axis=1)
    Is = Iv * r[:, None]
    c = 1 / np.max(np.abs(Is), axis=0)
    Is = Is * c[None, :]
    cond = float(np.linalg.cond(Is))
    G = (c[:, None] * np.linalg.solve(Is, r[:, None] * X * Jv)).T
    expected = np.array([cmath.exp(factors(p, b).log_C_b - factors(p, b).log_D_b - factors(p, b).log_E_b
                                   - log_Y(p.mu, p)) for b in range(kdim + 1)])
    norm = np.max(np.abs(G))
    off = G - np.diag(np.diag(G))
    return {
        "G": G,
        "expected_diagonal": expected,
        "condition_number": cond,  # after equilibration
        "offdiag_rel": float(np.max(np.abs(off)) / norm) if norm > 0 else 0.0,
        "diag_rel": [_rel(G[b, b], expected[b]) for b in range(kdim + 1)],
    }


# ---------------------------------------------------------------------------
# reports


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def report_json(report: dict, path=None, drop_time: bool = False) -> str:
    rep = dict(report)
    if drop_time:
        rep.pop("wall_time", None)
    text = json.dumps(_jsonable(rep), indent=1, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def report_csv(report: dict, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["a", "b", "residual", "lhs_re", "lhs_im", "rhs_re", "rhs_im"])
    res = np.asarray(report["residuals"])
    for a, b in report["pairs"]:
        L, R = complex(report["lhs"][a][b]), complex(report["rhs"][a][b])
        w.writerow([a, b, f"{res[a][b]:.3e}", L.real, L.imag, R.real, R.imag])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
