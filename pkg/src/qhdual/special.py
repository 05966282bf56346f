"""Complex special functions and path-continuous branch tracking.

Notation used throughout the package:

    Gamma_k(x) = Gamma(x / kappa)
    sin_k(x)   = sin(pi x / kappa)
    exp_k(x)   = exp(pi i x / kappa)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as _sp

__all__ = [
    "PoleError",
    "BranchStepError",
    "AnchorError",
    "log_gamma",
    "log_gamma_array",
    "gamma_ratio",
    "log_gamma_ratio",
    "hyp2f1",
    "sinpi",
    "cospi",
    "log_sinpi",
    "sinpi_scaled",
    "BranchState",
    "branch_advance",
    "init_branch",
    "arg_in",
]


class PoleError(ArithmeticError):
    """A gamma argument hit (or came too close to) a pole."""


class BranchStepError(ArithmeticError):
    """A continuation step changed some factor by too large an angle."""


class AnchorError(ValueError):
    """The proposed branch anchor lies on a cut of the stated convention."""


# ---------------------------------------------------------------------------
# log-gamma


def _is_pole(w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    return (w.imag == 0) & (w.real <= 0) & (w.real == np.round(w.real))


def log_gamma_array(w) -> np.ndarray:
    """Principal log Gamma, vectorized. Poles raise :class:`PoleError`."""
    w = np.asarray(w, dtype=complex)
    bad = _is_pole(w)
    if np.any(bad):
        raise PoleError(f"log_gamma pole at w={w[bad].ravel()[0]}")
    return _sp.loggamma(w)


def log_gamma(w: complex) -> complex:
    """Principal branch of log Gamma(w)."""
    return complex(log_gamma_array(complex(w)))


def log_gamma_ratio(nums, dens) -> complex:
    tot = 0j
    for w in nums:
        tot += log_gamma(w)
    for w in dens:
        tot -= log_gamma(w)
    return tot


def gamma_ratio(nums, dens) -> complex:
    """prod Gamma(nums) / prod Gamma(dens), accumulated in log space."""
    try:
        return cmath.exp(log_gamma_ratio(nums, dens))
    except PoleError as exc:
        raise PoleError(f"gamma_ratio: {exc} (nums={list(nums)}, dens={list(dens)})") from None


# ---------------------------------------------------------------------------
# Gauss 2F1 by its power series (|x| < 1 only)


def hyp2f1(alpha: complex, beta: complex, gamma: complex, x: complex, rtol: float = 1e-13) -> complex:
    x = complex(x)
    if abs(x) >= 1:
        raise ValueError(f"hyp2f1 series diverges for |x|={abs(x)} >= 1")
    if complex(gamma).imag == 0 and complex(gamma).real <= 0 and float(complex(gamma).real).is_integer():
        raise PoleError(f"hyp2f1: gamma={gamma} is a nonpositive integer")
    term = 1 + 0j
    total = 1 + 0j
    k = 0
    quiet = 0
    kmax = 200000
    while k < kmax:
        term *= (alpha + k) * (beta + k) / ((gamma + k) * (k + 1)) * x
        total += term
        k += 1
        # the ratio test turns monotone once k exceeds the parameter sizes
        if abs(term) <= rtol * abs(total) * (1 - abs(x)) and k > abs(alpha) + abs(beta):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise ArithmeticError("hyp2f1: series did not converge")


# ---------------------------------------------------------------------------
# sin(pi w) with exact zeros at integers


def _sinpi_real(x: np.ndarray) -> np.ndarray:
    r = x - 2.0 * np.round(x / 2.0)  # r in [-1, 1], sin(pi x) = sin(pi r)
    r = np.where(r > 0.5, 1.0 - r, np.where(r < -0.5, -1.0 - r, r))
    return np.sin(np.pi * r)


def _cospi_real(x: np.ndarray) -> np.ndarray:
    r = np.abs(x - 2.0 * np.round(x / 2.0))  # cos(pi x) = cos(pi r), r in [0, 1]
    return np.where(r <= 0.5, np.sin(np.pi * (0.5 - r)), -np.sin(np.pi * (r - 0.5)))


def sinpi(w):
    """sin(pi w); exactly zero at integer w."""
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    out = _sinpi_real(x) * np.cosh(np.pi * y) + 1j * _cospi_real(x) * np.sinh(np.pi * y)
    return out if out.ndim else complex(out)


def cospi(w):
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    out = _cospi_real(x) * np.cosh(np.pi * y) - 1j * _sinpi_real(x) * np.sinh(np.pi * y)
    return out if out.ndim else complex(out)


def sinpi_scaled(w):
    """Return ``(s, c)`` with sin(pi w) = s * exp(c) and |s| <= 1; no overflow."""
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    ay = np.abs(y)
    e = np.exp(-2 * np.pi * ay)
    ch = 0.5 * (1.0 + e)
    sh = 0.5 * np.sign(y) * (1.0 - e)
    s = _sinpi_real(x) * ch + 1j * _cospi_real(x) * sh
    return s, np.pi * ay


def log_sinpi(w):
    s, c = sinpi_scaled(w)
    return np.log(s) + c


# ---------------------------------------------------------------------------
# branch tracking


def arg_in(value: complex, convention: str) -> float:
    """Argument of ``value`` in one of the interval conventions.

    ``"[0,2pi)"``, ``"(0,2pi)"`` or ``"(-pi,pi)"``.
    """
    value = complex(value)
    if value == 0:
        raise AnchorError("zero factor at anchor")
    a = cmath.phase(value)
    if convention == "(-pi,pi)":
        if value.imag == 0 and value.real < 0:
            raise AnchorError(f"{value} lies on the cut of (-pi, pi)")
        return a
    a = a % (2 * math.pi)
    if convention == "[0,2pi)":
        return a
    if convention == "(0,2pi)":
        if a == 0.0:
            raise AnchorError(f"{value} lies on the cut of (0, 2pi)")
        return a
    raise ValueError(f"unknown convention {convention!r}")


@dataclass
class BranchState:
    """Continuous logarithms of named factors along a traversed path.

    ``ids`` names the factors, ``logs[k]`` is the tracked log of factor ``k``,
    ``values[k]`` its current value (kept so each step uses the same
    arithmetic that produced the value), ``point`` the current path point and
    ``param`` an optional path parameter.
    """

    ids: list
    logs: list
    values: list
    point: object = None
    param: float = 0.0
    max_step: float = field(default=math.pi / 2)

    def log_of(self, fid) -> complex:
        return self.logs[self.ids.index(fid)]

    def offsets(self) -> list:
        """Current log minus principal log, per factor (multiples of 2 pi i)."""
        return [lg - cmath.log(v) for lg, v in zip(self.logs, self.values)]


def branch_advance(state: BranchState, next_point, factor_values, param: float | None = None) -> BranchState:
    """Advance every tracked log by the principal increment to ``factor_values``."""
    if len(factor_values) != len(state.ids):
        raise ValueError("factor_values does not match the tracked factor list")
    logs, vals = [], []
    for lg, old, new in zip(state.logs, state.values, factor_values):
        new = complex(new)
        if new == 0:
            raise BranchStepError("factor vanished on the path")
        step = cmath.log(new / old)
        if abs(step.imag) > state.max_step:
            raise BranchStepError(f"argument step {step.imag:.3g} exceeds {state.max_step:.3g}; refine the path")
        logs.append(lg + step)
        vals.append(new)
    return BranchState(list(state.ids), logs, vals, next_point,
                       state.param if param is None else param, state.max_step)


def init_branch(base_point, p, side: str = "J") -> BranchState:
    """Logs of the master-function factors at an anchor.

    J side: ``p`` is the J-side parameter tuple (its ``z`` is the z-slot) and
    ``base_point`` the anchor tuple ``t``. Conventions: arg t_u in [0, 2pi),
    arg(1 - t_u) in (-pi, pi), arg(z - t_u) in (0, 2pi), arg(t_u - t_v) in
    [0, 2pi) for u < v.

    I side: the integrand is single valued; the state tracks ``t_u`` with
    principal arguments, the anchor being the point of the Barnes line on the
    real axis.
    """
    t = np.atleast_1d(np.asarray(base_point, dtype=complex))
    ids, logs, vals = [], [], []

    def add(fid, v, conv):
        a = arg_in(v, conv)
        ids.append(fid)
        logs.append(complex(math.log(abs(v)), a))
        vals.append(complex(v))

    if side.upper().startswith("J"):
        z = complex(p.z)
        for u, tu in enumerate(t):
            add(("t", u), tu, "[0,2pi)")
            add(("1-t", u), 1 - tu, "(-pi,pi)")
            add(("z-t", u), z - tu, "(0,2pi)")
        for u in range(len(t)):
            for v in range(u + 1, len(t)):
                add(("t-t", u, v), t[u] - t[v], "[0,2pi)")
    elif side.upper().startswith("I"):
        for u, tu in enumerate(t):
            if tu.imag != 0 or tu.real <= 0:
                raise AnchorError("I-side anchor must be real positive")
            add(("t", u), tu, "(-pi,pi)")
    else:
        raise ValueError(f"unknown side {side!r}")
    return BranchState(ids, logs, vals, t.copy(), 0.0)
