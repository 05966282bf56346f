"""Parameter tuple (m1, m2, l1, l2), kappa, z, mu and region predicates.

``l1`` is never stored independently: it is derived as ``m1 + m2 - l2`` so
the balance condition holds exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "Params",
    "AdmissiblePair",
    "RegionFlags",
    "make_params",
    "admissible_pairs",
    "dual_params",
    "region_flags",
    "DEFAULT_R0",
    "LATTICE_TOL",
]

DEFAULT_R0 = 20.0
LATTICE_TOL = 1e-3


@dataclass(frozen=True)
class Params:
    """Concrete parameter point.

    ``m2`` and ``l2`` are nonnegative integers for every public entry point.
    Internally ``m2`` may be a complex number when an integral is continued in
    ``m2`` (used to resolve coalescing pole pairs); :func:`make_params` is the
    validating constructor.
    """

    m1: complex
    m2: complex
    l2: int
    kappa: float
    z: complex
    mu: complex

    @property
    def l1(self) -> complex:
        return self.m1 + self.m2 - self.l2

    @property
    def m2_int(self) -> int:
        m = complex(self.m2)
        if m.imag != 0 or m.real != round(m.real) or m.real < 0:
            raise ValueError(f"m2={self.m2} is not a nonnegative integer")
        return int(round(m.real))

    def with_(self, **kw) -> "Params":
        d = dict(m1=self.m1, m2=self.m2, l2=self.l2, kappa=self.kappa, z=self.z, mu=self.mu)
        d.update(kw)
        return Params(**d)

    def as_dict(self) -> dict:
        def c(x):
            x = complex(x)
            return [x.real, x.imag]

        m2 = complex(self.m2)
        return {
            "m1": c(self.m1),
            "m2": int(m2.real) if m2.imag == 0 and m2.real.is_integer() else c(m2),
            "l1": c(self.l1),
            "l2": int(self.l2),
            "kappa": float(self.kappa),
            "z": c(self.z),
            "mu": c(self.mu),
        }


@dataclass(frozen=True)
class AdmissiblePair:
    a: int
    b: int


@dataclass(frozen=True)
class RegionFlags:
    i_side_ok: bool
    j_side_ok: bool
    generic_kappa_ok: bool


def make_params(m1, m2, l2, kappa, z=0.0, mu=0.0) -> Params:
    if not (isinstance(m2, (int,)) or float(m2).is_integer()) or int(m2) < 0:
        raise ValueError(f"m2 must be a nonnegative integer, got {m2!r}")
    if not (isinstance(l2, (int,)) or float(l2).is_integer()) or int(l2) < 0:
        raise ValueError(f"l2 must be a nonnegative integer, got {l2!r}")
    kappa = float(kappa)
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return Params(complex(m1), int(m2), int(l2), kappa, complex(z), complex(mu))


def admissible_pairs(p: Params) -> list[AdmissiblePair]:
    k = min(p.m2_int, int(p.l2))
    return [AdmissiblePair(a, b) for a in range(k + 1) for b in range(k + 1)]


def dual_params(p: Params) -> Params:
    """Parameters of the J side: (l1, l2, m1, m2) with z-slot e^mu and mu-slot z."""
    return Params(complex(p.l1), int(p.l2), p.m2_int, p.kappa, cmath.exp(p.mu), complex(p.z))


def _dist_to_int(w: complex) -> float:
    w = complex(w)
    return abs(w - round(w.real))


def generic_kappa(p: Params, tol: float = LATTICE_TOL) -> bool:
    k = p.kappa
    if _dist_to_int(k) < tol or _dist_to_int(1.0 / k) < tol:
        return False
    span = int(round(complex(p.m2).real)) + int(p.l2)
    return all(_dist_to_int((p.m1 + j) / k) >= tol for j in range(-span, span + 1))


def region_flags(p: Params, r0: float = DEFAULT_R0, lattice_tol: float = LATTICE_TOL) -> RegionFlags:
    """Region predicates for the I side (``p``) and the J side (``dual_params(p)``)."""
    i_ok = 0.0 < complex(p.mu).imag < 2 * math.pi
    zs = cmath.exp(p.mu)  # z-slot of the dual tuple
    arg = cmath.phase(zs) % (2 * math.pi)
    j_ok = abs(zs) > 0 and 0.0 < arg < 2 * math.pi and complex(p.z).real <= -p.kappa * r0
    return RegionFlags(bool(i_ok), bool(j_ok), generic_kappa(p, lattice_tol))
