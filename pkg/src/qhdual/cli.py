"""Command-line harness: ``qhdual verify | eval | dump-contour``.

Config files are flat ``key = value`` text; ``#`` starts a comment.  Keys are
the long flag names with or without dashes (``rel-tol`` or ``rel_tol``).
Command-line flags override file values.

Exit status: 0 when every case is within its threshold, 1 when some case
fails, 2 on configuration errors (no report is written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .contour import barnes_contour, contour_to_json, loops_B, loops_J
from .duality import _jsonable, check_S_equation, gauss_reduction, verify_theorem1
from .glrep import (
    Module,
    R_defining_residual,
    R_nullity,
    check_commutation,
    check_intertwining,
    check_solution,
    duality_pair,
    gl2_action,
    random_point,
    subspace,
)
from .integrand import phi_q, w_rat, w_trig, xi_pP
from .integrals import (
    I_asymptotic,
    I_matrix,
    J_asymptotic,
    J_matrix,
    selberg_A,
    selberg_A_quad,
    selberg_B,
    selberg_B_quad,
)
from .params import Params, dual_params, make_params
from .quad import QuadConfig

__all__ = ["ConfigError", "RunConfig", "SUITES", "load_config", "run", "run_suite", "main"]

SUITES = ("theorem1", "example2f1", "selberg", "asymptotics", "operators", "solutions")
FORMATS = ("json", "csv")

# defaults sit inside the verification region of the I = J identity
DEFAULTS = {
    "suite": "all",
    "m1": -0.6 + 0.2j,
    "m2": None,
    "l2": None,
    "kappa": 1.37,
    "z": -30 + 0.4j,
    "mu": -0.8 + 1.3j,
    "a": None,
    "b": None,
    "rel_tol": 1e-8,
    "seed": 0,
    "out": None,
    "format": "json",
}
PARAM_KEYS = ("m1", "m2", "l2", "kappa", "z", "mu")


class ConfigError(ValueError):
    pass


def _complex(s) -> complex:
    if isinstance(s, (int, float, complex)):
        return complex(s)
    txt = str(s).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(txt)
    except ValueError:
        raise ConfigError(f"not a complex number: {s!r}") from None


def _int(s) -> int:
    try:
        v = float(s)
    except (TypeError, ValueError):
        raise ConfigError(f"not an integer: {s!r}") from None
    if not v.is_integer():
        raise ConfigError(f"not an integer: {s!r}")
    return int(v)


def _float(s) -> float:
    try:
        return float(s)
    except (TypeError, ValueError):
        raise ConfigError(f"not a number: {s!r}") from None


PARSERS = {
    "suite": str,
    "m1": _complex,
    "m2": _int,
    "l2": _int,
    "kappa": _float,
    "z": _complex,
    "mu": _complex,
    "a": _int,
    "b": _int,
    "rel_tol": _float,
    "seed": _int,
    "out": str,
    "format": str,
}


@dataclass
class RunConfig:
    suite: str = "all"
    m1: complex = DEFAULTS["m1"]
    m2: int | None = None
    l2: int | None = None
    kappa: float = DEFAULTS["kappa"]
    z: complex = DEFAULTS["z"]
    mu: complex = DEFAULTS["mu"]
    a: int | None = None
    b: int | None = None
    rel_tol: float = DEFAULTS["rel_tol"]
    seed: int = 0
    out: str | None = None
    format: str = "json"
    explicit: set = field(default_factory=set)

    def validate(self) -> "RunConfig":
        if self.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ConfigError("kappa must be positive")
        if not 0 < self.rel_tol < 1:
            raise ConfigError("rel-tol must lie in (0, 1)")
        for key in ("m2", "l2", "a", "b"):
            v = getattr(self, key)
            if v is not None and v < 0:
                raise ConfigError(f"{key} must be nonnegative")
        return self

    @property
    def quad(self) -> QuadConfig:
        return QuadConfig(rel_tol=self.rel_tol)

    def params(self, m2: int | None = None, l2: int | None = None, **kw) -> Params:
        m2 = self.m2 if m2 is None else m2
        l2 = self.l2 if l2 is None else l2
        d = dict(m1=self.m1, m2=1 if m2 is None else m2, l2=1 if l2 is None else l2,
                 kappa=self.kappa, z=self.z, mu=self.mu)
        d.update(kw)
        return make_params(**d)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in DEFAULTS if k != "out"}


def parse_config_text(text: str) -> dict:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in PARSERS:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if not val:
            raise ConfigError(f"line {n}: empty value for {key!r}")
        out[key] = PARSERS[key](val)
    return out


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    values = {}
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from None
        values.update(parse_config_text(text))
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = PARSERS[k](v)
    cfg = RunConfig(**{k: values.get(k, DEFAULTS[k]) for k in DEFAULTS})
    cfg.explicit = set(values)
    return cfg.validate()


# ---------------------------------------------------------------------------
# suites; every case is {case, residual, threshold, passed, detail}


def _case(name: str, residual: float, threshold: float, **detail) -> dict:
    residual = float(residual)
    return {"case": name, "residual": residual, "threshold": float(threshold),
            "passed": bool(residual <= threshold), "detail": detail}


THEOREM1_CASES = ((0, 0), (1, 1), (1, 2), (2, 1), (2, 2))


def suite_theorem1(cfg: RunConfig) -> list:
    cases = THEOREM1_CASES
    if cfg.m2 is not None or cfg.l2 is not None:
        cases = ((cfg.params().m2_int, int(cfg.params().l2)),)
    out = []
    for m2, l2 in cases:
        p = cfg.params(m2, l2)
        rep = verify_theorem1(p, cfg.quad)
        res = np.asarray(rep["residuals"])
        pairs = rep["pairs"]
        if cfg.a is not None or cfg.b is not None:
            pairs = [[a, b] for a, b in pairs if cfg.a in (None, a) and cfg.b in (None, b)]
        bound = 1e-3 if l2 > 1 else 1e-5
        thr = min(10 * cfg.rel_tol, bound)
        for a, b in pairs:
            out.append(_case(f"theorem1 m2={m2} l2={l2} a={a} b={b}", res[a, b], thr,
                             lhs=rep["lhs"][a, b], rhs=rep["rhs"][a, b],
                             I_rel_err=rep["diagnostics"]["I_rel_err"][a][b],
                             J_rel_err=rep["diagnostics"]["J_rel_err"][a][b]))
    return out


# Re gamma > Re alpha > 0 and Re beta > 0 with alpha = -m1/k, beta = -(z+m1)/k
GAUSS_SETS = (
    dict(m1=-0.6, kappa=1.0, z=-1.1 + 0.3j, mu=-1 + 1.5j),
    dict(m1=-0.4 + 0.1j, kappa=1.37, z=-0.8 - 0.2j, mu=-0.7 + 2.0j),
    dict(m1=-1.2, kappa=0.8, z=-0.5 + 0.6j, mu=-0.3 + 1.0j),
)


def suite_example2f1(cfg: RunConfig) -> list:
    sets = GAUSS_SETS
    if cfg.explicit & {"m1", "kappa", "z", "mu"}:
        sets = (dict(m1=cfg.m1, kappa=cfg.kappa, z=cfg.z, mu=cfg.mu),)
    out = []
    for s in sets:
        p = make_params(m2=1, l2=1, **s)
        g = gauss_reduction(p)
        val = complex(I_matrix(p, cfg.quad, [0], [0]).value[0, 0])
        rel = abs(val - g["I00"]) / abs(g["I00"])
        out.append(_case(f"example2f1 m1={s['m1']} kappa={s['kappa']} z={s['z']} mu={s['mu']}",
                         rel, 1e-6, integral=val, closed_form=g["I00"]))
    return out


SELBERG_A = dict(m=-0.7 + 0.3j, mu=-0.5 + 1.9j, kappa=1.37)
SELBERG_B = dict(l=0.7 + 0.4j, kappa=1.37)


def suite_selberg(cfg: RunConfig) -> list:
    qc = QuadConfig(rel_tol=min(cfg.rel_tol, 1e-8))
    out = []
    for l, thr in ((1, 1e-6), (2, 1e-5)):
        q = selberg_A_quad(l, cfg=qc, **SELBERG_A).value
        c = selberg_A(l, **SELBERG_A).value
        out.append(_case(f"selberg A_{l}", abs(q - c) / abs(c), thr, quadrature=q, closed_form=c))
    for m in (1, 2):
        q = selberg_B_quad(m, cfg=qc, **SELBERG_B).value
        c = selberg_B(m, **SELBERG_B).value
        out.append(_case(f"selberg B_{m}", abs(q - c) / abs(c), 1e-5, quadrature=q, closed_form=c))
    return out


ASYMPTOTIC_CASES = ((1, 1), (2, 1), (1, 2), (2, 2))
ASYMPTOTIC_RE_Z = (-40.0, -80.0)


def asymptotic_deviations(p: Params, cfg: QuadConfig, side: str) -> np.ndarray:
    """|X_ab/X_as(b,b) - delta_ab| for X = I or J (off-diagonal normalized by the column's leading term)."""
    kd = min(p.m2_int, int(p.l2))
    if side == "I":
        M = I_matrix(p, cfg).value
        lead = [I_asymptotic(p, b, b) for b in range(kd + 1)]
    else:
        q = dual_params(p)
        M = J_matrix(q, cfg).value
        lead = [J_asymptotic(q, b, b) for b in range(kd + 1)]
    dev = np.zeros((kd + 1, kd + 1))
    for a in range(kd + 1):
        for b in range(kd + 1):
            dev[a, b] = abs(M[a, b] / lead[b] - (a == b))
    return dev


def suite_asymptotics(cfg: RunConfig) -> list:
    qc = QuadConfig(rel_tol=min(cfg.rel_tol, 1e-8))
    out = []
    for side in ("I", "J"):
        for m2, l2 in ASYMPTOTIC_CASES:
            devs = []
            for x in ASYMPTOTIC_RE_Z:
                p = cfg.params(m2, l2, z=complex(x, complex(cfg.z).imag))
                d = asymptotic_deviations(p, qc, side)
                devs.append(d)
                out.append(_case(f"asymptotic {side} m2={m2} l2={l2} Re z={x:g}", d.max(), 5 / abs(x),
                                 deviations=d))
            ratio = devs[1] / np.maximum(devs[0], 1e-300)
            out.append(_case(f"asymptotic {side} m2={m2} l2={l2} halving", ratio.max(), 0.5, ratios=ratio))
    return out


OPERATOR_PAIRS = ((1, 1), (2, 1), (1, 2), (2, 2))
OPERATOR_DRAWS = 20


def factorization_residual(rng: np.random.Generator, l: int, a: int, b: int, p: Params) -> float:
    t = rng.uniform(-2, 2, l) + 1j * rng.uniform(-2, 2, l)
    lhs = complex(np.ravel(phi_q(t, p) * w_rat(t, p, a) * w_trig(t, p, b))[0])
    rhs = complex(np.ravel(xi_pP(t, p, a, b))[0])
    return abs(lhs - rhs) / abs(lhs)


def suite_operators(cfg: RunConfig) -> list:
    rng = np.random.default_rng(cfg.seed)
    k = cfg.kappa
    m1 = complex(cfg.m1)
    out = []
    # gl2 commutation relations on a mixed three-site subspace
    mods = (Module(m1), Module(2, True), Module(1.3 - 0.2j))
    worst = 0.0
    for lev in range(4):
        W = subspace(mods, lev)
        # E21 raises the level, E12 lowers it
        comm = gl2_action("E12", W.shifted(1)) @ gl2_action("E21", W)
        if lev > 0:
            comm = comm - gl2_action("E21", W.shifted(-1)) @ gl2_action("E12", W)
        H = gl2_action("E11", W) - gl2_action("E22", W)
        worst = max(worst, np.max(np.abs(comm - H)) / max(1.0, np.max(np.abs(H))))
    out.append(_case("gl2 [E12,E21]=E11-E22", worst, 1e-13))
    # R-matrix
    t = complex(rng.uniform(-2, 2), rng.uniform(0.5, 2))
    V, L2 = Module(m1), Module(2, True)
    res = max(R_defining_residual(t, V, L2, lev) for lev in range(4))
    null = max(R_nullity(t, V, L2, lev) for lev in range(4))
    out.append(_case("R-matrix defining relations", res, 1e-12, t=t))
    out.append(_case("R-matrix uniqueness (nullity - 1)", null - 1, 0))
    # commuting families and intertwiners
    for m2, l2 in OPERATOR_PAIRS:
        src, _ = duality_pair(m1, m2, l2)
        w = {}
        for _ in range(OPERATOR_DRAWS):
            z, lam = random_point(rng)
            for pairing in ("Z_vs_Z", "Q_vs_Q", "nabla_vs_Q", "Z_vs_D"):
                w[pairing] = max(w.get(pairing, 0.0), check_commutation(pairing, z, lam, src, k))
            for which in ("qKZ_vs_Q", "D_vs_KZ"):
                w[which] = max(w.get(which, 0.0), check_intertwining(which, m1, m2, l2, z, lam, k))
        for name, val in w.items():
            out.append(_case(f"{name} m2={m2} l2={l2}", val, 1e-10))
    # S(t + kappa) = G(t) S(t) with S(t) = X(-t)
    for m2 in range(5):
        p = cfg.params(m2, 1)
        ts = rng.uniform(-3, 3, 100) + 1j * rng.uniform(-3, 3, 100)
        out.append(_case(f"S-equation m2={m2}", max(check_S_equation(p, t) for t in ts), 1e-12))
    # two factorizations of the I-side integrand
    for l in range(1, 4):
        p = cfg.params(l, l, z=complex(-1.3, 0.4))
        for a in range(l + 1):
            for b in range(l + 1):
                r = max(factorization_residual(rng, l, a, b, p) for _ in range(100))
                out.append(_case(f"factorization l={l} a={a} b={b}", r, 1e-10))
    return out


def suite_solutions(cfg: RunConfig) -> list:
    qc = QuadConfig(rel_tol=min(cfg.rel_tol, 1e-10))
    out = []
    for m2, l2 in ((1, 1), (2, 1)):
        p = cfg.params(m2, l2)
        for side in ("qKZ", "dynDE"):
            for b in range(min(m2, l2) + 1):
                r = check_solution(side, p, b, qc)
                out.append(_case(f"{side} m2={m2} l2={l2} b={b}", r["max_residual"], 1e-3,
                                 residuals=r["residuals"], richardson_gap=r.get("richardson_gap")))
    for m2, l2 in ((1, 1), (1, 2)):
        p = cfg.params(m2, l2)
        for b in range(min(m2, l2) + 1):
            r = check_solution("KZ", p, b, qc)
            out.append(_case(f"KZ m2={m2} l2={l2} b={b}", r["max_residual"], 1e-3,
                             residuals=r["residuals"], dyn_residuals=r["dyn_residuals"],
                             richardson_gap=r.get("richardson_gap")))
    return out


SUITE_FUNCS = {
    "theorem1": suite_theorem1,
    "example2f1": suite_example2f1,
    "selberg": suite_selberg,
    "asymptotics": suite_asymptotics,
    "operators": suite_operators,
    "solutions": suite_solutions,
}


def run_suite(name: str, cfg: RunConfig) -> tuple[list, list]:
    """Cases of one suite plus the distinct warning messages raised while running it."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cases = SUITE_FUNCS[name](cfg)
    msgs = sorted({f"{w.category.__name__}: {w.message}" for w in caught})
    for c in cases:
        c["suite"] = name
    return cases, msgs


def run(cfg: RunConfig) -> dict:
    t0 = time.time()
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    results, diag = [], {}
    for name in names:
        cases, msgs = run_suite(name, cfg)
        results += cases
        diag[name] = {"cases": len(cases), "failed": sum(not c["passed"] for c in cases), "warnings": msgs}
    return {
        "suite": cfg.suite,
        "params": cfg.as_dict(),
        "results": results,
        "residuals": {c["case"]: c["residual"] for c in results},
        "passed": all(c["passed"] for c in results),
        "diagnostics": diag,
        "wall_time": time.time() - t0,
    }


def report_text(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(report), indent=1, sort_keys=True)
    lines = ["suite,case,residual,threshold,passed"]
    for c in report["results"]:
        lines.append(f"{c['suite']},\"{c['case']}\",{c['residual']:.6e},{c['threshold']:.3e},{int(c['passed'])}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# eval and dump-contour


def evaluate(quantity: str, cfg: RunConfig) -> dict:
    p = cfg.params()
    a = 0 if cfg.a is None else cfg.a
    b = 0 if cfg.b is None else cfg.b
    kd = min(p.m2_int, int(p.l2))
    if not (a <= kd and b <= kd):
        raise ConfigError(f"(a, b) = ({a}, {b}) outside 0..{kd}")
    err = 0.0
    if quantity == "I":
        r = I_matrix(p, cfg.quad, [a], [b])
        val, err = r.value[0, 0], r.err_estimate[0, 0]
    elif quantity == "J":
        r = J_matrix(dual_params(p), cfg.quad, [a], [b])
        val, err = r.value[0, 0], r.err_estimate[0, 0]
    elif quantity == "I_asymptotic":
        val = I_asymptotic(p, a, b)
    elif quantity == "J_asymptotic":
        val = J_asymptotic(dual_params(p), a, b)
    else:
        raise ConfigError(f"unknown quantity {quantity!r}")
    return {"quantity": quantity, "params": p.as_dict(), "a": a, "b": b,
            "value": complex(val), "err_estimate": float(err)}


def dump_contour(which: str, cfg: RunConfig) -> str:
    p = cfg.params()
    if which == "barnes":
        con, rep = barnes_contour(p)
        return contour_to_json(con)
    if which == "loops_J":
        q = dual_params(p)
        b = 0 if cfg.b is None else cfg.b
        return contour_to_json(loops_J(q, b))
    if which == "loops_B":
        return contour_to_json(loops_B(p.m2_int, kappa=p.kappa, l=p.l1))
    raise ConfigError(f"unknown contour family {which!r}")


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qhdual", description="Barnes/hypergeometric integral duality checks")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key = value file; flags override it")
        for key in DEFAULTS:
            if key == "suite":
                continue
            sp.add_argument("--" + key.replace("_", "-"), dest=key, default=None)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite_pos", nargs="?", metavar="SUITE", help=" | ".join(SUITES + ("all",)))
    v.add_argument("--suite", dest="suite", default=None)
    common(v)
    e = sub.add_parser("eval", help="evaluate one integral entry")
    e.add_argument("quantity", choices=("I", "J", "I_asymptotic", "J_asymptotic"))
    common(e)
    d = sub.add_parser("dump-contour", help="write a contour as JSON")
    d.add_argument("which", choices=("barnes", "loops_J", "loops_B"))
    common(d)
    return ap


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    over = {k: getattr(ns, k, None) for k in DEFAULTS}
    if ns.command == "verify" and ns.suite_pos is not None:
        over["suite"] = over["suite"] or ns.suite_pos
    try:
        cfg = load_config(ns.config, over)
        if ns.command == "eval":
            text = json.dumps(_jsonable(evaluate(ns.quantity, cfg)), indent=1, sort_keys=True)
        elif ns.command == "dump-contour":
            text = dump_contour(ns.which, cfg)
        else:
            cfg.params()  # validate the parameter point before any work
            text = None
    except (ConfigError, ValueError) as e:
        print(f"qhdual: configuration error: {e}", file=sys.stderr)
        return 2
    if text is not None:
        _emit(text, cfg.out)
        return 0
    report = run(cfg)
    _emit(report_text(report, cfg.format), cfg.out)
    for c in report["results"]:
        if not c["passed"]:
            print(f"FAIL {c['case']}: {c['residual']:.3e} > {c['threshold']:.1e}", file=sys.stderr)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
