import cmath
import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhdual.contour import loop_around, vertical_line
from qhdual.quad import IntegralResult, QuadConfig, QuadratureWarning, integrate_path, integrate_product, kronrod_rule


@pytest.mark.parametrize("npts", [7, 15, 21, 31])
def test_kronrod_exactness(npts):
    x, wk, wg = kronrod_rule(npts)
    n = (npts - 1) // 2
    for deg in range(0, 3 * n + 2):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert np.dot(wk, x**deg) == pytest.approx(exact, abs=1e-13)
    for deg in range(0, 2 * n):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert np.dot(wg, x**deg) == pytest.approx(exact, abs=1e-13)


def test_kronrod_21_matches_reference():
    x, wk, _ = kronrod_rule(21)
    # the centre weight of the 21-point Kronrod rule
    assert wk[np.argmin(np.abs(x))] == pytest.approx(0.149445554002916905664936468389821, abs=1e-15)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(rel_tol=0)
    with pytest.raises(ValueError):
        QuadConfig(nodes_per_panel=20)
    with pytest.raises(ValueError):
        IntegralResult(0, -1.0)


@given(st.floats(min_value=-2, max_value=2), st.floats(min_value=0.3, max_value=3))
def test_gaussian_on_vertical_line(a, s):
    # int exp(s t^2 + a t) dt along Re t = 0 upward = i sqrt(pi/s) exp(-a^2/(4s))
    line = vertical_line(0.0, 12.0 / math.sqrt(s) + abs(a), 12.0 / math.sqrt(s) + abs(a))
    r = integrate_path(lambda S, SEG, TAU: np.exp(s * S**2 + a * S), line, QuadConfig(rel_tol=1e-12))
    exact = 1j * math.sqrt(math.pi / s) * cmath.exp(-a * a / (4 * s))
    assert r.value == pytest.approx(exact, rel=1e-10)
    assert r.err_estimate >= 0


def test_loop_residue():
    # for a single-valued decaying f the keyhole legs cancel up to the far gap
    lp = loop_around(0.5 + 0j, 1.0, 0.3, 40.0)
    r = integrate_path(lambda S, SEG, TAU: np.exp(-S) / (S - 0.5), lp, QuadConfig(rel_tol=1e-12))
    assert r.value == pytest.approx(2j * math.pi * math.exp(-0.5), rel=1e-10)


def test_product_integral_separable():
    line = vertical_line(0.0, 10.0, 10.0)
    f = lambda S, SEG, TAU: np.exp(S[0] ** 2 + 2 * S[1] ** 2 + 0.3 * S[0] * S[1] / 10)
    r = integrate_product(f, [line, line], QuadConfig(rel_tol=1e-10))
    ref = mpmath.quad(lambda u, v: mpmath.exp(-(u**2) - 2 * v**2 - 0.03 * u * v), [-10, 10], [-10, 10])
    assert r.value == pytest.approx(-complex(ref), rel=1e-8)


def test_vector_valued():
    line = vertical_line(0.0, 10.0, 10.0)
    f = lambda S, SEG, TAU: np.stack([np.exp(S**2), 2 * np.exp(S**2)])
    r = integrate_path(f, line, QuadConfig(rel_tol=1e-12))
    assert r.value.shape == (2,)
    assert r.value[1] == pytest.approx(2 * r.value[0], rel=1e-13)


def test_unreachable_tolerance_warns():
    line = vertical_line(0.0, 5.0, 5.0)
    cfg = QuadConfig(rel_tol=1e-14, max_subdivisions=2)
    with pytest.warns(QuadratureWarning):
        r = integrate_path(lambda S, SEG, TAU: np.abs(S.imag) ** 0.5 + 0j, line, cfg)
    assert r.warnings
