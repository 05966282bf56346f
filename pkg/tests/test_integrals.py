import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhdual.integrals import (
    I_ab,
    I_asymptotic,
    I_matrix,
    J_ab,
    J_matrix,
    mu_from_z,
    selberg_A,
    selberg_A_quad,
    selberg_B,
    selberg_B_quad,
)
from qhdual.params import dual_params, make_params
from qhdual.quad import QuadConfig

CFG = QuadConfig(rel_tol=1e-9)

GAUSS = [
    (-0.6, 1.0, -1.1 + 0.3j, -1 + 1.5j),
    (-0.4 + 0.1j, 1.37, -0.8 - 0.2j, -0.7 + 2.0j),
    (-1.2, 0.8, -0.5 + 0.6j, -0.3 + 1.0j),
]


def _gauss_oracle(m1, k, z, mu):
    """-2i e^{(mu - pi i) a} Gamma(a) Gamma(b)/Gamma(c) 2F1(a, b; c; e^mu), all in mpmath."""
    a, b, c = -m1 / k, -(z + m1) / k, (1 - z - m1) / k
    a, b, c, mu = mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(c), mpmath.mpc(mu)
    val = -2j * mpmath.exp((mu - 1j * mpmath.pi) * a) * mpmath.gamma(a) * mpmath.gamma(b) / mpmath.gamma(c)
    return complex(val * mpmath.hyp2f1(a, b, c, mpmath.exp(mu)))


@pytest.mark.parametrize("m1,k,z,mu", GAUSS)
def test_one_dimensional_integral_is_gauss_function(m1, k, z, mu):
    p = make_params(m1, 1, 1, k, z, mu)
    got = I_ab(p, 0, 0, CFG).value
    assert got == pytest.approx(_gauss_oracle(m1, k, z, mu), rel=1e-8)


def test_empty_integrals_are_one():
    p = make_params(-0.6 + 0.2j, 0, 0, 1.37, -30 + 0.4j, -0.8 + 1.3j)
    assert I_matrix(p).value[0, 0] == 1
    assert J_matrix(dual_params(p)).value[0, 0] == 1


def test_line_position_is_immaterial():
    p = make_params(-0.6 + 0.2j, 1, 1, 1.37, -3.2 + 0.4j, -0.8 + 1.3j)
    a = I_matrix(p, CFG, eps=0.35).value
    b = I_matrix(p, CFG, eps=1.9).value
    np.testing.assert_allclose(a, b, rtol=1e-8)


def test_I_requires_mu_strip():
    p = make_params(-0.6 + 0.2j, 1, 1, 1.37, -3.2 + 0.4j, -0.8 - 1.3j)
    with pytest.raises(ValueError):
        I_matrix(p)


def test_J_single_entry_matches_matrix():
    p = make_params(-0.6 + 0.2j, 1, 1, 1.37, -30 + 0.4j, -0.8 + 1.3j)
    q = dual_params(p)
    M = J_matrix(q, CFG).value
    assert J_ab(q, 1, 0, CFG).value == pytest.approx(M[1, 0], rel=1e-8)


SEL_A = [(-0.7 + 0.3j, -0.5 + 1.9j, 1.37), (-1.6 - 0.2j, 0.3 + 4.0j, 2.3), (-0.4, -1 + 2.5j, 0.8)]


@pytest.mark.parametrize("l", [1, 2])
@pytest.mark.parametrize("m,mu,k", SEL_A)
def test_selberg_A_closed_form(l, m, mu, k):
    q = selberg_A_quad(l, m, mu, k, CFG).value
    assert q == pytest.approx(selberg_A(l, m, mu, k).value, rel=1e-7)


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("l,k", [(0.7 + 0.4j, 1.37), (-1.3 + 0.2j, 2.3), (2.4, 0.8)])
def test_selberg_B_closed_form(m, l, k):
    q = selberg_B_quad(m, l, k, CFG).value
    assert q == pytest.approx(selberg_B(m, l, k).value, rel=1e-7)


def test_selberg_A1_against_mpmath():
    m, mu, k = -0.7 + 0.3j, -0.5 + 1.9j, 1.37
    x0 = -m.real / (2 * k)
    f = lambda y: (mpmath.exp((mu - 1j * mpmath.pi) * (x0 + 1j * y))
                   * mpmath.gamma(x0 + 1j * y) * mpmath.gamma(-(x0 + 1j * y) - m / k) * 1j)
    ref = complex(mpmath.quad(f, [-mpmath.inf, 0, mpmath.inf]))
    assert selberg_A(1, m, mu, k).value == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("l", [0])
def test_selberg_trivial(l):
    assert selberg_A(l, -0.5, 1j, 1.3).value == pytest.approx(1)
    assert selberg_B(l, 0.5, 1.3).value == pytest.approx(1)


@pytest.mark.parametrize("k", [1.37, 1.8, 2.6])
def test_asymptotic_kfactorial_vs_literal(k):
    p = make_params(-0.6 + 0.2j, 2, 2, k, -40 + 0.3j, -0.8 + 1.3j)
    for b in (0, 2):
        r = I_asymptotic(p, b, b) / I_asymptotic(p, b, b, literal=True)
        assert r == pytest.approx(math.cos(math.pi / k), rel=1e-12)
    r = I_asymptotic(p, 1, 1) / I_asymptotic(p, 1, 1, literal=True)
    assert r == pytest.approx(1, rel=1e-12)


def test_asymptotic_offdiagonal_zero():
    p = make_params(-0.6 + 0.2j, 2, 2, 1.37, -40 + 0.3j, -0.8 + 1.3j)
    assert I_asymptotic(p, 0, 1) == 0


@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=0.01, max_value=2 * math.pi - 0.01))
def test_mu_from_z_roundtrip(x, y):
    mu = mu_from_z(cmath.exp(complex(x, y)))
    assert mu == pytest.approx(complex(x, y), abs=1e-12)
