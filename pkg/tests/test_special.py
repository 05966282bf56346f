import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from qhdual.special import (
    AnchorError,
    BranchState,
    BranchStepError,
    PoleError,
    arg_in,
    branch_advance,
    gamma_ratio,
    hyp2f1,
    init_branch,
    log_gamma,
    log_sinpi,
    sinpi,
    sinpi_scaled,
)

cplx = st.complex_numbers(max_magnitude=40, allow_nan=False, allow_infinity=False)


@given(cplx)
def test_log_gamma_matches_mpmath(w):
    assume(min(abs(w - n) for n in range(-41, 1)) > 1e-3)
    ref = complex(mpmath.loggamma(mpmath.mpc(w)))
    assert abs(log_gamma(w) - ref) <= 1e-12 * max(1.0, abs(ref))


@pytest.mark.parametrize("w", [0, -1, -7, -30.0])
def test_log_gamma_poles(w):
    with pytest.raises(PoleError):
        log_gamma(w)


def test_gamma_ratio_large_arguments():
    # Gamma(200.5)/Gamma(200) overflows without log space
    ref = complex(mpmath.gamma(200.5) / mpmath.gamma(200))
    assert gamma_ratio([200.5], [200]) == pytest.approx(ref, rel=1e-12)


@given(cplx, cplx, st.complex_numbers(max_magnitude=0.9))
def test_hyp2f1_matches_mpmath(a, b, x):
    a, b = a / 10, b / 10
    c = complex(1.3, 0.2) + abs(a) + abs(b)
    ref = complex(mpmath.hyp2f1(a, b, c, x))
    assert hyp2f1(a, b, c, x) == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_hyp2f1_outside_disk():
    with pytest.raises(ValueError):
        hyp2f1(0.5, 0.5, 1.5, 1.2)


@pytest.mark.parametrize("n", range(-6, 7))
def test_sinpi_exact_zeros(n):
    assert sinpi(float(n)) == 0


@given(st.complex_numbers(max_magnitude=20))
def test_sinpi_and_scaled_agree(w):
    ref = complex(mpmath.sin(mpmath.pi * mpmath.mpc(w)))
    assert sinpi(w) == pytest.approx(ref, rel=1e-12, abs=1e-12)
    s, c = sinpi_scaled(w)
    assert abs(s) <= 1 + 1e-15
    if abs(ref) > 1e-8:
        assert complex(np.exp(log_sinpi(w))) == pytest.approx(ref, rel=1e-11)


def test_sinpi_scaled_no_overflow():
    s, c = sinpi_scaled(0.3 + 400j)
    assert np.isfinite(s) and c == pytest.approx(400 * math.pi)


@pytest.mark.parametrize(
    "value,conv,expected",
    [(-1j, "[0,2pi)", 1.5 * math.pi), (-1j, "(-pi,pi)", -0.5 * math.pi), (1j, "(0,2pi)", 0.5 * math.pi)],
)
def test_arg_conventions(value, conv, expected):
    assert arg_in(value, conv) == pytest.approx(expected)


@pytest.mark.parametrize("value,conv", [(-2.0, "(-pi,pi)"), (3.0, "(0,2pi)"), (0.0, "[0,2pi)")])
def test_arg_on_cut(value, conv):
    with pytest.raises(AnchorError):
        arg_in(value, conv)


def test_branch_winding_adds_two_pi_i():
    # continue log(t - c) once around c
    s = BranchState(["f"], [cmath.log(0.5)], [0.5 + 0j])
    for th in np.linspace(0, 2 * math.pi, 65)[1:]:
        s = branch_advance(s, None, [0.5 * cmath.exp(1j * th)])
    assert s.logs[0] - cmath.log(0.5) == pytest.approx(2j * math.pi)
    assert s.offsets()[0] == pytest.approx(2j * math.pi)


def test_init_branch_j_side_conventions():
    from qhdual.params import make_params

    q = make_params(0.4, 1, 1, 1.37, z=-2 - 1j)
    s = init_branch([1.5 - 0.5j], q, side="J")
    for v, lg in zip(s.values, s.logs):
        assert cmath.exp(lg) == pytest.approx(v)


def test_branch_step_guard():
    s = BranchState(["f"], [0j], [1 + 0j])
    with pytest.raises(BranchStepError):
        branch_advance(s, None, [-1 + 0.01j])
