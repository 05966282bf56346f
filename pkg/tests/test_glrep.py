import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhdual.glrep import (
    B_series,
    Module,
    OperatorMatrix,
    R_defining_residual,
    R_nullity,
    R_on,
    ShiftedOperator,
    SingularParameterError,
    build_R,
    build_operator,
    check_commutation,
    check_intertwining,
    check_solution,
    duality_pair,
    F_index,
    gl2_action,
    phi_iso,
    r_matrix_on,
    random_point,
    subspace,
    word_matrix,
)
from qhdual.params import make_params

V = Module(-0.7 + 0.4j)
L2 = Module(2, True)
MODS = [(V,), (L2,), (V, L2), (V, L2, Module(1.3 - 0.2j)), (Module(1, True), Module(2, True))]
seeds = st.integers(min_value=0, max_value=2**32 - 1)


SPACES = [(m, lev) for m in MODS for lev in range(4) if subspace(m, lev).dim]


@pytest.mark.parametrize("mods,level", SPACES)
def test_E12_E21_commutator(mods, level):
    W = subspace(mods, level)
    up = gl2_action("E12", W.shifted(1)) @ gl2_action("E21", W)
    down = gl2_action("E21", W.shifted(-1)) @ gl2_action("E12", W) if level else 0
    H = gl2_action("E11", W) - gl2_action("E22", W)
    assert np.max(np.abs(up - down - H)) <= 1e-13 * max(1, np.max(np.abs(H)))


@pytest.mark.parametrize("mods,level", SPACES)
def test_cartan_weights(mods, level):
    W = subspace(mods, level)
    w1, w2 = W.weight
    np.testing.assert_allclose(gl2_action("E11", W), w1 * np.eye(W.dim), atol=1e-14)
    np.testing.assert_allclose(gl2_action("E22", W), w2 * np.eye(W.dim), atol=1e-14)


def test_finite_module_truncates():
    assert subspace((L2,), 2).dim == 1
    assert subspace((L2,), 3).dim == 0
    E21 = gl2_action("E21", subspace((L2,), 2))
    assert E21.shape == (0, 1)


def test_highest_vector_killed_by_E12():
    W = subspace((V, L2), 0)
    assert gl2_action("E12", W).shape[0] == 0


def test_divided_power_normalization():
    # E21 e_d = (d+1) e_{d+1}, E12 e_d = (m-d+1) e_{d-1}
    W = subspace((V,), 2)
    assert gl2_action("E21", W)[0, 0] == pytest.approx(3)
    assert gl2_action("E12", W)[0, 0] == pytest.approx(V.m - 1)


def test_word_matrix_order():
    W = subspace((V, L2), 1)
    w = word_matrix(W, [(1, 2, 1), (2, 1, 2)])  # E21 on site 2 first
    ref = gl2_action("E12", W.shifted(1), site=1) @ gl2_action("E21", W, site=2)
    np.testing.assert_allclose(w, ref)


def test_module_validation():
    with pytest.raises(ValueError):
        Module(1.5, True)


@pytest.mark.parametrize("Wm", [L2, Module(1, True), Module(0.4 + 0.3j)])
@given(seeds)
def test_R_matrix_defining_relations(Wm, seed):
    rng = np.random.default_rng(seed)
    t = complex(rng.uniform(-3, 3), rng.uniform(0.3, 3))
    assert R_defining_residual(t, V, Wm, 3) <= 1e-12
    assert R_nullity(t, V, Wm, 3) == 1


def test_R_top_is_identity():
    assert build_R(0.7 + 0.2j, V, L2, 0) == pytest.approx(np.eye(1))


@given(seeds)
def test_R_preserves_weight_and_commutes(seed):
    rng = np.random.default_rng(seed)
    t = complex(rng.uniform(-3, 3), rng.uniform(0.3, 3))
    W = subspace((V, L2, Module(0.9 + 0.1j)), 2)
    R = R_on(W, 1, 2, t)
    H = gl2_action("E11", W, site=1) + gl2_action("E11", W, site=2)
    assert np.max(np.abs(R @ H - H @ R)) <= 1e-12 * np.max(np.abs(R)) * np.max(np.abs(H))


def test_B_series_on_highest_line():
    W = subspace((V, L2), 0)
    np.testing.assert_allclose(B_series(0.3 + 0.4j, W), np.eye(1))


def test_B_series_truncates_at_level():
    W = subspace((V, L2), 2)
    # E12^3 vanishes on level 2, so B(t) is a polynomial of degree 2 in 1/(t - ...)
    B = B_series(11.3 + 0.1j, W)
    assert B.shape == (W.dim, W.dim)
    with pytest.raises(SingularParameterError):
        w1, w2 = W.weight
        B_series(w1 - w2 + 1, W)


def test_r_matrix_pole():
    with pytest.raises(SingularParameterError):
        r_matrix_on(subspace((V, L2), 1), 1, 2, 1.0)


def test_operator_container():
    W = subspace((V, L2), 1)
    op = build_operator("qKZ_Z_a", 1, [0.3, 1.2j], [0.8, 1.7 + 0.2j], W, 1.37)
    assert isinstance(op, ShiftedOperator) and op.shift == ("T_z", 1)
    assert op.matrix_part.entries.shape == (W.dim, W.dim)
    with pytest.raises(ValueError):
        ShiftedOperator(OperatorMatrix(np.eye(1)), ("T_w", 1))
    with pytest.raises(ValueError):
        build_operator("nope", 1, [0.3, 1.2j], [0.8, 1.7], W, 1.37)


PAIRS = [(1, 1), (2, 1), (1, 2), (2, 2)]


@pytest.mark.parametrize("m2,l2", PAIRS)
@pytest.mark.parametrize("pairing", ["Z_vs_Z", "Q_vs_Q", "nabla_vs_Q", "Z_vs_D"])
@given(seeds)
def test_commuting_families(m2, l2, pairing, seed):
    z, lam = random_point(np.random.default_rng(seed))
    src, _ = duality_pair(-0.6 + 0.2j, m2, l2)
    assert check_commutation(pairing, z, lam, src, 1.37) <= 1e-10


@pytest.mark.parametrize("m2,l2", PAIRS)
@pytest.mark.parametrize("which", ["qKZ_vs_Q", "D_vs_KZ"])
@given(seeds)
def test_duality_intertwines(m2, l2, which, seed):
    z, lam = random_point(np.random.default_rng(seed))
    assert check_intertwining(which, -0.6 + 0.2j, m2, l2, z, lam, 1.37) <= 1e-10


@pytest.mark.parametrize("m2,l2", PAIRS)
def test_phi_is_a_bijection_of_F_bases(m2, l2):
    src, tgt = duality_pair(-0.6 + 0.2j, m2, l2)
    P = phi_iso(src, tgt)
    assert src.dim == tgt.dim == min(m2, l2) + 1
    np.testing.assert_array_equal(P @ P.T, np.eye(src.dim))
    for a in range(src.dim):
        assert src.basis[F_index(src, a)] == (l2 - a, a)


def _p(m2, l2):
    return make_params(-0.6 + 0.2j, m2, l2, 1.37, -30 + 0.4j, -0.8 + 1.3j)


@pytest.mark.parametrize("side,m2,l2,b", [("qKZ", 1, 1, 0), ("qKZ", 1, 1, 1), ("dynDE", 1, 1, 1),
                                          ("dynDE", 2, 1, 0), ("KZ", 1, 1, 1), ("KZ", 1, 2, 0)])
def test_hypergeometric_solutions(side, m2, l2, b):
    r = check_solution(side, _p(m2, l2), b)
    assert r["max_residual"] <= 1e-6
    if "dyn_residuals" in r:
        assert max(r["dyn_residuals"]) <= 1e-6


def test_solution_side_limits():
    with pytest.raises(ValueError):
        check_solution("qKZ", _p(2, 2), 0)
