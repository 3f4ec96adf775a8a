import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from sphereum.operators import PHI, THETA, p_phi, p_theta_n
from sphereum.states import make_state, rotate
from sphereum.uncertainty import (best_complementary_study, characteristic_coefficients,
                                  check_schrodinger_ur, gram_matrix, sin_power_means)

OPS = [PHI, THETA, p_phi(), p_theta_n(1)]


def test_characteristic_examples():
    assert characteristic_coefficients(np.eye(3)) == pytest.approx([3, 3, 1])
    assert characteristic_coefficients(np.diag([2.0, 5.0])) == pytest.approx([7, 10])
    assert characteristic_coefficients([[0, 1.5], [-1.5, 0]]) == pytest.approx([0, 2.25])


@given(arrays(np.float64, (5, 5), elements=st.floats(-3, 3)))
@settings(max_examples=50, deadline=None)
def test_characteristic_coefficients_match_charpoly(m):
    # det(x I - M) = x^n - e1 x^(n-1) + e2 x^(n-2) - ...
    poly = np.poly(m)[1:]
    signs = (-1) ** np.arange(1, 6)
    assert np.allclose(characteristic_coefficients(m), signs * poly, atol=1e-8 * (1 + np.abs(poly).max()))


@given(arrays(np.float64, (4, 4), elements=st.floats(-3, 3)))
@settings(max_examples=30, deadline=None)
def test_odd_coefficients_of_antisymmetric_vanish(m):
    a = m - m.T
    e = characteristic_coefficients(a)
    assert abs(e[0]) < 1e-12 and abs(e[2]) < 1e-9 * (1 + np.abs(a).max() ** 3)


def test_characteristic_size_limit():
    with pytest.raises(ValueError):
        characteristic_coefficients(np.eye(9))


def test_gram_report_structure(builtin_states):
    rep = gram_matrix(builtin_states["cs_t1"], OPS)
    assert np.allclose(rep.G, rep.G.conj().T)
    assert np.allclose(rep.S, rep.S.T) and np.allclose(rep.A, -rep.A.T)
    assert rep.operators == ["phi", "theta", "p_phi", "p_theta_n1"]
    assert rep.window_center == pytest.approx(math.pi, abs=1e-6)
    assert rep.all_passed


def test_single_operand_is_trivial(builtin_states):
    rep = gram_matrix(builtin_states["cs_t1"], [THETA])
    assert rep.G.shape == (1, 1)
    assert rep.char_S[0] == pytest.approx(0.41866, rel=1e-4)
    assert rep.char_A == [0.0] and rep.all_passed
    assert rep.window_center == 0.0


def test_permutation_leaves_coefficients_invariant(builtin_states):
    s = builtin_states["f_g5_k1"]
    base = gram_matrix(s, OPS)
    for perm in [(3, 1, 0, 2), (2, 3, 1, 0)]:
        rep = gram_matrix(s, [OPS[i] for i in perm])
        assert np.allclose(rep.char_S, base.char_S, rtol=1e-9)
        assert np.allclose(rep.char_A, base.char_A, rtol=1e-9, atol=1e-12)
        assert np.allclose(rep.G, base.G[np.ix_(perm, perm)], atol=1e-12)


def test_two_operand_determinant_equivalence(builtin_states):
    for name, s in builtin_states.items():
        rep = gram_matrix(s, [THETA, p_theta_n(1)])
        det_g = np.linalg.det(rep.G).real
        assert det_g == pytest.approx(rep.char_S[1] - rep.char_A[1], abs=1e-12), name
        assert (det_g >= -1e-12) == (rep.char_S[1] >= rep.char_A[1] - 1e-12)


@pytest.mark.parametrize("n", range(1, 7))
def test_theta_momentum_relation(builtin_states, n):
    for name, s in builtin_states.items():
        ur = check_schrodinger_ur(s, THETA, p_theta_n(n))
        assert ur.passed, (name, ur)
        mean_sin = sin_power_means(s, n)[-1]
        assert ur.rhs >= mean_sin ** 2 / 4 - 1e-12


def test_phi_momentum_relation_on_cs(builtin_states):
    ur = check_schrodinger_ur(builtin_states["cs_t1"], PHI, p_phi())
    assert ur.passed and ur.margin > 0


def test_eigenstate_relation_with_vanishing_rhs():
    s = make_state(dict(family="eigen", m=2))
    ur = check_schrodinger_ur(s, PHI, p_phi())
    assert ur.rhs == pytest.approx(0.0, abs=1e-12)
    assert ur.passed


@given(st.floats(-math.pi, math.pi))
@settings(max_examples=5, deadline=None)
def test_margin_invariant_under_rotation(delta):
    s = make_state(dict(family="cs", tau=1.0))
    a = check_schrodinger_ur(s, PHI, p_phi())
    b = check_schrodinger_ur(rotate(s, delta), PHI, p_phi())
    assert b.margin == pytest.approx(a.margin, rel=1e-7, abs=1e-12)


def test_complementary_study(builtin_states):
    study = best_complementary_study(list(builtin_states.values()))
    assert study.psi0_variances[:3] == pytest.approx([1 / 8, 1 / 8, 9 / 64], rel=1e-10)
    assert study.minimal_n == [1, 2]
    assert set(study.bound_winner.values()) == {1}
    assert study.selected_n == 1


def test_complementary_study_needs_psi0(builtin_states):
    with pytest.raises(ValueError):
        best_complementary_study([builtin_states["cs_t1"]])
