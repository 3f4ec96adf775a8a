import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphereum import circle
from sphereum.states import CircleState, normalize


def _random_state(coeffs):
    """Normalised finite Fourier series with the given (m, c) pairs."""
    fourier = {}
    for m, re, im in coeffs:
        fourier[m] = fourier.get(m, 0) + complex(re, im)
    norm = math.sqrt(sum(abs(c) ** 2 for c in fourier.values()))
    fourier = {m: c / norm for m, c in fourier.items()}

    def amp(p):
        p = np.asarray(p)
        return sum(c * np.exp(1j * m * p) for m, c in fourier.items()) / np.sqrt(2 * np.pi)

    return CircleState(amp, fourier=fourier, normalized=True, label="random")


fourier_states = st.lists(
    st.tuples(st.integers(-4, 4), st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=5
).filter(lambda cs: sum(re * re + im * im for _, re, im in cs) > 1e-2).map(_random_state)


@pytest.mark.parametrize("state, expected", [
    (circle.psi_m(1), (0.5, 0.5)), (circle.psi_m(-3), (0.5, 0.5)),
    (circle.psi_cos(), (0.75, 0.25)), (circle.psi_sin(), (0.25, 0.75)),
])
def test_trig_variances(state, expected):
    vc, vs, _ = circle.trig_variances(state)
    assert (vc, vs) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("state", [circle.psi_m(2), circle.psi_sin(), circle.psi_sin2(),
                                   circle.psi_cos(), circle.psi_uniform()])
def test_centroid_measure_is_one_for_centred_states(state):
    assert circle.centroid_measure(state) == pytest.approx(1.0, abs=1e-12)


def test_kr_position_values():
    assert circle.kr_measures(circle.psi_sin())[0] == pytest.approx(0.5 * math.log(2), rel=1e-12)
    assert circle.kr_measures(circle.psi_sin2())[0] == math.inf
    assert circle.kr_measures(circle.psi_uniform())[0] == math.inf


def test_kr_momentum_vanishes_on_eigenstates():
    assert circle.kr_measures(circle.psi_m(3))[1] == pytest.approx(0.0, abs=1e-14)


def test_kr_momentum_of_two_mode_state():
    # |c_1|^2 = |c_-1|^2 = 1/2: (cosh 2)^2 inside the log
    assert circle.kr_measures(circle.psi_cos())[1] == pytest.approx(0.5 * math.log(math.cosh(2)), rel=1e-12)


def test_kr_needs_spectral_data():
    s = replace(circle.psi_sin(), fourier=None)
    with pytest.raises(circle.SpectralDataError, match="spectral data required"):
        circle.kr_measures(s)
    s2 = circle.with_spectrum(s, m_max=4)
    assert circle.kr_measures(s2)[1] == pytest.approx(circle.kr_measures(circle.psi_sin())[1], rel=1e-10)


def test_fourier_tail_check():
    wide = CircleState(lambda p: np.exp(3 * np.cos(p)), label="wide")
    wide = normalize(wide)
    with pytest.raises(circle.SpectralDataError, match="tail"):
        circle.fourier_coefficients(wide, 2)
    coeffs = circle.fourier_coefficients(wide, 30)
    assert sum(abs(c) ** 2 for c in coeffs.values()) == pytest.approx(1.0, abs=1e-10)


def test_normalize_rescales_fourier_data():
    c = 1.5 * np.sqrt(2 * np.pi) + 0j
    s = CircleState(lambda p: 3 * np.cos(p), fourier={1: c, -1: c})
    n = normalize(s)
    assert sum(abs(c) ** 2 for c in n.fourier.values()) == pytest.approx(1.0, rel=1e-12)


@given(fourier_states)
@settings(max_examples=40, deadline=None)
def test_trig_uncertainty_relations_hold(state):
    for lhs, rhs, ok in circle.ursin_check(state):
        assert ok, (lhs, rhs)


@given(fourier_states)
@settings(max_examples=40, deadline=None)
def test_measure_ranges(state):
    ms = circle.circle_measures(state)
    assert -1e-12 <= ms.centroid_measure <= 1 + 1e-12
    assert ms.var_cos >= -1e-12 and ms.var_sin >= -1e-12
    assert ms.var_cos + ms.var_sin == pytest.approx(ms.centroid_measure, abs=1e-10)
    assert ms.kr_p >= -1e-12
    assert ms.kr_phi >= -1e-12


def test_reference_state_set():
    labels = [s.label for s in circle.make_circle_reference_states(2)]
    assert labels == ["psi_m=2", "psi_cos", "psi_sin", "psi_sin2", "uniform"]
