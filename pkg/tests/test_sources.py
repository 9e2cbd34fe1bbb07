import math
import warnings

import numpy as np
import pytest

from fieldcheck import sources as S
from fieldcheck.sources import CurrentSource, SourceWarning, continuity_residual, total_charge


def test_static_charge_total(rule):
    assert abs(total_charge(S.static_charge(2.0, 0.1), 0.0, rule) - 2.0) < 1e-6


@pytest.mark.parametrize("t", [0.0, 1.3, 7.0])
def test_dipole_carries_no_charge(rule, t):
    assert abs(total_charge(S.hertzian_dipole(1.0, 0.3, 0.1), t, rule)) < 1e-8


def test_oscillating_monopole_charge(rule):
    src = S.oscillating_monopole(1.0, 1.0, 0.1)
    assert abs(total_charge(src, math.pi / 2, rule) - 1.0) < 1e-6


def test_dipole_continuity(rule):
    assert continuity_residual(S.hertzian_dipole(1.0, 0.3, 0.1), 0.4, rule) < 1e-4


def test_static_continuity(rule):
    assert continuity_residual(S.static_charge(1.0, 0.1), 0.0, rule) < 1e-12


def test_broken_current_detected(rule):
    src = S.hertzian_dipole(1.0, 0.3, 0.1)
    broken = CurrentSource(tuple(t for t in src.terms if t.component != 0))
    # with j^0 removed the residual is |p(t)| |d_z w_a| / (|p'(t)| max w_a / a), order one at this phase
    assert continuity_residual(broken, 1.0, rule) > 0.1


def test_bump_is_compact():
    bump = S.Bump((0.0, 0.0, 0.0), 0.1)
    assert bump(np.array([[0.0, 0.0, 0.1]]))[0] == 0.0
    assert bump(np.array([[0.0, 0.2, 0.0]]))[0] == 0.0
    assert math.isclose(bump(np.zeros((1, 3)))[0], bump.norm)


def test_bump_gradient_matches_difference():
    bump = S.Bump((0.0, 0.0, 0.0), 0.5)
    p = np.array([[0.1, -0.2, 0.15]])
    h = 1e-6
    fd = [(bump(p + h * e) - bump(p - h * e))[0] / (2 * h) for e in np.eye(3)]
    assert np.allclose(bump.gradient(p)[0], fd, rtol=1e-7)


def test_dipole_components_and_evaluation():
    src = S.hertzian_dipole(2.0, 0.3, 0.1, axis=(1.0, 0.0, 0.0))
    pts = np.array([[0.01, 0.02, 0.0]])
    j = src.evaluate(pts, 0.0)
    # p(0) = 0 so j^0 vanishes and j^x = p'(0) w_a
    assert j.shape == (1, 4)
    assert j[0, 0] == 0.0
    assert j[0, 2] == j[0, 3] == 0.0
    assert math.isclose(j[0, 1], 0.6 * S.Bump((0, 0, 0), 0.1)(pts)[0])


def test_time_derivative_of_monopole():
    src = S.oscillating_monopole(1.0, 0.3, 0.1)
    pts = np.zeros((1, 3))
    h = 1e-5
    fd = (src.evaluate(pts, 1.0 + h) - src.evaluate(pts, 1.0 - h)) / (2 * h)
    assert np.allclose(src.time_derivative(pts, 1.0), fd, rtol=1e-8)


def test_superposition_adds():
    a = S.static_charge(1.0, 0.1)
    b = S.hertzian_dipole(1.0, 0.3, 0.1)
    pts = np.array([[0.0, 0.0, 0.05]])
    assert np.allclose((a + b).evaluate(pts, 0.7), a.evaluate(pts, 0.7) + b.evaluate(pts, 0.7))
    assert (a + b).max_omega == 0.3


def test_mixed_superposition_rejected():
    with pytest.raises(TypeError):
        S.static_charge(1.0, 0.1) + S.static_monopole(1.0, 0.1)


def test_large_omega_a_warns():
    with pytest.warns(SourceWarning):
        S.oscillating_monopole(1.0, 10.0, 0.1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        S.oscillating_monopole(1.0, 0.3, 0.1)


@pytest.mark.parametrize("a", [0.0, -1.0])
def test_rejects_bad_radius(a):
    with pytest.raises(ValueError):
        S.static_monopole(1.0, a)


def test_distance_to_support():
    src = S.static_monopole(1.0, 0.5, center=(1.0, 0.0, 0.0))
    assert math.isclose(src.distance_to_support((1.0, 0.0, 2.0)), 4.0)
