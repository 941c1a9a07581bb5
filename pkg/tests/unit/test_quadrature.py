import numpy as np
import pytest
from scipy.integrate import quad

from tdot.utils.quadrature import SingularIntegrator, gauss_legendre_panels


@pytest.fixture
def integrator():
    return SingularIntegrator(0.5, panels=16, order=32)


def ones(p):
    return np.ones_like(p)


def test_panels_integrate_polynomials_exactly():
    nodes, weights = gauss_legendre_panels([0.0, 1.0, 3.0], 8)
    assert np.sum(weights) == pytest.approx(3.0)
    assert np.sum(weights * nodes**3) == pytest.approx(81 / 4)


def test_pole_momentum(integrator):
    assert integrator.pole_momentum(0.0) == pytest.approx(np.pi / 2)
    assert integrator.pole_momentum(-1.0) is None
    assert integrator.pole_momentum(2.0) is None


def test_grid_breaks_at_poles(integrator):
    nodes, weights = integrator.grid([0.3])
    assert np.sum(weights) == pytest.approx(np.pi)
    assert np.all((nodes > 0) & (nodes < np.pi))


def test_pole_outside_band(integrator):
    result = integrator.integrate(ones, [[(-2.0, 1)]])
    assert result[0] == pytest.approx(np.pi / np.sqrt(3), abs=1e-12)


@pytest.mark.parametrize("sign", [1, -1])
def test_in_band_pole_gives_delta_term(integrator, sign):
    result = integrator.integrate(ones, [[(0.0, sign)]])
    assert result[0] == pytest.approx(sign * 1j * np.pi, abs=1e-12)


def test_principal_value_of_smooth_numerator(integrator):
    # cos p / (-cos p) = -1 away from p = π/2; the numerator vanishes at the pole
    result = integrator.integrate(np.cos, [[(0.0, 1)]])
    assert result[0] == pytest.approx(-np.pi, abs=1e-10)


def test_two_poles_outside_band(integrator):
    result = integrator.integrate(ones, [[(-2.0, 1), (2.0, 1)]], coefficient=2.0)
    expected, _ = quad(lambda p: 1 / (np.cos(p) ** 2 - 4), 0, np.pi)
    assert result[0] == pytest.approx(2 * expected, abs=1e-10)


def test_columns_are_independent(integrator):
    def f(p):
        return np.stack([np.ones_like(p), np.cos(p)], axis=-1)

    result = integrator.integrate(f, [[(0.0, 1)], [(0.0, 1)]])
    assert result[0] == pytest.approx(1j * np.pi, abs=1e-12)
    assert result[1] == pytest.approx(-np.pi, abs=1e-10)


def test_partial_fractions_of_distinct_poles():
    terms = SingularIntegrator._partial_fractions([(0.0, 1), (0.5, -1)])
    weights = {a: (w, s, order) for w, a, s, order in terms}
    assert weights[0.0] == (pytest.approx(-2.0), 1, 1)
    assert weights[0.5] == (pytest.approx(2.0), -1, 1)
