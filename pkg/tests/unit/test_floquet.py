import numpy as np
import pytest

from tdot.core.exceptions import DegenerateMomentumError
from tdot.services.floquet import (
    FloquetSolver,
    channel_momentum,
    complex_arccos,
    dot_propagator,
    limit_momentum,
    recursion_coefficients,
)
from tdot.services.model import static_scattering

OFF_EDGE_MOMENTA = [0.4, 0.8, 1.0, 1.26, 1.4, 1.8, 2.2, 2.34, 2.7]


def test_complex_arccos_matches_real_branch():
    for x in (-0.9, 0.0, 0.3, 0.99):
        assert complex_arccos(x) == pytest.approx(np.arccos(x), abs=1e-14)


def test_channel_momenta_at_band_centre(driven_params):
    elastic = channel_momentum(0.0, 0, driven_params)
    assert elastic.open
    assert elastic.velocity == pytest.approx(1.0)
    assert limit_momentum(elastic) == pytest.approx(np.pi / 2)

    for n in (1, -1):
        edge = channel_momentum(0.0, n, driven_params)
        assert edge.open
        assert edge.velocity == 0.0

    closed = channel_momentum(0.0, 2, driven_params)
    assert not closed.open
    assert closed.k.imag > 0
    assert limit_momentum(closed) == pytest.approx(complex(np.pi, np.arccosh(2.0)))


def test_dot_propagator_is_regularized_only_on_resonance(driven_params):
    assert dot_propagator(0.0, 0, driven_params) == pytest.approx(-1.0)
    on_level = dot_propagator(driven_params.eps_d, 0, driven_params)
    assert on_level == pytest.approx(1j / driven_params.eta)


def test_undriven_rows_are_diagonal(static_params):
    a, b, _, d, e = recursion_coefficients(0, -0.3, static_params)
    assert a == b == d == e == 0


@pytest.mark.parametrize("k", [0.3, 1.0, 2.0, 2.9])
def test_static_reduction(static_params, k):
    solution = FloquetSolver(static_params).solve(k)
    expected = static_scattering(k, static_params.g0, static_params)
    assert solution.channel(0).tau == pytest.approx(expected.tau, abs=1e-10)
    assert solution.T_total == pytest.approx(expected.transmission, abs=1e-10)
    assert solution.T_inelastic == {} or max(solution.T_inelastic.values()) < 1e-20


@pytest.mark.parametrize("k", OFF_EDGE_MOMENTA)
def test_current_conservation(driven_params, k):
    solution = FloquetSolver(driven_params).solve(k)
    assert solution.current_sum == pytest.approx(1.0, abs=1e-5)
    assert 0 <= solution.T_total <= 1 + 1e-5


def test_banded_and_dense_solvers_agree(driven_params):
    banded = FloquetSolver(driven_params).solve(1.0)
    dense = FloquetSolver(driven_params, dense=True).solve(1.0)
    for first, second in zip(banded.channels, dense.channels):
        assert first.tau == pytest.approx(second.tau, abs=1e-12)


def test_fano_dip_near_first_resonance(driven_params):
    solver = FloquetSolver(driven_params)
    momenta = np.linspace(1.22, 1.30, 81)
    T = np.array([solver.solve(k).T_total for k in momenta])
    assert T.min() < 0.05
    assert momenta[T.argmin()] == pytest.approx(1.26, abs=0.02)


def test_fano_dip_near_second_resonance(driven_params):
    solver = FloquetSolver(driven_params)
    momenta = np.linspace(1.54, 1.62, 81)
    T = np.array([solver.solve(k).T_total for k in momenta])
    assert T.min() < 0.05
    assert momenta[T.argmin()] == pytest.approx(1.57, abs=0.02)


def test_shallow_dip_near_weak_resonance(driven_params):
    solver = FloquetSolver(driven_params)
    momenta = np.linspace(2.25, 2.43, 91)
    T = np.array([solver.solve(k).T_total for k in momenta])
    i = T.argmin()
    assert 0 < i < len(momenta) - 1
    assert momenta[i] == pytest.approx(2.34, abs=0.05)
    assert 0.3 < T[i] < 0.9


def test_truncation_convergence(driven_params):
    solver = FloquetSolver(driven_params)
    coarse = solver.solve(1.0, n_modes=31)
    fine = solver.solve(1.0, n_modes=41)
    for channel in coarse.channels:
        assert channel.tau == pytest.approx(fine.channel(channel.n).tau, abs=1e-5)

    report = solver.convergence_report(1.0, modes=(11, 21, 31))
    assert report[0]["delta"] is None
    assert report[-1]["delta"] < 1e-5


@pytest.mark.parametrize("n_modes", [4, 3, 30])
def test_invalid_truncation(driven_params, n_modes):
    with pytest.raises(ValueError):
        FloquetSolver(driven_params).solve(1.0, n_modes=n_modes)


def test_band_edge_momentum(driven_params):
    with pytest.raises(DegenerateMomentumError):
        FloquetSolver(driven_params).solve(0.0)


@pytest.mark.parametrize("k", [0.8, 2.0, 2.7])
def test_regulator_limit(driven_params, k):
    coarse = FloquetSolver(driven_params).solve(k)
    fine = FloquetSolver(driven_params.replace(eta=5e-7)).solve(k)
    assert fine.T_total == pytest.approx(coarse.T_total, abs=1e-6)


@pytest.mark.parametrize("k", [0.8, 2.0])
def test_vanishing_driving_recovers_static(driven_params, k):
    params = driven_params.replace(g1=1e-4)
    solution = FloquetSolver(params).solve(k)
    expected = static_scattering(k, params.g0, params).transmission
    assert solution.T_total == pytest.approx(expected, abs=1e-6)
