"""End-to-end agreement between the independent transmission methods."""

import numpy as np
import pytest

from tdot.domain.models import Classification, ModelParams
from tdot.services.floquet import FloquetSolver
from tdot.services.gpp import GppEngine
from tdot.services.model import static_scattering
from tdot.services.oracle import WavepacketOracle
from tdot.services.resonance import ResonanceAnalyzer

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("k", [1.0, 2.0])
def test_weak_driving_sidebands_match_floquet(weak_params, k):
    floquet = FloquetSolver(weak_params).solve(k)
    gpp = GppEngine(weak_params).gpp_transmission(k)
    assert set(gpp.T_inelastic) == set(floquet.T_inelastic)
    for n, value in floquet.T_inelastic.items():
        assert gpp.T_inelastic[n] == pytest.approx(value, rel=0.1)
    assert gpp.T_total == pytest.approx(floquet.T_total, abs=1e-4)


def test_gpp_tracks_floquet_off_resonance(driven_params):
    engine = GppEngine(driven_params)
    solver = FloquetSolver(driven_params)
    for k in (0.5, 0.9, 1.9, 2.7):
        assert engine.gpp_transmission(k).T_total == pytest.approx(
            solver.solve(k).T_total, abs=0.05
        )


def test_resonances_of_the_driven_dot(driven_params):
    analyzer = ResonanceAnalyzer(GppEngine(driven_params), k_points=600)
    records = analyzer.find_resonances()
    found = {(r.b, r.nu): r for r in records}

    assert found[(1, -1)].k_res == pytest.approx(1.26, abs=0.02)
    assert found[(2, 1)].k_res == pytest.approx(1.58, abs=0.02)
    assert found[(1, -2)].k_res == pytest.approx(2.34, abs=0.02)

    assert found[(1, -1)].classification is Classification.STRONG
    assert found[(2, 1)].classification is Classification.STRONG
    weak = found[(1, -2)]
    assert weak.classification is Classification.WEAK
    assert weak.strength_ratio == pytest.approx(0.33, abs=0.05)

    for key, record in found.items():
        assert record.linewidth > 0
        assert record.lifetime == pytest.approx(1 / record.linewidth)
        assert record.residual < 1e-8
        if key not in {(1, -1), (2, 1), (1, -2)}:
            assert record.classification is Classification.WEAK

    assert analyzer.spacing_consistent(records)
    solver = FloquetSolver(driven_params)
    for record in records:
        if record.classification is Classification.STRONG:
            window = np.linspace(record.k_res - 0.02, record.k_res + 0.02, 81)
            assert min(solver.solve(k).T_total for k in window) < 0.05

    shift = analyzer.elastic_shift(found[(1, -1)])
    assert -1 - 1e-6 <= shift.real <= -0.5
    assert abs(shift.imag) < 1e-6


def test_oracle_free_chain(free_params):
    result = WavepacketOracle(free_params, L=1600, sigma=25).propagate(np.pi / 2)
    assert result.transmitted == pytest.approx(1.0, abs=1e-6)
    assert result.norm == pytest.approx(1.0, abs=1e-8)


def test_oracle_static_dot(static_params):
    result = WavepacketOracle(static_params, L=1600, sigma=25).propagate(np.pi / 2)
    expected = static_scattering(np.pi / 2, static_params.g0, static_params).transmission
    assert expected == pytest.approx(0.9412, abs=1e-4)
    assert result.transmitted == pytest.approx(expected, abs=1e-2)
    assert result.norm == pytest.approx(1.0, abs=1e-8)
    assert result.reflected == pytest.approx(1 - expected, abs=1e-2)


def test_oracle_sees_the_fano_dip(driven_params):
    oracle = WavepacketOracle(driven_params, L=2000, sigma=40)
    transmitted = [oracle.propagate(k).transmitted for k in (1.0, 1.26, 2.0)]
    assert transmitted[1] < min(transmitted[0], transmitted[2])


def test_in_band_level_keeps_its_anti_resonance():
    params = ModelParams(h=0.5, eps_d=-0.25, g0=0.5, g1=0.1, omega=1.0)
    solver = FloquetSolver(params)
    k_anti = np.arccos(0.25)
    momenta = np.linspace(k_anti - 0.03, k_anti + 0.03, 61)
    T = np.array([solver.solve(k).T_total for k in momenta])
    assert momenta[T.argmin()] == pytest.approx(k_anti, abs=0.02)


def test_oracle_curve_follows_closed_form(static_params):
    oracle = WavepacketOracle(static_params, L=1600, sigma=25)
    for result in oracle.transmission_curve([1.0, 2.0]):
        expected = static_scattering(result.k0, static_params.g0, static_params)
        assert result.transmitted == pytest.approx(expected.transmission, abs=1e-2)


def test_in_band_resonances_are_connected_to_their_crossings(inband_params):
    analyzer = ResonanceAnalyzer(GppEngine(inband_params), k_points=400)
    records = analyzer.find_resonances()
    keys = [(r.b, r.nu) for r in records]
    assert len(keys) == len(set(keys))

    found = {(r.b, r.nu): r for r in records}
    assert found[(1, -1)].k_res == pytest.approx(1.52, abs=0.02)
    assert found[(2, 1)].k_res == pytest.approx(1.59, abs=0.02)
    # no root from the growth of δε at the band edge
    assert all(r.k_res < 3.0 for r in records)


def test_in_band_floquet_dips(inband_params):
    solver = FloquetSolver(inband_params)
    for lo, hi, centre in ((1.50, 1.555, 1.52), (1.565, 1.62, 1.59)):
        momenta = np.linspace(lo, hi, 111)
        T = np.array([solver.solve(k).T_total for k in momenta])
        i = T.argmin()
        assert 0 < i < len(momenta) - 1
        assert momenta[i] == pytest.approx(centre, abs=0.02)
        assert T[i] < 0.1


def test_gpp_zeros_sit_at_floquet_minima(driven_params):
    engine = GppEngine(driven_params)
    solver = FloquetSolver(driven_params)
    depths = []
    for centre in (1.26, 1.58):
        momenta = np.linspace(centre - 0.03, centre + 0.03, 61)
        gpp = np.array([engine.gpp_transmission(k).T_total for k in momenta])
        floquet = np.array([solver.solve(k).T_total for k in momenta])
        assert momenta[gpp.argmin()] == pytest.approx(momenta[floquet.argmin()], abs=0.02)
        depths.append(gpp.min())
    # the elastic resummation leaves the first dip shallower than Floquet's
    assert depths[0] < 0.15


def test_driven_oracle_matches_floquet(driven_params):
    oracle = WavepacketOracle(driven_params, L=1600, sigma=25)
    solver = FloquetSolver(driven_params)
    for result in oracle.transmission_curve([0.8, 2.0, 2.6]):
        expected = solver.solve(result.k0).T_total
        assert result.transmitted == pytest.approx(expected, abs=5e-2)
        assert result.norm == pytest.approx(1.0, abs=1e-8)


def test_oracle_time_step_convergence(driven_params):
    coarse = WavepacketOracle(driven_params, L=800, sigma=20).propagate(2.0)
    fine = WavepacketOracle(driven_params, L=800, sigma=20, dt=0.02).propagate(2.0)
    assert fine.transmitted == pytest.approx(coarse.transmitted, abs=1e-4)


@pytest.mark.parametrize("k", [0.8, 2.0])
def test_gpp_harmonic_truncation_convergence(driven_params, k):
    coarse = GppEngine(driven_params, nu_max=8).gpp_transmission(k)
    fine = GppEngine(driven_params, nu_max=16).gpp_transmission(k)
    assert fine.T_total == pytest.approx(coarse.T_total, abs=1e-4)
