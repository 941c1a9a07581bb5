"""Closed-form physics of the T-coupled dot: dispersion, coupling profile,
static scattering amplitudes and bound states."""

from typing import Tuple, Union

import numpy as np

from tdot.core.exceptions import BoundStateError, DegenerateMomentumError
from tdot.core.logging import LoggerFactory
from tdot.domain.models import BoundState, BoundStateSet, ModelParams, StaticScattering
from tdot.utils.polynomial import polynomial_roots, residual

logger = LoggerFactory.create_logger("ModelCore")

ArrayLike = Union[float, np.ndarray]

BAND_EDGE_GUARD = 1e-9
REAL_ROOT_TOLERANCE = 1e-8


def dispersion(k: ArrayLike, p: ModelParams) -> ArrayLike:
    """ε_k = -2h cos k."""
    return -2 * p.h * np.cos(k)


def coupling_at(t: ArrayLike, p: ModelParams) -> Tuple[ArrayLike, ArrayLike]:
    """g(t) and its time derivative."""
    phase = p.omega * np.asarray(t)
    return p.g0 + p.g1 * np.cos(phase), -p.g1 * p.omega * np.sin(phase)


def check_momentum(k: float) -> None:
    if not 0 < k < np.pi or abs(np.sin(k)) <= BAND_EDGE_GUARD:
        raise DegenerateMomentumError(
            f"Momentum {k} is outside (0, π) or on a band edge", error_code="band_edge"
        )


def reflection_kernel(k: ArrayLike, g: ArrayLike, p: ModelParams) -> np.ndarray:
    """b_k = -g² / (g² + 2ih (ε_d - ε_k) sin k), broadcast over k and g."""
    k = np.asarray(k)
    g = np.asarray(g)
    detuning = p.eps_d - dispersion(k, p)
    return -(g**2) / (g**2 + 2j * p.h * detuning * np.sin(k))


def static_scattering(k: float, g: float, p: ModelParams) -> StaticScattering:
    check_momentum(k)
    if g == 0:
        return StaticScattering(k=k, b=0j, tau=1 + 0j, r=0j)
    b = complex(reflection_kernel(k, g, p))
    return StaticScattering(k=k, b=b, tau=1 + b, r=b)


def bound_quartic(g: float, p: ModelParams) -> np.ndarray:
    """Coefficients (highest first) of h²z⁴ + hε_d z³ + g²z² - hε_d z - h²."""
    return np.array(
        [p.h**2, p.h * p.eps_d, g**2, -p.h * p.eps_d, -(p.h**2)], dtype=complex
    )


def bound_states(g: float, p: ModelParams) -> BoundStateSet:
    """Bound states from the physical roots (real, |z| < 1) of the quartic.

    The positive root gives the state below the band, the negative root
    the state above it.
    """
    if not g > 0:
        raise BoundStateError(f"Bound states need a positive coupling, got {g}")

    coefficients = bound_quartic(g, p)
    roots = polynomial_roots(coefficients)
    physical = [
        z.real
        for z in roots
        if abs(z.imag) < REAL_ROOT_TOLERANCE * max(1.0, abs(z)) and abs(z) < 1
    ]
    below = [z for z in physical if z > 0]
    above = [z for z in physical if z < 0]
    if len(physical) != 2 or len(below) != 1 or len(above) != 1:
        logger.error(f"Unexpected physical roots {physical} at g={g}")
        raise BoundStateError(
            f"Expected one positive and one negative root inside the unit disc, "
            f"found {physical}",
            error_code="bound_roots",
        )

    states = []
    for z, sign in ((below[0], -1.0), (above[0], 1.0)):
        q = -np.log(abs(z))
        states.append(BoundState(z=complex(z), q=q, energy=sign * 2 * p.h * np.cosh(q)))

    worst = float(np.max(residual(coefficients, np.array([s.z for s in states]))))
    if worst > 1e-12:
        logger.warning(f"Quartic residual {worst:.2e} at g={g}")
    return BoundStateSet(coupling_value=g, states=(states[0], states[1]))


def all_quartic_roots(g: float, p: ModelParams) -> np.ndarray:
    return polynomial_roots(bound_quartic(g, p))


def period_grid(p: ModelParams, samples: int = 512) -> np.ndarray:
    """Uniform time samples t_j = j T / samples over one driving period."""
    return np.arange(samples) * p.period / samples


def bound_trajectories(
    p: ModelParams, samples: int = 512
) -> Tuple[np.ndarray, np.ndarray]:
    """Roots z_i(t) and energies E_i(t), arrays of shape (2, samples)."""
    g, _ = coupling_at(period_grid(p, samples), p)
    roots = np.empty((2, samples))
    energies = np.empty((2, samples))
    for j, value in enumerate(g):
        bound = bound_states(float(value), p)
        for i, state in enumerate(bound.states):
            roots[i, j] = state.z.real
            energies[i, j] = state.energy
    return roots, energies


def mean_bound_energies(p: ModelParams, samples: int = 512) -> Tuple[float, float]:
    """Period averages ε_1, ε_2 of the instantaneous bound energies."""
    _, energies = bound_trajectories(p, samples)
    means = energies.mean(axis=1)
    return float(means[0]), float(means[1])
