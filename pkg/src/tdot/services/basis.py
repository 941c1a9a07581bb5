"""Instantaneous eigenbasis of H(t), flips between its states and their
harmonic decomposition.

Fourier convention: for a dressed flip Φ̃(t) = Σ_ν c(ν) e^{-iνωt} the
coefficients reported are B(ν) = √(2π) c(ν); with this normalization the
first-order transition amplitude is i√(2π) Σ_ν B(ν) δ(ε' - ε - νω).
"""

from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from tdot.core.exceptions import DegenerateEnergyError, PeriodicityError
from tdot.core.logging import LoggerFactory
from tdot.domain.models import FlipSpectrum, InstantaneousState, ModelParams
from tdot.domain.value_objects import BoundLabel, ContinuumLabel, StateLabel
from tdot.services.model import (
    bound_states,
    bound_trajectories,
    check_momentum,
    coupling_at,
    dispersion,
    period_grid,
    reflection_kernel,
)

SQRT_2PI = np.sqrt(2 * np.pi)
CONTINUATION = 1e-8
DEGENERACY = 1e-12
PERIODICITY_TOLERANCE = 1e-10


@lru_cache(maxsize=32)
def _trajectory_table(p: ModelParams, samples: int):
    """Bound-state data on the period grid: roots, energies, means and phases."""
    roots, energies = bound_trajectories(p, samples)
    means = energies.mean(axis=1)
    spectra = np.fft.ifft(energies - means[:, None], axis=1)
    return roots, energies, means, spectra


def _bound_amplitudes(
    z: np.ndarray, energy: np.ndarray, g: np.ndarray, p: ModelParams
) -> Tuple[np.ndarray, np.ndarray]:
    """⟨0|Ψ_b⟩ and ⟨d|Ψ_b⟩ for ψ(x) = N z^|x|, ψ(d) = N g/(ε_d - E)."""
    ratio = g / (p.eps_d - energy)
    norm = 1 / np.sqrt((1 + z**2) / (1 - z**2) + ratio**2)
    return norm, norm * ratio


def _continuum_amplitudes(
    k, g: np.ndarray, p: ModelParams
) -> Tuple[np.ndarray, np.ndarray]:
    """⟨0|Ψ_k⟩ and ⟨d|Ψ_k⟩; both are the same for the two scattering directions."""
    b = reflection_kernel(k, g, p)
    origin = (1 + b) / SQRT_2PI
    with np.errstate(divide="ignore", invalid="ignore"):
        dot = np.where(g == 0, 0j, -2j * p.h * b * np.sin(k) / (g * SQRT_2PI))
    return origin, dot


class InstantaneousBasis:
    def __init__(self, params: ModelParams, time_samples: int = 512, nu_max: int = 8):
        if nu_max < 4:
            raise ValueError(f"nu_max must be >= 4, got {nu_max}")
        self.params = params
        self.time_samples = time_samples
        self.nu_max = nu_max
        self.logger = LoggerFactory.create_logger("InstantaneousBasis")

    # States

    @property
    def times(self) -> np.ndarray:
        return period_grid(self.params, self.time_samples)

    def mean_energies(self) -> Tuple[float, float]:
        """ε_1, ε_2: one-period averages of the bound energies."""
        _, _, means, _ = _trajectory_table(self.params, self.time_samples)
        return float(means[0]), float(means[1])

    def instantaneous_energies(self) -> np.ndarray:
        """E_i(t) on the period grid, shape (2, time_samples)."""
        return _trajectory_table(self.params, self.time_samples)[1]

    def continuum_state(
        self,
        k: float,
        t: float,
        direction: int = 1,
        sites: Optional[Sequence[int]] = None,
    ) -> InstantaneousState:
        check_momentum(k)
        p = self.params
        x = np.arange(-5, 6) if sites is None else np.asarray(sites)
        g, _ = coupling_at(t, p)
        origin, dot = _continuum_amplitudes(k, np.asarray(g), p)
        b = complex(origin) * SQRT_2PI - 1
        lattice = (np.exp(direction * 1j * k * x) + b * np.exp(1j * k * np.abs(x))) / SQRT_2PI
        return InstantaneousState(
            label=ContinuumLabel(k=k, direction=direction),
            t=t,
            energy=float(dispersion(k, p)),
            sites=x,
            lattice=lattice,
            dot=complex(dot),
        )

    def bound_state(
        self, i: int, t: float, sites: Optional[Sequence[int]] = None
    ) -> InstantaneousState:
        p = self.params
        g, _ = coupling_at(t, p)
        state = bound_states(float(g), p)[i]
        z = state.z.real
        if sites is None:
            # e^{-2q|x|} < 1e-16 beyond the window
            reach = int(np.ceil(16 * np.log(10) / (2 * state.q))) + 1
            x = np.arange(-reach, reach + 1)
        else:
            x = np.asarray(sites)
        origin, dot = _bound_amplitudes(z, state.energy, g, p)
        return InstantaneousState(
            label=BoundLabel(index=i),
            t=t,
            energy=state.energy,
            sites=x,
            lattice=origin * z ** np.abs(x),
            dot=complex(dot),
        )

    def eigen_residual(self, state: InstantaneousState) -> float:
        """max |(H(t) - E) ψ| over the dot and the interior sites of the window."""
        p = self.params
        g, _ = coupling_at(state.t, p)
        psi = state.lattice
        interior = (-p.h * (psi[2:] + psi[:-2]) - state.energy * psi[1:-1]).astype(complex)
        at_origin = np.where(state.sites[1:-1] == 0)[0]
        interior[at_origin] -= g * state.dot
        dot_row = (p.eps_d - state.energy) * state.dot - g * state.origin
        return float(max(np.max(np.abs(interior)), abs(dot_row)))

    # Flips

    def _amplitudes(
        self, label: StateLabel, t: np.ndarray, continued: bool = False
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """⟨0|n_t⟩, ⟨d|n_t⟩ and E_n(t) at arbitrary times."""
        p = self.params
        g, _ = coupling_at(t, p)
        g = np.atleast_1d(g)
        if isinstance(label, ContinuumLabel):
            k = label.k + 1j * CONTINUATION if continued else label.k
            origin, dot = _continuum_amplitudes(k, g, p)
            return origin, dot, np.full(g.shape, dispersion(k, p))
        sets = [bound_states(float(value), p)[label.index] for value in g]
        z = np.array([s.z.real for s in sets])
        energy = np.array([s.energy for s in sets])
        origin, dot = _bound_amplitudes(z, energy, g, p)
        return origin.astype(complex), dot.astype(complex), energy

    def flip(self, n_label: StateLabel, m_label: StateLabel, t) -> np.ndarray:
        """Φ_nm(t) = i⟨n|∂_t H|m⟩ / (E_m - E_n), ∂_t H = -ġ (|0⟩⟨d| + |d⟩⟨0|)."""
        if n_label == m_label:
            raise DegenerateEnergyError("Flips are defined between distinct states")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        _, g_dot = coupling_at(t, self.params)
        origin_n, dot_n, energy_n = self._amplitudes(n_label, t)
        origin_m, dot_m, energy_m = self._amplitudes(m_label, t)

        gap = energy_m - energy_n
        if np.any(np.abs(gap) < DEGENERACY):
            both_continuum = isinstance(n_label, ContinuumLabel) and isinstance(
                m_label, ContinuumLabel
            )
            if not both_continuum:
                raise DegenerateEnergyError(
                    f"Degenerate energies for {n_label} and {m_label}"
                )
            origin_m, dot_m, energy_m = self._amplitudes(m_label, t, continued=True)
            gap = energy_m - energy_n

        element = -g_dot * (np.conj(origin_n) * dot_m + np.conj(dot_n) * origin_m)
        return 1j * element / gap

    def _phase(self, label: StateLabel, t: np.ndarray) -> np.ndarray:
        """θ(t) = ∫_0^t (E_b - ε_b), evaluated from the Fourier series of E_b(t)."""
        if isinstance(label, ContinuumLabel):
            return np.zeros_like(t)
        spectra = _trajectory_table(self.params, self.time_samples)[3][label.index - 1]
        n = self.time_samples
        nu = np.fft.fftfreq(n, d=1.0 / n)
        nu[0] = 1.0
        weights = spectra / (-1j * nu * self.params.omega)
        weights[0] = 0.0
        waves = np.exp(-1j * np.outer(t, nu) * self.params.omega) - 1
        return np.real(waves @ weights)

    def dressed_flip(self, n_label: StateLabel, m_label: StateLabel, t) -> np.ndarray:
        """Φ̃_nm(t) = e^{iθ_n(t)} Φ_nm(t) e^{-iθ_m(t)}."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        phase = self._phase(n_label, t) - self._phase(m_label, t)
        return np.exp(1j * phase) * self.flip(n_label, m_label, t)

    def fourier_flips(
        self, n_label: StateLabel, m_label: StateLabel, nu_max: Optional[int] = None
    ) -> FlipSpectrum:
        nu_max = nu_max or self.nu_max
        if nu_max < 4:
            raise ValueError(f"nu_max must be >= 4, got {nu_max}")
        # ġ = 0 at t = 0, so the check sits a quarter period in
        quarter = 0.25 * self.params.period
        ends = self.dressed_flip(
            n_label, m_label, np.array([quarter, quarter + self.params.period])
        )
        if abs(ends[0] - ends[1]) > PERIODICITY_TOLERANCE:
            raise PeriodicityError(
                f"Dressed flip {n_label}->{m_label} is not periodic: "
                f"{abs(ends[0] - ends[1]):.2e}"
            )
        samples = self.dressed_flip(n_label, m_label, self.times)
        return FlipSpectrum(
            pair=(n_label, m_label),
            nu_max=nu_max,
            coefficients=SQRT_2PI * harmonics(samples, nu_max),
        )

    # Vectorized tables used by the GPP sums

    def bound_continuum_table(self, b: int, momenta: np.ndarray) -> np.ndarray:
        """c_{b,p}(ν) for every p (undressed by √(2π)), shape (P, 2 nu_max + 1)."""
        p = self.params
        t = self.times
        g, g_dot = coupling_at(t, p)
        roots, energies, _, _ = _trajectory_table(p, self.time_samples)
        z, energy = roots[b - 1], energies[b - 1]
        origin_b, dot_b = _bound_amplitudes(z, energy, g, p)

        momenta = np.asarray(momenta, dtype=float)
        origin_p, dot_p = _continuum_amplitudes(momenta[None, :], g[:, None], p)
        element = -g_dot[:, None] * (
            origin_b[:, None] * dot_p + dot_b[:, None] * origin_p
        )
        gap = dispersion(momenta, p)[None, :] - energy[:, None]
        phase = np.exp(1j * self._phase(BoundLabel(b), t))[:, None]
        return harmonics(phase * 1j * element / gap, self.nu_max)

    def bound_bound_coefficients(self, b: int, b_other: int) -> np.ndarray:
        """c_{b,b'}(ν), shape (2 nu_max + 1,)."""
        samples = self.dressed_flip(BoundLabel(b), BoundLabel(b_other), self.times)
        return harmonics(samples, self.nu_max)

    def continuum_numerator_table(self, bra, ket) -> np.ndarray:
        """Harmonics m(ν) of -ġ(t)(⟨p|0⟩⟨d|k⟩ + ⟨p|d⟩⟨0|k⟩), the continuum flip
        without its 1/(ε_k - ε_p + i0) factor. ``bra`` and ``ket`` broadcast."""
        p = self.params
        t = self.times
        g, g_dot = coupling_at(t, p)
        bra = np.atleast_1d(np.asarray(bra, dtype=float))
        ket = np.atleast_1d(np.asarray(ket, dtype=float))
        origin_n, dot_n = _continuum_amplitudes(bra[None, :], g[:, None], p)
        origin_m, dot_m = _continuum_amplitudes(ket[None, :], g[:, None], p)
        element = -g_dot[:, None] * (
            np.conj(origin_n) * dot_m + np.conj(dot_n) * origin_m
        )
        return harmonics(element, self.nu_max)


def harmonics(samples: np.ndarray, nu_max: int) -> np.ndarray:
    """c(ν) = (1/T)∫ f(t) e^{iνωt} dt for ν = -nu_max..nu_max along axis 0.

    Returns shape (..., 2 nu_max + 1) with the harmonic axis last.
    """
    spectrum = np.fft.ifft(samples, axis=0)
    index = np.arange(-nu_max, nu_max + 1) % samples.shape[0]
    return np.moveaxis(spectrum[index], 0, -1)
