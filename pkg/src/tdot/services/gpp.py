"""Re-summed adiabatic perturbation theory for the driven dot.

All flip coefficients below are the plain Fourier coefficients c(ν); the
published B(ν) differ by √(2π), which is why every sum carries a 2π.
"""

from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from tdot.core.exceptions import NumericalError
from tdot.core.logging import LoggerFactory
from tdot.domain.models import (
    EnergyCorrection,
    GppAmplitude,
    GppChannel,
    ModelParams,
)
from tdot.services.basis import SQRT_2PI, InstantaneousBasis
from tdot.services.model import check_momentum, dispersion, static_scattering
from tdot.utils.quadrature import SingularIntegrator

BAND_EDGE_GUARD = 1e-9
SMALL_DENOMINATOR = 10.0
PERTURBATIVE_RATIO = 0.3
UNITARITY_SLACK = 0.05
SPLINE_POINTS = 2049
CORRECTION_CACHE = 64


class GppEngine:
    def __init__(
        self,
        params: ModelParams,
        nu_max: int = 8,
        time_samples: int = 512,
        integrator: Optional[SingularIntegrator] = None,
    ):
        self.params = params
        self.nu_max = nu_max
        self.basis = InstantaneousBasis(params, time_samples=time_samples, nu_max=nu_max)
        self.integrator = integrator or SingularIntegrator(params.h)
        self.logger = LoggerFactory.create_logger("GppEngine")

        self._harmonics = np.arange(-nu_max, nu_max + 1)
        self._splines: Dict[int, CubicSpline] = {}
        self._bound_pairs: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self.correction_table = lru_cache(maxsize=CORRECTION_CACHE)(
            self._correction_table
        )
        self._means: Optional[Tuple[float, float]] = None

    # Shared tables

    @property
    def mean_energies(self) -> Tuple[float, float]:
        if self._means is None:
            self._means = self.basis.mean_energies()
        return self._means

    def harmonic(self, table: np.ndarray, nu: int) -> complex:
        if abs(nu) > self.nu_max:
            return 0j
        return table[..., nu + self.nu_max]

    def _loss_spline(self, b: int) -> CubicSpline:
        """|c_{b,p}(-ν')|² as smooth functions of p ∈ [0, π], columns ν' ascending."""
        if b not in self._splines:
            momenta = np.linspace(0.0, np.pi, SPLINE_POINTS)
            table = self.basis.bound_continuum_table(b, momenta)
            self._splines[b] = CubicSpline(momenta, np.abs(table[:, ::-1]) ** 2, axis=0)
        return self._splines[b]

    def _bound_pair(self, b: int) -> Tuple[np.ndarray, np.ndarray]:
        """c_{b,b'}(ν) and c_{b',b}(ν) for the other bound state b'."""
        if b not in self._bound_pairs:
            other = 3 - b
            self._bound_pairs[b] = (
                self.basis.bound_bound_coefficients(b, other),
                self.basis.bound_bound_coefficients(other, b),
            )
        return self._bound_pairs[b]

    def bound_coefficients(self, b: int, k: float) -> np.ndarray:
        """c_{b,k}(ν) for ν = -nu_max..nu_max."""
        return self.basis.bound_continuum_table(b, np.array([k]))[0]

    # Energy corrections

    def corrections(self, b: int, k_in: float, nus: Sequence[int]) -> np.ndarray:
        """δε_{b,k_in}(ν) for the requested harmonics.

        Bound part: Σ_ν' c_{bb'}(-ν') c_{b'b}(ν') / (ε_b' - ε_k - ω(ν+ν')).
        Continuum part: Σ_ν' 2∫_0^π |c_{bp}(-ν')|² / (ε_p - ε_k - ω(ν+ν') - i0) dp.
        """
        nus = np.asarray(nus, dtype=int)
        if self.params.is_static:
            return np.zeros(len(nus), dtype=complex)

        p = self.params
        eps_k = float(dispersion(k_in, p))
        shifts = nus[:, None] + self._harmonics[None, :]

        forward, backward = self._bound_pair(b)
        eps_other = self.mean_energies[2 - b]
        gaps = eps_other - eps_k - p.omega * shifts
        if np.any(np.abs(gaps) < 1e-12):
            self.logger.warning(f"Bound-bound denominator vanishes at k_in={k_in}, b={b}")
            gaps = np.where(np.abs(gaps) < 1e-12, np.inf, gaps)
        bound_part = np.sum((forward[::-1] * backward)[None, :] / gaps, axis=1)

        spline = self._loss_spline(b)
        width = len(self._harmonics)

        def integrand(momenta: np.ndarray) -> np.ndarray:
            return np.tile(spline(momenta), (1, len(nus)))

        poles = [[(eps_k + p.omega * s, 1)] for s in shifts.ravel()]
        continuum = self.integrator.integrate(integrand, poles, coefficient=2.0)
        continuum_part = continuum.reshape(len(nus), width).sum(axis=1)

        values = bound_part + continuum_part
        if np.any(values.imag < -1e-12):
            self.logger.warning(f"Negative linewidth {values.imag.min():.2e} at k_in={k_in}")
        return values

    def _correction_table(self, b: int, k_in: float) -> np.ndarray:
        """δε_{b,k_in}(ν) for every harmonic."""
        return self.corrections(b, k_in, self._harmonics)

    def energy_correction(self, b: int, k_in: float, nu: int) -> EnergyCorrection:
        check_momentum(k_in)
        value = complex(self.corrections(b, k_in, [nu])[0])
        return EnergyCorrection(b=b, k_in=k_in, nu=nu, value=value)

    def on_shell_linewidth(
        self, b: int, k_in: float, nu: int, harmonics: Optional[Sequence[int]] = None
    ) -> float:
        """Im δε from the delta-function form: Σ_ν' 2π |c_{b,k'}(-ν')|² / (2h sin k')
        over the on-shell momenta ε_k' = ε_k + ω(ν+ν')."""
        p = self.params
        eps_k = float(dispersion(k_in, p))
        harmonics = self._harmonics if harmonics is None else harmonics
        total = 0.0
        for shift in harmonics:
            k_out = self.integrator.pole_momentum(eps_k + p.omega * (nu + shift))
            if k_out is None:
                continue
            weight = abs(self.harmonic(self.bound_coefficients(b, k_out), -shift)) ** 2
            total += 2 * np.pi * weight / (2 * p.h * np.sin(k_out))
        return float(total)

    # Amplitudes

    def amplitude_Y(
        self, k_f: float, k_in: float, n: int, warnings: Optional[List[str]] = None
    ) -> complex:
        """Second-order transition amplitude from k_in to sideband n at k_f."""
        warnings = [] if warnings is None else warnings
        if self.params.is_static:
            return 0j

        p = self.params
        eps_in = float(dispersion(k_in, p))
        eps_f = float(dispersion(k_f, p))
        total = 0j

        if n != 0:
            numerator = self.harmonic(self.basis.continuum_numerator_table(k_f, k_in)[0], n)
            total += 2 * np.pi * 1j * numerator / (eps_in - eps_f)

        for b in (1, 2):
            total += self._bound_term(b, k_f, k_in, n, eps_in, warnings)

        total += self._continuum_term(k_f, k_in, n, eps_in, eps_f)
        return complex(total)

    def _bound_term(
        self, b: int, k_f: float, k_in: float, n: int, eps_in: float, warnings: List[str]
    ) -> complex:
        p = self.params
        eps_b = self.mean_energies[b - 1]
        incoming = self.bound_coefficients(b, k_in)
        outgoing = incoming if k_f == k_in else self.bound_coefficients(b, k_f)
        shifts = self.correction_table(b, k_in)

        total = 0j
        for nu in self._harmonics:
            back = self.harmonic(outgoing, nu - n)
            if back == 0:
                continue
            forward = self.harmonic(incoming, nu)
            denominator = eps_b - eps_in - nu * p.omega - self.harmonic(shifts, nu)
            if abs(denominator) < SMALL_DENOMINATOR * 2 * np.pi * abs(forward) ** 2:
                message = (
                    f"Small denominator {abs(denominator):.2e} for b={b}, nu={nu} "
                    f"at k_in={k_in:.6f}"
                )
                if message not in warnings:
                    self.logger.warning(message)
                    warnings.append(message)
            total += np.conj(back) * forward / denominator
        return 2 * np.pi * total

    def _continuum_term(
        self, k_f: float, k_in: float, n: int, eps_in: float, eps_f: float
    ) -> complex:
        """2π Σ_ν 2∫ m_{kf,p}(n-ν) m_{p,kin}(ν) /
        ((ε_p - ε_kf + i0)(ε_p - ε_kin - i0)(ε_p - ε_kin - νω - i0)) dp."""
        p = self.params
        harmonics = [
            int(nu)
            for nu in self._harmonics
            if nu != 0 and nu != n and abs(n - nu) <= self.nu_max
        ]
        if not harmonics:
            return 0j
        left = np.array([n - nu + self.nu_max for nu in harmonics])
        right = np.array([nu + self.nu_max for nu in harmonics])

        def integrand(momenta: np.ndarray) -> np.ndarray:
            outgoing = self.basis.continuum_numerator_table(k_f, momenta)
            incoming = self.basis.continuum_numerator_table(momenta, k_in)
            return outgoing[:, left] * incoming[:, right]

        poles = [
            [(eps_f, -1), (eps_in, 1), (eps_in + nu * p.omega, 1)] for nu in harmonics
        ]
        columns = self.integrator.integrate(integrand, poles, coefficient=2.0)
        return complex(2 * np.pi * np.sum(columns))

    def gpp_transmission(self, k_in: float) -> GppAmplitude:
        check_momentum(k_in)
        p = self.params
        static = static_scattering(k_in, p.g0, p)
        warnings: List[str] = []

        if p.is_static:
            return GppAmplitude(
                k_in=k_in,
                tau_static=static.tau,
                tau_el=static.tau,
                channels=[GppChannel(n=0, k_f=k_in, Y=0j, tau=static.tau)],
                T_total=static.transmission,
                T_elastic=static.transmission,
                T_inelastic={},
            )

        try:
            self._check_perturbative(k_in, warnings)
            incoming = np.sin(k_in)
            Y_elastic = self.amplitude_Y(k_in, k_in, 0, warnings)
            tau_el = static.tau + 1j * Y_elastic / (2 * p.h * incoming)
            channels = [GppChannel(n=0, k_f=k_in, Y=Y_elastic, tau=tau_el)]

            T_inelastic: Dict[int, float] = {}
            eps_in = float(dispersion(k_in, p))
            for n in self._harmonics:
                n = int(n)
                if n == 0:
                    continue
                k_f = self.integrator.pole_momentum(eps_in + n * p.omega)
                if k_f is None:
                    continue
                if np.sin(k_f) <= BAND_EDGE_GUARD:
                    warnings.append(f"Sideband {n} sits on a band edge at k_in={k_in:.6f}")
                    continue
                Y = self.amplitude_Y(k_f, k_in, n, warnings)
                tau = 1j * Y / (2 * p.h * np.sin(k_f))
                channels.append(GppChannel(n=n, k_f=k_f, Y=Y, tau=tau))
                T_inelastic[n] = float(np.sin(k_f) / incoming * abs(tau) ** 2)
        except NumericalError as e:
            self.logger.error(f"GPP amplitude failed at k_in={k_in}: {e}")
            raise

        T_elastic = float(abs(tau_el) ** 2)
        T_total = T_elastic + sum(T_inelastic.values())
        if T_total > 1 + UNITARITY_SLACK:
            message = f"T_total={T_total:.4f} exceeds perturbative slack at k_in={k_in:.6f}"
            self.logger.warning(message)
            warnings.append(message)

        return GppAmplitude(
            k_in=k_in,
            tau_static=static.tau,
            tau_el=tau_el,
            channels=channels,
            T_total=T_total,
            T_elastic=T_elastic,
            T_inelastic=T_inelastic,
            warnings=warnings,
        )

    def _check_perturbative(self, k_in: float, warnings: List[str]) -> None:
        eps_in = float(dispersion(k_in, self.params))
        gap = min(
            [abs(e - eps_in) for e in self.mean_energies] + [self.params.omega]
        )
        largest = max(
            float(np.max(np.abs(self.bound_coefficients(b, k_in)))) * SQRT_2PI
            for b in (1, 2)
        )
        if largest > PERTURBATIVE_RATIO * gap:
            message = (
                f"Flip amplitude {largest:.3f} exceeds {PERTURBATIVE_RATIO} x gap "
                f"{gap:.3f} at k_in={k_in:.6f}"
            )
            self.logger.warning(message)
            warnings.append(message)
