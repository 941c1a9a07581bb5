from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tdot.core.exceptions import ConvergenceError, NumericalError
from tdot.core.logging import LoggerFactory
from tdot.domain.models import (
    ChannelMomentum,
    FloquetChannel,
    FloquetSolution,
    ModelParams,
)
from tdot.services.model import check_momentum, dispersion
from tdot.utils.linalg import pentadiagonal_to_banded, solve_pentadiagonal

BAND_EDGE_TOLERANCE = 1e-9
DEFAULT_MODES = 31


def complex_arccos(z: complex) -> complex:
    """arccos z = -i ln(z + i sqrt|1 - z²| exp(i arg(1 - z²) / 2))."""
    w = 1 - z * z
    root = np.sqrt(abs(w)) * np.exp(0.5j * np.angle(w))
    return complex(-1j * np.log(z + 1j * root))


def channel_momentum(E_F: float, n: int, p: ModelParams) -> ChannelMomentum:
    """Momentum of sideband n at Floquet energy E_F.

    Open-ness is decided in the η → 0⁺ limit; channels sitting on a band edge
    are open with zero velocity.
    """
    k = complex_arccos(-(E_F + 1j * p.eta + n * p.omega) / (2 * p.h))
    x = -(E_F + n * p.omega) / (2 * p.h)
    is_open = abs(x) <= 1
    velocity = 0.0
    if is_open and 1 - abs(x) > BAND_EDGE_TOLERANCE:
        velocity = float(np.sqrt(1 - x * x))
    return ChannelMomentum(n=n, k=k, open=is_open, velocity=velocity)


def limit_momentum(momentum: ChannelMomentum) -> complex:
    """The η → 0⁺ value of k: real on open channels, Re k ∈ {0, π} on closed ones."""
    x = float(np.cos(momentum.k).real)
    if momentum.open:
        return complex(np.arccos(np.clip(x, -1.0, 1.0)), 0.0)
    edge = 0.0 if x > 0 else np.pi
    return complex(edge, np.arccosh(abs(x)))


def dot_propagator(E_F: float, n: int, p: ModelParams) -> complex:
    """G_n = 1/(ε_d - E_F - nω), regularized by iη only where it would diverge."""
    detuning = p.eps_d - E_F - n * p.omega
    if abs(detuning) <= p.eta:
        return 1 / (detuning - 1j * p.eta)
    return 1 / complex(detuning)


def recursion_coefficients(
    n: int, E_F: float, p: ModelParams
) -> Tuple[complex, complex, complex, complex, complex]:
    """Row n of a τ_{n-2} + b τ_{n-1} + c τ_n + d τ_{n+1} + e τ_{n+2} = 2ih sin k_n δ_{n0}.

    Follows from matching the sideband ansatz at lead site 0 and eliminating
    the dot amplitude d_n = G_n (g0 τ_n + g1/2 (τ_{n+1} + τ_{n-1})).
    """
    lower, centre, upper = (dot_propagator(E_F, m, p) for m in (n - 1, n, n + 1))
    k_n = limit_momentum(channel_momentum(E_F, n, p))
    half = p.g1 / 2

    a = half**2 * lower
    b = p.g0 * half * (lower + centre)
    c = 2j * p.h * np.sin(k_n) + p.g0**2 * centre + half**2 * (upper + lower)
    d = p.g0 * half * (centre + upper)
    e = half**2 * upper
    return complex(a), complex(b), complex(c), complex(d), complex(e)


class FloquetSolver:
    """Sideband-truncated solution of the driven scattering problem."""

    def __init__(
        self,
        params: ModelParams,
        n_modes: int = DEFAULT_MODES,
        boundary_tolerance: float = 1e-5,
        dense: bool = False,
    ):
        self.params = params
        self.n_modes = n_modes
        self.boundary_tolerance = boundary_tolerance
        self.dense = dense
        self.logger = LoggerFactory.create_logger("FloquetSolver")

    def solve(
        self, k_in: float, n_modes: Optional[int] = None, check: bool = True
    ) -> FloquetSolution:
        n_modes = n_modes or self.n_modes
        if n_modes < 5 or n_modes % 2 == 0:
            raise ValueError(f"n_modes must be odd and >= 5, got {n_modes}")
        check_momentum(k_in)

        p = self.params
        E_F = float(dispersion(k_in, p))
        half_width = (n_modes - 1) // 2
        sidebands = np.arange(-half_width, half_width + 1)

        momenta = [channel_momentum(E_F, int(n), p) for n in sidebands]
        rows = np.array([recursion_coefficients(int(n), E_F, p) for n in sidebands])
        ab = pentadiagonal_to_banded(*rows.T)

        rhs = np.zeros(n_modes, dtype=complex)
        k_0 = limit_momentum(momenta[half_width])
        rhs[half_width] = 2j * p.h * np.sin(k_0)

        try:
            tau = solve_pentadiagonal(ab, rhs, dense=self.dense)
        except NumericalError as e:
            self.logger.error(f"Floquet solve failed at k_in={k_in}: {e}")
            raise

        solution = self._assemble(k_in, E_F, n_modes, sidebands, momenta, tau)
        if check and solution.boundary_amplitude > self.boundary_tolerance:
            raise ConvergenceError(
                f"Sideband amplitudes at |n|={half_width} are "
                f"{solution.boundary_amplitude:.2e} at k_in={k_in}; "
                f"increase n_modes",
                error_code="truncation",
            )
        return solution

    def _assemble(
        self,
        k_in: float,
        E_F: float,
        n_modes: int,
        sidebands: np.ndarray,
        momenta: List[ChannelMomentum],
        tau: np.ndarray,
    ) -> FloquetSolution:
        p = self.params
        padded = np.concatenate([[0j], tau, [0j]])
        incoming = np.sin(k_in)

        channels = []
        T_inelastic: Dict[int, float] = {}
        T_elastic = R_total = 0.0
        for i, (n, momentum) in enumerate(zip(sidebands, momenta)):
            n = int(n)
            r = tau[i] - (1.0 if n == 0 else 0.0)
            dot = dot_propagator(E_F, n, p) * (
                p.g0 * tau[i] + p.g1 / 2 * (padded[i + 2] + padded[i])
            )
            channels.append(FloquetChannel(momentum=momentum, tau=tau[i], r=r, dot=dot))

            weight = momentum.velocity / incoming
            if weight == 0:
                continue
            R_total += weight * abs(r) ** 2
            if n == 0:
                T_elastic = abs(tau[i]) ** 2
            else:
                T_inelastic[n] = weight * abs(tau[i]) ** 2

        T_total = T_elastic + sum(T_inelastic.values())
        return FloquetSolution(
            k_in=k_in,
            E_F=E_F,
            n_modes=n_modes,
            channels=channels,
            T_total=T_total,
            T_elastic=T_elastic,
            T_inelastic=T_inelastic,
            R_total=R_total,
            current_sum=T_total + R_total,
            dot_weight=float(sum(abs(c.dot) ** 2 for c in channels)),
        )

    def convergence_report(
        self, k_in: float, modes: Sequence[int] = (11, 21, 31, 41)
    ) -> List[Dict[str, float]]:
        """T_total for growing truncations and the change from the previous one."""
        report = []
        previous = None
        for n_modes in modes:
            solution = self.solve(k_in, n_modes=n_modes, check=False)
            delta = abs(solution.T_total - previous) if previous is not None else None
            report.append(
                {
                    "n_modes": n_modes,
                    "T_total": solution.T_total,
                    "delta": delta,
                    "boundary_amplitude": solution.boundary_amplitude,
                }
            )
            previous = solution.T_total
        self.logger.info(f"Convergence report at k_in={k_in}: {report}")
        return report
