"""Wavepacket propagation through a finite driven chain.

Independent of the Floquet and GPP machinery: the time-dependent Schrödinger
equation is integrated directly with the implicit midpoint rule, which is
exactly norm-preserving for Hermitian H(t).
"""

from typing import List, Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from tdot.core.exceptions import (
    BoundaryReflectionError,
    ConfigurationError,
    NumericalError,
)
from tdot.core.logging import LoggerFactory
from tdot.domain.models import LatticeWavefunction, ModelParams, OracleResult
from tdot.services.model import check_momentum, coupling_at

EDGE_NORM_TOLERANCE = 1e-6
NORM_TOLERANCE = 1e-8


class WavepacketOracle:
    def __init__(
        self,
        params: ModelParams,
        L: int = 4000,
        sigma: float = 40.0,
        dt: Optional[float] = None,
        travel_factor: float = 1.5,
    ):
        if sigma < 20:
            raise ConfigurationError(f"packet width {sigma} is below 20 sites", field="sigma")
        if L < 20 * sigma:
            raise ConfigurationError(f"chain of {L} sites cannot hold the packet", field="L")
        self.params = params
        self.L = L
        self.sigma = sigma
        self.dt = dt if dt is not None else 0.02 / params.h
        self.travel_factor = travel_factor
        self.logger = LoggerFactory.create_logger("WavepacketOracle")

        self.sites = np.arange(-(L // 2), L // 2 + 1)
        self.origin = L // 2
        self.dot = len(self.sites)
        self.size = self.dot + 1
        self._hamiltonian = self._static_hamiltonian()
        self._factorize()

    def _static_hamiltonian(self) -> sparse.csr_matrix:
        """Lead hopping and the dot level; the coupling g(t) is added per step."""
        leads = len(self.sites)
        hopping = np.full(leads - 1, -self.params.h)
        H = sparse.lil_matrix((self.size, self.size), dtype=complex)
        H.setdiag(np.concatenate([hopping, [0.0]]), k=1)
        H.setdiag(np.concatenate([hopping, [0.0]]), k=-1)
        H[self.dot, self.dot] = self.params.eps_d
        return H.tocsr()

    def _factorize(self) -> None:
        half = 0.5j * self.dt
        identity = sparse.identity(self.size, dtype=complex, format="csc")
        try:
            self._lu = splu((identity + half * self._hamiltonian.tocsc()).tocsc())
        except RuntimeError as e:
            raise NumericalError(
                f"Midpoint step matrix cannot be factorized: {e}",
                error_code="oracle_factorization",
            ) from e
        columns = np.zeros((self.size, 2), dtype=complex)
        columns[self.origin, 0] = 1.0
        columns[self.dot, 1] = 1.0
        self._Z = np.column_stack([self._lu.solve(columns[:, j]) for j in range(2)])
        self._UZ = self._Z[[self.origin, self.dot], :]

    def _coupling_action(self, psi: np.ndarray, g: float) -> np.ndarray:
        out = np.zeros_like(psi)
        out[self.origin] = -g * psi[self.dot]
        out[self.dot] = -g * psi[self.origin]
        return out

    def _solve(self, rhs: np.ndarray, g: float) -> np.ndarray:
        """(A0 + U M Uᵀ)⁻¹ rhs with M = (i dt/2) g C, C the 2x2 coupling block."""
        y = self._lu.solve(rhs)
        M = 0.5j * self.dt * g * np.array([[0.0, -1.0], [-1.0, 0.0]])
        K = np.eye(2) + self._UZ @ M
        try:
            w = np.linalg.solve(K, y[[self.origin, self.dot]])
        except np.linalg.LinAlgError as e:
            raise NumericalError(
                f"Coupling update is singular at g={g}: {e}", error_code="oracle_update"
            ) from e
        return y - self._Z @ (M @ w)

    def initial_packet(self, k0: float) -> LatticeWavefunction:
        x0 = -self.L / 4
        psi = np.zeros(self.size, dtype=complex)
        psi[:-1] = np.exp(-((self.sites - x0) ** 2) / (4 * self.sigma**2) + 1j * k0 * self.sites)
        psi /= np.linalg.norm(psi)
        return LatticeWavefunction(L=self.L, psi=psi, t=0.0)

    def step(self, state: LatticeWavefunction) -> LatticeWavefunction:
        g, _ = coupling_at(state.t + 0.5 * self.dt, self.params)
        g = float(g)
        psi = state.psi
        rhs = psi - 0.5j * self.dt * (self._hamiltonian @ psi + self._coupling_action(psi, g))
        return LatticeWavefunction(L=self.L, psi=self._solve(rhs, g), t=state.t + self.dt)

    def final_time(self, k0: float) -> float:
        velocity = 2 * self.params.h * np.sin(k0)
        return self.travel_factor * (self.L / 4) / velocity

    def propagate(self, k0: float) -> OracleResult:
        check_momentum(k0)
        state = self.initial_packet(k0)
        steps = int(np.ceil(self.final_time(k0) / self.dt))
        self.logger.debug(f"Propagating k0={k0} for {steps} steps")

        for _ in range(steps):
            state = self.step(state)
        self._check_edges(state, k0)

        norm = state.norm()
        if not np.isfinite(norm):
            raise NumericalError(f"Propagation diverged at k0={k0}")
        if abs(norm - 1) > NORM_TOLERANCE:
            self.logger.warning(f"Norm drifted to {norm:.12f} at k0={k0}")

        lead = np.abs(state.lead) ** 2
        return OracleResult(
            k0=k0,
            transmitted=float(np.sum(lead[self.sites > 0])),
            reflected=float(np.sum(lead[self.sites < 0])),
            dot_population=abs(state.dot) ** 2,
            norm=norm,
            final_time=state.t,
        )

    def _check_edges(self, state: LatticeWavefunction, k0: float) -> None:
        reach = int(5 * self.sigma)
        lead = np.abs(state.lead) ** 2
        edge = float(np.sum(lead[:reach]) + np.sum(lead[-reach:]))
        if edge > EDGE_NORM_TOLERANCE:
            raise BoundaryReflectionError(
                f"Norm {edge:.2e} reached the chain ends at k0={k0}; enlarge L",
                error_code="boundary",
            )

    def transmission_curve(self, momenta: Sequence[float]) -> List[OracleResult]:
        return [self.propagate(k) for k in momenta]
