from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from tdot.core.exceptions import ConfigurationError

from .value_objects import StateLabel


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the driven T-coupled dot.

    g(t) = g0 + g1 cos(ωt) couples the dot site d to lead site 0.
    """

    h: float = 0.5
    eps_d: float = -1.0
    g0: float = 0.5
    g1: float = 0.25
    omega: float = 1.0
    eta: float = 1e-6
    eta_ratio_max: float = 0.01

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.h > 0:
            raise ConfigurationError("hopping must be positive", field="h")
        if not self.omega > 0:
            raise ConfigurationError("frequency must be positive", field="omega")
        if not self.eta > 0:
            raise ConfigurationError("regulator must be positive", field="eta")
        if self.eta > self.eta_ratio_max * self.omega:
            raise ConfigurationError(
                f"regulator {self.eta} exceeds {self.eta_ratio_max} * omega",
                field="eta",
            )
        if self.g1 < 0:
            raise ConfigurationError("driving amplitude must be >= 0", field="g1")
        decoupled = self.g0 == 0 and self.g1 == 0
        if not decoupled and not self.g0 > self.g1:
            raise ConfigurationError(
                "static coupling must exceed the driving amplitude (g(t) > 0)",
                field="g0",
            )

    @property
    def period(self) -> float:
        return 2 * np.pi / self.omega

    @property
    def is_static(self) -> bool:
        return self.g1 == 0

    def replace(self, **changes) -> "ModelParams":
        data = asdict(self)
        data.update(changes)
        return ModelParams(**data)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class StaticScattering:
    """Closed-form scattering amplitudes of the undriven dot at one momentum."""

    k: float
    b: complex
    tau: complex
    r: complex

    @property
    def transmission(self) -> float:
        return abs(self.tau) ** 2

    @property
    def reflection(self) -> float:
        return abs(self.r) ** 2


@dataclass(frozen=True)
class BoundState:
    z: complex
    q: float
    energy: float


@dataclass(frozen=True)
class BoundStateSet:
    """The two bound states at a given coupling, ordered (below band, above band)."""

    coupling_value: float
    states: Tuple[BoundState, BoundState]

    @property
    def energies(self) -> Tuple[float, float]:
        return self.states[0].energy, self.states[1].energy

    def __getitem__(self, index: int) -> BoundState:
        """Bound state by physical index 1 or 2."""
        return self.states[index - 1]


@dataclass(frozen=True)
class ChannelMomentum:
    """Momentum of sideband n; ``velocity`` is sin k in the η→0 limit, zero for
    closed and band-edge channels."""

    n: int
    k: complex
    open: bool
    velocity: float = 0.0


@dataclass
class FloquetChannel:
    momentum: ChannelMomentum
    tau: complex
    r: complex
    dot: complex = 0j

    @property
    def n(self) -> int:
        return self.momentum.n


@dataclass
class FloquetSolution:
    k_in: float
    E_F: float
    n_modes: int
    channels: List[FloquetChannel]
    T_total: float
    T_elastic: float
    T_inelastic: Dict[int, float]
    R_total: float
    current_sum: float
    dot_weight: float

    def channel(self, n: int) -> FloquetChannel:
        for channel in self.channels:
            if channel.n == n:
                return channel
        raise KeyError(n)

    @property
    def boundary_amplitude(self) -> float:
        edge = (self.n_modes - 1) // 2
        return max(
            max(abs(c.tau), abs(c.r))
            for c in self.channels
            if abs(c.n) == edge
        )


@dataclass(frozen=True)
class InstantaneousState:
    """Eigenstate of the frozen Hamiltonian H(t) sampled on a window of lead sites."""

    label: StateLabel
    t: float
    energy: float
    sites: np.ndarray
    lattice: np.ndarray
    dot: complex

    @property
    def origin(self) -> complex:
        return complex(self.lattice[np.searchsorted(self.sites, 0)])

    def norm(self) -> float:
        return float(np.sum(np.abs(self.lattice) ** 2) + abs(self.dot) ** 2)


@dataclass(frozen=True)
class FlipSpectrum:
    """Harmonic coefficients B(ν), ν = -nu_max..nu_max, of one dressed flip."""

    pair: Tuple[StateLabel, StateLabel]
    nu_max: int
    coefficients: np.ndarray

    def B(self, nu: int) -> complex:
        if abs(nu) > self.nu_max:
            return 0j
        return complex(self.coefficients[nu + self.nu_max])

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(-self.nu_max, self.nu_max + 1)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2


@dataclass(frozen=True)
class EnergyCorrection:
    b: int
    k_in: float
    nu: int
    value: complex

    @property
    def linewidth(self) -> float:
        return self.value.imag


@dataclass
class GppChannel:
    n: int
    k_f: float
    Y: complex
    tau: complex


@dataclass
class GppAmplitude:
    k_in: float
    tau_static: complex
    tau_el: complex
    channels: List[GppChannel]
    T_total: float
    T_elastic: float
    T_inelastic: Dict[int, float]
    warnings: List[str] = field(default_factory=list)

    @property
    def Y_elastic(self) -> complex:
        return self.channel(0).Y

    def channel(self, n: int) -> GppChannel:
        for channel in self.channels:
            if channel.n == n:
                return channel
        raise KeyError(n)

    def tau_inel(self, n: int) -> complex:
        return self.channel(n).tau


class Classification(Enum):
    """Strength of a quantum resonance in the elastic transmission"""

    STRONG = "strong"
    WEAK = "weak"


@dataclass
class ResonanceRecord:
    b: int
    nu: int
    k_res: float
    energy: float
    linewidth: float
    lifetime: float
    strength_ratio: float
    classification: Classification
    residual: float
    k_width: float = 0.0
    threshold: float = 0.9

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["classification"] = self.classification.value
        return data


@dataclass
class SpectrumRow:
    """One row of a transmission table."""

    k: float
    T_total: float
    T_elastic: Optional[float]
    T_inelastic: Dict[int, float] = field(default_factory=dict)
    T_static: Optional[float] = None
    method: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)


@dataclass
class LatticeWavefunction:
    """State of the finite driven chain: lead sites -L/2..L/2 followed by the dot."""

    L: int
    psi: np.ndarray
    t: float = 0.0

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-(self.L // 2), self.L // 2 + 1)

    @property
    def lead(self) -> np.ndarray:
        return self.psi[:-1]

    @property
    def dot(self) -> complex:
        return complex(self.psi[-1])

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2))


@dataclass
class OracleResult:
    k0: float
    transmitted: float
    reflected: float
    dot_population: float
    norm: float
    final_time: float
