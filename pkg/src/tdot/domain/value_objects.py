from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class ContinuumLabel:
    """Scattering state of the instantaneous basis.

    ``direction`` is +1 for the wave incident from the left (Ψ⁺) and -1 for
    the wave incident from the right (Ψ⁻). ``k`` lies in (0, π).
    """

    k: float
    direction: int = 1

    @property
    def signed_momentum(self) -> float:
        return self.direction * self.k


@dataclass(frozen=True)
class BoundLabel:
    """Bound state of the instantaneous basis, index 1 (below) or 2 (above the band)."""

    index: int


StateLabel = Union[ContinuumLabel, BoundLabel]
