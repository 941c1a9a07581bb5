from typing import Optional

from tdot.domain.interfaces import TransmissionMethod
from tdot.domain.models import ModelParams, SpectrumRow
from tdot.services.model import static_scattering
from tdot.services.oracle import WavepacketOracle


class OracleMethod(TransmissionMethod):
    """Wavepacket transmission; only the total is resolved."""

    name = "oracle"

    def __init__(
        self,
        params: ModelParams,
        L: int = 4000,
        sigma: float = 40.0,
        dt: Optional[float] = None,
    ):
        self.params = params
        self.oracle = WavepacketOracle(params, L=L, sigma=sigma, dt=dt)

    def transmission(self, k: float) -> SpectrumRow:
        result = self.oracle.propagate(k)
        return SpectrumRow(
            k=k,
            T_total=result.transmitted,
            T_elastic=None,
            T_static=static_scattering(k, self.params.g0, self.params).transmission,
            method=self.name,
            metadata={
                "reflected": result.reflected,
                "dot_population": result.dot_population,
                "norm": result.norm,
            },
        )
