from tdot.domain.interfaces import TransmissionMethod
from tdot.domain.models import ModelParams, SpectrumRow
from tdot.services.model import static_scattering


class StaticMethod(TransmissionMethod):
    """Closed-form transmission of the undriven dot at coupling g0."""

    name = "static"

    def __init__(self, params: ModelParams):
        self.params = params

    def transmission(self, k: float) -> SpectrumRow:
        T = static_scattering(k, self.params.g0, self.params).transmission
        return SpectrumRow(k=k, T_total=T, T_elastic=T, T_static=T, method=self.name)
