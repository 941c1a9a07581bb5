from tdot.domain.interfaces import TransmissionMethod
from tdot.domain.models import ModelParams, SpectrumRow
from tdot.services.gpp import GppEngine
from tdot.utils.quadrature import SingularIntegrator


class GppMethod(TransmissionMethod):
    name = "gpp"

    def __init__(
        self,
        params: ModelParams,
        nu_max: int = 8,
        time_samples: int = 512,
        quad_panels: int = 32,
        quad_order: int = 64,
    ):
        self.params = params
        integrator = SingularIntegrator(params.h, panels=quad_panels, order=quad_order)
        self.engine = GppEngine(
            params, nu_max=nu_max, time_samples=time_samples, integrator=integrator
        )

    def transmission(self, k: float) -> SpectrumRow:
        amplitude = self.engine.gpp_transmission(k)
        return SpectrumRow(
            k=k,
            T_total=amplitude.T_total,
            T_elastic=amplitude.T_elastic,
            T_inelastic=dict(amplitude.T_inelastic),
            T_static=abs(amplitude.tau_static) ** 2,
            method=self.name,
            metadata={"warnings": list(amplitude.warnings)},
        )
