from tdot.domain.interfaces import TransmissionMethod
from tdot.domain.models import ModelParams, SpectrumRow
from tdot.services.floquet import FloquetSolver
from tdot.services.model import static_scattering


class FloquetMethod(TransmissionMethod):
    name = "floquet"

    def __init__(self, params: ModelParams, n_modes: int = 31):
        self.params = params
        self.solver = FloquetSolver(params, n_modes=n_modes)

    def transmission(self, k: float) -> SpectrumRow:
        solution = self.solver.solve(k)
        return SpectrumRow(
            k=k,
            T_total=solution.T_total,
            T_elastic=solution.T_elastic,
            T_inelastic=dict(solution.T_inelastic),
            T_static=static_scattering(k, self.params.g0, self.params).transmission,
            method=self.name,
            metadata={
                "R_total": solution.R_total,
                "current_sum": solution.current_sum,
                "dot_weight": solution.dot_weight,
            },
        )
