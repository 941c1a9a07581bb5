from tdot.core.config import RunConfig
from tdot.domain.interfaces import TransmissionMethod
from tdot.infrastructure.methods.floquet import FloquetMethod
from tdot.infrastructure.methods.gpp import GppMethod
from tdot.infrastructure.methods.oracle import OracleMethod
from tdot.infrastructure.methods.static import StaticMethod


class MethodFactory:
    """Factory for creating transmission methods based on configuration"""

    @staticmethod
    def create_method(name: str, config: RunConfig) -> TransmissionMethod:
        """Create a transmission method by name with the config's settings"""
        params = config.model
        method = name.lower()
        if method == "static":
            return StaticMethod(params)
        elif method == "floquet":
            return FloquetMethod(params, n_modes=config.floquet.n_modes)
        elif method == "gpp":
            return GppMethod(
                params,
                nu_max=config.gpp.nu_max,
                time_samples=config.gpp.time_samples,
                quad_panels=config.gpp.quad_panels,
                quad_order=config.gpp.quad_order,
            )
        elif method == "oracle":
            return OracleMethod(
                params, L=config.oracle.L, sigma=config.oracle.sigma, dt=config.oracle.dt
            )
        else:
            raise ValueError(f"Unsupported transmission method: {name}")
