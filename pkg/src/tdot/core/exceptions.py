class BaseError(Exception):
    """Base error class for the application."""

    exit_code = 1

    def __init__(self, message: str, error_code: str = None):
        self.message = message
        self.error_code = error_code
        super().__init__(self.message)


class ConfigurationError(BaseError):
    """Raised when a run configuration is missing or invalid."""

    exit_code = 2

    def __init__(self, message: str, field: str = None, error_code: str = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message, error_code or "config")


class NumericalError(BaseError):
    """Raised when a numerical method cannot produce a trustworthy result."""

    exit_code = 3


class DegenerateMomentumError(NumericalError):
    """Raised for momenta on a band edge (sin k = 0)."""

    pass


class SingularMatrixError(NumericalError):
    """Raised when the Floquet recursion matrix cannot be factorized."""

    pass


class ConvergenceError(NumericalError):
    """Raised when truncated sideband amplitudes have not decayed."""

    pass


class BoundStateError(NumericalError):
    """Raised when the bound-state quartic does not yield two physical roots."""

    pass


class DegenerateEnergyError(NumericalError):
    """Raised when a flip is requested between states of equal energy."""

    pass


class PeriodicityError(NumericalError):
    """Raised when a dressed flip is not periodic in the driving period."""

    pass


class QuadratureError(NumericalError):
    """Raised when a singular integral leaves a non-finite integrand."""

    pass


class BoundaryReflectionError(NumericalError):
    """Raised when a propagated wavepacket reaches the ends of the chain."""

    pass


class InvariantViolationError(BaseError):
    """Raised by the self-check suite when a physical invariant fails."""

    exit_code = 4
