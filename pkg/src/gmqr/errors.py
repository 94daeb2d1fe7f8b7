class GMQRError(Exception):
    """Base class for all package errors."""

    code = "E_GMQR"


class ParameterError(GMQRError, ValueError):
    code = "E_PARAM"


class DomainError(GMQRError, ValueError):
    """A derivative was requested where it is not single-valued."""

    code = "E_DOMAIN"


class DataError(GMQRError, ValueError):
    code = "E_DATA"


class GuardError(GMQRError, ValueError):
    """Instance exceeds a combinatorial size guard."""

    code = "E_GUARD"


class OptimizationError(GMQRError, RuntimeError):
    code = "E_OPTIM"

    def __init__(self, message, iteration):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration
