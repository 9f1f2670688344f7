"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A numeric parameter lies outside the range an operation accepts."""


class DomainError(ValueError):
    """A query point, cube or region falls outside the supported domain."""


class PreconditionError(ValueError):
    """Inputs violate a structural precondition (overlap, defect bound, ...)."""


class SamplingError(RuntimeError):
    """Rejection sampling accepted too few proposals to be trusted."""
