"""Exception types shared across the package."""


class PencilRadiusError(Exception):
    """Base class for errors raised by this package."""


class ContractViolation(PencilRadiusError, ValueError):
    """An argument violated a documented precondition."""


class SvdConvergenceError(PencilRadiusError, RuntimeError):
    """The SVD iteration failed to converge (LAPACK diagnostic attached)."""


class DecompositionError(PencilRadiusError):
    """Two subspaces handed to an oblique projector are not complementary.

    Carries the condition number of the stacked basis matrix (inf when the
    dimensions do not even add up to the ambient dimension).
    """

    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


class NotStabilized(PencilRadiusError):
    """The nested-subspace recursion did not stabilize within the cap."""

    def __init__(self, message, m_cap):
        super().__init__(message)
        self.m_cap = m_cap


class ConstancyViolated(PencilRadiusError):
    """dim N(T - lambda*S) is not constant on the sampled disk."""

    def __init__(self, message, dims_seen):
        super().__init__(message)
        self.dims_seen = dims_seen


class NoComplementFound(PencilRadiusError):
    """No complementary subspace pair survived validation."""

    def __init__(self, message, worst_lambda, worst_condition):
        super().__init__(message)
        self.worst_lambda = worst_lambda
        self.worst_condition = worst_condition


class OracleUnreliable(PencilRadiusError):
    """Random compressions of the pencil disagree about drop points."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
