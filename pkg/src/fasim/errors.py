"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the documented domain of an operation."""


class DegenerateParameterError(DomainError):
    """Partial-fraction coefficients diverge because powers (nearly) coincide.

    Raised by the unequal-power SIR/SINR and fixed+fluid formulas when the
    relative gap between rates falls below 1e-9; callers should use the
    matching equal-power operation instead.
    """


class NumericError(RuntimeError):
    """A numerical procedure failed to reach its accuracy target."""


class QuadratureNonConvergence(NumericError):
    """Adaptive integration hit its subdivision limit.

    Carries the partial result so callers can inspect how far off it is.
    """

    def __init__(self, message, value, est_error, evaluations):
        super().__init__(
            f"{message} (partial value {value:.6g}, est. error {est_error:.3g}, "
            f"{evaluations} evaluations)"
        )
        self.value = value
        self.est_error = est_error
        self.evaluations = evaluations


class FieldGenerationError(NumericError):
    """Channel-field synthesis failed (e.g. covariance factorization)."""


class InfeasibleTargetError(RuntimeError):
    """The requested target probability cannot be met by any track length."""
