"""Spatial-maximum performance analysis of continuously positioned fluid
antenna receivers under correlated fading, with a Monte Carlo oracle.

The core pipeline: an analytic (cdf, LCR) pair per receiver scenario
(fasim.analytic), the sojourn-based approximation of the track-maximum cdf
(fasim.supremum), and correlated-field simulation to validate both
(fasim.montecarlo).  fasim.cli drives preset experiments to CSV.
"""

__version__ = "0.1.0"

from .correlation import ArrayCoupling, CorrelationModel, array_coupling, jakes_model
from .errors import (
    DegenerateParameterError,
    DomainError,
    FieldGenerationError,
    InfeasibleTargetError,
    NumericError,
    QuadratureNonConvergence,
)
from .supremum import SupremumResult, sup_cdf, sup_cdf_bound

__all__ = [
    "__version__",
    "ArrayCoupling",
    "CorrelationModel",
    "array_coupling",
    "jakes_model",
    "DegenerateParameterError",
    "DomainError",
    "FieldGenerationError",
    "InfeasibleTargetError",
    "NumericError",
    "QuadratureNonConvergence",
    "SupremumResult",
    "sup_cdf",
    "sup_cdf_bound",
]
