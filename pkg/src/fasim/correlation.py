"""Spatial correlation models and the coupled constants of a rigid two-element array.

The isotropic-scattering (Jakes) model rho(tau) = J0(2*pi*tau) is the one the
numerical experiments use; any model with the local expansion
rho(tau) = 1 - b*tau^2 + o(tau^2) can be plugged in, and b is the only thing
the analytic formulas consume.
"""

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError
from .specfun import bessel_j0, bessel_j1

# c1 > 0 requires 2*pi*delta below the first zero of J1.
_J1_FIRST_ZERO = 3.8317059702075123
MAX_ARRAY_SPACING = _J1_FIRST_ZERO / (2 * math.pi)


@dataclass(frozen=True)
class CorrelationModel:
    """Spatial correlation rho(tau) plus its local curvature parameter b.

    rho takes a separation in wavelengths (tau >= 0); b is defined by
    rho(tau) = 1 - b*tau^2 + o(tau^2) as tau -> 0.
    """

    rho: Callable[[float], float]
    b: float
    name: str

    def __post_init__(self):
        if not (self.b > 0 and math.isfinite(self.b)):
            raise DomainError(f"curvature b must be positive, got {self.b}")


@dataclass(frozen=True)
class ArrayCoupling:
    """Correlation constants of a two-element rigid array with spacing delta.

    J is the inter-element correlation J0(2*pi*delta); c1 = (pi/delta) *
    J1(2*pi*delta) is the curvature of the cross-element correlation along
    the track (the elements sit perpendicular to the movement axis, so the
    separation at track offset tau is sqrt(delta^2 + tau^2)).
    """

    delta: float
    J: float
    c1: float


def _jakes_rho(tau):
    return bessel_j0(2.0 * math.pi * tau)


_JAKES = CorrelationModel(rho=_jakes_rho, b=math.pi ** 2, name="jakes")


def jakes_model() -> CorrelationModel:
    """Isotropic scattering: rho(tau) = J0(2*pi*tau), b = pi^2.

    Returns a shared immutable instance, so scenarios built from it compare
    equal.
    """
    return _JAKES


def array_coupling(delta: float) -> ArrayCoupling:
    """Coupling constants for element spacing delta (wavelengths)."""
    delta = float(delta)
    if not (delta > 0 and math.isfinite(delta)):
        raise DomainError(f"element spacing must be positive, got {delta}")
    j = bessel_j0(2.0 * math.pi * delta)
    c1 = (math.pi / delta) * bessel_j1(2.0 * math.pi * delta)
    return ArrayCoupling(delta=delta, J=j, c1=c1)
