"""Distribution of the spatial maximum S* = sup over a track of length L.

Given the marginal cdf F and spatial level crossing rate LCR of the metric
process at a threshold, the below-threshold sojourn distance is modeled as
exponential with mean F/LCR, which gives

    P(S* <= s_th) ~= F * exp(-L * LCR / F)

together with the first-order lower bound max(0, F - L*LCR), exact limits at
L = 0, and the high-threshold tail/neutralization consequences.  Everything
here is formula-agnostic: cdf and LCR enter as values at one threshold.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleTargetError
from .specfun import gamma_upper_scaled_32


@dataclass(frozen=True)
class SupremumResult:
    """Approximate cdf of the track maximum at one threshold.

    lower_bound <= approx_cdf <= marginal_cdf always holds (exp(-x) is
    sandwiched between 1-x and 1 for x >= 0).
    """

    s_th: float
    approx_cdf: float
    lower_bound: float
    marginal_cdf: float
    lcr: float
    L: float


def _check_inputs(cdf, lcr, L):
    cdf = float(cdf)
    lcr = float(lcr)
    L = float(L)
    if not (0.0 <= cdf <= 1.0):
        raise DomainError(f"cdf must lie in [0, 1], got {cdf}")
    if not (math.isfinite(lcr) and lcr >= 0.0):
        raise DomainError(f"lcr must be >= 0, got {lcr}")
    if not (math.isfinite(L) and L >= 0.0):
        raise DomainError(f"track length must be >= 0, got {L}")
    return cdf, lcr, L


def sup_cdf(cdf, lcr, L, s_th=math.nan) -> SupremumResult:
    """Sojourn-based approximation of P(S* <= s_th).

    cdf == 0 returns 0 (for lcr > 0 the exponent diverges; at lcr == 0 the
    zero-probability event stays zero).
    """
    cdf, lcr, L = _check_inputs(cdf, lcr, L)
    if cdf == 0.0:
        approx = 0.0
    elif lcr == 0.0 or L == 0.0:
        approx = cdf
    else:
        approx = cdf * math.exp(-L * lcr / cdf)
    return SupremumResult(
        s_th=float(s_th),
        approx_cdf=approx,
        lower_bound=max(0.0, cdf - L * lcr),
        marginal_cdf=cdf,
        lcr=lcr,
        L=L,
    )


def sup_cdf_bound(cdf, lcr, L):
    """First-order lower bound max(0, F - L*LCR); tight in the upper tail."""
    cdf, lcr, L = _check_inputs(cdf, lcr, L)
    return max(0.0, cdf - L * lcr)


def tail_success_snr(gamma0, b, L, s_th):
    """High-threshold P(S* > s_th) for Rayleigh SNR: affine in L."""
    _require_positive(gamma0=gamma0)
    if L < 0 or s_th < 0:
        raise DomainError("L and s_th must be >= 0")
    return math.exp(-s_th / gamma0) * (
        1.0 + L * math.sqrt(2.0 * b * s_th / (math.pi * gamma0)))


def tail_success_sinr(gamma0, gamma1, lambda01, b, L, s_th):
    """High-threshold P(S* > s_th) for single-interferer SINR."""
    _require_positive(gamma0=gamma0, gamma1=gamma1, lambda01=lambda01)
    if L < 0 or s_th < 0:
        raise DomainError("L and s_th must be >= 0")
    ratio = lambda01 / (lambda01 + s_th)
    boost = L * math.sqrt(2.0 * b * s_th * gamma1 / (math.pi * gamma0)) \
        * gamma_upper_scaled_32(1.0 / gamma1)
    return ratio * math.exp(-s_th / gamma0) * (1.0 + boost)


def neutralization_length(s_th, gamma0, gamma1, b):
    """Track length at which the SINR tail matches the interference-free
    fixed-antenna SNR tail; scales exactly as 1/sqrt(gamma0)."""
    _require_positive(s_th=s_th, gamma0=gamma0, gamma1=gamma1, b=b)
    return (math.sqrt(math.pi * s_th * gamma1 / (2.0 * b * gamma0))
            / gamma_upper_scaled_32(1.0 / gamma1))


def required_length(target_pt, cdf, lcr):
    """Solve sup_cdf(cdf, lcr, L) = target_pt for L in closed form.

    L = -(F/LCR) * ln(p_T / F), defined for p_T <= F; p_T above the marginal
    is unreachable because movement only shrinks the sup cdf.
    """
    target_pt = float(target_pt)
    if not (0.0 < target_pt < 1.0):
        raise DomainError(f"target probability must lie in (0, 1), got {target_pt}")
    cdf, lcr, _ = _check_inputs(cdf, lcr, 0.0)
    if target_pt > cdf:
        raise InfeasibleTargetError(
            f"target {target_pt} already exceeds the marginal cdf {cdf}: "
            "it is met at L = 0 and no length can raise the sup cdf")
    if target_pt == cdf:
        return 0.0
    if lcr == 0.0:
        raise InfeasibleTargetError(
            "LCR is zero: the sup cdf equals the marginal for every L")
    return -(cdf / lcr) * math.log(target_pt / cdf)


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        value = float(value)
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be positive, got {value}")
