"""Marginal cdf and spatial level crossing rate for every receiver scenario.

Twelve (cdf, lcr) pairs feed the spatial-maximum engine:

    rayleigh_snr          single fluid antenna, Rayleigh SNR
    sir_unequal/equal     interference-limited SIR, N Rayleigh interferers
    sinr_single           SINR, one interferer
    sinr_unequal/equal    SINR, N interferers
    ricean_snr            Ricean desired channel, SNR (quadrature LCR)
    ricean_sir            Ricean desired / Rayleigh interferer (quadrature LCR)
    fixed_fluid_unequal/equal   MRC of one fixed + one fluid branch
    array_independent     rigid two-element moving array, wide spacing
    array_correlated      rigid two-element moving array, coupled elements

Each operation returns (cdf, lcr) at a threshold s_th >= 0: cdf in [0, 1]
nondecreasing in s_th; lcr >= 0, finite, vanishing at both ends.  All
formulas take the local correlation curvature b explicitly (b = pi^2 for
Jakes).  Products over many interferers are accumulated in log space.
"""

import math
from dataclasses import dataclass
from typing import Tuple

from .correlation import MAX_ARRAY_SPACING, ArrayCoupling
from .errors import DegenerateParameterError, DomainError
from .quadrature import QuadratureResult, integrate
from .specfun import (
    dawson,
    erf,
    erfcx,
    gamma_fn,
    gamma_lower,
    gamma_upper,
    gamma_upper_scaled_32,
    lgamma_fn,
    marcum_q1,
)

# Relative gap below which partial-fraction coefficients are treated as
# degenerate; callers must switch to the equal-power formula.
DEGENERACY_GAP = 1e-9

# Quadrature settings for the Ricean LCR integrals.
RICEAN_REL_TOL = 1e-9
RICEAN_ABS_TOL = 1e-14


def _check_threshold(s_th):
    s_th = float(s_th)
    if not (math.isfinite(s_th) and s_th >= 0):
        raise DomainError(f"threshold must be >= 0, got {s_th}")
    return s_th


def _check_positive(value, name):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive, got {value}")
    return value


# ---------------------------------------------------------------------------
# Parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RayleighSnrParams:
    """Rayleigh desired link; gamma0 is the mean SNR E_x0*beta0/sigma^2."""

    gamma0: float

    def __post_init__(self):
        _check_positive(self.gamma0, "gamma0")


@dataclass(frozen=True)
class InterfererSet:
    """Rayleigh interferers.

    lambdas[n] is the desired-to-interferer mean power ratio
    E_x0*beta0/(E_xn*beta_n); gammas[n] = E_xn*beta_n/sigma^2 enters only the
    SINR formulas.  The unequal-power formulas require pairwise-distinct
    lambdas (SIR) or gammas (SINR); near-coincident values raise
    DegenerateParameterError at the operation.
    """

    lambdas: Tuple[float, ...]
    gammas: Tuple[float, ...]
    equal_power: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        object.__setattr__(self, "gammas", tuple(float(v) for v in self.gammas))
        if len(self.lambdas) != len(self.gammas) or not self.lambdas:
            raise DomainError("lambdas and gammas must have equal length >= 1")
        for v in self.lambdas + self.gammas:
            _check_positive(v, "interferer power ratio")
        if self.equal_power:
            for seq in (self.lambdas, self.gammas):
                ref = seq[0]
                if any(abs(v - ref) > 1e-12 * ref for v in seq):
                    raise DomainError("equal_power=True requires identical entries")

    @property
    def n(self):
        return len(self.lambdas)


def _require_distinct(values, what, alternative):
    vals = sorted(values)
    for lo, hi in zip(vals, vals[1:]):
        if (hi - lo) <= DEGENERACY_GAP * hi:
            raise DegenerateParameterError(
                f"{what} nearly coincide ({lo:.12g} vs {hi:.12g}); "
                f"use {alternative} instead")


@dataclass(frozen=True)
class RiceanParams:
    """Ricean desired channel: K-factor, LoS phase slope phi (rad/wavelength),
    mean SNR gamma0.  zeta = sqrt(K/(K+1)); the normalized diffuse curvature
    B = b/(K+1) depends on the correlation model, hence bcap() takes b."""

    K: float
    phi: float
    gamma0: float

    def __post_init__(self):
        if not (math.isfinite(self.K) and self.K >= 0):
            raise DomainError(f"K must be >= 0, got {self.K}")
        if not math.isfinite(self.phi):
            raise DomainError("phi must be finite")
        _check_positive(self.gamma0, "gamma0")

    @property
    def zeta(self):
        return math.sqrt(self.K / (self.K + 1.0))

    def bcap(self, b):
        return b / (self.K + 1.0)


@dataclass(frozen=True)
class RiceanSirParams:
    """Ricean desired channel with a single Rayleigh interferer."""

    beta0: float
    beta1: float
    ex0: float
    ex1: float
    K: float
    phi: float

    def __post_init__(self):
        for name in ("beta0", "beta1", "ex0", "ex1"):
            _check_positive(getattr(self, name), name)
        if not (math.isfinite(self.K) and self.K >= 0):
            raise DomainError(f"K must be >= 0, got {self.K}")
        if not math.isfinite(self.phi):
            raise DomainError("phi must be finite")

    @property
    def alpha(self):
        return math.sqrt(self.beta0 * self.K / (self.K + 1.0))

    def f_aux(self, s_th):
        return self.beta1 * (self.K + 1.0) * s_th * self.ex1 / (self.beta0 * self.ex0)


@dataclass(frozen=True)
class FixedFluidParams:
    """One fixed branch (variance betaf) plus one fluid branch (beta0), MRC."""

    beta0: float
    betaf: float
    ex0: float
    sigma2: float

    def __post_init__(self):
        for name in ("beta0", "betaf", "ex0", "sigma2"):
            _check_positive(getattr(self, name), name)

    @property
    def varsigma(self):
        return 1.0 / self.beta0 - 1.0 / self.betaf


@dataclass(frozen=True)
class ArrayCorrParams:
    """Correlated two-element moving array; c0 = E_x0*beta/sigma^2."""

    coupling: ArrayCoupling
    c0: float

    def __post_init__(self):
        _check_positive(self.c0, "c0")
        if not (0 < self.coupling.delta < MAX_ARRAY_SPACING):
            raise DomainError(
                f"element spacing must lie in (0, {MAX_ARRAY_SPACING:.5f}) "
                f"wavelengths, got {self.coupling.delta}")


# ---------------------------------------------------------------------------
# Rayleigh SNR
# ---------------------------------------------------------------------------

def rayleigh_snr(params: RayleighSnrParams, b, s_th):
    """Exponential marginal and the Rayleigh-envelope spatial LCR."""
    s = _check_threshold(s_th)
    g0 = params.gamma0
    cdf = -math.expm1(-s / g0)
    lcr = math.sqrt(2.0 * b * s / (math.pi * g0)) * math.exp(-s / g0)
    return cdf, lcr


# ---------------------------------------------------------------------------
# SIR, Rayleigh interferers
# ---------------------------------------------------------------------------

def _log_prod_ratio(lambdas, s):
    """log prod_n lambda_n/(lambda_n + s), accumulated in log space."""
    return sum(math.log(lam / (lam + s)) for lam in lambdas)


def sir_unequal(ints: InterfererSet, b, s_th):
    """SIR with pairwise-distinct interferer powers."""
    s = _check_threshold(s_th)
    _require_distinct(ints.lambdas, "interferer lambdas", "sir_equal")
    lams = ints.lambdas
    prod = math.exp(_log_prod_ratio(lams, s))
    cdf = 1.0 - prod
    total = 0.0
    for n, lam_n in enumerate(lams):
        coeff = 1.0
        for i, lam_i in enumerate(lams):
            if i != n:
                coeff *= lam_i / (lam_i - lam_n)
        total += coeff / math.sqrt(lam_n)
    lcr = math.sqrt(b * s / 2.0) * prod * total
    return cdf, max(lcr, 0.0)


def sir_equal(n, lam, b, s_th):
    """SIR with N equal-power interferers."""
    s = _check_threshold(s_th)
    n = int(n)
    if n < 1:
        raise DomainError(f"need N >= 1 interferers, got {n}")
    lam = _check_positive(lam, "lambda")
    ratio_pow = math.exp(n * math.log(lam / (lam + s)))
    cdf = 1.0 - ratio_pow
    prefac = math.exp(lgamma_fn(n + 0.5) - lgamma_fn(n))
    lcr = prefac * math.sqrt(2.0 * b * s / (math.pi * lam)) * ratio_pow
    return cdf, lcr


# ---------------------------------------------------------------------------
# SINR, Rayleigh interferers
# ---------------------------------------------------------------------------

def sinr_single(gamma0, gamma1, lambda01, b, s_th):
    """SINR with a single interferer."""
    s = _check_threshold(s_th)
    gamma0 = _check_positive(gamma0, "gamma0")
    gamma1 = _check_positive(gamma1, "gamma1")
    lambda01 = _check_positive(lambda01, "lambda01")
    ratio = lambda01 / (lambda01 + s)
    expo = math.exp(-s / gamma0)
    cdf = 1.0 - expo * ratio
    w = 1.0 / gamma1
    lcr = (math.sqrt(2.0 * b * s * gamma1 / (math.pi * gamma0)) * ratio * expo
           * gamma_upper_scaled_32(w))
    return cdf, lcr


def sinr_unequal(params: RayleighSnrParams, ints: InterfererSet, b, s_th):
    """SINR with N pairwise-distinct interferer powers."""
    s = _check_threshold(s_th)
    _require_distinct(ints.gammas, "interferer gammas", "sinr_equal")
    g0 = params.gamma0
    prod = math.exp(_log_prod_ratio(ints.lambdas, s))
    expo = math.exp(-s / g0)
    cdf = 1.0 - expo * prod
    ws = [1.0 / g for g in ints.gammas]
    total = 0.0
    for n, wn in enumerate(ws):
        delta_n = 1.0
        for i, wi in enumerate(ws):
            if i != n:
                delta_n *= wi / (wi - wn)
        total += delta_n * gamma_upper_scaled_32(wn) / math.sqrt(wn)
    lcr = math.sqrt(2.0 * b * s / (g0 * math.pi)) * expo * prod * total
    return cdf, max(lcr, 0.0)


def sinr_equal(params: RayleighSnrParams, n, lam, gamma, b, s_th):
    """SINR with N equal-power interferers (alternating binomial-sum LCR).

    The sum equals exp(-W) * int_0^inf sqrt(u+W) u^(N-1) e^-u du, so it is
    positive; cancellation grows like W^(N-1), acceptable for the documented
    family gamma in [0.1, 10], N <= 8.
    """
    s = _check_threshold(s_th)
    n = int(n)
    if n < 1:
        raise DomainError(f"need N >= 1 interferers, got {n}")
    lam = _check_positive(lam, "lambda")
    gamma = _check_positive(gamma, "gamma")
    g0 = params.gamma0
    ratio_pow = math.exp(n * math.log(lam / (lam + s)))
    expo = math.exp(-s / g0)
    cdf = 1.0 - expo * ratio_pow
    w = 1.0 / gamma
    total = 0.0
    for j in range(n):
        total += ((-w) ** (n - 1 - j) * math.comb(n - 1, j)
                  * gamma_upper_scaled_32(w) * _upper_ratio(j + 1.5, w))
    lcr = (math.sqrt(2.0 * b * s / (math.pi * g0)) * expo * ratio_pow
           / (gamma_fn(n) * math.sqrt(w)) * total)
    return cdf, max(lcr, 0.0)


def _upper_ratio(a, w):
    """Gamma(a, w) / Gamma(3/2, w), finite for all w >= 0."""
    if w < 30.0:
        return gamma_upper(a, w) / gamma_upper(1.5, w)
    # both factors ~ w^(a-1) e^-w asymptotically; form the ratio of series
    return _scaled_upper_asym(a, w) / _scaled_upper_asym(1.5, w)


def _scaled_upper_asym(a, w):
    """e^w w^(1-a) Gamma(a, w) for large w, truncated at the smallest term."""
    total = 1.0
    term = 1.0
    prev = math.inf
    k = 0
    while True:
        k += 1
        term *= (a - k) / w
        if abs(term) < 1e-18 or abs(term) >= prev or k > 80:
            break
        total += term
        prev = abs(term)
    return total


# ---------------------------------------------------------------------------
# Ricean SNR
# ---------------------------------------------------------------------------

def ricean_snr_lcr_quadrature(params: RiceanParams, b, s_th,
                              rel_tol=RICEAN_REL_TOL) -> QuadratureResult:
    """LCR integral for the Ricean SNR (theta over [0, pi/2]).

    The exponential decay exp(-K - (K+1)s/gamma0) is folded into the cosh
    (c <= d below by AM-GM), so the integrand never overflows.
    """
    s = _check_threshold(s_th)
    K = params.K
    g0 = params.gamma0
    bcap = params.bcap(b)
    zeta = params.zeta
    c = 2.0 * math.sqrt(K * (K + 1.0) * s / g0)
    d = K + (K + 1.0) * s / g0
    sq2b = math.sqrt(2.0 * bcap)

    def integrand(theta):
        cosh_damped = 0.5 * (math.exp(c * math.cos(theta) - d)
                             + math.exp(-c * math.cos(theta) - d))
        a = params.phi * zeta * math.sin(theta) / sq2b
        bracket = math.exp(-a * a) + math.sqrt(math.pi) * a * erf(a)
        return cosh_damped * bracket

    res = integrate(integrand, 0.0, math.pi / 2, rel_tol=rel_tol,
                    abs_tol=RICEAN_ABS_TOL, initial_panels=4)
    prefac = (2.0 * (K + 1.0) / math.pi ** 1.5) * math.sqrt(2.0 * s * bcap / g0)
    return QuadratureResult(prefac * res.value, prefac * res.est_error,
                            res.evaluations)


def ricean_snr(params: RiceanParams, b, s_th, rel_tol=RICEAN_REL_TOL):
    """Ricean SNR marginal (Marcum Q) and quadrature LCR."""
    s = _check_threshold(s_th)
    K = params.K
    cdf = 1.0 - marcum_q1(math.sqrt(2.0 * K),
                          math.sqrt(2.0 * (K + 1.0) * s / params.gamma0))
    if s == 0.0:
        return 0.0, 0.0
    lcr = ricean_snr_lcr_quadrature(params, b, s, rel_tol=rel_tol).value
    return cdf, max(lcr, 0.0)


# ---------------------------------------------------------------------------
# Ricean SIR
# ---------------------------------------------------------------------------

def ricean_sir_lcr_quadrature(params: RiceanSirParams, b, s_th,
                              rel_tol=RICEAN_REL_TOL) -> QuadratureResult:
    """LCR integral for the Ricean/Rayleigh SIR (theta over [0, 2*pi])."""
    s = _check_threshold(s_th)
    K = params.K
    al = params.alpha
    phi = params.phi
    kappa1 = 2.0 * (params.beta0 * b / (K + 1.0)
                    + b * params.beta1 * s * params.ex1 / params.ex0)
    kappa2 = ((K + 1.0) * params.ex1 * s / (params.ex0 * params.beta0)
              + 1.0 / params.beta1)
    kappa3 = 2.0 * math.sqrt(params.ex1 * s * K * (K + 1.0)
                             / (params.ex0 * params.beta0))
    sqk1 = math.sqrt(kappa1)
    sqk2 = math.sqrt(kappa2)

    def integrand(theta):
        sn = math.sin(theta)
        cs = math.cos(theta)
        t1 = (math.sqrt(kappa1 / (4.0 * math.pi))
              * math.exp(-(al * phi * sn) ** 2 / kappa1)
              + 0.5 * al * phi * sn * (1.0 + erf(al * phi * sn / sqk1)))
        kc = kappa3 * cs
        t2 = (kc / (4.0 * kappa2 * kappa2)
              + math.exp(kc * kc / (4.0 * kappa2)) * math.sqrt(math.pi)
              / (8.0 * kappa2 ** 2.5) * (kc * kc + 2.0 * kappa2)
              * (1.0 + erf(kc / (2.0 * sqk2))))
        return t1 * t2

    res = integrate(integrand, 0.0, 2.0 * math.pi, rel_tol=rel_tol,
                    abs_tol=RICEAN_ABS_TOL, initial_panels=8)
    prefac = (math.sqrt(s * params.ex1 / params.ex0) * 2.0 * math.exp(-K)
              * (K + 1.0) / (math.pi * params.beta0 * params.beta1))
    return QuadratureResult(prefac * res.value, prefac * res.est_error,
                            res.evaluations)


def ricean_sir(params: RiceanSirParams, b, s_th, rel_tol=RICEAN_REL_TOL):
    """Ricean-desired / Rayleigh-interferer SIR marginal and quadrature LCR."""
    s = _check_threshold(s_th)
    if s == 0.0:
        return 0.0, 0.0
    f = params.f_aux(s)
    cdf = f / (1.0 + f) * math.exp(-params.K / (1.0 + f))
    lcr = ricean_sir_lcr_quadrature(params, b, s, rel_tol=rel_tol).value
    return cdf, max(lcr, 0.0)


# ---------------------------------------------------------------------------
# Fixed antenna + fluid antenna (MRC)
# ---------------------------------------------------------------------------

def _int_r2_exp(varsigma, g):
    """int_0^sqrt(g) r^2 exp(-varsigma r^2) dr, any sign of varsigma."""
    if g == 0.0:
        return 0.0
    x = varsigma * g
    if abs(x) < 1e-4:
        # series around varsigma = 0 (the closed forms cancel badly there)
        return g ** 1.5 * (1.0 / 3.0 - x / 5.0 + x * x / 14.0 - x ** 3 / 54.0)
    if varsigma > 0.0:
        return gamma_lower(1.5, x) / (2.0 * varsigma ** 1.5)
    a = -varsigma
    root = math.sqrt(a * g)
    return (math.sqrt(g) * math.exp(a * g) / (2.0 * a)
            - math.exp(a * g) * dawson(root) / (2.0 * a ** 1.5))


def fixed_fluid_unequal(params: FixedFluidParams, b, s_th):
    """Hypoexponential marginal (distinct branch powers) and its LCR."""
    s = _check_threshold(s_th)
    if abs(params.beta0 - params.betaf) <= DEGENERACY_GAP * params.betaf:
        raise DegenerateParameterError(
            "branch powers nearly equal; use fixed_fluid_equal")
    g = params.sigma2 * s / params.ex0
    vs = params.varsigma
    cdf = 1.0 - (math.exp(-g / params.betaf) / params.beta0
                 - math.exp(-g / params.beta0) / params.betaf) / vs
    lcr = (2.0 * math.sqrt(2.0 * b * params.beta0 / math.pi)
           * math.exp(-g / params.betaf) / (params.beta0 * params.betaf)
           * _int_r2_exp(vs, g))
    return min(max(cdf, 0.0), 1.0), max(lcr, 0.0)


def fixed_fluid_equal(beta, ex0, sigma2, b, s_th):
    """Equal branch powers: shape-2 gamma marginal."""
    s = _check_threshold(s_th)
    beta = _check_positive(beta, "beta")
    ex0 = _check_positive(ex0, "ex0")
    sigma2 = _check_positive(sigma2, "sigma2")
    x = sigma2 * s / (ex0 * beta)
    cdf = -math.expm1(-x) - x * math.exp(-x)
    lcr = (2.0 / 3.0) * math.sqrt(2.0 * b / math.pi) * math.exp(-x) * x ** 1.5
    return max(cdf, 0.0), lcr


# ---------------------------------------------------------------------------
# Two-element moving array
# ---------------------------------------------------------------------------

def array_independent(beta, ex0, sigma2, b, s_th):
    """Uncorrelated two-branch MRC carried along the track."""
    s = _check_threshold(s_th)
    beta = _check_positive(beta, "beta")
    ex0 = _check_positive(ex0, "ex0")
    sigma2 = _check_positive(sigma2, "sigma2")
    x = sigma2 * s / (ex0 * beta)
    cdf = -math.expm1(-x) - x * math.exp(-x)
    lcr = math.sqrt(2.0 * b / math.pi) * x ** 1.5 * math.exp(-x)
    return max(cdf, 0.0), lcr


# Coefficients of e^x (F(sqrt(x)) - sqrt(x)) = -sum a_n x^(n+1/2),
# a_n = 2n / (n! (2n+1)); five terms serve the small-argument branch.
_ARRAY_SERIES = tuple(2.0 * n / (math.factorial(n) * (2 * n + 1))
                      for n in range(1, 6))
ARRAY_SMALL_J = 1e-4
_ARRAY_SERIES_X = 1e-3  # series whenever |x_i| stay below this


def array_correlated(params: ArrayCorrParams, b, s_th):
    """Coupled two-element moving array.

    Marginal: hypoexponential with branch means c0*(1 -/+ J) (eigenvalues of
    the 2x2 element covariance).  LCR: Dawson-bracket form with the outer
    exponential folded into each term (the combined exponents are
    -q*c1*(1 -/+ J) <= 0, so nothing overflows at any threshold); a series
    branch keeps it finite and accurate through J = 0, and negative J
    (spacing past the first J0 zero) uses the real continuation of the
    bracket via the scaled complementary error function.
    """
    s = _check_threshold(s_th)
    J = params.coupling.J
    c1 = params.coupling.c1
    c0 = params.c0
    x = s / c0

    # marginal cdf
    if abs(J) < 1e-6:
        cdf = -math.expm1(-x) - x * math.exp(-x)
    else:
        cdf = (1.0 + (1.0 - J) / (2.0 * J) * math.exp(-x / (1.0 - J))
               - (1.0 + J) / (2.0 * J) * math.exp(-x / (1.0 + J)))
    cdf = min(max(cdf, 0.0), 1.0)

    if s == 0.0:
        return 0.0, 0.0

    one_m_j2 = 1.0 - J * J
    q = s / (one_m_j2 * c1 * c0)
    pref = math.sqrt(c1 * one_m_j2 / (2.0 * math.pi))
    x1 = J * (b + c1) * q  # pairs with combined exponent -q*c1*(1-J)
    x2 = J * (b - c1) * q  # pairs with combined exponent -q*c1*(1+J)
    e1 = math.exp(-q * c1 * (1.0 - J))
    e2 = math.exp(-q * c1 * (1.0 + J))

    aj = abs(J)
    if aj < ARRAY_SMALL_J or max(abs(x1), abs(x2)) < _ARRAY_SERIES_X:
        # damped bracket / J^(3/2) as a series in x_i = J (b -/+ c1) q
        h = 0.0
        for n, a_n in enumerate(_ARRAY_SERIES, start=1):
            h += (a_n * q ** (n + 0.5) * J ** (n - 1)
                  * ((b + c1) ** (n + 0.5) - (b - c1) ** (n + 0.5)))
        h *= math.exp(-(c1 + J * b) * q)
    elif J > 0.0:
        r1 = math.sqrt(x1)
        r2 = math.sqrt(x2)
        h = (e2 * (dawson(r2) - r2) - e1 * (dawson(r1) - r1)) / J ** 1.5
    else:
        # continuation of e^(x-E) (F(sqrt(x)) - sqrt(x)) at x = -u:
        # e^(-E-u) ((sqrt(pi)/2) erfcx(sqrt(u)) + sqrt(u)), the sqrt(pi)/2
        # saturation terms cancelling exactly
        r1 = math.sqrt(-x1)
        r2 = math.sqrt(-x2)
        half_rt_pi = 0.5 * math.sqrt(math.pi)
        h = (e2 * (half_rt_pi * erfcx(r2) + r2)
             - e1 * (half_rt_pi * erfcx(r1) + r1)) / aj ** 1.5
    lcr = pref * h
    return cdf, max(lcr, 0.0)
