"""Track-maximum cdf approximation, bound, tails and length solvers."""

import math

import mpmath as mp
import numpy as np
import pytest

from fasim import supremum as sup
from fasim.errors import DomainError, InfeasibleTargetError
from fasim.specfun import gamma_upper

B = math.pi ** 2
RNG = np.random.default_rng(77)


def test_no_crossings_keeps_marginal():
    assert sup.sup_cdf(0.5, 0.0, 5.0).approx_cdf == 0.5


def test_closed_form_example():
    cdf = 1.0 - math.exp(-1.0)
    lcr = math.sqrt(2 * math.pi) * math.exp(-1.0)
    res = sup.sup_cdf(cdf, lcr, 1.0, s_th=1.0)
    assert abs(res.approx_cdf - cdf * math.exp(-lcr / cdf)) < 1e-15
    assert res.marginal_cdf == cdf
    assert res.s_th == 1.0


def test_zero_length_is_marginal():
    res = sup.sup_cdf(0.73, 1.9, 0.0)
    assert res.approx_cdf == 0.73


def test_zero_cdf_convention():
    assert sup.sup_cdf(0.0, 1.0, 2.0).approx_cdf == 0.0
    assert sup.sup_cdf(0.0, 0.0, 2.0).approx_cdf == 0.0


def test_bound_clamps_and_taylor():
    assert sup.sup_cdf_bound(0.2, 1.0, 1.0) == 0.0
    cdf, lcr, L = 0.5, 0.5e-6, 1.0  # L*lcr/cdf = 1e-6
    approx = sup.sup_cdf(cdf, lcr, L).approx_cdf
    bound = sup.sup_cdf_bound(cdf, lcr, L)
    assert abs(approx - bound) < 1e-12 * cdf


def test_sandwich_on_random_triples():
    for _ in range(10_000):
        cdf = RNG.uniform(0.0, 1.0)
        lcr = RNG.uniform(0.0, 3.0)
        L = RNG.uniform(0.0, 5.0)
        res = sup.sup_cdf(cdf, lcr, L)
        assert res.lower_bound <= res.approx_cdf + 1e-15
        assert res.approx_cdf <= res.marginal_cdf + 1e-15


def test_monotone_in_length():
    cdf, lcr = 0.6, 0.8
    values = [sup.sup_cdf(cdf, lcr, L).approx_cdf for L in np.linspace(0, 4, 50)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_domain_errors():
    with pytest.raises(DomainError):
        sup.sup_cdf(1.2, 0.1, 1.0)
    with pytest.raises(DomainError):
        sup.sup_cdf(0.5, -0.1, 1.0)
    with pytest.raises(DomainError):
        sup.sup_cdf(0.5, 0.1, -1.0)


# ---------------------------------------------------------------------------
# high-threshold tails
# ---------------------------------------------------------------------------

def test_tail_snr_fixed_antenna_limit():
    assert abs(sup.tail_success_snr(1.0, B, 0.0, 2.0) - math.exp(-2.0)) < 1e-15


def test_tail_snr_affine_in_length():
    s, g0 = 3.0, 1.0
    v0 = sup.tail_success_snr(g0, B, 0.0, s)
    v1 = sup.tail_success_snr(g0, B, 1.0, s)
    v2 = sup.tail_success_snr(g0, B, 2.0, s)
    assert v2 - v0 == 2.0 * (v1 - v0)


def test_tail_snr_matches_sup_cdf_asymptotically():
    g0, L = 1.0, 1.0
    s = 12.0 * g0
    cdf = -math.expm1(-s / g0)
    lcr = math.sqrt(2 * B * s / (math.pi * g0)) * math.exp(-s / g0)
    exact_tail = 1.0 - sup.sup_cdf(cdf, lcr, L).approx_cdf
    asym = sup.tail_success_snr(g0, B, L, s)
    assert abs(asym / exact_tail - 1.0) < 0.02


def test_tail_sinr_fixed_antenna_limit():
    g0, g1, lam, s = 1.0, 2.0, 0.5, 3.0
    ref = lam / (lam + s) * math.exp(-s / g0)
    assert abs(sup.tail_success_sinr(g0, g1, lam, B, 0.0, s) - ref) < 1e-15


def test_tail_sinr_affine_and_asymptotic():
    g0, g1, lam = 1.0, 1.0, 1.0
    s = 12.0
    v0 = sup.tail_success_sinr(g0, g1, lam, B, 0.0, s)
    v1 = sup.tail_success_sinr(g0, g1, lam, B, 1.0, s)
    v2 = sup.tail_success_sinr(g0, g1, lam, B, 2.0, s)
    assert abs((v2 - v0) - 2.0 * (v1 - v0)) < 1e-18
    from fasim.analytic import sinr_single

    cdf, lcr = sinr_single(g0, g1, lam, B, s)
    exact_tail = 1.0 - sup.sup_cdf(cdf, lcr, 1.0).approx_cdf
    assert abs(v1 / exact_tail - 1.0) < 0.02


# ---------------------------------------------------------------------------
# neutralization length
# ---------------------------------------------------------------------------

def test_neutralization_scaling_in_gamma0():
    L1 = sup.neutralization_length(2.0, 1.0, 3.0, B)
    L2 = sup.neutralization_length(2.0, 2.0, 3.0, B)
    assert abs(L2 - L1 / math.sqrt(2.0)) < 1e-15


def test_neutralization_against_extended_precision():
    for s, g0, g1 in [(1.0, 1.0, 1.0), (2.3, 3.16, 5.0), (0.5, 1.0, 100.0),
                      (4.0, 10.0, 10.0)]:
        w = mp.mpf(1) / g1
        ref = float(mp.sqrt(mp.pi * s * g1 / (2 * B * g0))
                    * mp.e ** (-w) / mp.gammainc(1.5, w, mp.inf))
        assert abs(sup.neutralization_length(s, g0, g1, B) - ref) < 1e-12 * ref


def test_neutralization_large_gamma1_asymptote():
    # L / sqrt(gamma1) saturates at sqrt(pi s/(2 b gamma0)) / Gamma(3/2):
    # the growth is sqrt(gamma1), not quadratic
    s, g0 = 1.0, 1.0
    l10 = sup.neutralization_length(s, g0, 10.0, B)
    l100 = sup.neutralization_length(s, g0, 100.0, B)
    assert abs((l100 / math.sqrt(100.0)) / (l10 / math.sqrt(10.0)) - 1.0) < 0.08
    limit = math.sqrt(math.pi * s / (2 * B * g0)) / gamma_upper(1.5, 0.0)
    assert abs(l100 / math.sqrt(100.0) / limit - 1.0) < 0.01


def test_neutralization_rejects_nonpositive():
    with pytest.raises(DomainError):
        sup.neutralization_length(0.0, 1.0, 1.0, B)
    with pytest.raises(DomainError):
        sup.neutralization_length(1.0, -1.0, 1.0, B)


# ---------------------------------------------------------------------------
# required length
# ---------------------------------------------------------------------------

def test_required_length_at_marginal_is_zero():
    assert sup.required_length(0.4, 0.4, 0.7) == 0.0


def test_required_length_one_over_e():
    cdf, lcr = 0.5, 0.8
    L = sup.required_length(cdf / math.e, cdf, lcr)
    assert abs(L - cdf / lcr) < 1e-15


def test_required_length_roundtrip():
    for _ in range(300):
        cdf = RNG.uniform(0.05, 0.99)
        lcr = RNG.uniform(0.01, 2.0)
        target = RNG.uniform(0.01, 1.0) * cdf
        L = sup.required_length(target, cdf, lcr)
        back = sup.sup_cdf(cdf, lcr, L).approx_cdf
        assert abs(back - target) < 1e-12


def test_required_length_infeasible():
    with pytest.raises(InfeasibleTargetError):
        sup.required_length(0.8, 0.5, 1.0)
    with pytest.raises(InfeasibleTargetError):
        sup.required_length(0.3, 0.5, 0.0)
