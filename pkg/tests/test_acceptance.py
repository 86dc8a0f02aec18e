"""Acceptance suite: the eight reference-experiment criteria at full scale.

Each criterion runs at its stated tolerance and prints one pass/fail line
(visible under pytest -s; test names also map one-to-one to criteria).
Monte Carlo ensembles are cached module-wide so overlapping criteria share
simulation passes; 10^5 trials at grid step 1e-3 unless a criterion states
otherwise.
"""

import math

import numpy as np
import pytest

import test_analytic
import test_specfun
from fasim import analytic as an
from fasim import supremum as sup
from fasim.experiments import (
    fixed_outage_threshold,
    neutralization_simulated,
    run_reduction_sweep,
)
from fasim.kernels import upcross_counts
from fasim.montecarlo import SimConfig, run_ensemble, _unit_fields_batch
from fasim.scenarios import (
    ArrayCorrelatedScenario,
    ArrayIndependentScenario,
    FixedFluidScenario,
    RayleighSnrScenario,
    RiceanSirScenario,
    RiceanSnrScenario,
    SinrScenario,
    SirScenario,
)

B = math.pi ** 2
TRIALS = 100_000
SEED = 20240914
GRID_STEP = 1e-3

_cache = {}


def _report(criterion, ok, detail):
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def get_ensemble(name, scenario, length, generator, thresholds,
                 trials=TRIALS, ports=(), want_below=False):
    if name not in _cache:
        sim = SimConfig(grid_step=GRID_STEP, track_length=length,
                        trials=trials, seed=SEED, generator=generator)
        _cache[name] = run_ensemble(scenario, sim, thresholds,
                                    port_counts=ports, want_below=want_below)
    return _cache[name]


def get_paired_fig4():
    """SIR and SINR share the same channel draws: one field pass, two metrics."""
    if "fig4" in _cache:
        return _cache["fig4"]
    th = np.logspace(math.log10(0.005), math.log10(10.0), 200)
    sir_sc = SirScenario(ex_i=(1.0, 1.0), beta_i=(1.0 / 0.6, 1.0 / 0.4))
    sinr_sc = SinrScenario(ex_i=(1.0, 1.0), beta_i=(1.0 / 0.6, 1.0 / 0.4))
    sim = SimConfig(grid_step=GRID_STEP, track_length=1.0, trials=TRIALS,
                    seed=SEED, generator="sum_of_sinusoids")
    n_grid = sim.n_grid
    ports = {5: np.round(np.linspace(0, n_grid - 1, 5)).astype(int),
             20: np.round(np.linspace(0, n_grid - 1, 20)).astype(int)}
    grid = sim.grid()
    out = {}
    for key in ("sir", "sinr"):
        out[key] = {
            "sups": np.empty(TRIALS),
            "ports": {k: np.empty(TRIALS) for k in ports},
            "cross": np.zeros(th.size),
            "cross_sq": np.zeros(th.size),
        }
    done = 0
    while done < TRIALS:
        n = min(256, TRIALS - done)
        idx = range(done, done + n)
        moving, fixed = _unit_fields_batch(sir_sc, sim, idx)
        channels = sir_sc.channels_from_unit(moving, fixed, grid)
        for key, sc in (("sir", sir_sc), ("sinr", sinr_sc)):
            metric = np.ascontiguousarray(sc.metric_from_channels(channels))
            acc = out[key]
            acc["sups"][done:done + n] = metric.max(axis=1)
            for k, cols in ports.items():
                acc["ports"][k][done:done + n] = metric[:, cols].max(axis=1)
            counts = upcross_counts(metric, th)
            acc["cross"] += counts.sum(axis=0)
            acc["cross_sq"] += (counts.astype(float) ** 2).sum(axis=0)
        done += n
    for key in out:
        out[key]["sups"].sort()
        for k in out[key]["ports"]:
            out[key]["ports"][k].sort()
    _cache["fig4"] = (th, sir_sc, sinr_sc, out)
    return _cache["fig4"]


def emp_cdf(sorted_sups, th):
    n = sorted_sups.size
    cdf = np.searchsorted(sorted_sups, th, side="right") / n
    se = np.sqrt(np.maximum(cdf * (1.0 - cdf), 1.0 / n) / n)
    return cdf, se


def analytic_sup_curve(scenario, length, th):
    approx = np.empty(th.size)
    bound = np.empty(th.size)
    for i, s in enumerate(th):
        cdf, lcr = scenario.marginal_pair(float(s))
        res = sup.sup_cdf(cdf, lcr, length)
        approx[i] = res.approx_cdf
        bound[i] = res.lower_bound
    return approx, bound


def lcr_check_rows(res, scenario, targets=(0.3, 0.5, 0.7)):
    """(threshold, analytic, empirical, se) at three mid-cdf thresholds."""
    cdf, _ = emp_cdf(res.sups, res.thresholds)
    marginals = np.array([scenario.marginal_pair(float(s))[0]
                          for s in res.thresholds])
    n = res.sups.size
    length = res.sim.track_length
    rows = []
    for target in targets:
        j = int(np.argmin(np.abs(marginals - target)))
        rate = res.crossing_sum[j] / n / length
        var = max(res.crossing_sqsum[j] / n - (res.crossing_sum[j] / n) ** 2, 0.0)
        se = math.sqrt(var / n) / length
        _, ana = scenario.marginal_pair(float(res.thresholds[j]))
        rows.append((float(res.thresholds[j]), ana, rate, se))
    return rows


def assert_lcr_rows(criterion, label, rows):
    for s, ana, emp, se in rows:
        tol = max(0.05 * ana, 3.0 * se)
        ok = abs(emp - ana) <= tol
        _report(criterion, ok,
                f"{label} LCR at s={s:.3g}: analytic {ana:.4f} vs MC "
                f"{emp:.4f} (tol {tol:.4f})")


FIG3_TH = np.logspace(math.log10(0.005), math.log10(15.0), 200)


def fig3_run(length, generator):
    sc = RayleighSnrScenario()
    return get_ensemble(f"fig3_L{length}", sc, length, generator, FIG3_TH), sc


# ---------------------------------------------------------------------------
# criterion 1: Rayleigh SNR curves
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("length,generator,tol", [
    (0.5, "cholesky", 0.02),
    (1.0, "cholesky", 0.02),
    (5.0, "sum_of_sinusoids", 0.03),
])
def test_criterion_1_rayleigh_snr_curves(length, generator, tol):
    res, sc = fig3_run(length, generator)
    cdf, se = emp_cdf(res.sups, FIG3_TH)
    approx, bound = analytic_sup_curve(sc, length, FIG3_TH)
    mask = (cdf >= 0.001) & (cdf <= 0.999)
    dev = np.abs(approx - cdf)[mask].max()
    _report(1, dev <= tol,
            f"Rayleigh SNR L={length}: max |approx - MC| = {dev:.4f} "
            f"(tol {tol})")
    excess = (bound - (cdf + 3.0 * se)).max()
    _report(1, excess <= 0.0,
            f"Rayleigh SNR L={length}: lower bound <= MC + 3se "
            f"(max excess {excess:.2e})")


# ---------------------------------------------------------------------------
# criterion 2: SIR / SINR curves with discrete ports
# ---------------------------------------------------------------------------

def test_criterion_2_sinr_full_grid():
    th, _, sinr_sc, out = get_paired_fig4()
    cdf, _ = emp_cdf(out["sinr"]["sups"], th)
    approx, _ = analytic_sup_curve(sinr_sc, 1.0, th)
    dev = np.abs(approx - cdf).max()
    _report(2, dev <= 0.02,
            f"SINR L=1 two interferers: max |approx - MC| = {dev:.4f} "
            f"(tol 0.02, full grid)")


def test_criterion_2_sir_split_tolerances():
    th, sir_sc, _, out = get_paired_fig4()
    cdf, _ = emp_cdf(out["sir"]["sups"], th)
    approx, _ = analytic_sup_curve(sir_sc, 1.0, th)
    upper = cdf >= 0.5
    dev_hi = np.abs(approx - cdf)[upper].max()
    dev_lo = np.abs(approx - cdf)[~upper].max() if (~upper).any() else 0.0
    _report(2, dev_hi <= 0.02,
            f"SIR upper half: max dev = {dev_hi:.4f} (tol 0.02)")
    _report(2, dev_lo <= 0.06,
            f"SIR lower half: max dev = {dev_lo:.4f} (tol 0.06, approximation "
            f"optimistic at low thresholds)")


def test_criterion_2_discrete_ports():
    th, _, _, out = get_paired_fig4()
    for key in ("sir", "sinr"):
        cont, _ = emp_cdf(out[key]["sups"], th)
        c20, _ = emp_cdf(out[key]["ports"][20], th)
        gap = np.abs(c20 - cont).max()
        _report(2, gap <= 0.01,
                f"{key.upper()} 20 ports vs continuous: max gap = {gap:.4f} "
                f"(tol 0.01)")
        # any port subset of the grid is dominated by the continuous sup
        c5, _ = emp_cdf(out[key]["ports"][5], th)
        assert np.all(c5 >= cont - 1e-12) and np.all(c20 >= cont - 1e-12)


# ---------------------------------------------------------------------------
# criterion 3: Ricean curves and quadrature LCR
# ---------------------------------------------------------------------------

FIG5_TH = np.logspace(math.log10(0.002), math.log10(8.0), 200)


def fig5_snr_run(K):
    sc = RiceanSnrScenario(K=K, phi=2 * math.pi)
    return get_ensemble(f"fig5_snr_K{K}", sc, 1.0, "sum_of_sinusoids",
                        FIG5_TH), sc


def fig5_sir_run():
    sc = RiceanSirScenario(K=1.0, phi=2 * math.pi, beta1=10.0, ex1=1.0,
                           beta0=1.0, ex0=1.0)
    return get_ensemble("fig5_sir", sc, 1.0, "sum_of_sinusoids", FIG5_TH), sc


@pytest.mark.parametrize("K", [1.0, 5.0])
def test_criterion_3_ricean_snr_curves(K):
    res, sc = fig5_snr_run(K)
    cdf, _ = emp_cdf(res.sups, FIG5_TH)
    approx, _ = analytic_sup_curve(sc, 1.0, FIG5_TH)
    dev = np.abs(approx - cdf).max()
    _report(3, dev <= 0.02,
            f"Ricean SNR K={K}, phi=2pi: max |approx - MC| = {dev:.4f} "
            f"(tol 0.02)")


def test_criterion_3_ricean_sir_curve():
    res, sc = fig5_sir_run()
    cdf, _ = emp_cdf(res.sups, FIG5_TH)
    approx, _ = analytic_sup_curve(sc, 1.0, FIG5_TH)
    upper = cdf >= 0.5
    dev = np.abs(approx - cdf)[upper].max()
    _report(3, dev <= 0.02,
            f"Ricean SIR beta1=10: upper-half max dev = {dev:.4f} (tol 0.02)")


def test_criterion_3_ricean_quadrature_lcr():
    res, sc = fig5_snr_run(1.0)
    assert_lcr_rows(3, "Ricean SNR K=1", lcr_check_rows(res, sc))
    res, sc = fig5_sir_run()
    assert_lcr_rows(3, "Ricean SIR", lcr_check_rows(res, sc))


# ---------------------------------------------------------------------------
# criterion 4: outage-reduction insight
# ---------------------------------------------------------------------------

def test_criterion_4_reduction_crossings():
    gamma0, p_t = 1.0, 0.1
    s_th = fixed_outage_threshold(p_t, gamma0)
    sc = RayleighSnrScenario()
    cdf, lcr = sc.marginal_pair(s_th)
    for decades, l_ref in ((1, 0.25), (2, 0.62), (3, 1.0)):
        l_cross = decades * math.log(10.0) * cdf / lcr
        ok = abs(l_cross - l_ref) <= 0.1
        _report(4, ok,
                f"10^-{decades} outage reduction at L = {l_cross:.3f} "
                f"(reference {l_ref} +/- 0.1)")
    # the sweep table reproduces the same crossings
    lengths = np.linspace(0.0, 1.5, 1501)
    _, cols = run_reduction_sweep((p_t,), lengths, gamma0)
    reduction = cols["reduction_p0.1"]
    for decades, l_ref in ((1, 0.25), (2, 0.62), (3, 1.0)):
        j = int(np.argmax(reduction <= 10.0 ** -decades))
        assert abs(lengths[j] - l_ref) <= 0.1
    assert reduction[0] == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# criterion 5: interference neutralization
# ---------------------------------------------------------------------------

def test_criterion_5_closed_form_structure():
    s_th, g1 = 2.0, 3.0
    l1 = sup.neutralization_length(s_th, 1.0, g1, B)
    l2 = sup.neutralization_length(s_th, 2.0, g1, B)
    _report(5, abs(l2 - l1 / math.sqrt(2.0)) < 1e-15,
            "closed form scales exactly as 1/sqrt(gamma0)")
    # figure parameterization: monotone in ratio and in gamma0
    ratios = np.linspace(1.0, 12.0, 23)
    curves = {}
    for g0 in (1.0, 10 ** 0.5, 10.0):
        s = fixed_outage_threshold(0.9, g0)
        curves[g0] = np.array([
            sup.neutralization_length(s, g0, r * g0, B) for r in ratios])
        assert np.all(np.diff(curves[g0]) > 0)
    ok = np.all(curves[10 ** 0.5] > curves[1.0]) and \
        np.all(curves[10.0] > curves[10 ** 0.5])
    _report(5, ok, "closed-form required length monotone in ratio and gamma0")


def test_criterion_5_simulated_neutralizable_ratio():
    gamma0 = 10 ** 0.5  # 5 dB
    ratios = np.array([2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
    sim = SimConfig(grid_step=GRID_STEP, trials=30_000, seed=SEED,
                    generator="sum_of_sinusoids")
    lengths = neutralization_simulated(0.1, gamma0, ratios, sim, l_max=2.0)
    assert np.all(np.isfinite(lengths))
    # required L grows with the interferer ratio; invert at L = 1
    assert np.all(np.diff(lengths) > 0)
    ratio_at_1 = float(np.interp(1.0, lengths, ratios))
    _report(5, 3.5 <= ratio_at_1 <= 6.5,
            f"neutralizable ratio at L=1, gamma0=5dB, pT=0.1: "
            f"{ratio_at_1:.2f} (window [3.5, 6.5])")


# ---------------------------------------------------------------------------
# criterion 6: multi-antenna curves and layout ordering
# ---------------------------------------------------------------------------

FIG7_TH = np.logspace(math.log10(0.05), math.log10(18.0), 200)


def ff_run(length):
    sc = FixedFluidScenario()
    return get_ensemble(f"fig7_ff_L{length}", sc, length, "sum_of_sinusoids",
                        FIG7_TH), sc


def array_run(length):
    sc = ArrayCorrelatedScenario(delta=0.25)
    return get_ensemble(f"fig7_arr_L{length}", sc, length,
                        "sum_of_sinusoids", FIG7_TH), sc


@pytest.mark.parametrize("length", [1.0, 3.0])
def test_criterion_6_fixed_fluid_curves(length):
    res, sc = ff_run(length)
    cdf, _ = emp_cdf(res.sups, FIG7_TH)
    approx, _ = analytic_sup_curve(sc, length, FIG7_TH)
    mask = (cdf >= 0.001) & (cdf <= 0.999)
    dev = np.abs(approx - cdf)[mask].max()
    _report(6, dev <= 0.02,
            f"fixed+fluid equal power L={length}: max dev = {dev:.4f} "
            f"(tol 0.02)")


@pytest.mark.parametrize("length", [0.5, 1.0])
def test_criterion_6_correlated_array_curves(length):
    res, sc = array_run(length)
    cdf, _ = emp_cdf(res.sups, FIG7_TH)
    approx, _ = analytic_sup_curve(sc, length, FIG7_TH)
    mask = (cdf >= 0.001) & (cdf <= 0.999)
    dev = np.abs(approx - cdf)[mask].max()
    _report(6, dev <= 0.02,
            f"correlated array delta=0.25, L={length}: max dev = {dev:.4f} "
            f"(tol 0.02)")


def test_criterion_6_layout_ordering():
    fixed = get_ensemble("fig9_fixed", RayleighSnrScenario(), 0.0,
                         "cholesky", FIG7_TH)
    fluid, _ = fig3_run(1.0, "cholesky")
    ff, _ = ff_run(1.0)
    arr, _ = array_run(1.0)
    curves = []
    for res, th in ((fixed, FIG7_TH), (fluid, FIG3_TH), (ff, FIG7_TH),
                    (arr, FIG7_TH)):
        cdf, se = emp_cdf(res.sups, FIG7_TH)
        curves.append((cdf, se))
    values = np.array([c for c, _ in curves])
    ses = np.array([s for _, s in curves])
    mid = np.all((values >= 0.05) & (values <= 0.95), axis=0)
    assert mid.sum() > 10
    ok = True
    worst = 0.0
    for a, b in ((0, 1), (1, 2), (2, 3)):
        slack = 3.0 * np.sqrt(ses[a] ** 2 + ses[b] ** 2)
        margin = (values[a] - values[b] + slack)[mid].min()
        worst = min(worst, margin)
        ok &= margin >= 0.0
    _report(6, ok,
            f"layout ordering fixed >= fluid >= fixed+fluid >= corr-array in "
            f"outage on the empirical mid-range (worst margin {worst:.4f})")


# ---------------------------------------------------------------------------
# criterion 7: LCR oracle suite over all twelve scenarios
# ---------------------------------------------------------------------------

GEN_TH = np.logspace(-2.3, 1.0, 200)


def test_criterion_7_lcr_all_scenarios():
    th4, sir_sc, sinr_sc, out4 = get_paired_fig4()

    # reused ensembles
    res3, sc3 = fig3_run(1.0, "cholesky")
    assert_lcr_rows(7, "rayleigh_snr", lcr_check_rows(res3, sc3))
    for key, sc in (("sir", sir_sc), ("sinr", sinr_sc)):
        acc = out4[key]
        marginals = np.array([sc.marginal_pair(float(s))[0] for s in th4])
        for target in (0.3, 0.5, 0.7):
            j = int(np.argmin(np.abs(marginals - target)))
            rate = acc["cross"][j] / TRIALS
            var = max(acc["cross_sq"][j] / TRIALS - rate ** 2, 0.0)
            se = math.sqrt(var / TRIALS)
            _, ana = sc.marginal_pair(float(th4[j]))
            tol = max(0.05 * ana, 3.0 * se)
            _report(7, abs(rate - ana) <= tol,
                    f"{key}_unequal LCR at s={th4[j]:.3g}: analytic "
                    f"{ana:.4f} vs MC {rate:.4f} (tol {tol:.4f})")
    res5, sc5 = fig5_snr_run(1.0)
    assert_lcr_rows(7, "ricean_snr", lcr_check_rows(res5, sc5))
    res5s, sc5s = fig5_sir_run()
    assert_lcr_rows(7, "ricean_sir", lcr_check_rows(res5s, sc5s))
    res7, sc7 = ff_run(1.0)
    assert_lcr_rows(7, "fixed_fluid_equal", lcr_check_rows(res7, sc7))
    resa, sca = array_run(1.0)
    assert_lcr_rows(7, "array_correlated", lcr_check_rows(resa, sca))

    # scenarios not covered by the figure runs
    fresh = [
        ("sir_equal", SirScenario(ex_i=(1.0, 1.0), beta_i=(2.0, 2.0),
                                  equal_power=True)),
        ("sinr_single", SinrScenario(ex_i=(1.0,), beta_i=(1.0,))),
        ("sinr_equal", SinrScenario(ex_i=(1.0, 1.0), beta_i=(0.8, 0.8),
                                    equal_power=True)),
        ("fixed_fluid_unequal", FixedFluidScenario(beta0=1.0, betaf=2.0,
                                                   equal_power=False)),
        ("array_independent", ArrayIndependentScenario()),
    ]
    for name, sc in fresh:
        res = get_ensemble(f"lcr_{name}", sc, 1.0, "sum_of_sinusoids", GEN_TH)
        assert_lcr_rows(7, name, lcr_check_rows(res, sc))


# ---------------------------------------------------------------------------
# criterion 8: property suites
# ---------------------------------------------------------------------------

def test_criterion_8_pair_invariants_10k_draws():
    # cdf/LCR range and monotonicity contracts on every draw; closed-form
    # pairs get the full 200-point grid, the two quadrature-based pairs a
    # 20-point grid (their integrals dominate cost)
    count = 0
    for name, pair in test_analytic._random_pairs(10_000):
        points = 20 if name.startswith("ricean") else 200
        test_analytic.check_pair_contract(name, pair, n_points=points)
        count += 1
    _report(8, count == 10_000,
            f"cdf/LCR invariants on {count} random parameter draws")


def test_criterion_8_sandwich_10k_triples():
    rng = np.random.default_rng(88)
    for _ in range(10_000):
        cdf = rng.uniform(0.0, 1.0)
        lcr = rng.uniform(0.0, 3.0)
        length = rng.uniform(0.0, 5.0)
        res = sup.sup_cdf(cdf, lcr, length)
        assert res.lower_bound <= res.approx_cdf + 1e-15
        assert res.approx_cdf <= res.marginal_cdf + 1e-15
    _report(8, True, "bound <= approximation <= marginal on 10^4 triples")


def test_criterion_8_equal_power_continuity():
    eps = 1e-5
    p = an.RayleighSnrParams(1.0)
    pert = an.InterfererSet((0.5 * (1 + eps), 0.5 * (1 - eps)),
                            (2.0 * (1 + eps), 2.0 * (1 - eps)))
    du = abs(an.sir_unequal(pert, B, 1.0)[0] - an.sir_equal(2, 0.5, B, 1.0)[0])
    ds = abs(an.sinr_unequal(p, pert, B, 1.0)[0]
             - an.sinr_equal(p, 2, 0.5, 2.0, B, 1.0)[0])
    ffp = an.FixedFluidParams(1.0, 1.0 + 1e-6, 1.0, 1.0)
    dff = abs(an.fixed_fluid_unequal(ffp, B, 1.0)[0]
              - an.fixed_fluid_equal(1.0, 1.0, 1.0, B, 1.0)[0])
    ok = du < 1e-3 and ds < 1e-3 and dff < 1e-4
    _report(8, ok,
            f"equal-power continuity: SIR {du:.2e}, SINR {ds:.2e}, "
            f"fixed+fluid {dff:.2e}")


AFD_CASES = [
    ("rayleigh_snr", RayleighSnrScenario(), (0.3, 0.7, 1.4)),
    ("sinr_single", SinrScenario(ex_i=(1.0,), beta_i=(1.0,)), (0.15, 0.4, 0.9)),
    ("fixed_fluid_equal", FixedFluidScenario(), (1.0, 1.7, 2.8)),
]


@pytest.mark.parametrize("name,scenario,ths", AFD_CASES,
                         ids=[c[0] for c in AFD_CASES])
def test_criterion_8_afd_identity(name, scenario, ths):
    from fasim.montecarlo import empirical_afd

    sim = SimConfig(grid_step=GRID_STEP, track_length=2.0, trials=10_000,
                    seed=SEED + 1, generator="sum_of_sinusoids")
    est = empirical_afd(scenario, sim, np.asarray(ths))
    for s, afd in zip(est.thresholds, est.afd):
        cdf, lcr = scenario.marginal_pair(float(s))
        assert 0.15 <= cdf <= 0.85  # mid thresholds as stated
        rel = abs(afd / (cdf / lcr) - 1.0)
        _report(8, rel <= 0.05,
                f"AFD identity {name} at s={s:g}: relative gap {rel:.3f} "
                f"(tol 0.05)")


def test_criterion_8_specfun_oracle_agreement():
    # re-run the 1e4-point random-agreement suites against the extended
    # precision oracles (abs error <= 1e-10)
    test_specfun.test_bessel_random_oracle_agreement()
    test_specfun.test_erf_random_oracle_agreement()
    test_specfun.test_gamma_random_oracle_agreement()
    test_specfun.test_marcum_random_oracle_agreement()
    test_specfun.test_dawson_random_oracle_agreement()
    _report(8, True, "special functions within 1e-10 of oracles on 10^4 draws")


def test_criterion_8_array_lcr_series_limit():
    test_analytic.test_array_correlated_finite_at_j_zero()
    test_analytic.test_array_correlated_small_j_series_consistency()
    _report(8, True, "correlated-array LCR finite and series-consistent at J->0")
