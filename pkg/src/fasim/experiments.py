"""Experiment runners and figure presets, producing CdfCurve sets and tables.

Presets fig3..fig9 reproduce the reference experiments at desk scale:

    fig3  Rayleigh SNR, gamma0=1, L in {0.5, 1, 5}
    fig4  SIR + SINR, two interferers (lambda 0.6, 0.4), L=1, ports {5, 20}
    fig5  Ricean SNR (K in {1, 5}) and Ricean SIR (K=1, beta1=10), phi=2*pi
    fig6  outage-reduction sweep vs L for p_T in {0.01, 0.1, 0.5}
    fig7  fixed+fluid (equal power, L in {1, 3}) and correlated array
          (delta=0.25, L in {0.5, 1}, plus the fixed-array baseline)
    fig8  track length needed to neutralize one interferer vs power ratio,
          gamma0 in {0, 5, 10} dB, p_T=0.9 (closed form) and 0.1 (simulation)
    fig9  layout comparison at L=1: fixed, fluid, fixed+fluid, corr array

run_curve produces the analytic approximation/bound/marginal; run_simulation
the empirical curves with CIs.  CSV files are named <preset>__<label>.csv.
"""

import math
import os
from dataclasses import asdict, dataclass, replace
from typing import Optional, Tuple

import numpy as np

from . import montecarlo, supremum
from .curves import CdfCurve, config_hash, write_table
from .errors import DomainError, InfeasibleTargetError
from .montecarlo import SimConfig, run_ensemble, simulation_metadata
from .scenarios import (
    ArrayCorrelatedScenario,
    FixedFluidScenario,
    RayleighSnrScenario,
    RiceanSirScenario,
    RiceanSnrScenario,
    SinrScenario,
    SirScenario,
    scenario_from_dict,
    scenario_to_dict,
)


@dataclass(frozen=True)
class ThresholdGrid:
    lo: float
    hi: float
    count: int
    scale: str = "log"  # "lin" | "log"

    def __post_init__(self):
        if not (0 <= self.lo < self.hi) or self.count < 2:
            raise DomainError("threshold grid needs 0 <= lo < hi and count >= 2")
        if self.scale not in ("lin", "log"):
            raise DomainError(f"scale must be 'lin' or 'log', got {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            raise DomainError("log-scale threshold grids need lo > 0")

    def values(self):
        if self.scale == "lin":
            return np.linspace(self.lo, self.hi, self.count)
        return np.logspace(math.log10(self.lo), math.log10(self.hi), self.count)

    @classmethod
    def parse(cls, text):
        """Parse 'lo:hi:count:lin|log' (the CLI flag format)."""
        parts = text.split(":")
        if len(parts) != 4:
            raise DomainError(
                f"threshold spec must be lo:hi:count:lin|log, got {text!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]), parts[3])


@dataclass
class ExperimentSpec:
    """A scenario, a threshold grid, track lengths and (optionally) a
    simulation configuration; sim=None means analytic-only."""

    scenario: object
    thresholds: ThresholdGrid
    lengths: Tuple[float, ...]
    sim: Optional[SimConfig] = None
    port_counts: Tuple[int, ...] = ()
    preset: str = "adhoc"

    def __post_init__(self):
        self.lengths = tuple(float(v) for v in self.lengths)
        if not self.lengths:
            raise DomainError("at least one track length is required")
        for L in self.lengths:
            if not (L >= 0 and math.isfinite(L)):
                raise DomainError(f"track lengths must be >= 0, got {L}")


def spec_from_dict(raw):
    """Build an ExperimentSpec from a nested config mapping."""
    raw = dict(raw)
    scenario = scenario_from_dict(raw["scenario"])
    th = raw["thresholds"]
    if isinstance(th, str):
        grid = ThresholdGrid.parse(th)
    else:
        grid = ThresholdGrid(float(th["lo"]), float(th["hi"]),
                             int(th["count"]), th.get("scale", "log"))
    sim = None
    if raw.get("sim"):
        sim = SimConfig(**raw["sim"])
    return ExperimentSpec(
        scenario=scenario,
        thresholds=grid,
        lengths=tuple(raw.get("lengths", (1.0,))),
        sim=sim,
        port_counts=tuple(raw.get("port_counts", ())),
        preset=raw.get("preset", "adhoc"),
    )


def analytic_metadata(scenario, extras=None):
    meta = {"scenario": scenario_to_dict(scenario), "analytic": True}
    if extras:
        meta.update(extras)
    meta["config_hash"] = config_hash(meta)
    return meta


def analytic_curves(scenario, thresholds, length):
    """(approximation, lower bound, marginal) curves at one track length."""
    th = np.asarray(thresholds, float)
    approx = np.empty(th.size)
    bound = np.empty(th.size)
    marginal = np.empty(th.size)
    for i, s in enumerate(th):
        cdf, lcr = scenario.marginal_pair(s)
        res = supremum.sup_cdf(cdf, lcr, length, s_th=s)
        approx[i] = res.approx_cdf
        bound[i] = res.lower_bound
        marginal[i] = cdf
    meta = analytic_metadata(scenario, {"L": length})
    base = f"{scenario.label()}_L{length:g}"
    return [
        CdfCurve(f"{base}_approx", th, approx, metadata=meta),
        CdfCurve(f"{base}_bound", th, bound, metadata=meta),
        CdfCurve(f"{base}_marginal", th, marginal, metadata=meta),
    ]


def run_curve(spec: ExperimentSpec):
    """Analytic curve set over all requested lengths."""
    th = spec.thresholds.values()
    curves = []
    for L in spec.lengths:
        curves.extend(analytic_curves(spec.scenario, th, L))
    return curves


def run_simulation(spec: ExperimentSpec):
    """Empirical sup-cdf curves (with CI), one per length, plus port overlays."""
    if spec.sim is None:
        raise DomainError("run_simulation needs a sim configuration")
    th = spec.thresholds.values()
    curves = []
    for L in spec.lengths:
        sim = replace(spec.sim, track_length=L)
        res = run_ensemble(spec.scenario, sim, th, port_counts=spec.port_counts)
        curve = res.sup_cdf_curve()
        curve.label = f"{spec.scenario.label()}_L{L:g}_sim"
        curves.append(curve)
        for n_ports in spec.port_counts:
            pc = res.sup_cdf_curve(port_count=int(n_ports))
            pc.label = f"{spec.scenario.label()}_L{L:g}_sim_ports{n_ports}"
            curves.append(pc)
    return curves


# ---------------------------------------------------------------------------
# insight sweeps
# ---------------------------------------------------------------------------

def fixed_outage_threshold(p_target, gamma0):
    """s_th with P(fixed-antenna SNR < s_th) = p_target."""
    if not 0 < p_target < 1:
        raise DomainError("p_target must lie in (0, 1)")
    return -gamma0 * math.log1p(-p_target)


def run_reduction_sweep(p_targets, lengths, gamma0=1.0, b=math.pi ** 2):
    """Outage of the moving antenna vs track length at fixed-antenna-matched
    thresholds; 'reduction' is outage / p_target (1 at L=0)."""
    lengths = np.asarray(lengths, float)
    columns = {"L": lengths}
    scenario = RayleighSnrScenario(ex0=gamma0, beta0=1.0, sigma2=1.0)
    for p in p_targets:
        s_th = fixed_outage_threshold(p, gamma0)
        cdf, lcr = scenario.marginal_pair(s_th)
        outage = np.array([supremum.sup_cdf(cdf, lcr, L).approx_cdf
                           for L in lengths])
        columns[f"outage_p{p:g}"] = outage
        columns[f"reduction_p{p:g}"] = outage / p
    meta = {"gamma0": gamma0, "b": b, "p_targets": list(p_targets)}
    meta["config_hash"] = config_hash(meta)
    return meta, columns


def neutralization_closed_form(p_target, gamma0, ratios, b=math.pi ** 2):
    """Required L per interferer-to-desired power ratio, high-threshold
    closed form (appropriate for upper-tail targets)."""
    s_th = fixed_outage_threshold(p_target, gamma0)
    return np.array([
        supremum.neutralization_length(s_th, gamma0, r * gamma0, b)
        for r in ratios
    ])


def neutralization_simulated(p_target, gamma0, ratios, sim, l_max=2.0):
    """Simulation-based required L: one run per ratio over a track of length
    l_max, then the prefix-maximum gives P(sup over [0, L] < s_th) for every
    L at once; the result is interpolated at p_target.

    Returns NaN where even L = l_max cannot reach the target.
    """
    s_th = fixed_outage_threshold(p_target, gamma0)
    out = np.empty(len(ratios))
    base = replace(sim, track_length=l_max)
    n_grid = base.n_grid
    for j, ratio in enumerate(ratios):
        scenario = SinrScenario(ex0=gamma0, beta0=1.0, sigma2=1.0,
                                ex_i=(1.0,), beta_i=(ratio * gamma0,))
        # first grid index where the metric exceeds s_th, per trial
        exceed_hist = np.zeros(n_grid + 1, np.int64)
        for metric, _ in montecarlo._metric_batches(scenario, base):
            above = metric > s_th
            first = np.where(above.any(axis=1), above.argmax(axis=1), n_grid)
            exceed_hist += np.bincount(first, minlength=n_grid + 1)
        # P(sup over first k+1 samples <= s_th) = P(first exceed index > k)
        still_below = base.trials - np.cumsum(exceed_hist[:-1])
        p_below = still_below / base.trials
        lengths = np.arange(n_grid) * base.grid_step
        idx = np.searchsorted(-p_below, -p_target)  # p_below is nonincreasing
        if idx >= n_grid:
            out[j] = math.nan
        elif idx == 0:
            out[j] = 0.0
        else:
            p1, p0 = p_below[idx - 1], p_below[idx]
            w = (p1 - p_target) / (p1 - p0) if p1 > p0 else 0.0
            out[j] = lengths[idx - 1] + w * base.grid_step
    return out


def run_neutralization(p_target, gamma0s, ratios, b=math.pi ** 2, sim=None,
                       method="auto"):
    """Required-length table for one target probability across gamma0 values.

    method 'closed_form' uses the high-threshold formula (upper-tail
    targets); 'simulation' bisects the empirical sup cdf via prefix maxima
    (lower-tail targets); 'auto' picks closed_form for p_target >= 0.5.
    """
    if method == "auto":
        method = "closed_form" if p_target >= 0.5 else "simulation"
    if method not in ("closed_form", "simulation"):
        raise DomainError(f"unknown neutralization method {method!r}")
    ratios = np.asarray(ratios, float)
    columns = {"ratio": ratios}
    for g0 in gamma0s:
        if method == "closed_form":
            col = neutralization_closed_form(p_target, g0, ratios, b)
        else:
            if sim is None:
                sim = SimConfig(trials=30_000, generator="sum_of_sinusoids")
            col = neutralization_simulated(p_target, g0, ratios, sim)
        columns[f"L_g{g0:g}"] = col
    meta = {"p_target": p_target, "gamma0s": list(gamma0s), "method": method,
            "b": b}
    if method == "simulation":
        meta["sim"] = asdict(sim)
    meta["config_hash"] = config_hash(meta)
    return meta, columns


def comparison_scenarios(ex0=1.0, beta=1.0, sigma2=1.0, delta=0.25):
    """The four layouts of the comparison figure, in performance order."""
    return {
        "fixed": (RayleighSnrScenario(ex0=ex0, beta0=beta, sigma2=sigma2), 0.0),
        "fluid": (RayleighSnrScenario(ex0=ex0, beta0=beta, sigma2=sigma2), None),
        "fixed_fluid": (FixedFluidScenario(ex0=ex0, beta0=beta, betaf=beta,
                                           sigma2=sigma2), None),
        "corr_array": (ArrayCorrelatedScenario(delta=delta, ex0=ex0, beta=beta,
                                               sigma2=sigma2), None),
    }


def run_comparison(thresholds, length=1.0, sim=None):
    """Analytic (and optionally empirical) curves for the four layouts."""
    th = np.asarray(thresholds, float)
    curves = []
    for name, (scenario, fixed_length) in comparison_scenarios().items():
        L = fixed_length if fixed_length is not None else length
        approx = analytic_curves(scenario, th, L)[0]
        approx.label = f"{name}_approx"
        curves.append(approx)
        if sim is not None:
            res = run_ensemble(scenario, replace(sim, track_length=L), th)
            emp = res.sup_cdf_curve()
            emp.label = f"{name}_sim"
            curves.append(emp)
    return curves


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

DB = 10.0 ** 0.1  # one decibel as a power ratio step


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


FIG4_LAMBDAS = (0.6, 0.4)

PRESETS = {
    "fig3": {
        "scenario": {"kind": "rayleigh_snr", "ex0": 1.0, "beta0": 1.0,
                     "sigma2": 1.0},
        "thresholds": {"lo": 0.005, "hi": 15.0, "count": 200, "scale": "log"},
        "lengths": (0.5, 1.0, 5.0),
    },
    "fig4": {
        "scenarios": (
            {"kind": "sir", "ex0": 1.0, "beta0": 1.0, "ex_i": [1.0, 1.0],
             "beta_i": [1.0 / 0.6, 1.0 / 0.4]},
            {"kind": "sinr", "ex0": 1.0, "beta0": 1.0, "sigma2": 1.0,
             "ex_i": [1.0, 1.0], "beta_i": [1.0 / 0.6, 1.0 / 0.4]},
        ),
        "thresholds": {"lo": 0.005, "hi": 10.0, "count": 200, "scale": "log"},
        "lengths": (1.0,),
        "port_counts": (5, 20),
    },
    "fig5": {
        "scenarios": (
            {"kind": "ricean_snr", "K": 1.0, "phi": 2 * math.pi},
            {"kind": "ricean_snr", "K": 5.0, "phi": 2 * math.pi},
            {"kind": "ricean_sir", "K": 1.0, "phi": 2 * math.pi,
             "beta1": 10.0, "ex1": 1.0, "beta0": 1.0, "ex0": 1.0},
        ),
        "thresholds": {"lo": 0.002, "hi": 8.0, "count": 200, "scale": "log"},
        "lengths": (1.0,),
    },
    "fig6": {
        "p_targets": (0.01, 0.1, 0.5),
        "lengths": {"lo": 0.0, "hi": 1.5, "count": 151, "scale": "lin"},
        "gamma0": 1.0,
    },
    "fig7": {
        "scenarios": (
            {"kind": "fixed_fluid", "ex0": 1.0, "beta0": 1.0, "betaf": 1.0,
             "sigma2": 1.0, "equal_power": True},
            {"kind": "array_correlated", "delta": 0.25, "ex0": 1.0,
             "beta": 1.0, "sigma2": 1.0},
        ),
        "lengths_by_kind": {"fixed_fluid": (1.0, 3.0),
                            "array_correlated": (0.0, 0.5, 1.0)},
        "thresholds": {"lo": 0.05, "hi": 18.0, "count": 200, "scale": "log"},
    },
    "fig8": {
        "p_targets": (0.9, 0.1),
        "gamma0s_db": (0.0, 5.0, 10.0),
        "ratios": {"lo": 1.0, "hi": 12.0, "count": 7, "scale": "log"},
        "sim_trials": 30_000,
    },
    "fig9": {
        "thresholds": {"lo": 0.05, "hi": 12.0, "count": 200, "scale": "log"},
        "length": 1.0,
    },
}


def _preset_grid(d):
    return ThresholdGrid(d["lo"], d["hi"], d["count"], d["scale"])


def _preset_sim(sim_overrides, default_generator="sum_of_sinusoids", length=1.0):
    base = {"trials": 100_000, "seed": 20240914, "grid_step": 1e-3,
            "generator": default_generator}
    base.update(sim_overrides or {})
    base["track_length"] = length
    return SimConfig(**base)


def _fig3_generator(length):
    # long tracks go through sum-of-sinusoids; short ones afford the exact
    # Cholesky factorization
    return "sum_of_sinusoids" if length > 1.2 else "cholesky"


def run_figure(name, out_dir, sim_overrides=None, no_sim=False):
    """Run one preset and write its CSV files; returns the paths written."""
    if name not in PRESETS:
        raise DomainError(f"unknown figure preset {name!r}; "
                          f"expected one of {sorted(PRESETS)}")
    os.makedirs(out_dir, exist_ok=True)
    preset = PRESETS[name]
    paths = []

    def emit_curve(curve):
        path = os.path.join(out_dir, f"{name}__{curve.label}.csv")
        curve.to_csv(path)
        paths.append(path)

    def emit_table(stem, meta, columns):
        path = os.path.join(out_dir, f"{name}__{stem}.csv")
        write_table(path, meta, columns)
        paths.append(path)

    if name == "fig3":
        scenario = scenario_from_dict(preset["scenario"])
        grid = _preset_grid(preset["thresholds"])
        for L in preset["lengths"]:
            for curve in analytic_curves(scenario, grid.values(), L):
                emit_curve(curve)
            if not no_sim:
                sim = _preset_sim(sim_overrides, _fig3_generator(L), L)
                res = run_ensemble(scenario, sim, grid.values())
                curve = res.sup_cdf_curve()
                curve.label = f"{scenario.label()}_L{L:g}_sim"
                emit_curve(curve)
    elif name in ("fig4", "fig5"):
        grid = _preset_grid(preset["thresholds"])
        ports = preset.get("port_counts", ())
        for sdict in preset["scenarios"]:
            scenario = scenario_from_dict(sdict)
            for L in preset["lengths"]:
                for curve in analytic_curves(scenario, grid.values(), L):
                    emit_curve(curve)
                if not no_sim:
                    sim = _preset_sim(sim_overrides, length=L)
                    res = run_ensemble(scenario, sim, grid.values(),
                                       port_counts=ports)
                    curve = res.sup_cdf_curve()
                    curve.label = f"{scenario.label()}_L{L:g}_sim"
                    emit_curve(curve)
                    for np_ in ports:
                        pc = res.sup_cdf_curve(port_count=int(np_))
                        pc.label = f"{scenario.label()}_L{L:g}_sim_ports{np_}"
                        emit_curve(pc)
    elif name == "fig6":
        lengths = _preset_grid(preset["lengths"]).values()
        meta, columns = run_reduction_sweep(preset["p_targets"], lengths,
                                            preset["gamma0"])
        emit_table("reduction", meta, columns)
    elif name == "fig7":
        grid = _preset_grid(preset["thresholds"])
        for sdict in preset["scenarios"]:
            scenario = scenario_from_dict(sdict)
            for L in preset["lengths_by_kind"][scenario.kind]:
                for curve in analytic_curves(scenario, grid.values(), L):
                    emit_curve(curve)
                if not no_sim and L > 0:
                    sim = _preset_sim(sim_overrides, length=L)
                    res = run_ensemble(scenario, sim, grid.values())
                    curve = res.sup_cdf_curve()
                    curve.label = f"{scenario.label()}_L{L:g}_sim"
                    emit_curve(curve)
    elif name == "fig8":
        ratios = _preset_grid(preset["ratios"]).values()
        for p_t in preset["p_targets"]:
            gamma0s = [db_to_linear(g) for g in preset["gamma0s_db"]]
            if p_t >= 0.5:
                meta, columns = run_neutralization(p_t, gamma0s, ratios,
                                                   method="closed_form")
            elif no_sim:
                continue
            else:
                overrides = dict(sim_overrides or {})
                trials = overrides.pop("trials", preset["sim_trials"])
                sim = SimConfig(trials=trials, generator="sum_of_sinusoids",
                                **overrides)
                meta, columns = run_neutralization(p_t, gamma0s, ratios,
                                                   sim=sim, method="simulation")
            emit_table(f"lengths_pT{p_t:g}", meta, columns)
    elif name == "fig9":
        grid = _preset_grid(preset["thresholds"])
        sim = None if no_sim else _preset_sim(sim_overrides)
        for curve in run_comparison(grid.values(), preset["length"], sim):
            emit_curve(curve)
    return paths
