"""Monte Carlo oracle: spatially correlated channel fields and empirical
sup-cdf / level-crossing / fade-distance estimators.

Field generators:
    cholesky           exact Gaussian fields: factor the grid covariance
                       rho(|dl|) (+ 1e-10 nugget; the Jakes covariance at
                       1e-3 spacing is numerically rank-deficient) once per
                       configuration, then one matrix-vector product per
                       trial (batched through GEMM).
    sum_of_sinusoids   h(l) = sqrt(1/M) * sum_m exp(j(2 pi l cos theta_m +
                       phi_m)) with theta_m, phi_m iid uniform per trial;
                       Jakes-correlated exactly in expectation and
                       approximately Gaussian (default M = 256).  Only valid
                       for the Jakes correlation model.  Coupled two-element
                       fields evaluate the same 2-D isotropic field at
                       physical positions (l, 0) and (l, delta), which
                       realizes the coupling exactly.

Every trial draws from its own generator seeded by
SeedSequence(seed, spawn_key=(trial_index,)), so results are reproducible
per (seed, trial_index) independent of execution order; batches are a fixed
size so batched estimates are reproducible run to run as well.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import __version__
from .curves import CdfCurve, config_hash
from .errors import DomainError, FieldGenerationError
from .kernels import (
    below_counts,
    sos_synthesize,
    sos_synthesize_pair,
    upcross_counts,
)
from .scenarios import scenario_to_dict

GENERATORS = ("cholesky", "sum_of_sinusoids")
_GENERATOR_ALIASES = {"sos": "sum_of_sinusoids", "chol": "cholesky"}
_BATCH = 256  # fixed batch size keeps batched runs reproducible
COV_NUGGET = 1e-10


@dataclass(frozen=True)
class SimConfig:
    """Grid resolution, trial count, seeding and generator choice."""

    grid_step: float = 1e-3
    track_length: float = 1.0
    trials: int = 100_000
    seed: int = 0
    generator: str = "cholesky"
    sos_components: int = 256

    def __post_init__(self):
        if not (self.grid_step > 0 and math.isfinite(self.grid_step)):
            raise DomainError(f"grid_step must be positive, got {self.grid_step}")
        if not (self.track_length >= 0 and math.isfinite(self.track_length)):
            raise DomainError(f"track_length must be >= 0, got {self.track_length}")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        gen = _GENERATOR_ALIASES.get(self.generator, self.generator)
        object.__setattr__(self, "generator", gen)
        if gen not in GENERATORS:
            raise DomainError(f"generator must be one of {GENERATORS}, got {gen!r}")
        if self.sos_components < 8:
            raise DomainError("sos_components must be >= 8")

    @property
    def n_grid(self):
        return int(math.floor(self.track_length / self.grid_step + 1e-9)) + 1

    def grid(self):
        return np.arange(self.n_grid) * self.grid_step


@dataclass
class FieldRealization:
    """One trial's channels on the track grid (keys h0, h1, ..., hf)."""

    grid: np.ndarray
    channels: dict


def trial_rng(seed, trial_index):
    """The documented splittable per-trial stream."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(int(trial_index),)))


# ---------------------------------------------------------------------------
# covariance factors (cached per configuration)
# ---------------------------------------------------------------------------

_factor_cache = {}


def _cholesky_factor(corr, n_grid, grid_step, delta=None):
    key = (corr.name, n_grid, grid_step, delta)
    factor = _factor_cache.get(key)
    if factor is not None:
        return factor
    lags = np.arange(n_grid) * grid_step
    track = np.array([corr.rho(t) for t in lags])
    idx = np.abs(np.arange(n_grid)[:, None] - np.arange(n_grid)[None, :])
    if delta is None:
        cov = track[idx]
    else:
        cross_lags = np.sqrt(delta * delta + lags * lags)
        cross = np.array([corr.rho(t) for t in cross_lags])
        same = track[idx]
        between = cross[idx]
        cov = np.block([[same, between], [between, same]])
    cov[np.diag_indices_from(cov)] += COV_NUGGET
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise FieldGenerationError(
            f"covariance factorization failed for n={n_grid}, "
            f"step={grid_step}, delta={delta}: {exc}") from exc
    _factor_cache[key] = factor
    return factor


# ---------------------------------------------------------------------------
# batched unit-field generation
# ---------------------------------------------------------------------------

def _draw_sos(rng, n_comp):
    angles = rng.uniform(0.0, 2.0 * np.pi, n_comp)
    phases = rng.uniform(0.0, 2.0 * np.pi, n_comp)
    return angles, phases


def _draw_complex(rng, n):
    z = rng.standard_normal(2 * n)
    return (z[0::2] + 1j * z[1::2]) / math.sqrt(2.0)


def _unit_fields_batch(scenario, sim, trial_indices):
    """(moving fields [(B, G) complex], fixed scalars [(B,) complex]).

    Per-trial draw order: each independent moving source (angles then phases
    for sum_of_sinusoids, one 2G-normal block for cholesky), then the coupled
    pair if any (one set of angles/phases, or one 4G-normal block), then one
    2-normal block per fixed branch.
    """
    req = scenario.field_request()
    n_grid = sim.n_grid
    n_trials = len(trial_indices)
    corr = scenario.correlation
    use_sos = sim.generator == "sum_of_sinusoids"
    if use_sos and corr.name != "jakes":
        raise DomainError(
            "the sum_of_sinusoids generator realizes the Jakes model only; "
            f"use cholesky for correlation model {corr.name!r}")

    moving = []
    fixed = []
    if use_sos:
        n_comp = sim.sos_components
        angle_sets = [np.empty((n_trials, n_comp)) for _ in range(req.n_moving)]
        phase_sets = [np.empty((n_trials, n_comp)) for _ in range(req.n_moving)]
        pair_angles = pair_phases = None
        if req.coupled_delta is not None:
            pair_angles = np.empty((n_trials, n_comp))
            pair_phases = np.empty((n_trials, n_comp))
        fixed_draws = np.empty((n_trials, req.n_fixed), np.complex128)
        for i, t in enumerate(trial_indices):
            rng = trial_rng(sim.seed, t)
            for k in range(req.n_moving):
                angle_sets[k][i], phase_sets[k][i] = _draw_sos(rng, n_comp)
            if req.coupled_delta is not None:
                pair_angles[i], pair_phases[i] = _draw_sos(rng, n_comp)
            for k in range(req.n_fixed):
                fixed_draws[i, k] = _draw_complex(rng, 1)[0]
        for k in range(req.n_moving):
            moving.append(sos_synthesize(np.cos(angle_sets[k]), phase_sets[k],
                                         n_grid, sim.grid_step))
        if req.coupled_delta is not None:
            h1, h2 = sos_synthesize_pair(
                np.cos(pair_angles), np.sin(pair_angles), pair_phases,
                n_grid, sim.grid_step, req.coupled_delta)
            moving.extend([h1, h2])
        fixed = [fixed_draws[:, k] for k in range(req.n_fixed)]
    else:
        blocks = [np.empty((n_grid, n_trials), np.complex128)
                  for _ in range(req.n_moving)]
        pair_block = None
        if req.coupled_delta is not None:
            pair_block = np.empty((2 * n_grid, n_trials), np.complex128)
        fixed_draws = np.empty((n_trials, req.n_fixed), np.complex128)
        for i, t in enumerate(trial_indices):
            rng = trial_rng(sim.seed, t)
            for k in range(req.n_moving):
                blocks[k][:, i] = _draw_complex(rng, n_grid)
            if req.coupled_delta is not None:
                pair_block[:, i] = _draw_complex(rng, 2 * n_grid)
            for k in range(req.n_fixed):
                fixed_draws[i, k] = _draw_complex(rng, 1)[0]
        if req.n_moving:
            factor = _cholesky_factor(corr, n_grid, sim.grid_step)
            for k in range(req.n_moving):
                moving.append(np.ascontiguousarray((factor @ blocks[k]).T))
        if req.coupled_delta is not None:
            factor = _cholesky_factor(corr, n_grid, sim.grid_step,
                                      delta=req.coupled_delta)
            both = (factor @ pair_block).T
            moving.extend([np.ascontiguousarray(both[:, :n_grid]),
                           np.ascontiguousarray(both[:, n_grid:])])
        fixed = [fixed_draws[:, k] for k in range(req.n_fixed)]
    return moving, fixed


def _metric_batches(scenario, sim, trials=None):
    """Yield (metric (B, G), trial_indices) over fixed-size batches."""
    total = sim.trials if trials is None else trials
    grid = sim.grid()
    done = 0
    while done < total:
        n_batch = min(_BATCH, total - done)
        idx = range(done, done + n_batch)
        moving, fixed = _unit_fields_batch(scenario, sim, idx)
        channels = scenario.channels_from_unit(moving, fixed, grid)
        metric = scenario.metric_from_channels(channels)
        yield np.ascontiguousarray(metric), idx
        done += n_batch


# ---------------------------------------------------------------------------
# public single-trial operations
# ---------------------------------------------------------------------------

def generate_field(scenario, sim, trial_index):
    """One trial's FieldRealization; deterministic in (seed, trial_index)."""
    if not 0 <= trial_index:
        raise DomainError("trial_index must be >= 0")
    grid = sim.grid()
    moving, fixed = _unit_fields_batch(scenario, sim, [trial_index])
    channels = scenario.channels_from_unit(
        [m[0] for m in moving], [f[0] for f in fixed], grid)
    return FieldRealization(grid=grid, channels=channels)


def metric_along_track(fieldreal, scenario):
    """Metric sequence S(l) for one realization."""
    return scenario.metric_from_channels(fieldreal.channels)


# ---------------------------------------------------------------------------
# ensemble estimation
# ---------------------------------------------------------------------------

@dataclass
class EnsembleResult:
    """Everything one simulation pass can answer.

    sups holds the per-trial track maximum (sorted); port_sups the same for
    each discrete port count; crossing counts come with per-trial second
    moments so rates get standard errors.
    """

    scenario_label: str
    sim: SimConfig
    thresholds: np.ndarray
    sups: np.ndarray
    port_sups: dict
    crossing_sum: np.ndarray
    crossing_sqsum: np.ndarray
    below_sum: np.ndarray
    metadata: dict

    def sup_cdf(self, thresholds=None, port_count=None):
        th = self.thresholds if thresholds is None else np.asarray(thresholds)
        sups = self.sups if port_count is None else self.port_sups[port_count]
        n = sups.size
        cdf = np.searchsorted(sups, th, side="right") / n
        se = np.sqrt(np.maximum(cdf * (1.0 - cdf), 1.0 / n) / n)
        return cdf, se

    def sup_cdf_curve(self, port_count=None):
        cdf, se = self.sup_cdf(port_count=port_count)
        suffix = "" if port_count is None else f"_ports{port_count}"
        meta = dict(self.metadata)
        if port_count is not None:
            meta["n_ports"] = int(port_count)
        return CdfCurve(
            label=self.scenario_label + suffix,
            s_th=self.thresholds,
            value=cdf,
            ci_low=np.clip(cdf - 1.96 * se, 0.0, 1.0),
            ci_high=np.clip(cdf + 1.96 * se, 0.0, 1.0),
            metadata=meta,
        )

    def lcr(self):
        """(rate per wavelength, standard error) on the threshold grid."""
        n = self.sups.size
        length = self.sim.track_length
        mean_counts = self.crossing_sum / n
        var_counts = np.maximum(self.crossing_sqsum / n - mean_counts ** 2, 0.0)
        rate = mean_counts / length
        se = np.sqrt(var_counts / n) / length
        return rate, se

    def afd(self):
        """Mean below-threshold sojourn distance on the threshold grid.

        Pooled ratio estimator: (total distance below) / (number of fades
        that complete with an upcrossing).  Both totals have exact
        expectations F*L*trials and LCR*L*trials under stationarity, so the
        estimator is free of edge-censoring bias.  Where no fade completes
        anywhere (threshold above every observed sample) the censored mean
        below-distance per trial is returned instead, which tends to the
        track length.
        """
        below_dist = self.below_sum * self.sim.grid_step
        out = np.empty(self.thresholds.size)
        for j in range(out.size):
            if self.crossing_sum[j] > 0:
                out[j] = below_dist[j] / self.crossing_sum[j]
            else:
                out[j] = below_dist[j] / self.sups.size
        return out


def run_ensemble(scenario, sim, thresholds, port_counts=(), want_below=False):
    """Single pass over all trials collecting sups, crossings and, when
    want_below is set, below-threshold sample counts (for AFD)."""
    thresholds = np.asarray(thresholds, float)
    if thresholds.ndim != 1 or np.any(np.diff(thresholds) <= 0):
        raise DomainError("thresholds must be a strictly increasing 1-d grid")
    n_grid = sim.n_grid
    port_index = {}
    for n_ports in port_counts:
        n_ports = int(n_ports)
        if n_ports < 2:
            raise DomainError("port counts must be >= 2")
        port_index[n_ports] = np.round(
            np.linspace(0, n_grid - 1, n_ports)).astype(int)

    sups = np.empty(sim.trials)
    port_sups = {k: np.empty(sim.trials) for k in port_index}
    crossing_sum = np.zeros(thresholds.size)
    crossing_sqsum = np.zeros(thresholds.size)
    below_sum = np.zeros(thresholds.size, np.int64)

    for metric, idx in _metric_batches(scenario, sim):
        sl = slice(idx[0], idx[-1] + 1)
        sups[sl] = metric.max(axis=1)
        for k, cols in port_index.items():
            port_sups[k][sl] = metric[:, cols].max(axis=1)
        if thresholds.size and n_grid > 1:
            counts = upcross_counts(metric, thresholds)
            crossing_sum += counts.sum(axis=0)
            crossing_sqsum += (counts.astype(float) ** 2).sum(axis=0)
        if want_below and thresholds.size:
            below_sum += below_counts(metric, thresholds)

    sups.sort()
    for k in port_sups:
        port_sups[k].sort()
    meta = simulation_metadata(scenario, sim)
    return EnsembleResult(
        scenario_label=scenario.label(),
        sim=sim,
        thresholds=thresholds,
        sups=sups,
        port_sups=port_sups,
        crossing_sum=crossing_sum,
        crossing_sqsum=crossing_sqsum,
        below_sum=below_sum,
        metadata=meta,
    )


def simulation_metadata(scenario, sim):
    meta = {
        "scenario": scenario_to_dict(scenario),
        "sim": asdict(sim),
        "version": __version__,
    }
    meta["config_hash"] = config_hash(meta)
    return meta


def empirical_sup_cdf(scenario, sim, thresholds):
    """Empirical cdf of the track maximum, with 95% binomial CI."""
    return run_ensemble(scenario, sim, thresholds).sup_cdf_curve()


def discrete_port_sup(scenario, sim, n_ports, thresholds):
    """Best of n_ports equally spaced positions (endpoints included), same
    realizations as the continuous estimate so curves are directly
    comparable."""
    res = run_ensemble(scenario, sim, thresholds, port_counts=(n_ports,))
    return res.sup_cdf_curve(port_count=int(n_ports))


@dataclass
class LcrEstimate:
    thresholds: np.ndarray
    rate: np.ndarray
    se: np.ndarray
    metadata: dict


def empirical_lcr(scenario, sim, thresholds):
    """Upcrossing rate per wavelength with standard errors."""
    if sim.track_length <= 0:
        raise DomainError("LCR estimation needs a track of positive length")
    res = run_ensemble(scenario, sim, thresholds)
    rate, se = res.lcr()
    return LcrEstimate(res.thresholds, rate, se, res.metadata)


@dataclass
class AfdEstimate:
    thresholds: np.ndarray
    afd: np.ndarray
    fade_count: np.ndarray
    metadata: dict


def empirical_afd(scenario, sim, thresholds):
    """Mean below-threshold sojourn distance (pooled ratio estimator)."""
    if sim.track_length <= 0:
        raise DomainError("AFD estimation needs a track of positive length")
    res = run_ensemble(scenario, sim, np.asarray(thresholds, float),
                       want_below=True)
    return AfdEstimate(res.thresholds, res.afd(), res.crossing_sum,
                       res.metadata)
