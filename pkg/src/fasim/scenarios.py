"""Receiver-layout scenarios: one tagged record per analytic cdf/LCR pair.

A scenario carries the physical link parameters (symbol energies, channel
variances, noise power), knows which analytic pair applies, and maps
unit-variance channel fields produced by the Monte Carlo engine to named
channels and to the metric process S(l).  The same channel construction is
used for single-trial realizations and for batched simulation, so the two
paths cannot drift apart.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import analytic
from .correlation import CorrelationModel, array_coupling, jakes_model
from .errors import DomainError


@dataclass(frozen=True)
class FieldRequest:
    """What the field generator must draw for one trial.

    n_moving unit fields along the track, one coupled pair (element spacing
    coupled_delta) if requested, and n_fixed unit scalar branches.
    """

    n_moving: int = 0
    coupled_delta: Optional[float] = None
    n_fixed: int = 0


def _as_positive_tuple(values, name):
    out = tuple(float(v) for v in values)
    if not out:
        raise DomainError(f"{name} must be non-empty")
    for v in out:
        if not (math.isfinite(v) and v > 0):
            raise DomainError(f"{name} entries must be positive, got {v}")
    return out


@dataclass(frozen=True)
class RayleighSnrScenario:
    """Single fluid antenna, Rayleigh fading, SNR metric."""

    ex0: float = 1.0
    beta0: float = 1.0
    sigma2: float = 1.0
    correlation: CorrelationModel = field(default_factory=jakes_model)
    kind = "rayleigh_snr"

    @property
    def gamma0(self):
        return self.ex0 * self.beta0 / self.sigma2

    @property
    def b(self):
        return self.correlation.b

    def label(self):
        return f"snr_g{self.gamma0:g}"

    def marginal_pair(self, s_th):
        return analytic.rayleigh_snr(
            analytic.RayleighSnrParams(self.gamma0), self.b, s_th)

    def field_request(self):
        return FieldRequest(n_moving=1)

    def channels_from_unit(self, moving, fixed, grid):
        return {"h0": math.sqrt(self.beta0) * moving[0]}

    def metric_from_channels(self, channels):
        return self.ex0 * _abs2(channels["h0"]) / self.sigma2


@dataclass(frozen=True)
class SirScenario:
    """Interference-limited SIR with N Rayleigh interferers."""

    ex0: float = 1.0
    beta0: float = 1.0
    ex_i: Tuple[float, ...] = (1.0,)
    beta_i: Tuple[float, ...] = (1.0,)
    equal_power: bool = False
    sigma2: float = 1.0  # only used to report gammas; SIR itself is noise-free
    correlation: CorrelationModel = field(default_factory=jakes_model)
    kind = "sir"

    def __post_init__(self):
        object.__setattr__(self, "ex_i", _as_positive_tuple(self.ex_i, "ex_i"))
        object.__setattr__(self, "beta_i", _as_positive_tuple(self.beta_i, "beta_i"))
        if len(self.ex_i) != len(self.beta_i):
            raise DomainError("ex_i and beta_i must have equal length")

    @property
    def n_interferers(self):
        return len(self.ex_i)

    @property
    def b(self):
        return self.correlation.b

    def interferer_set(self):
        lams = tuple(self.ex0 * self.beta0 / (e * bt)
                     for e, bt in zip(self.ex_i, self.beta_i))
        gams = tuple(e * bt / self.sigma2 for e, bt in zip(self.ex_i, self.beta_i))
        return analytic.InterfererSet(lams, gams, equal_power=self.equal_power)

    def label(self):
        return f"sir_N{self.n_interferers}{'_eq' if self.equal_power else ''}"

    def marginal_pair(self, s_th):
        ints = self.interferer_set()
        if self.equal_power:
            return analytic.sir_equal(ints.n, ints.lambdas[0], self.b, s_th)
        return analytic.sir_unequal(ints, self.b, s_th)

    def field_request(self):
        return FieldRequest(n_moving=1 + self.n_interferers)

    def channels_from_unit(self, moving, fixed, grid):
        channels = {"h0": math.sqrt(self.beta0) * moving[0]}
        for i, bt in enumerate(self.beta_i, start=1):
            channels[f"h{i}"] = math.sqrt(bt) * moving[i]
        return channels

    def metric_from_channels(self, channels):
        interference = sum(e * _abs2(channels[f"h{i}"])
                           for i, e in enumerate(self.ex_i, start=1))
        return self.ex0 * _abs2(channels["h0"]) / interference


@dataclass(frozen=True)
class SinrScenario:
    """SINR with N Rayleigh interferers and noise power sigma2."""

    ex0: float = 1.0
    beta0: float = 1.0
    sigma2: float = 1.0
    ex_i: Tuple[float, ...] = (1.0,)
    beta_i: Tuple[float, ...] = (1.0,)
    equal_power: bool = False
    correlation: CorrelationModel = field(default_factory=jakes_model)
    kind = "sinr"

    def __post_init__(self):
        object.__setattr__(self, "ex_i", _as_positive_tuple(self.ex_i, "ex_i"))
        object.__setattr__(self, "beta_i", _as_positive_tuple(self.beta_i, "beta_i"))
        if len(self.ex_i) != len(self.beta_i):
            raise DomainError("ex_i and beta_i must have equal length")

    @property
    def n_interferers(self):
        return len(self.ex_i)

    @property
    def gamma0(self):
        return self.ex0 * self.beta0 / self.sigma2

    @property
    def b(self):
        return self.correlation.b

    def interferer_set(self):
        lams = tuple(self.ex0 * self.beta0 / (e * bt)
                     for e, bt in zip(self.ex_i, self.beta_i))
        gams = tuple(e * bt / self.sigma2 for e, bt in zip(self.ex_i, self.beta_i))
        return analytic.InterfererSet(lams, gams, equal_power=self.equal_power)

    def label(self):
        return f"sinr_N{self.n_interferers}{'_eq' if self.equal_power else ''}"

    def marginal_pair(self, s_th):
        ints = self.interferer_set()
        params = analytic.RayleighSnrParams(self.gamma0)
        if self.n_interferers == 1 and not self.equal_power:
            return analytic.sinr_single(self.gamma0, ints.gammas[0],
                                        ints.lambdas[0], self.b, s_th)
        if self.equal_power:
            return analytic.sinr_equal(params, ints.n, ints.lambdas[0],
                                       ints.gammas[0], self.b, s_th)
        return analytic.sinr_unequal(params, ints, self.b, s_th)

    def field_request(self):
        return FieldRequest(n_moving=1 + self.n_interferers)

    def channels_from_unit(self, moving, fixed, grid):
        channels = {"h0": math.sqrt(self.beta0) * moving[0]}
        for i, bt in enumerate(self.beta_i, start=1):
            channels[f"h{i}"] = math.sqrt(bt) * moving[i]
        return channels

    def metric_from_channels(self, channels):
        interference = sum(e * _abs2(channels[f"h{i}"])
                           for i, e in enumerate(self.ex_i, start=1))
        return self.ex0 * _abs2(channels["h0"]) / (interference + self.sigma2)


@dataclass(frozen=True)
class RiceanSnrScenario:
    """Ricean desired channel (LoS phase slope phi), SNR metric."""

    K: float = 1.0
    phi: float = 2.0 * math.pi
    ex0: float = 1.0
    beta0: float = 1.0
    sigma2: float = 1.0
    correlation: CorrelationModel = field(default_factory=jakes_model)
    kind = "ricean_snr"

    @property
    def gamma0(self):
        return self.ex0 * self.beta0 / self.sigma2

    @property
    def b(self):
        return self.correlation.b

    def label(self):
        return f"ricsnr_K{self.K:g}"

    def marginal_pair(self, s_th):
        params = analytic.RiceanParams(self.K, self.phi, self.gamma0)
        return analytic.ricean_snr(params, self.b, s_th)

    def field_request(self):
        return FieldRequest(n_moving=1)

    def channels_from_unit(self, moving, fixed, grid):
        return {"h0": _ricean_channel(moving[0], grid, self.beta0, self.K, self.phi)}

    def metric_from_channels(self, channels):
        return self.ex0 * _abs2(channels["h0"]) / self.sigma2


@dataclass(frozen=True)
class RiceanSirScenario:
    """Ricean desired channel, single Rayleigh interferer, SIR metric."""

    K: float = 1.0
    phi: float = 2.0 * math.pi
    ex0: float = 1.0
    beta0: float = 1.0
    ex1: float = 1.0
    beta1: float = 10.0
    correlation: CorrelationModel = field(default_factory=jakes_model)
    kind = "ricean_sir"

    @property
    def b(self):
        return self.correlation.b

    def label(self):
        return f"ricsir_K{self.K:g}"

    def marginal_pair(self, s_th):
        params = analytic.RiceanSirParams(self.beta0, self.beta1, self.ex0,
                                          self.ex1, self.K, self.phi)
        return analytic.ricean_sir(params, self.b, s_th)

    def field_request(self):
        return FieldRequest(n_moving=2)

    def channels_from_unit(self, moving, fixed, grid):
        return {
            "h0": _ricean_channel(moving[0], grid, self.beta0, self.K, self.phi),
            "h1": math.sqrt(self.beta1) * moving[1],
        }

    def metric_from_channels(self, channels):
        return (self.ex0 * _abs2(channels["h0"])
                / (self.ex1 * _abs2(channels["h1"])))


@dataclass(frozen=True)
class FixedFluidScenario:
    """One fixed branch plus one fluid branch, maximum ratio combining."""

    ex0: float = 1.0
    beta0: float = 1.0
    betaf: float = 1.0
    sigma2: float = 1.0
    equal_power: bool = True
    correlation: CorrelationModel = field(default_factory=jakes_model)
    kind = "fixed_fluid"

    def __post_init__(self):
        if self.equal_power and abs(self.beta0 - self.betaf) > 1e-12 * self.betaf:
            raise DomainError("equal_power=True requires beta0 == betaf")

    @property
    def b(self):
        return self.correlation.b

    def label(self):
        return f"ff{'_eq' if self.equal_power else ''}"

    def marginal_pair(self, s_th):
        if self.equal_power:
            return analytic.fixed_fluid_equal(self.beta0, self.ex0,
                                              self.sigma2, self.b, s_th)
        params = analytic.FixedFluidParams(self.beta0, self.betaf,
                                           self.ex0, self.sigma2)
        return analytic.fixed_fluid_unequal(params, self.b, s_th)

    def field_request(self):
        return FieldRequest(n_moving=1, n_fixed=1)

    def channels_from_unit(self, moving, fixed, grid):
        return {
            "h0": math.sqrt(self.beta0) * moving[0],
            "hf": math.sqrt(self.betaf) * fixed[0],
        }

    def metric_from_channels(self, channels):
        hf2 = _abs2(channels["hf"])
        if channels["h0"].ndim > hf2.ndim:
            hf2 = hf2[..., None]
        return self.ex0 * (hf2 + _abs2(channels["h0"])) / self.sigma2


@dataclass(frozen=True)
class ArrayIndependentScenario:
    """Rigid two-element moving array, spacing wide enough to decorrelate."""

    ex0: float = 1.0
    beta: float = 1.0
    sigma2: float = 1.0
    correlation: CorrelationModel = field(default_factory=jakes_model)
    kind = "array_independent"

    @property
    def b(self):
        return self.correlation.b

    def label(self):
        return "arr_ind"

    def marginal_pair(self, s_th):
        return analytic.array_independent(self.beta, self.ex0, self.sigma2,
                                          self.b, s_th)

    def field_request(self):
        return FieldRequest(n_moving=2)

    def channels_from_unit(self, moving, fixed, grid):
        root = math.sqrt(self.beta)
        return {"h1": root * moving[0], "h2": root * moving[1]}

    def metric_from_channels(self, channels):
        return (self.ex0 * (_abs2(channels["h1"]) + _abs2(channels["h2"]))
                / self.sigma2)


@dataclass(frozen=True)
class ArrayCorrelatedScenario:
    """Rigid two-element moving array with coupled elements (spacing delta)."""

    delta: float = 0.25
    ex0: float = 1.0
    beta: float = 1.0
    sigma2: float = 1.0
    correlation: CorrelationModel = field(default_factory=jakes_model)
    kind = "array_correlated"

    @property
    def b(self):
        return self.correlation.b

    @property
    def c0(self):
        return self.ex0 * self.beta / self.sigma2

    def label(self):
        return f"arr_corr_d{self.delta:g}"

    def marginal_pair(self, s_th):
        params = analytic.ArrayCorrParams(array_coupling(self.delta), self.c0)
        return analytic.array_correlated(params, self.b, s_th)

    def field_request(self):
        return FieldRequest(coupled_delta=self.delta)

    def channels_from_unit(self, moving, fixed, grid):
        root = math.sqrt(self.beta)
        return {"h1": root * moving[0], "h2": root * moving[1]}

    def metric_from_channels(self, channels):
        return (self.ex0 * (_abs2(channels["h1"]) + _abs2(channels["h2"]))
                / self.sigma2)


def _abs2(z):
    return z.real ** 2 + z.imag ** 2


def _ricean_channel(diffuse_unit, grid, beta0, K, phi):
    """sqrt(beta0) * (zeta * e^{-j phi l} + u(l)/sqrt(K+1)); K=0 reduces to
    the plain Rayleigh construction on the same draws."""
    zeta = math.sqrt(K / (K + 1.0))
    los = np.exp(-1j * phi * grid)
    return math.sqrt(beta0) * (zeta * los + diffuse_unit / math.sqrt(K + 1.0))


_SCENARIO_KINDS = {
    "rayleigh_snr": RayleighSnrScenario,
    "sir": SirScenario,
    "sinr": SinrScenario,
    "ricean_snr": RiceanSnrScenario,
    "ricean_sir": RiceanSirScenario,
    "fixed_fluid": FixedFluidScenario,
    "array_independent": ArrayIndependentScenario,
    "array_correlated": ArrayCorrelatedScenario,
}


def scenario_from_dict(spec):
    """Build a scenario from {'kind': ..., <params>} (config files, CLI)."""
    spec = dict(spec)
    try:
        kind = spec.pop("kind")
    except KeyError:
        raise DomainError("scenario spec needs a 'kind' entry") from None
    try:
        cls = _SCENARIO_KINDS[kind]
    except KeyError:
        raise DomainError(
            f"unknown scenario kind {kind!r}; expected one of "
            f"{sorted(_SCENARIO_KINDS)}") from None
    for key in ("ex_i", "beta_i"):
        if key in spec:
            spec[key] = tuple(spec[key])
    corr = spec.get("correlation")
    if isinstance(corr, str):
        if corr != "jakes":
            raise DomainError(f"unknown correlation model name {corr!r}")
        spec["correlation"] = jakes_model()
    try:
        return cls(**spec)
    except TypeError as exc:
        raise DomainError(f"bad parameters for scenario {kind!r}: {exc}") from None


def scenario_to_dict(scenario):
    """Inverse of scenario_from_dict for provenance metadata."""
    out = {"kind": scenario.kind}
    for name in scenario.__dataclass_fields__:
        if name == "correlation":
            out["correlation"] = scenario.correlation.name
            continue
        value = getattr(scenario, name)
        if isinstance(value, tuple):
            value = list(value)
        out[name] = value
    return out
