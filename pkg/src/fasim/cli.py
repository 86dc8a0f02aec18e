"""Command-line experiment runner.

Subcommands:
    curve        analytic approximation/bound/marginal curves for a scenario
    simulate     empirical sup-cdf curves (with CI) for a scenario
    compare      four-layout comparison at one track length
    reduce       outage-reduction sweep vs track length
    neutralize   track length required to neutralize one interferer
    figures      run a preset (fig3..fig9)

Exit codes: 0 success, 2 configuration error, 3 numeric non-convergence,
4 infeasible target.  Values may be given in dB through the *-db variants of
flags; everything is stored and reported in linear units.
"""

import argparse
import json
import sys
from dataclasses import replace

import yaml

from .curves import write_table
from .errors import DomainError, InfeasibleTargetError, NumericError
from .experiments import (
    ExperimentSpec,
    PRESETS,
    ThresholdGrid,
    db_to_linear,
    run_comparison,
    run_curve,
    run_figure,
    run_neutralization,
    run_reduction_sweep,
    run_simulation,
    spec_from_dict,
)
from .montecarlo import SimConfig
from .scenarios import scenario_from_dict

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INFEASIBLE = 4

_SCENARIO_FLAGS = (
    "ex0", "beta0", "sigma2", "K", "phi", "ex1", "beta1", "betaf",
    "beta", "delta",
)


def _add_common(p):
    p.add_argument("--config", help="YAML config file (flags override it)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, help="base simulation seed")
    p.add_argument("--trials", type=int, help="Monte Carlo trials")
    p.add_argument("--grid-step", type=float, help="track grid step (wavelengths)")
    p.add_argument("--generator", choices=("cholesky", "sos"),
                   help="field generator")
    p.add_argument("--thresholds", help="grid as lo:hi:count:lin|log")
    p.add_argument("--lengths", help="comma-separated track lengths")


def _add_scenario_flags(p):
    p.add_argument("--scenario", help="scenario kind (e.g. rayleigh_snr, sinr)")
    for name in _SCENARIO_FLAGS:
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--gamma0", type=float, help="mean SNR (linear)")
    p.add_argument("--gamma0-db", type=float, help="mean SNR in dB")
    p.add_argument("--lambdas", help="comma-separated desired/interferer ratios")
    p.add_argument("--equal-power", action="store_true")
    p.add_argument("--ports", help="comma-separated discrete port counts")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fasim",
        description="Spatial-maximum cdf analysis of fluid antenna receivers")
    sub = parser.add_subparsers(dest="command", required=True)

    for cmd, needs_scenario in (("curve", True), ("simulate", True)):
        p = sub.add_parser(cmd)
        _add_common(p)
        _add_scenario_flags(p)
        if cmd == "simulate":
            p.add_argument("--no-sim", action="store_true",
                           help="emit analytic curves only")

    p = sub.add_parser("compare")
    _add_common(p)
    p.add_argument("--no-sim", action="store_true")
    p.add_argument("--length", type=float, default=1.0)

    p = sub.add_parser("reduce")
    _add_common(p)
    p.add_argument("--p-targets", default="0.01,0.1,0.5")
    p.add_argument("--gamma0", type=float)
    p.add_argument("--gamma0-db", type=float)

    p = sub.add_parser("neutralize")
    _add_common(p)
    p.add_argument("--p-target", type=float, default=0.9)
    p.add_argument("--gamma0", help="comma-separated linear gamma0 values")
    p.add_argument("--gamma0-db", help="comma-separated gamma0 values in dB")
    p.add_argument("--ratios", default="1:12:7:log",
                   help="interferer-to-desired ratio grid lo:hi:count:lin|log")
    p.add_argument("--method", choices=("auto", "closed_form", "simulation"),
                   default="auto")

    p = sub.add_parser("figures")
    p.add_argument("name", choices=sorted(PRESETS))
    _add_common(p)
    p.add_argument("--no-sim", action="store_true")
    return parser


def _parse_floats(text):
    return tuple(float(v) for v in text.split(",") if v)


def _load_config(path):
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise DomainError(f"config {path} must be a mapping")
    return data


def _scenario_dict_from_args(args, config):
    sdict = dict(config.get("scenario", {}))
    if args.scenario:
        sdict["kind"] = args.scenario
    for name in _SCENARIO_FLAGS:
        value = getattr(args, name.replace("-", "_"), None)
        if value is not None:
            sdict[name] = value
    gamma0 = args.gamma0
    if args.gamma0_db is not None:
        gamma0 = db_to_linear(args.gamma0_db)
    if gamma0 is not None:
        # gamma0 is shorthand for ex0 = gamma0 with unit channel/noise powers
        sdict.setdefault("ex0", float(gamma0))
    if args.lambdas:
        lams = _parse_floats(args.lambdas)
        sdict["ex_i"] = [1.0] * len(lams)
        sdict["beta_i"] = [sdict.get("ex0", 1.0) * sdict.get("beta0", 1.0) / lam
                           for lam in lams]
    if getattr(args, "equal_power", False):
        sdict["equal_power"] = True
    if "kind" not in sdict:
        raise DomainError("no scenario given: use --scenario or a config file")
    return sdict


def _sim_from_args(args, config, default_length=1.0):
    sim = dict(config.get("sim", {}))
    if args.trials is not None:
        sim["trials"] = args.trials
    if args.seed is not None:
        sim["seed"] = args.seed
    if args.grid_step is not None:
        sim["grid_step"] = args.grid_step
    if args.generator is not None:
        sim["generator"] = args.generator
    sim.setdefault("trials", 100_000)
    sim.setdefault("track_length", default_length)
    return SimConfig(**sim)


def _spec_from_args(args, need_sim):
    config = _load_config(args.config) if args.config else {}
    sdict = _scenario_dict_from_args(args, config)
    thresholds = args.thresholds or config.get("thresholds", "0.01:10:200:log")
    if isinstance(thresholds, str):
        grid = ThresholdGrid.parse(thresholds)
    else:
        grid = ThresholdGrid(float(thresholds["lo"]), float(thresholds["hi"]),
                             int(thresholds["count"]),
                             thresholds.get("scale", "log"))
    lengths = config.get("lengths", (1.0,))
    if args.lengths:
        lengths = _parse_floats(args.lengths)
    ports = ()
    if getattr(args, "ports", None):
        ports = tuple(int(v) for v in args.ports.split(","))
    sim = _sim_from_args(args, config) if need_sim else None
    return ExperimentSpec(
        scenario=scenario_from_dict(sdict),
        thresholds=grid,
        lengths=tuple(lengths),
        sim=sim,
        port_counts=ports,
    )


def _emit_curves(curves, out_dir, stem):
    import os

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for curve in curves:
        path = os.path.join(out_dir, f"{stem}__{curve.label}.csv")
        curve.to_csv(path)
        paths.append(path)
    return paths


def _cmd_curve(args):
    spec = _spec_from_args(args, need_sim=False)
    return _emit_curves(run_curve(spec), args.out, "curve")


def _cmd_simulate(args):
    no_sim = getattr(args, "no_sim", False)
    spec = _spec_from_args(args, need_sim=not no_sim)
    curves = run_curve(spec)
    if not no_sim:
        curves += run_simulation(spec)
    return _emit_curves(curves, args.out, "simulate")


def _cmd_compare(args):
    config = _load_config(args.config) if args.config else {}
    thresholds = args.thresholds or config.get("thresholds", "0.05:12:200:log")
    grid = ThresholdGrid.parse(thresholds) if isinstance(thresholds, str) else thresholds
    sim = None if args.no_sim else _sim_from_args(args, config, args.length)
    curves = run_comparison(grid.values(), args.length, sim)
    return _emit_curves(curves, args.out, "compare")


def _cmd_reduce(args):
    import os

    gamma0 = 1.0
    if args.gamma0 is not None:
        gamma0 = args.gamma0
    if args.gamma0_db is not None:
        gamma0 = db_to_linear(args.gamma0_db)
    lengths = ThresholdGrid.parse(args.lengths or "0:1.5:151:lin").values()
    p_targets = _parse_floats(args.p_targets)
    meta, columns = run_reduction_sweep(p_targets, lengths, gamma0)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "reduce__sweep.csv")
    write_table(path, meta, columns)
    return [path]


def _cmd_neutralize(args):
    import os

    if args.gamma0_db:
        gamma0s = [db_to_linear(g) for g in _parse_floats(args.gamma0_db)]
    elif args.gamma0:
        gamma0s = list(_parse_floats(args.gamma0))
    else:
        gamma0s = [1.0]
    ratios = ThresholdGrid.parse(args.ratios).values()
    sim = None
    if args.method != "closed_form":
        config = _load_config(args.config) if args.config else {}
        sim = _sim_from_args(args, config, default_length=2.0)
        if args.trials is None and "trials" not in config.get("sim", {}):
            sim = replace(sim, trials=30_000)
    meta, columns = run_neutralization(args.p_target, gamma0s, ratios,
                                       sim=sim, method=args.method)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"neutralize__pT{args.p_target:g}.csv")
    write_table(path, meta, columns)
    return [path]


def _cmd_figures(args):
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.grid_step is not None:
        overrides["grid_step"] = args.grid_step
    if args.generator is not None:
        overrides["generator"] = args.generator
    return run_figure(args.name, args.out, sim_overrides=overrides,
                      no_sim=args.no_sim)


_COMMANDS = {
    "curve": _cmd_curve,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "reduce": _cmd_reduce,
    "neutralize": _cmd_neutralize,
    "figures": _cmd_figures,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        paths = _COMMANDS[args.command](args)
    except (DomainError, KeyError, ValueError, OSError, yaml.YAMLError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InfeasibleTargetError as exc:
        print(f"infeasible target: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(json.dumps({"written": paths}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
