"""Command-line entry point.

Subcommands ``coverage``, ``energy``, ``optimize`` and ``simulate`` evaluate
a single parameter point; ``figure fig1|fig2|fig3`` runs a sweep. Results
are CSV, written to ``--out`` or stdout.

Exit status: 0 success, 2 invalid configuration, 3 numerical failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .analytic import (avg_harvested_energy, coverage_sic, harvested_energy_upper_bound,
                       mean_interference)
from .model import ConfigError, NetworkParams, SicConfig
from .optimizer import optimal_split
from .simulator import SimConfig, SimEstimate, coverage_by_depth, simulate_trials
from .sweep import SweepSpec, emit_csv, run_sweep, write_csv

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

# config-file keys that are not NetworkParams fields
_RUN_KEYS = {"n": "n", "n_max": "n", "trials": "trials", "seed": "seed",
             "master_seed": "seed", "batch_size": "batch_size", "workers": "workers",
             "window_radius": "radius", "eta": "eta", "ordering": "ordering"}

# (argparse dest, params key)
_PARAM_FLAGS = [
    ("lam", "lam"), ("pt_db", "p_t_db"), ("theta_db", "theta_db"), ("d0", "d0"),
    ("alpha", "alpha"), ("v", "v"), ("sigma2", "sigma2"), ("sigma2_c", "sigma2_c"),
    ("zeta", "zeta"),
]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON parameter file")
    p.add_argument("--lambda", dest="lam", type=float, help="transmitter density")
    p.add_argument("--pt-db", type=float, help="transmit power [dB]")
    p.add_argument("--theta-db", type=float, help="SINR threshold [dB]")
    p.add_argument("--d0", type=float, help="pair distance [m]")
    p.add_argument("--alpha", type=float, help="path-loss exponent")
    p.add_argument("--v", type=float, help="power-splitting ratio")
    p.add_argument("--sigma2", type=float)
    p.add_argument("--sigma2-c", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--n", type=int, help="SIC depth")
    p.add_argument("--eta", type=float, help="coverage target (default: no-SIC coverage)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--radius", type=float, help="simulation window radius (default: auto)")
    p.add_argument("--ordering", choices=["distance", "power"])
    p.add_argument("--out", type=Path, help="output CSV (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swipt-sic", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [("coverage", "analytic coverage breakdown"),
                           ("energy", "average harvested energy and bounds"),
                           ("optimize", "smallest feasible power-splitting ratio"),
                           ("simulate", "Monte Carlo coverage and energy")]:
        _common(sub.add_parser(name, help=helptext))
    fig = sub.add_parser("figure", help="figure-reproduction sweep")
    fig.add_argument("which", choices=["fig1", "fig2", "fig3"])
    fig.add_argument("--no-sim", action="store_true", help="skip simulated columns")
    _common(fig)
    return parser


def _load(args):
    data, run = {}, {}
    if args.config is not None:
        raw = json.loads(args.config.read_text())
        if not isinstance(raw, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
        for key, value in raw.items():
            if key in _RUN_KEYS:
                run[_RUN_KEYS[key]] = value
            else:
                data[key] = value
    for flag, key in _PARAM_FLAGS:
        value = getattr(args, flag)
        if value is not None:
            # a flag replaces either spelling of the same field from the file
            base = key[:-3] if key.endswith("_db") else key
            for k in [k for k in data if k in (base, base + "_db") or (base == "lam" and k == "lambda")]:
                del data[k]
            data[key] = value
    for key in ("n", "trials", "seed", "batch_size", "workers", "radius", "eta", "ordering"):
        value = getattr(args, key)
        if value is not None:
            run[key] = value
    params = NetworkParams.from_dict(data)
    sic = SicConfig(n_max=run.get("n", 1), ordering=run.get("ordering", "distance"))
    defaults = SimConfig()
    sim = SimConfig(trials=int(run.get("trials", defaults.trials)),
                    window_radius=run.get("radius"),
                    master_seed=int(run.get("seed", defaults.master_seed)),
                    batch_size=int(run.get("batch_size", defaults.batch_size)),
                    workers=int(run.get("workers", defaults.workers)))
    return params, sic, sim, run.get("eta")


def _emit_pairs(pairs, out) -> None:
    lines = ["quantity,value"] + [f"{k},{format(float(v), '.17g')}" for k, v in pairs]
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _cmd_coverage(params, sic, sim, eta):
    br = coverage_sic(params, sic)
    pairs = [("pi_nc", br.pi_nc)]
    pairs += [(f"pi_d_{j}", x) for j, x in enumerate(br.pi_d, start=1)]
    pairs += [(f"pi_c_{j}", x) for j, x in enumerate(br.pi_c)]
    pairs.append(("pi_sic", br.pi_sic))
    return pairs


def _cmd_energy(params, sic, sim, eta):
    return [("mean_interference", mean_interference(params)),
            ("energy", avg_harvested_energy(params)),
            ("upper_bound", harvested_energy_upper_bound(params)),
            ("upper_bound_zero_distance", harvested_energy_upper_bound(params, zero_distance=True))]


def _cmd_optimize(params, sic, sim, eta):
    br = coverage_sic(params, 0)
    eta = br.pi_nc if eta is None else float(eta)
    sol = optimal_split(params, sic, eta)
    base = avg_harvested_energy(params)
    return [("eta", eta), ("v_star", sol.v_star), ("coverage_at_v_star", sol.coverage_at_v_star),
            ("energy_opt", sol.energy), ("energy_baseline", base),
            ("energy_gain", max(sol.energy - base, 0.0) if sol.v_star < params.v else 0.0),
            ("constraint_active", float(sol.constraint_active)),
            ("non_monotone", float(sol.non_monotone))]


def _cmd_simulate(params, sic, sim, eta):
    record = simulate_trials(params, sic, sim)
    pairs = [("window_radius", record.radius), ("trials", sim.trials), ("seed", sim.master_seed)]
    for n, est in enumerate(coverage_by_depth(record, sic.n_max)):
        pairs += [(f"sim_pi_sic_{n}", est.mean), (f"sim_pi_sic_{n}_se", est.std_error)]
    energy = SimEstimate.from_samples(record.energy, record.seed)
    pairs += [("sim_energy", energy.mean), ("sim_energy_se", energy.std_error),
              ("sim_energy_ci_low", energy.ci95_low), ("sim_energy_ci_high", energy.ci95_high)]
    return pairs


_COMMANDS = {"coverage": _cmd_coverage, "energy": _cmd_energy,
             "optimize": _cmd_optimize, "simulate": _cmd_simulate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        params, sic, sim, eta = _load(args)
        if args.command == "figure":
            spec = SweepSpec.preset(args.which, simulate=not args.no_sim)
            table = run_sweep(spec, params, sim)
            if args.out is None:
                write_csv(table, sys.stdout)
            else:
                emit_csv(table, args.out)
        else:
            _emit_pairs(_COMMANDS[args.command](params, sic, sim, eta), args.out)
    except ValueError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
