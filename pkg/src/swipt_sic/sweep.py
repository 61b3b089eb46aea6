"""Parameter sweeps that regenerate the figure data, and CSV I/O."""

from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic import (avg_harvested_energy, coverage_no_sic, coverage_sic,
                       harvested_energy_upper_bound)
from .model import ConfigError, NetworkParams, SicConfig, from_decibels
from .optimizer import optimal_split
from .simulator import SimConfig, SimEstimate, coverage_by_depth, simulate_trials

log = logging.getLogger(__name__)


class Figure(enum.Enum):
    FIG1 = "fig1"
    FIG2 = "fig2"
    FIG3 = "fig3"
    CUSTOM = "custom"


OUTPUTS = ("analytic", "simulated", "optimized", "energy", "upper_bound")

_COLUMNS = {
    "analytic": ("pi_nc", "pi_sic"),
    "simulated": ("sim_pi_sic", "sim_pi_sic_se", "sim_pi_sic_ci_low", "sim_pi_sic_ci_high",
                  "sim_energy", "sim_energy_se"),
    "optimized": ("eta", "v_star", "coverage_at_v_star", "energy_opt"),
    "energy": ("energy_baseline",),
    "upper_bound": ("upper_bound", "upper_bound_zero_distance", "ratio_opt_to_bound"),
}

# names accepted for sweep axes and series; "n" is the SIC depth
_PARAM_NAMES = {"n", "lam", "p_t", "p_t_db", "d0", "alpha", "theta", "theta_db",
                "sigma2", "sigma2_c", "v", "zeta"}


class SweepError(ArithmeticError):
    """A sub-computation failed; the message names the offending row."""


@dataclass(frozen=True)
class SweepSpec:
    figure: Figure
    axis: tuple[str, tuple[float, ...]]
    series: tuple[str, tuple[float, ...]]
    outputs: tuple[str, ...]
    n_max: int = 1  # SIC depth when "n" is not itself swept

    def __post_init__(self):
        for name, values in (self.axis, self.series):
            if name not in _PARAM_NAMES:
                raise ConfigError(f"cannot sweep over {name!r}")
            if not all(math.isfinite(x) for x in values):
                raise ConfigError(f"non-finite value in {name!r} grid")
            if name == "n" and any(x < 0 or x != int(x) for x in values):
                raise ConfigError("n grid must hold non-negative integers")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise ConfigError(f"unknown outputs {sorted(unknown)}")

    @classmethod
    def preset(cls, figure, simulate: bool = True) -> "SweepSpec":
        """Default grids for the three figures.

        fig1: depth n = 0..4 for theta in {-5, 0, 5} dB;
        fig2: P_t = 10..80 dB in 5 dB steps for v in {0.5, 0.9};
        fig3: lambda = 1e-5..1e-1 (4 points per decade) for d0 in {1, 10} m.
        """
        figure = Figure(figure)
        if figure is Figure.FIG1:
            outputs = ("analytic", "simulated", "optimized") if simulate else ("analytic", "optimized")
            return cls(figure, ("n", (0, 1, 2, 3, 4)), ("theta_db", (-5.0, 0.0, 5.0)), outputs)
        extra = ("simulated",) if simulate else ()
        if figure is Figure.FIG2:
            grid = tuple(float(x) for x in range(10, 85, 5))
            return cls(figure, ("p_t_db", grid), ("v", (0.5, 0.9)),
                       ("analytic", "optimized", "energy", "upper_bound") + extra)
        if figure is Figure.FIG3:
            grid = tuple(float(x) for x in np.logspace(-5, -1, 17))
            return cls(figure, ("lam", grid), ("d0", (1.0, 10.0)),
                       ("analytic", "optimized", "energy", "upper_bound") + extra)
        raise ConfigError("custom sweeps need an explicit axis and series")

    def columns(self) -> tuple[str, ...]:
        cols = [self.series[0], self.axis[0]]
        for out in OUTPUTS:
            if out in self.outputs:
                cols.extend(_COLUMNS[out])
        return tuple(cols)


@dataclass
class SweepTable:
    columns: tuple[str, ...]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows], dtype=float)

    def select(self, **where) -> "SweepTable":
        """Rows whose named columns equal the given values."""
        idx = {k: self.columns.index(k) for k in where}
        rows = [r for r in self.rows if all(r[idx[k]] == v for k, v in where.items())]
        return SweepTable(self.columns, rows)

    def __eq__(self, other):
        if not isinstance(other, SweepTable):
            return NotImplemented
        return (tuple(self.columns) == tuple(other.columns)
                and len(self.rows) == len(other.rows)
                and all(np.array_equal(np.array(a, dtype=float), np.array(b, dtype=float),
                                       equal_nan=True)
                        for a, b in zip(self.rows, other.rows)))


def _apply(params: NetworkParams, n: int, name: str, value: float):
    if name == "n":
        return params, int(value)
    if name.endswith("_db"):
        return params.with_(**{name[:-3]: from_decibels(value)}), n
    return params.with_(**{name: float(value)}), n


def _row(spec: SweepSpec, params: NetworkParams, n: int, sim: dict | None) -> list[float]:
    out = []
    if "analytic" in spec.outputs:
        br = coverage_sic(params, n)
        out += [br.pi_nc, br.pi_sic]
    if "simulated" in spec.outputs:
        cov, energy = sim["coverage"], sim["energy"]
        out += [cov.mean, cov.std_error, cov.ci95_low, cov.ci95_high,
                energy.mean, energy.std_error]
    e_opt = math.nan
    if "optimized" in spec.outputs:
        eta = coverage_no_sic(params)
        if eta > 0:
            sol = optimal_split(params, n, eta)
            e_opt = sol.energy
            out += [eta, sol.v_star, sol.coverage_at_v_star, sol.energy]
        else:
            log.warning("no-SIC coverage underflows at %s; optimized columns set to nan", params)
            out += [eta, math.nan, math.nan, math.nan]
    if "energy" in spec.outputs:
        out.append(avg_harvested_energy(params))
    if "upper_bound" in spec.outputs:
        ub = harvested_energy_upper_bound(params)
        out += [ub, harvested_energy_upper_bound(params, zero_distance=True), e_opt / ub]
    return out


def run_sweep(spec: SweepSpec, params: NetworkParams, sim_cfg: SimConfig | None = None) -> SweepTable:
    """Evaluate every (series, axis) point of ``spec``.

    Simulated columns use ``sim_cfg``. When the axis is the SIC depth, one
    simulation at the largest depth serves all depths of a series, so the
    per-depth estimates are paired.
    """
    if "simulated" in spec.outputs and sim_cfg is None:
        sim_cfg = SimConfig()
    table = SweepTable(spec.columns())
    s_name, s_values = spec.series
    a_name, a_values = spec.axis
    for s_val in s_values:
        base, base_n = _apply(params, spec.n_max, s_name, s_val)
        shared = None
        if "simulated" in spec.outputs and a_name == "n":
            depth = int(max(a_values))
            shared = simulate_trials(base, SicConfig(depth), sim_cfg)
            shared_cov = coverage_by_depth(shared, depth)
        for a_val in a_values:
            point, n = _apply(base, base_n, a_name, a_val)
            sim = None
            if "simulated" in spec.outputs:
                record = shared if shared is not None else simulate_trials(point, SicConfig(n), sim_cfg)
                cov = shared_cov[n] if shared is not None else coverage_by_depth(record, n)[n]
                sim = {"coverage": cov,
                       "energy": SimEstimate.from_samples(record.energy, record.seed)}
            try:
                values = _row(spec, point, n, sim)
            except ArithmeticError as exc:
                raise SweepError(f"{s_name}={s_val!r}, {a_name}={a_val!r}: {exc}") from exc
            table.rows.append(tuple(float(x) for x in [s_val, a_val, *values]))
    return table


def _fmt(x: float) -> str:
    return format(x, ".17g")


def emit_csv(table: SweepTable, path) -> None:
    """Write ``table`` as CSV with 17 significant digits per value."""
    try:
        with open(path, "w", newline="") as fh:
            write_csv(table, fh)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_csv(table: SweepTable, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(x) for x in row])


def read_csv(path) -> SweepTable:
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [tuple(float(x) for x in row) for row in reader]
    return SweepTable(tuple(header), rows)
