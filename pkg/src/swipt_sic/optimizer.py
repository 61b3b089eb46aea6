"""Smallest power-splitting ratio that keeps SIC coverage above a target.

Harvested energy falls linearly in ``v``, so maximising energy under the
coverage constraint means finding the smallest feasible ``v``. Coverage is
expected to be nondecreasing in ``v``; this is checked on a coarse grid
before bisecting, and a grid-refinement search takes over if it fails.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .analytic import avg_harvested_energy, coverage_no_sic, coverage_sic
from .model import NetworkParams, SicConfig

V_FLOOR = 1e-6
V_TOL = 1e-9
GRID_POINTS = 16
MONOTONE_TOL = 1e-9


class OptimizationError(ArithmeticError):
    pass


class Infeasible(OptimizationError):
    """No ``v`` in ``[v_floor, 1]`` meets the coverage target."""


class NonMonotoneWarning(RuntimeWarning):
    """Coverage was found to decrease somewhere in ``v``."""


@dataclass(frozen=True)
class SplitSolution:
    v_star: float
    energy: float
    coverage_at_v_star: float
    constraint_active: bool
    non_monotone: bool = False


def _coverage(params: NetworkParams, n: int, v: float) -> float:
    return coverage_sic(params.with_(v=float(v)), n).pi_sic


def _bisect(cov, lo: float, hi: float, eta: float, tol: float) -> float:
    # invariant: cov(lo) < eta <= cov(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cov(mid) >= eta:
            hi = mid
        else:
            lo = mid
    return hi


def optimal_split(params: NetworkParams, sic: SicConfig | int, eta: float,
                  v_floor: float = V_FLOOR, v_tol: float = V_TOL) -> SplitSolution:
    """Minimise ``v`` subject to ``coverage_sic(v) >= eta``.

    Parameters
    ----------
    params : NetworkParams
        Operating point; its ``v`` is ignored.
    sic : SicConfig or int
        Cancellation depth.
    eta : float
        Coverage target in (0, 1).
    v_floor : float
        Lower end of the search interval, standing in for ``v > 0``.
    v_tol : float
        Bisection stops once the bracket is narrower than this.

    Raises
    ------
    Infeasible
        If even ``v = 1`` misses the target.
    """
    n = sic if isinstance(sic, int) else sic.n_max
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if not 0 < v_floor < 1:
        raise ValueError("v_floor must lie in (0, 1)")

    def cov(v):
        return _coverage(params, n, v)

    grid = np.geomspace(v_floor, 1.0, GRID_POINTS)
    values = np.array([cov(v) for v in grid])
    if values[-1] < eta:
        raise Infeasible(f"coverage at v=1 is {values[-1]:.6g} < eta={eta:.6g}")

    non_monotone = bool(np.any(np.diff(values) < -MONOTONE_TOL))
    if non_monotone:
        warnings.warn("coverage is not monotone in v; using grid refinement",
                      NonMonotoneWarning, stacklevel=2)

    if values[0] >= eta:
        v_star = float(grid[0])
        active = False
    else:
        # first grid cell where the target is crossed; for monotone coverage
        # this is the unique crossing, otherwise the smallest feasible one
        k = int(np.argmax(values >= eta))
        lo, hi = float(grid[k - 1]), float(grid[k])
        if non_monotone:
            v_star = _refine(cov, lo, hi, eta, v_tol)
        else:
            v_star = _bisect(cov, lo, hi, eta, v_tol)
        active = True

    p_star = params.with_(v=v_star)
    return SplitSolution(v_star, avg_harvested_energy(p_star), cov(v_star), active, non_monotone)


def _refine(cov, lo: float, hi: float, eta: float, tol: float, points: int = 9) -> float:
    # repeatedly grid the bracket and keep the first feasible cell
    while hi - lo > tol:
        xs = np.linspace(lo, hi, points)
        feasible = [x for x in xs[1:] if cov(x) >= eta]
        hi = float(feasible[0])
        lo = float(xs[np.searchsorted(xs, hi) - 1])
    return hi


def energy_gain(params: NetworkParams, sic: SicConfig | int, eta: float | None = None) -> float:
    """Extra harvested energy from lowering ``v`` to the optimum.

    ``eta`` defaults to the no-SIC coverage at ``params.v``. The baseline is
    the energy at ``params.v``; the result is clipped at zero because the
    optimum is never worse than keeping the baseline split.
    """
    if eta is None:
        eta = coverage_no_sic(params)
    sol = optimal_split(params, sic, eta)
    if sol.v_star >= params.v:
        return 0.0
    return sol.energy - avg_harvested_energy(params)
