"""Seeded Monte Carlo simulation of the SIC receiver.

Each trial draws an independent PPP snapshot around the typical receiver,
runs the cancellation protocol on it and records the harvested energy.
Trial ``i`` uses its own random stream derived from ``(master_seed, i)``,
so results do not depend on batch size or the number of worker processes.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .analytic import mean_interference, mean_interference_outside, tail_exponent
from .model import ConfigError, NetworkParams, Ordering, SicConfig, tau

_Z95 = 1.959963984540054

#: Truncation budget for the auto-sized simulation window.
AUTO_TAIL_FRACTION = 1e-4


@dataclass(frozen=True)
class SimConfig:
    trials: int = 100_000
    window_radius: float | None = None  # None selects auto_window_radius
    master_seed: int = 1
    batch_size: int = 10_000
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.window_radius is not None and not self.window_radius > 0:
            raise ConfigError("window_radius must be > 0")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError("master_seed must fit in 64 unsigned bits")


def auto_window_radius(params: NetworkParams, fraction: float = AUTO_TAIL_FRACTION) -> float:
    """Radius beyond which ignored interferers are negligible.

    Two conditions must hold: the mean interference outside the window is
    below ``fraction * E[I]`` (energy bias), and the interference outside
    changes the useful-link Laplace factor ``L(theta*tau)`` by less than
    ``fraction`` (coverage bias).
    """
    floor = 2.0 * params.d0
    if params.lam == 0:
        return floor
    target_mean = fraction * mean_interference(params)
    s = params.theta * tau(params)

    def excess(log_r):
        r = math.exp(log_r)
        return max(mean_interference_outside(r, params) / target_mean,
                   tail_exponent(s, r, params) / fraction) - 1.0

    lo = math.log(floor)
    if excess(lo) <= 0:
        return floor
    hi = lo + 1.0
    while excess(hi) > 0:
        hi += 1.0
    return math.exp(optimize.brentq(excess, lo, hi, xtol=1e-6))


def _resolve_radius(params: NetworkParams, cfg: SimConfig) -> float:
    if cfg.window_radius is None:
        return auto_window_radius(params)
    if not cfg.window_radius > params.d0:
        raise ConfigError("window_radius must exceed d0")
    return float(cfg.window_radius)


@dataclass(frozen=True)
class Realization:
    """One network snapshot seen from the typical receiver.

    ``distances[i]`` and ``fades[i]`` belong to the i-th interferer, in
    sampling order (not sorted).
    """

    useful_fade: float
    distances: np.ndarray
    fades: np.ndarray

    @property
    def n_interferers(self) -> int:
        return len(self.distances)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial_index,))
    return np.random.Generator(np.random.PCG64(ss))


def _sample(params: NetworkParams, radius: float, rng: np.random.Generator) -> Realization:
    mean_count = params.lam * math.pi * radius * radius
    count = int(rng.poisson(mean_count)) if mean_count > 0 else 0
    h0 = float(rng.standard_exponential())
    # 1 - U lies in (0, 1], keeping every distance strictly positive
    distances = radius * np.sqrt(1.0 - rng.random(count))
    fades = rng.standard_exponential(count)
    return Realization(h0, distances, fades)


def sample_realization(params: NetworkParams, cfg: SimConfig, trial_index: int) -> Realization:
    """Draw the snapshot for ``trial_index``; deterministic in (seed, index)."""
    return _sample(params, _resolve_radius(params, cfg), trial_rng(cfg.master_seed, trial_index))


class TerminalState(enum.Enum):
    SUCCESS = "success"
    OUTAGE_AFTER_N = "outage_after_n"
    OUTAGE_DECODE_FAILED = "outage_decode_failed"


@dataclass(frozen=True)
class TrialOutcome:
    decoded: bool
    cancels_used: int
    terminal_state: TerminalState
    harvested_sample: float


def _decode_order(gains: np.ndarray, distances: np.ndarray, n: int, ordering: Ordering) -> np.ndarray:
    # indices of the n interferers attempted first, in attempt order
    n = min(n, len(gains))
    if n == 0:
        return np.empty(0, dtype=np.intp)
    key = distances if ordering is Ordering.BY_DISTANCE else -gains
    if n < len(key):
        idx = np.argpartition(key, n - 1)[:n]
    else:
        idx = np.arange(len(key))
    return idx[np.argsort(key[idx], kind="stable")]


def run_sic_protocol(real: Realization, params: NetworkParams, sic: SicConfig) -> TrialOutcome:
    """Run the cancellation protocol on one snapshot.

    The receiver first tries the useful signal. On failure it tries the
    next interferer in the configured order, with the useful signal
    counted as interference; if that fails the trial is in outage,
    otherwise the interferer is removed and the useful signal is retried.
    At most ``sic.n_max`` removals are made. The harvested sample always
    uses the full received power, before any cancellation.
    """
    v, p_t, theta = params.v, params.p_t, params.theta
    noise = v * params.sigma2 + params.sigma2_c
    signal = real.useful_fade / tau(params)
    gains = real.fades / (1.0 + real.distances ** params.alpha)
    total = float(np.sum(gains))
    energy = params.zeta * (1.0 - v) * p_t * (signal + total)

    order = _decode_order(gains, real.distances, sic.n_max, sic.ordering)
    interference = total
    cancels = 0
    while True:
        if v * p_t * signal >= theta * (noise + v * p_t * interference):
            return TrialOutcome(True, cancels, TerminalState.SUCCESS, energy)
        if cancels == len(order):
            # depth exhausted, or nothing left to cancel
            return TrialOutcome(False, cancels, TerminalState.OUTAGE_AFTER_N, energy)
        g = float(gains[order[cancels]])
        rest = max(interference - g, 0.0)
        if v * p_t * g < theta * (noise + v * p_t * (rest + signal)):
            return TrialOutcome(False, cancels, TerminalState.OUTAGE_DECODE_FAILED, energy)
        interference = rest
        cancels += 1


def _run_batch(args):
    params, sic, radius, seed, start, stop = args
    depth = np.empty(stop - start, dtype=np.int64)
    energy = np.empty(stop - start)
    for k, i in enumerate(range(start, stop)):
        out = run_sic_protocol(_sample(params, radius, trial_rng(seed, i)), params, sic)
        depth[k] = out.cancels_used if out.decoded else -1
        energy[k] = out.harvested_sample
    return depth, energy


@dataclass(frozen=True)
class TrialRecord:
    """Per-trial results in trial-index order.

    ``depth[i]`` is the number of cancellations after which trial ``i``
    decoded its useful signal, or -1 for outage.
    """

    depth: np.ndarray
    energy: np.ndarray
    radius: float
    seed: int


def simulate_trials(params: NetworkParams, sic: SicConfig, cfg: SimConfig) -> TrialRecord:
    radius = _resolve_radius(params, cfg)
    bounds = range(0, cfg.trials, cfg.batch_size)
    jobs = [(params, sic, radius, cfg.master_seed, b, min(b + cfg.batch_size, cfg.trials))
            for b in bounds]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_run_batch, jobs))
    else:
        parts = [_run_batch(job) for job in jobs]
    depth = np.concatenate([p[0] for p in parts])
    energy = np.concatenate([p[1] for p in parts])
    return TrialRecord(depth, energy, radius, cfg.master_seed)


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    std_error: float
    ci95_low: float
    ci95_high: float
    trials: int
    seed: int

    @classmethod
    def from_samples(cls, samples: np.ndarray, seed: int) -> "SimEstimate":
        samples = np.asarray(samples, dtype=float)
        n = len(samples)
        mean = float(np.mean(samples))
        se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(mean, se, mean - _Z95 * se, mean + _Z95 * se, n, seed)

    def within(self, value: float, n_se: float = 3.0) -> bool:
        return abs(self.mean - value) <= n_se * self.std_error


def coverage_by_depth(record: TrialRecord, n_max: int) -> list[SimEstimate]:
    """Coverage estimates for every depth 0..n_max from one paired run.

    A trial decoded after k cancellations counts as covered for every
    depth n >= k, so the estimates are nondecreasing in n.
    """
    ok = record.depth >= 0
    return [SimEstimate.from_samples(ok & (record.depth <= n), record.seed)
            for n in range(n_max + 1)]


def estimate_coverage(params: NetworkParams, sic: SicConfig, cfg: SimConfig) -> SimEstimate:
    """Monte Carlo estimate of the SIC coverage probability."""
    record = simulate_trials(params, sic, cfg)
    return SimEstimate.from_samples(record.depth >= 0, cfg.master_seed)


def estimate_energy(params: NetworkParams, cfg: SimConfig) -> SimEstimate:
    """Monte Carlo estimate of the average harvested energy."""
    record = simulate_trials(params, SicConfig(n_max=0), cfg)
    return SimEstimate.from_samples(record.energy, cfg.master_seed)
