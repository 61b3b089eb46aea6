import math

import numpy as np
import pytest

from swipt_sic.analytic import avg_harvested_energy, mean_interference, mean_interference_outside
from swipt_sic.model import ConfigError, NetworkParams, Ordering, SicConfig
from swipt_sic.simulator import (Realization, SimConfig, SimEstimate, TerminalState,
                                 auto_window_radius, coverage_by_depth, estimate_coverage,
                                 estimate_energy, run_sic_protocol, sample_realization,
                                 simulate_trials)

P = NetworkParams()


def _real(h0, pairs):
    d = np.array([x for x, _ in pairs], dtype=float)
    h = np.array([y for _, y in pairs], dtype=float)
    return Realization(h0, d, h)


# sampling

def test_empty_network_has_no_interferers():
    cfg = SimConfig(trials=1, window_radius=100.0)
    for i in range(20):
        assert sample_realization(P.with_(lam=0.0), cfg, i).n_interferers == 0


def test_interferer_count_is_poisson_mean():
    cfg = SimConfig(trials=1, window_radius=500.0, master_seed=3)
    counts = np.array([sample_realization(P, cfg, i).n_interferers for i in range(10_000)])
    expected = 1e-3 * math.pi * 500 ** 2
    assert expected == pytest.approx(785.4, abs=0.05)
    assert abs(counts.mean() - expected) < 3 * math.sqrt(expected / len(counts))


def test_realization_is_deterministic():
    cfg = SimConfig(window_radius=300.0, master_seed=11)
    a = sample_realization(P, cfg, 42)
    b = sample_realization(P, cfg, 42)
    assert a.useful_fade == b.useful_fade
    np.testing.assert_array_equal(a.distances, b.distances)
    np.testing.assert_array_equal(a.fades, b.fades)
    c = sample_realization(P, cfg, 43)
    assert c.useful_fade != a.useful_fade


def test_realization_ranges():
    cfg = SimConfig(window_radius=200.0)
    r = sample_realization(P, cfg, 0)
    assert np.all(r.distances > 0) and np.all(r.distances <= 200.0)
    assert np.all(r.fades > 0) and r.useful_fade > 0


def test_positions_uniform_on_disc():
    cfg = SimConfig(window_radius=100.0, master_seed=2)
    d = np.concatenate([sample_realization(P.with_(lam=1e-2), cfg, i).distances for i in range(200)])
    # P(d <= R/2) = 1/4 for uniform placement
    frac = np.mean(d <= 50.0)
    assert abs(frac - 0.25) < 4 * math.sqrt(0.25 * 0.75 / len(d))


def test_auto_radius_truncation():
    for p in (P, P.with_(alpha=3.0), P.with_(theta=10.0), P.with_(lam=1e-5)):
        r = auto_window_radius(p)
        assert r > p.d0
        assert mean_interference_outside(r, p) < 1e-4 * mean_interference(p) * (1 + 1e-6)


def test_explicit_radius_must_exceed_d0():
    with pytest.raises(ConfigError):
        sample_realization(P, SimConfig(window_radius=5.0), 0)


# protocol

def test_no_cancellation_is_plain_sinr_test():
    real = _real(1.0, [(30.0, 1.0), (50.0, 2.0)])
    p = P
    out = run_sic_protocol(real, p, SicConfig(0))
    i0 = 1 / (1 + 30.0 ** 4) + 2 / (1 + 50.0 ** 4)
    sinr = p.v * p.p_t / p.tau / (p.v * (p.sigma2 + p.p_t * i0) + p.sigma2_c)
    assert out.decoded == (sinr >= p.theta)
    assert out.cancels_used == 0


def test_strong_interferer_is_cancelled():
    # one interferer at 2 m with a large fade drowns the useful link
    real = _real(1.0, [(2.0, 5.0)])
    out = run_sic_protocol(real, P, SicConfig(1))
    assert out.decoded
    assert out.cancels_used == 1
    assert out.terminal_state is TerminalState.SUCCESS
    assert not run_sic_protocol(real, P, SicConfig(0)).decoded


def test_interferer_decode_failure():
    # two equally strong interferers: neither can be decoded over the other
    real = _real(1.0, [(2.0, 5.0), (2.0, 5.0)])
    out = run_sic_protocol(real, P.with_(theta=2.0), SicConfig(2))
    assert out.terminal_state is TerminalState.OUTAGE_DECODE_FAILED
    assert not out.decoded


def test_outage_after_depth_exhausted():
    # the first interferer decodes, the second still blocks the useful link
    real = _real(1.0, [(2.0, 5.0), (2.5, 3.0)])
    out = run_sic_protocol(real, P, SicConfig(1))
    assert out.terminal_state is TerminalState.OUTAGE_AFTER_N
    assert out.cancels_used == 1 and not out.decoded
    out = run_sic_protocol(real, P, SicConfig(2))
    assert out.decoded and out.cancels_used == 2


def test_outage_when_nothing_left_to_cancel():
    weak = P.with_(p_t=1.0)  # noise-limited: cancelling cannot help
    real = _real(1.0, [(40.0, 1.0)])
    out = run_sic_protocol(real, weak, SicConfig(3))
    assert not out.decoded


def test_ordering_by_distance_versus_power():
    # far node has the larger received power
    real = _real(1.0, [(3.0, 0.01), (4.0, 50.0)])
    g_near = 0.01 / (1 + 3.0 ** 4)
    g_far = 50.0 / (1 + 4.0 ** 4)
    assert g_far > g_near
    by_dist = run_sic_protocol(real, P, SicConfig(1, Ordering.BY_DISTANCE))
    by_pow = run_sic_protocol(real, P, SicConfig(1, Ordering.BY_INSTANTANEOUS_POWER))
    # distance order attempts the weak near node under the strong far one and fails
    assert by_dist.terminal_state is TerminalState.OUTAGE_DECODE_FAILED
    assert by_pow.decoded and by_pow.cancels_used == 1


def test_harvested_sample_uses_full_interference():
    real = _real(2.0, [(2.0, 5.0)])
    out = run_sic_protocol(real, P, SicConfig(1))
    expected = P.zeta * (1 - P.v) * P.p_t * (2.0 / P.tau + 5.0 / (1 + 2.0 ** 4))
    assert out.cancels_used == 1
    assert out.harvested_sample == pytest.approx(expected, rel=1e-15)


# estimators

def test_noise_only_coverage():
    p = P.with_(lam=0.0)
    est = estimate_coverage(p, SicConfig(0), SimConfig(trials=20_000, master_seed=7))
    expected = math.exp(-(p.theta * p.tau / p.p_t) * (p.sigma2 + p.sigma2_c / p.v))
    assert est.within(expected, 3.0)


def test_sic_never_hurts_paired():
    rec = simulate_trials(P, SicConfig(3), SimConfig(trials=3000, master_seed=5))
    est = coverage_by_depth(rec, 3)
    means = [e.mean for e in est]
    assert all(a <= b for a, b in zip(means, means[1:]))
    assert means[1] > means[0]
    direct = estimate_coverage(P, SicConfig(1), SimConfig(trials=3000, master_seed=5))
    assert direct.mean == means[1]


def test_energy_noise_free_link():
    p = P.with_(lam=0.0)
    est = estimate_energy(p, SimConfig(trials=20_000, master_seed=9))
    assert est.within(p.zeta * (1 - p.v) * p.p_t / p.tau, 3.0)


def test_energy_matches_closed_form_within_3se():
    est = estimate_energy(P, SimConfig(trials=20_000, master_seed=4))
    assert est.within(avg_harvested_energy(P), 3.0)


def test_energy_zero_when_all_power_decoded():
    est = estimate_energy(P.with_(v=1.0), SimConfig(trials=500))
    assert est.mean == 0.0 and est.std_error == 0.0


def test_batch_size_and_workers_do_not_change_results():
    base = SimConfig(trials=600, master_seed=21, batch_size=600)
    ref = simulate_trials(P, SicConfig(2), base)
    for batch, workers in [(7, 1), (100, 2), (1, 1)]:
        cfg = SimConfig(trials=600, master_seed=21, batch_size=batch, workers=workers)
        rec = simulate_trials(P, SicConfig(2), cfg)
        np.testing.assert_array_equal(rec.depth, ref.depth)
        np.testing.assert_array_equal(rec.energy, ref.energy)


def test_sim_estimate_interval():
    est = SimEstimate.from_samples(np.array([0.0, 1.0, 1.0, 0.0]), seed=0)
    assert est.ci95_low <= est.mean <= est.ci95_high
    assert est.std_error == pytest.approx(math.sqrt(1 / 3) / 2)
    single = SimEstimate.from_samples(np.array([3.0]), seed=0)
    assert single.std_error == 0.0


def test_sim_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(trials=0)
    with pytest.raises(ConfigError):
        SimConfig(batch_size=0)
