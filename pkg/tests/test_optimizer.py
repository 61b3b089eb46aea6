import warnings

import numpy as np
import pytest

import swipt_sic.optimizer as opt
from swipt_sic.analytic import avg_harvested_energy, coverage_no_sic, coverage_sic
from swipt_sic.model import NetworkParams
from swipt_sic.optimizer import Infeasible, NonMonotoneWarning, energy_gain, optimal_split

P = NetworkParams()
ETA = coverage_no_sic(P)


@pytest.mark.parametrize("v0", [0.3, 0.7])
def test_root_at_probe_point(v0):
    eta = coverage_sic(P.with_(v=v0), 1).pi_sic
    sol = optimal_split(P, 1, eta)
    assert sol.v_star == pytest.approx(v0, abs=1e-6)


def test_reference_setup_lowers_split():
    sol = optimal_split(P, 1, ETA)
    assert sol.v_star < 0.5
    assert sol.energy > avg_harvested_energy(P)
    assert sol.energy == avg_harvested_energy(P.with_(v=sol.v_star))
    assert sol.coverage_at_v_star == pytest.approx(ETA, abs=1e-6)
    assert sol.constraint_active and not sol.non_monotone


def test_feasibility_certificate():
    for n in (1, 2):
        sol = optimal_split(P, n, ETA)
        assert coverage_sic(P.with_(v=sol.v_star), n).pi_sic >= ETA - 1e-6


def test_no_sic_keeps_baseline():
    sol = optimal_split(P, 0, ETA)
    assert sol.v_star == pytest.approx(0.5, abs=1e-6)
    assert energy_gain(P, 0) == 0.0


def test_gain_positive_with_sic():
    assert energy_gain(P, 1) > 0


def test_infeasible_target():
    with pytest.raises(Infeasible):
        optimal_split(P, 1, 0.99)


def test_floor_when_target_trivial():
    # without conversion noise coverage does not depend on v
    sol = optimal_split(P.with_(sigma2_c=0.0), 1, 0.5)
    assert sol.v_star == opt.V_FLOOR
    assert not sol.constraint_active


def test_gain_zero_when_baseline_at_floor():
    p = P.with_(v=opt.V_FLOOR, sigma2_c=0.0)
    assert energy_gain(p, 1) == 0.0


def test_v_star_monotone_in_target():
    etas = np.linspace(0.4, 0.75, 6)
    vs = [optimal_split(P, 1, e).v_star for e in etas]
    assert all(a <= b for a, b in zip(vs, vs[1:]))


def test_bad_target_rejected():
    with pytest.raises(ValueError):
        optimal_split(P, 1, 0.0)
    with pytest.raises(ValueError):
        optimal_split(P, 1, 1.0)


def test_non_monotone_coverage_falls_back(monkeypatch):
    # dips between v = 0.2 and v = 0.4; smallest feasible v for eta=0.5 is 0.1
    def fake(params, n, v):
        if v < 0.1:
            return 0.0
        if v < 0.2:
            return 0.6
        if v < 0.4:
            return 0.3
        return 0.9

    monkeypatch.setattr(opt, "_coverage", fake)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sol = optimal_split(P, 1, 0.5)
    assert any(issubclass(w.category, NonMonotoneWarning) for w in caught)
    assert sol.non_monotone
    assert sol.v_star == pytest.approx(0.1, abs=1e-8)
    assert fake(None, 1, sol.v_star) >= 0.5
