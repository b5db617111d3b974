import json

import numpy as np
import pytest

from carnot_verif.ranges import ParamSet, classify_main
from carnot_verif.witnesses import (exponential_witness,
                                    ode_nonexistence_probe, power_witness,
                                    verify_exponent_counterexample,
                                    verify_growth_sharpness,
                                    verify_radial_lower_bound)


def test_power_witness_basics():
    w = power_witness(2.0, 3)
    assert w.field(np.zeros(3)) == pytest.approx(1.0)
    assert w.field(np.array([1.0, 2.0, 2.0])) == pytest.approx(10.0)
    # sigma = 2 gives |grad u| = 2r exactly
    r = np.array([0.1, 1.0, 50.0])
    assert np.allclose(w.gradient_magnitude(r), 2 * r)
    with pytest.raises(ValueError):
        power_witness(0.0, 3)
    with pytest.raises(ValueError):
        power_witness(1.0, 1)


def test_exponential_witness_log_profile():
    w = exponential_witness(1.0, 3)
    t = np.array([0.0, 3.0])
    L, L1, L2 = w.log_profile(t)
    assert np.allclose(L, [1.0, 2.0])
    assert np.allclose(L1, [0.5, 0.25])
    assert np.allclose(L2, [-0.25, -0.03125])


def test_lower_bound_constant_sigma2():
    # frozen reference: best constant 4 at (sigma, Q) = (2, 3)
    rep = verify_radial_lower_bound(2.0, 3)
    assert rep.certified
    assert rep.C_star == pytest.approx(4.0, abs=1e-6)
    doc = json.loads(rep.to_json())
    assert doc["verdict"] == "certified"


def test_lower_bound_small_sigma_limit():
    # sigma(Q + sigma - 2) at sigma = 0.5, Q = 3 is 0.75
    rep = verify_radial_lower_bound(0.5, 3)
    assert rep.certified
    assert rep.C_star == pytest.approx(0.75, abs=1e-4)


def test_lower_bound_margin_grid_stability():
    # doubling the grid density moves the best constant by under 1 percent
    a = verify_radial_lower_bound(1.3, 4, np.logspace(-3, 6, 2000))
    b = verify_radial_lower_bound(1.3, 4, np.logspace(-3, 6, 4000))
    assert abs(a.C_star - b.C_star) < 0.01 * abs(a.C_star)


def test_sharpness_dichotomy():
    chi, mu, Q = 0.5, 0.0, 3
    crit = (2.0 - chi - mu) / (1.0 - chi)    # = 3
    at = verify_growth_sharpness(chi, mu, crit, Q)
    assert at.certified
    assert at.tail_gap == pytest.approx(0.0, abs=1e-12)
    above = verify_growth_sharpness(chi, mu, crit + 1.0, Q)
    assert above.certified and above.tail_gap > 0
    below = verify_growth_sharpness(chi, mu, crit - 0.5, Q)
    assert below.verdict == "asymptotic-failure"
    assert below.tail_gap == pytest.approx(-0.25, abs=1e-12)


def test_sharpness_guards():
    with pytest.raises(ValueError):
        verify_growth_sharpness(1.0, 0.0, 2.0, 3)
    with pytest.raises(ValueError):
        verify_growth_sharpness(0.5, 1.6, 2.0, 3)
    with pytest.raises(ValueError):
        verify_growth_sharpness(0.5, 0.0, -1.0, 3)


def test_counterexample_case1():
    rep = verify_exponent_counterexample(1, chi=0.5, mu=0.0, omega=0.25,
                                         Q=3, sigma=6.0)
    assert rep.certified
    assert rep.C_star == pytest.approx(4.89898, rel=1e-4)
    assert rep.tail_gap == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError, match="sigma"):
        verify_exponent_counterexample(1, chi=0.5, mu=0.0, omega=0.25,
                                       Q=3, sigma=2.0)
    with pytest.raises(ValueError, match="omega"):
        verify_exponent_counterexample(1, chi=0.5, mu=0.0, omega=0.6, Q=3)


def test_counterexample_case2():
    rep = verify_exponent_counterexample(2, chi=0.5, mu=2.0, omega=0.5, Q=3)
    assert rep.certified
    assert rep.C_star == pytest.approx(5.96790, rel=1e-4)
    assert rep.r_at_min == pytest.approx(2.497, rel=0.01)
    assert rep.tail_gap == pytest.approx(0.5)
    with pytest.raises(ValueError, match="mu"):
        verify_exponent_counterexample(2, chi=0.5, mu=1.0, omega=0.5, Q=3)


def test_counterexample_case3():
    rep = verify_exponent_counterexample(3, chi=0.5, mu=0.0, omega=0.5, Q=3)
    assert rep.certified
    assert rep.witness_kind == "exponential"
    # the margin decreases to its asymptotic limit 2(Q-1)/sqrt(sigma)
    assert rep.C_star == pytest.approx(2.0 * np.sqrt(3.0), rel=1e-3)
    assert rep.log_gamma == pytest.approx(1.0, rel=1e-3)
    assert any("superlevel" in n for n in rep.notes)
    with pytest.raises(ValueError, match="mu"):
        verify_exponent_counterexample(3, chi=0.5, mu=2.0, omega=0.5, Q=3)
    with pytest.raises(ValueError):
        verify_exponent_counterexample(4, chi=0.5, mu=0.0, omega=0.5, Q=3)


def test_exponential_beats_any_power():
    # the exponential witness eventually dominates r^N for every N
    w = exponential_witness(1.0, 3)
    for N in (5, 50, 500):
        r = 10.0 * max(N, 10)
        L, _, _ = w.log_profile(np.asarray(r * r))
        assert L > N * np.log(r)


def test_counterexample_params_rejected_by_classifier():
    # the case-1 regime sits outside the boundedness classifier's range:
    # its omega is below the p-1-chi threshold (p = 2 family)
    rep = verify_exponent_counterexample(1, chi=0.5, mu=0.0, omega=0.25,
                                         Q=3, sigma=6.0)
    assert rep.certified
    v = classify_main(ParamSet(p=2, chi=0.5, mu=0.0, omega=0.25))
    assert not v.applies


def test_margin_report_rows():
    rep = verify_radial_lower_bound(2.0, 3, np.logspace(-1, 1, 7))
    rows = list(rep.rows())
    assert len(rows) == 7
    r, lhs, rhs, m = rows[0]
    assert m == pytest.approx(lhs / rhs)


def test_ode_probe_blow_up():
    rep = ode_nonexistence_probe(0.0, slopes=(0.1, 1.0, 10.0))
    assert rep.all_blew_up
    times = [e["blow_up_time"] for e in rep.entries]
    assert times == sorted(times, reverse=True)   # larger slope, earlier
    assert times[1] == pytest.approx(1.307, rel=0.05)


def test_ode_probe_larger_mu_later_blow_up():
    t0 = ode_nonexistence_probe(0.0, slopes=(1.0,)).entries[0]["blow_up_time"]
    t9 = ode_nonexistence_probe(0.9, slopes=(1.0,)).entries[0]["blow_up_time"]
    assert t9 > t0
    with pytest.raises(ValueError):
        ode_nonexistence_probe(1.0)


def test_ode_probe_zero_slope_ignored():
    rep = ode_nonexistence_probe(0.5, slopes=(0.0, 1.0))
    assert rep.entries[0]["blew_up"] is False
    assert rep.all_blew_up
