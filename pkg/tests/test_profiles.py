import numpy as np
import pytest

from carnot_verif.profiles import (best_p, custom_profile, mean_curvature,
                                   p_laplacian, profile_from_descriptor,
                                   with_p, wpc_check)


def test_p_laplacian_values():
    pr = p_laplacian(2)
    assert pr.phi(np.asarray(3.0)) == pytest.approx(3.0)
    pr3 = p_laplacian(3)
    assert pr3.phi(np.asarray(2.0)) == pytest.approx(4.0)
    assert pr3.phi_prime(np.asarray(2.0)) == pytest.approx(4.0)
    assert np.allclose(pr.S(np.logspace(-3, 3, 50)), 1.0)
    with pytest.raises(ValueError):
        p_laplacian(0.5)


def test_mean_curvature_values():
    mc = mean_curvature(2)
    assert mc.phi(np.asarray(1.0)) == pytest.approx(1.0 / np.sqrt(2.0))
    assert mc.p_interval == (1.0, 2.0)
    assert mean_curvature(3).p_interval == (1.5, 3.0)
    with pytest.raises(ValueError):
        mean_curvature(0.9)


def test_mean_curvature_derivative():
    mc = mean_curvature(2)
    t = np.linspace(0.1, 5, 40)
    s = 1e-6
    fd = (mc.phi(t + s) - mc.phi(t - s)) / (2 * s)
    assert np.allclose(mc.phi_prime(t), fd, rtol=1e-6, atol=1e-8)


def test_positivity_and_zero():
    for pr in (p_laplacian(1.5), p_laplacian(2), mean_curvature(2),
               mean_curvature(3)):
        t = np.logspace(-3, 3, 1000)
        assert np.all(pr.phi(t) > 0)
        if pr.wpc_p > 1:
            assert float(pr.phi(np.asarray(0.0))) == 0.0


def test_coercivity_gap_bound():
    for pr in (p_laplacian(1.5), p_laplacian(3), mean_curvature(2)):
        assert pr.S_star() >= 1.0 / pr.wpc_C - 1e-12


def test_mean_curvature_bounded():
    mc = mean_curvature(2)
    t = np.logspace(-4, 8, 2000)
    assert float(np.max(mc.phi(t))) <= 1.0


def test_wpc_check():
    cert = wpc_check(p_laplacian(2), 2.0)
    assert cert.C_est == pytest.approx(1.0)
    cert = wpc_check(mean_curvature(2), 2.0)
    assert cert.C_est == pytest.approx(1.0, rel=1e-6)
    # half exponent also admissible for the curvature profile
    cert = wpc_check(mean_curvature(2), 1.0)
    assert cert.C_est == pytest.approx(1.0, rel=1e-3)
    with pytest.raises(ValueError):
        wpc_check(p_laplacian(3), 2.0)
    with pytest.raises(ValueError, match="decades"):
        wpc_check(p_laplacian(2), 2.0, t_range=np.linspace(1, 10, 100))


def test_best_p():
    assert best_p(mean_curvature(2)) == 2.0
    assert best_p(mean_curvature(3)) == 3.0
    assert best_p(p_laplacian(2.5)) == 2.5


def test_with_p_recertifies():
    mc = mean_curvature(2)
    low = with_p(mc, 1.2)
    assert low.wpc_p == 1.2
    t = np.logspace(-4, 8, 500)
    assert np.all(low.phi(t) <= low.wpc_C * t ** 0.2 * (1 + 1e-9))
    with pytest.raises(ValueError):
        with_p(mc, 2.5)


def test_custom_profile_validation():
    pr = custom_profile(lambda t: np.tanh(np.asarray(t, float)), p=2, C=1)
    assert pr.kind == "custom"
    with pytest.raises(ValueError):
        custom_profile(lambda t: np.asarray(t, float) - 1.0, p=2, C=1)


def test_descriptor():
    assert profile_from_descriptor({"kind": "p_laplacian", "p": 2}).wpc_p == 2
    assert profile_from_descriptor({"kind": "mean_curvature", "k": 3}).p_interval \
        == (1.5, 3.0)
    with pytest.raises(ValueError):
        profile_from_descriptor({"kind": "mystery"})
