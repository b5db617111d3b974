import numpy as np
import pytest

from carnot_verif.dual import Jet, derivatives, variable


def fd2(h, t, s=1e-4):
    return (h(t + s) - 2 * h(t) + h(t - s)) / (s * s)


def fd1(h, t, s=1e-6):
    return (h(t + s) - h(t - s)) / (2 * s)


@pytest.mark.parametrize("h", [
    lambda t: (1.0 + t) ** 1.7,
    lambda t: t * t * t + 2.0 * t,
    lambda t: 1.0 / (1.0 + t),
    lambda t: (t + 0.5).sqrt() if isinstance(t, Jet) else np.sqrt(t + 0.5),
])
def test_matches_finite_differences(h):
    for t in (0.3, 1.0, 4.2):
        val, d1, d2 = derivatives(h, t)
        assert val == pytest.approx(h(t))
        assert d1 == pytest.approx(fd1(h, t), rel=1e-6)
        assert d2 == pytest.approx(fd2(h, t), rel=1e-4)


def test_exp_log_chain():
    h = lambda j: ((1.0 + j) ** 0.8).exp()
    t = 2.0
    val, d1, d2 = derivatives(h, t)
    f = np.exp((1 + t) ** 0.8)
    fp = f * 0.8 * (1 + t) ** -0.2
    fpp = fp * 0.8 * (1 + t) ** -0.2 + f * 0.8 * (-0.2) * (1 + t) ** -1.2
    assert val == pytest.approx(f)
    assert d1 == pytest.approx(fp)
    assert d2 == pytest.approx(fpp)

    g = lambda j: (1.0 + j * j).log()
    val, d1, d2 = derivatives(g, 1.5)
    assert val == pytest.approx(np.log(3.25))
    assert d1 == pytest.approx(3.0 / 3.25)
    assert d2 == pytest.approx((2 * 3.25 - 9.0) / 3.25 ** 2)


def test_division_and_rsub():
    h = lambda j: 3.0 / (2.0 - j)
    val, d1, d2 = derivatives(h, 0.5)
    assert val == pytest.approx(2.0)
    assert d1 == pytest.approx(3.0 / 1.5 ** 2)
    assert d2 == pytest.approx(6.0 / 1.5 ** 3)


def test_array_broadcast():
    t = np.array([0.1, 1.0, 10.0])
    val, d1, d2 = derivatives(lambda j: (1.0 + j) ** 2.0, t)
    assert np.allclose(val, (1 + t) ** 2)
    assert np.allclose(d1, 2 * (1 + t))
    assert np.allclose(d2, 2.0)


def test_constant_function():
    val, d1, d2 = derivatives(lambda j: 7.0, np.array([1.0, 2.0]))
    assert np.allclose(val, 7.0)
    assert np.allclose(d1, 0.0)
    assert np.allclose(d2, 0.0)


def test_variable_seed():
    j = variable(3.0)
    assert j.f == 3.0 and j.d1 == 1.0 and j.d2 == 0.0
