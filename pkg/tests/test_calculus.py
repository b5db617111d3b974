import numpy as np
import pytest

from carnot_verif.calculus import (gradient_norm, horizontal_gradient,
                                   make_lattice, phi_laplacian_grid,
                                   phi_laplacian_radial, sub_laplacian)
from carnot_verif.fields import (CallableField, ConstantField, GridField,
                                 RadialField)
from carnot_verif.groups import make_euclidean, make_heisenberg
from carnot_verif.profiles import mean_curvature, p_laplacian

G3 = make_euclidean(3)
H1 = make_heisenberg(1)
P2 = p_laplacian(2)


def wavy(x):
    return np.sin(2 * x[..., 0]) * np.exp(x[..., 1]) + np.sin(2 * x[..., 2])


def wavy_h1_gradient(x):
    X = 2 * np.cos(2 * x[..., 0]) * np.exp(x[..., 1]) \
        + 2 * x[..., 1] * 2 * np.cos(2 * x[..., 2])
    Y = np.sin(2 * x[..., 0]) * np.exp(x[..., 1]) \
        - 2 * x[..., 0] * 2 * np.cos(2 * x[..., 2])
    return np.stack([X, Y], -1)


def wavy_h1_sublap(x):
    # X^2 + Y^2 applied by hand to the field above
    return -3 * np.sin(2 * x[..., 0]) * np.exp(x[..., 1]) \
        - 16 * (x[..., 0] ** 2 + x[..., 1] ** 2) * np.sin(2 * x[..., 2])


def test_euclidean_gradient_of_square():
    u = RadialField(G3, lambda t: t)
    rng = np.random.default_rng(0)
    x = rng.normal(size=(30, 3))
    assert np.allclose(horizontal_gradient(G3, u, x), 2 * x, atol=1e-12)
    assert np.allclose(gradient_norm(G3, u, x),
                       2 * np.linalg.norm(x, axis=-1))


def test_heisenberg_norm_gradient_magnitudes():
    # |grad r|^2 = |z|^2/r^2 and |grad t|^2 = 4 |z|^2
    rng = np.random.default_rng(1)
    x = rng.normal(size=(200, 3))
    r_field = RadialField(H1, lambda t: t, argument="r")
    grad_r = horizontal_gradient(H1, r_field, x)
    z2 = np.sum(x[:, :2] ** 2, axis=1)
    r = H1.hom_norm(x)
    assert np.max(np.abs(np.sum(grad_r ** 2, 1) - z2 / r ** 2)) < 1e-10

    t_field = CallableField(lambda y: y[..., 2])
    grad_t = horizontal_gradient(H1, t_field, x, step=1e-5)
    assert np.allclose(np.sum(grad_t ** 2, 1), 4 * z2, rtol=1e-7, atol=1e-9)


def test_fd_gradient_order_two():
    rng = np.random.default_rng(2)
    cases = [
        (G3, CallableField(wavy),
         lambda x: np.stack([2 * np.cos(2 * x[..., 0]) * np.exp(x[..., 1]),
                             np.sin(2 * x[..., 0]) * np.exp(x[..., 1]),
                             2 * np.cos(2 * x[..., 2])], -1)),
        (H1, CallableField(wavy), wavy_h1_gradient),
    ]
    for g, u, exact in cases:
        pts = rng.normal(size=(20, 3))
        e1 = np.abs(horizontal_gradient(g, u, pts, step=0.02) - exact(pts))
        e2 = np.abs(horizontal_gradient(g, u, pts, step=0.01) - exact(pts))
        ratio = np.max(e1) / np.max(e2)
        assert 3.2 < ratio < 4.8


def test_sub_laplacian_exact_euclidean_radial():
    u = RadialField(G3, lambda t: t)
    x = np.array([[1.0, 0.5, -0.2]])
    assert sub_laplacian(G3, u, x)[0] == pytest.approx(6.0)
    u2 = RadialField(G3, lambda t: t * t)  # |x|^4: Delta = 4r^2*2 + 2*3*2r^2
    r2 = np.sum(x ** 2)
    assert sub_laplacian(G3, u2, x)[0] == pytest.approx(20.0 * r2)


def test_sub_laplacian_heisenberg_closed_forms():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(10, 3))
    z_sq = CallableField(lambda y: y[..., 0] ** 2 + y[..., 1] ** 2)
    assert np.allclose(sub_laplacian(H1, z_sq, x, step=1e-3), 4.0, atol=1e-8)
    t_field = CallableField(lambda y: y[..., 2])
    assert np.allclose(sub_laplacian(H1, t_field, x, step=1e-3), 0.0,
                       atol=1e-8)
    wv = CallableField(wavy)
    got = sub_laplacian(H1, wv, x, step=1e-3)
    assert np.allclose(got, wavy_h1_sublap(x), rtol=1e-4, atol=1e-5)


def test_phi_laplacian_radial_examples():
    mc = mean_curvature(2)
    u_lin = RadialField(G3, lambda t: 1.0 + t)
    for r in (0.3, 1.0, 5.0):
        expect = (4 + 2 / (1 + 4 * r ** 2)) / np.sqrt(1 + 4 * r ** 2)
        assert phi_laplacian_radial(G3, mc, u_lin, r) == pytest.approx(expect)
    u_sq = RadialField(G3, lambda t: t)
    assert phi_laplacian_radial(G3, P2, u_sq, 1.7) == pytest.approx(6.0)
    assert phi_laplacian_radial(G3, P2, u_sq, 0.0) == pytest.approx(6.0)
    u_const = RadialField(G3, lambda t: t * 0.0 + 1.0)
    assert phi_laplacian_radial(G3, mc, u_const, 2.0) == pytest.approx(0.0)


def test_phi_laplacian_radial_guards():
    with pytest.raises(ValueError):
        phi_laplacian_radial(H1, P2, RadialField(H1, lambda t: t), 1.0)


def test_phi_laplacian_grid_basics():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(5, 3))
    const = ConstantField(2.0)
    assert np.allclose(phi_laplacian_grid(G3, P2, const, x, step=0.01), 0.0)

    u_sq = CallableField(lambda y: np.sum(y ** 2, axis=-1))
    got = phi_laplacian_grid(G3, P2, u_sq, x, step=0.01)
    assert np.allclose(got, 6.0, atol=1e-6)

    z_sq = CallableField(lambda y: y[..., 0] ** 2 + y[..., 1] ** 2)
    got = phi_laplacian_grid(H1, P2, z_sq, x, step=0.01)
    assert np.allclose(got, 4.0, atol=1e-6)


def test_phi_laplacian_grid_order_two():
    rng = np.random.default_rng(5)
    u = CallableField(wavy)
    for g, ref in ((G3, None), (H1, wavy_h1_sublap)):
        pts = rng.normal(size=(20, 3))
        if ref is None:
            exact = (-4 * np.sin(2 * pts[..., 0]) + np.sin(2 * pts[..., 0])) \
                * np.exp(pts[..., 1]) - 4 * np.sin(2 * pts[..., 2])
        else:
            exact = ref(pts)
        e1 = np.abs(phi_laplacian_grid(g, P2, u, pts, step=0.02) - exact)
        e2 = np.abs(phi_laplacian_grid(g, P2, u, pts, step=0.01) - exact)
        ratio = np.max(e1) / np.max(e2)
        assert 3.2 < ratio < 4.8


def test_grid_field_evaluation_path():
    # interpolated fields agree with closed forms at loose tolerance
    lat = make_lattice(G3, np.zeros(3), 1.5, 61, anisotropic=False)
    u = GridField.sample(CallableField(lambda y: np.sum(y ** 2, -1)), lat)
    pts = np.random.default_rng(6).uniform(-0.5, 0.5, size=(5, 3))
    got = phi_laplacian_grid(G3, P2, u, pts, step=0.1)
    assert np.allclose(got, 6.0, atol=0.05)


def test_degenerate_gradient_flux_is_zero():
    # p < 2 has a singular weight at 0; the clamp keeps the flux finite
    p15 = p_laplacian(1.5)
    u = CallableField(lambda y: np.sum(y ** 2, -1))
    got = phi_laplacian_grid(G3, p15, u, np.zeros((1, 3)), step=0.01)
    assert np.all(np.isfinite(got))


def test_infinity_harmonic_residual_reported():
    # <grad |grad r|^2, grad r> for the quartic norm; residual printed only
    r_field = RadialField(H1, lambda t: t, argument="r")
    sq = CallableField(lambda y: np.sum(
        horizontal_gradient(H1, r_field, y) ** 2, -1))
    rng = np.random.default_rng(7)
    x = rng.normal(size=(20, 3))
    grad_sq = horizontal_gradient(H1, sq, x, step=1e-4)
    grad_r = horizontal_gradient(H1, r_field, x)
    residual = np.max(np.abs(np.sum(grad_sq * grad_r, -1)))
    print(f"infinity-harmonic residual: {residual:.3e}")
    assert np.isfinite(residual)
