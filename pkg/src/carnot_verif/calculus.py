"""Horizontal differential operators.

Gradients and Laplacians along the left-invariant frame.  Closed-form
radial fields use exact chain-rule values; any other field falls back to
central differences along the horizontal flows, realized as right
translations by scaled first-layer basis points.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .fields import ConstantField, GridField, LatticeSpec, RadialField
from .groups import CarnotGroup
from .profiles import PhiProfile

__all__ = [
    "horizontal_gradient",
    "gradient_norm",
    "sub_laplacian",
    "phi_laplacian_radial",
    "phi_laplacian_grid",
    "make_lattice",
]

EPS_GRAD = 1e-12


def _flow_points(g: CarnotGroup, x: np.ndarray, j: int, s: float) -> np.ndarray:
    e = np.zeros(g.topological_dim)
    e[j] = s
    return g.group_law(x, e)


def horizontal_gradient(g: CarnotGroup, u, x, step: float = 1e-4) -> np.ndarray:
    """Frame components (X_1 u, ..., X_m1 u) at x, shape (..., m1)."""
    x = np.asarray(x, dtype=float)
    m1 = g.horizontal_dim
    if isinstance(u, ConstantField):
        return np.zeros(x.shape[:-1] + (m1,))
    if isinstance(u, RadialField) or hasattr(u, "gradient"):
        try:
            return np.asarray(u.gradient(x), dtype=float)
        except ValueError:
            pass
    out = np.empty(x.shape[:-1] + (m1,))
    for j in range(m1):
        fwd = u(_flow_points(g, x, j, step))
        bwd = u(_flow_points(g, x, j, -step))
        out[..., j] = (np.asarray(fwd) - np.asarray(bwd)) / (2.0 * step)
    return out


def gradient_norm(g: CarnotGroup, u, x, step: float = 1e-4) -> np.ndarray:
    return np.linalg.norm(horizontal_gradient(g, u, x, step), axis=-1)


def sub_laplacian(g: CarnotGroup, u, x, step: float = 1e-3) -> np.ndarray:
    """Sum of second flow differences, exact for Euclidean radial fields."""
    x = np.asarray(x, dtype=float)
    if g.kind == "euclidean" and isinstance(u, RadialField) \
            and u.argument == "r_squared":
        # Delta h(r^2) = 4 r^2 h'' + 2 Q h'
        r2 = g.hom_norm(x) ** 2
        _, d1, d2 = u.h_derivs(r2)
        return 4.0 * r2 * d2 + 2.0 * g.homogeneous_dim * d1
    center = 2.0 * np.asarray(u(x), dtype=float)
    acc = np.zeros_like(center)
    for j in range(g.horizontal_dim):
        fwd = np.asarray(u(_flow_points(g, x, j, step)), dtype=float)
        bwd = np.asarray(u(_flow_points(g, x, j, -step)), dtype=float)
        acc += fwd + bwd - center
    return acc / (step * step)


def phi_laplacian_radial(g: CarnotGroup, profile: PhiProfile,
                         u: RadialField, r) -> np.ndarray:
    """Exact radial value of div(phi(|grad u|)/|grad u| grad u) on R^Q.

    For u = h(r^2) the radial derivative is G(r) = 2 r h'(r^2) and

        value = phi'(G) G' + (Q - 1) phi(G) / r.
    """
    if g.kind != "euclidean":
        raise ValueError("closed-form radial evaluation needs a Euclidean group")
    if u.argument != "r_squared":
        raise ValueError("radial field must take r^2 as argument")
    r = np.asarray(r, dtype=float)
    Q = g.homogeneous_dim
    _, d1, d2 = u.h_derivs(r * r)
    G = 2.0 * r * d1
    Gp = 2.0 * d1 + 4.0 * r * r * d2
    scalar = (r.ndim == 0)
    r, G, Gp = np.atleast_1d(r, G, Gp)
    out = np.empty_like(G)
    reg = (r > 0) & (np.abs(G) > 0)
    if profile.phi_prime is None:
        raise ValueError("profile lacks phi'; radial evaluation needs it")
    out[reg] = (profile.phi_prime(np.abs(G[reg])) * Gp[reg]
                + (Q - 1.0) * profile.phi(np.abs(G[reg])) / r[reg]
                * np.sign(G[reg]))
    if np.any(~reg):
        # limit r -> 0: phi(G)/r -> phi'(0+) G'(0), giving Q phi'(0+) G'
        fp0 = float(profile.phi_prime(1e-9))
        if np.isfinite(fp0):
            out[~reg] = Q * fp0 * Gp[~reg]
        elif float(profile.phi(np.asarray(1e-12))) < 1e-10:
            out[~reg] = 0.0
        else:
            raise ValueError("degenerate gradient with singular phi'")
    return out[0] if scalar else out


def _flux(g: CarnotGroup, profile: PhiProfile, u, x, step: float,
          eps_grad: float) -> np.ndarray:
    grad = np.empty(np.asarray(x).shape[:-1] + (g.horizontal_dim,))
    for j in range(g.horizontal_dim):
        fwd = u(_flow_points(g, x, j, step))
        bwd = u(_flow_points(g, x, j, -step))
        grad[..., j] = (np.asarray(fwd) - np.asarray(bwd)) / (2.0 * step)
    norm = np.linalg.norm(grad, axis=-1)
    clamped = np.maximum(norm, eps_grad)
    weight = np.where(norm > 0, profile.phi(clamped) / clamped, 0.0)
    return weight[..., None] * grad


def phi_laplacian_grid(g: CarnotGroup, profile: PhiProfile, u, x,
                       step: float = 1e-3,
                       eps_grad: float = EPS_GRAD) -> np.ndarray:
    """Flow-difference divergence of the flux phi(|grad u|)/|grad u| grad u."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros(x.shape[:-1])
    for j in range(g.horizontal_dim):
        fwd = _flux(g, profile, u, _flow_points(g, x, j, step), step, eps_grad)
        bwd = _flux(g, profile, u, _flow_points(g, x, j, -step), step, eps_grad)
        acc += (fwd[..., j] - bwd[..., j]) / (2.0 * step)
    return acc


def make_lattice(g: CarnotGroup, center, half_extent: float, n: int,
                 anisotropic: bool = True) -> LatticeSpec:
    """Uniform lattice around center; layer-j extent scales like extent^j."""
    center = np.asarray(center, dtype=float)
    weights = g.layer_weights
    half = np.power(half_extent, weights) if anisotropic \
        else np.full(g.topological_dim, half_extent)
    origin = center - half
    spacing = 2.0 * half / (n - 1)
    return LatticeSpec(origin=tuple(origin), spacing=tuple(spacing),
                       dims=(n,) * g.topological_dim)
