"""Weak-formulation residuals and the pasting construction.

A field u is accepted as a weak supersolution of div0(phi(|grad u|)
/|grad u| grad u) >= B(x, u, grad u) when, for every nonnegative
compactly supported Lipschitz test function psi,

    R(psi) = int { phi(|g|)/|g| <g, grad psi> + B psi }  <=  0,

with g the horizontal gradient of u.  Residuals are computed by midpoint
quadrature over a uniform lattice; the tolerance is calibrated from
smooth cases where the exact residual vanishes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .calculus import EPS_GRAD, horizontal_gradient
from .fields import LatticeSpec, MaxField, PastedField
from .groups import CarnotGroup
from .profiles import PhiProfile

__all__ = [
    "BumpTestFunction",
    "WeakFormReport",
    "weak_residual",
    "paste",
    "max_solution_check",
    "paste_verify",
    "calibrate_tolerance",
]


class BumpTestFunction:
    """psi(x) = max(0, 1 - (d/rho)^2)^3 with d the distance to the center.

    The cube of the parabola is C^2 across the support boundary and has a
    closed-form horizontal gradient through the group's norm derivative.
    """

    def __init__(self, group: CarnotGroup, center, rho: float):
        if rho <= 0:
            raise ValueError("rho must be > 0")
        self.group = group
        self.center = np.asarray(center, dtype=float)
        self.rho = float(rho)

    def _local(self, x):
        return self.group.group_law(self.group.inverse_law(self.center),
                                    np.asarray(x, dtype=float))

    def __call__(self, x):
        y = self._local(x)
        w = (self.group.hom_norm(y) / self.rho) ** 2
        return np.where(w < 1.0, (1.0 - np.minimum(w, 1.0)) ** 3, 0.0)

    def gradient(self, x):
        """Frame components of grad psi, shape (..., m1)."""
        y = self._local(x)
        w = (self.group.hom_norm(y) / self.rho) ** 2
        nsf = self.group.norm_sq_frame or self.group.norm_sq_frame_fd
        dsq = nsf(y) / (self.rho * self.rho)       # X_j of (d/rho)^2
        coef = np.where(w < 1.0, -3.0 * (1.0 - np.minimum(w, 1.0)) ** 2, 0.0)
        return coef[..., None] * dsq

    def bbox(self):
        return self.group.ball_bbox(self.center, self.rho)


def _cell_centers(lattice: LatticeSpec, lo, hi):
    """Centers of the lattice cells meeting the box [lo, hi]."""
    origin = np.asarray(lattice.origin)
    spacing = np.asarray(lattice.spacing)
    n_cells = np.asarray(lattice.dims) - 1
    i0 = np.maximum(np.floor((np.asarray(lo) - origin) / spacing), 0).astype(int)
    i1 = np.minimum(np.ceil((np.asarray(hi) - origin) / spacing),
                    n_cells).astype(int)
    axes = [origin[k] + spacing[k] * (np.arange(i0[k], i1[k]) + 0.5)
            for k in range(len(origin))]
    if any(len(a) == 0 for a in axes):
        return np.zeros((0, len(origin)))
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(origin))


def weak_residual(g: CarnotGroup, u, profile: PhiProfile, B: Callable,
                  psi: BumpTestFunction, lattice: LatticeSpec,
                  grad_step: Optional[float] = None) -> float:
    """Midpoint-quadrature value of R(psi) over the support of psi.

    ``B`` takes (points, u values, frame gradient) and returns the forcing
    values; it must be finite on the support.
    """
    lo, hi = psi.bbox()
    if not (np.all(np.asarray(lo) >= np.asarray(lattice.origin))
            and np.all(np.asarray(hi) <= np.asarray(lattice.upper))):
        raise ValueError("test-function support escapes the lattice")
    if grad_step is None:
        grad_step = 0.5 * min(lattice.spacing)
    pts = _cell_centers(lattice, lo, hi)
    psiv = psi(pts)
    keep = psiv > 0
    if not np.any(keep):
        return 0.0
    pts, psiv = pts[keep], psiv[keep]
    grad_u = horizontal_gradient(g, u, pts, step=grad_step)
    grad_psi = psi.gradient(pts)
    norm = np.linalg.norm(grad_u, axis=-1)
    weight = profile.phi(np.maximum(norm, EPS_GRAD)) / np.maximum(norm, EPS_GRAD)
    weight = np.where(norm > 0, weight, 0.0)
    uv = np.asarray(u(pts), dtype=float)
    Bv = np.asarray(B(pts, uv, grad_u), dtype=float)
    if not np.all(np.isfinite(Bv)):
        raise ValueError("B produced non-finite values on the support")
    integrand = weight * np.sum(grad_u * grad_psi, axis=-1) + Bv * psiv
    return float(np.sum(integrand) * np.prod(lattice.spacing))


@dataclass
class WeakFormReport:
    residuals: list
    tol: float
    centers: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals)

    @property
    def worst(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def to_json(self) -> str:
        return json.dumps({"passed": self.passed, "tol": self.tol,
                           "worst": self.worst, "residuals": self.residuals,
                           "centers": self.centers, "notes": self.notes})


def paste(u1, u2, omega: Callable,
          interface_samples=None) -> PastedField:
    """Glue two fields: max(u1, u2) on the region, u2 outside.

    Requires u2 >= u1 on the supplied interface samples, matching the
    hypothesis under which the glued field stays a supersolution.
    """
    return PastedField(u1, u2, omega, interface_samples=interface_samples)


def calibrate_tolerance(g: CarnotGroup, profile: PhiProfile,
                        lattice: LatticeSpec, cases, bumps,
                        factor: float = 5.0) -> float:
    """Residual tolerance from smooth exact-equality cases.

    ``cases`` is a list of (u, B) pairs whose true residual is zero; the
    tolerance is ``factor`` times the largest observed magnitude, i.e. a
    few quadrature errors at the working resolution.
    """
    worst = 0.0
    for u, B in cases:
        for psi in bumps:
            worst = max(worst, abs(weak_residual(g, u, profile, B, psi,
                                                 lattice)))
    return factor * worst


def max_solution_check(g: CarnotGroup, u1, u2, profile: PhiProfile,
                       B: Callable, bumps, lattice: LatticeSpec,
                       tol: float) -> WeakFormReport:
    """Verify max(u1, u2) stays a supersolution on the given bumps."""
    notes = []
    for name, u in (("first", u1), ("second", u2)):
        worst = max(weak_residual(g, u, profile, B, psi, lattice)
                    for psi in bumps)
        if worst > tol:
            raise ValueError(
                f"{name} input is not a supersolution on these bumps "
                f"(residual {worst:.3e} > tol {tol:.3e})")
    if not profile.monotone_on_samples():
        notes.append("phi not verifiably non-decreasing; the max need not "
                     "remain a supersolution")
    v = MaxField(u1, u2)
    res = [weak_residual(g, v, profile, B, psi, lattice) for psi in bumps]
    return WeakFormReport(residuals=res, tol=tol,
                          centers=[psi.center.tolist() for psi in bumps],
                          notes=notes)


def paste_verify(g: CarnotGroup, u1, u2, omega: Callable,
                 profile: PhiProfile, B: Callable, lattice: LatticeSpec,
                 n_bumps: int = 50, n_straddle: int = 10,
                 rho: float = 0.3, tol: float = 1e-4,
                 interface_points=None, seed: int = 0) -> WeakFormReport:
    """Residuals of the glued field against random bumps.

    ``interface_points`` (optional) supplies locations on the gluing
    interface; ``n_straddle`` of the bumps are centered there so the kink
    is exercised directly.
    """
    rng = np.random.default_rng(seed)
    v = paste(u1, u2, omega)
    origin = np.asarray(lattice.origin)
    upper = np.asarray(lattice.upper)
    margin = 1.2 * rho
    lo = origin + margin
    hi = upper - margin
    if np.any(lo >= hi):
        raise ValueError("lattice too small for the requested bump radius")

    centers = []
    if interface_points is not None and n_straddle > 0:
        pts = np.asarray(interface_points, dtype=float)
        pick = rng.choice(len(pts), size=min(n_straddle, len(pts)),
                          replace=False)
        centers.extend(np.clip(pts[pick], lo, hi))
    while len(centers) < n_bumps:
        centers.append(rng.uniform(lo, hi))

    bumps = [BumpTestFunction(g, c, rho) for c in centers]
    res = [weak_residual(g, v, profile, B, psi, lattice) for psi in bumps]
    return WeakFormReport(residuals=res, tol=tol,
                          centers=[np.asarray(c).tolist() for c in centers])


@dataclass
class GlueDemo:
    """Glued supersolution scenario: a constant pasted under a power witness."""
    group: CarnotGroup
    profile: PhiProfile
    u_const: object
    u_witness: object
    omega: Callable
    B: Callable
    lattice: LatticeSpec
    interface_points: np.ndarray
    gamma: float
    C_use: float
    calibration_cases: list


def build_glue_demo(Q: int = 3, chi: float = 0.5, mu: float = 0.0,
                    omega_exp: float = 0.25, sigma: float = 6.0,
                    gamma: float = 1.0, n: int = 128, half: float = 2.0,
                    safety: float = 0.5, n_interface: int = 64,
                    seed: int = 0) -> GlueDemo:
    """Assemble the canonical pasting scenario on a cube lattice.

    The witness u = (1+r^2)^(sigma/2) satisfies the curvature inequality
    with forcing C (1+r)^(-mu) f(u) l(|grad u|), where f ramps up from the
    pasting level 2*gamma (so the constant 2*gamma is also a supersolution)
    and l(t) = t^chi/(1+t).  ``safety`` scales the certified constant down
    so quadrature noise cannot flip the sign.
    """
    from .fields import ConstantField, RadialField
    from .groups import make_euclidean
    from .profiles import mean_curvature
    from .witnesses import verify_exponent_counterexample

    g = make_euclidean(Q)
    profile = mean_curvature(2.0)
    u2 = RadialField(g, lambda t: (1.0 + t) ** (sigma / 2.0))
    u1 = ConstantField(2.0 * gamma)

    cert = verify_exponent_counterexample(1, chi, mu, omega_exp, Q,
                                          sigma=sigma)
    if not cert.certified:
        raise AssertionError("witness certification failed; cannot build glue")
    C_use = safety * cert.C_star

    def f_ramp(t):
        ramp = np.clip((t - 2.0 * gamma) / gamma, 0.0, 1.0)
        return ramp * np.power(np.maximum(t, 0.0), omega_exp)

    def B(x, uv, grad):
        r = np.linalg.norm(x, axis=-1)
        gn = np.linalg.norm(grad, axis=-1)
        l = np.power(gn, chi) / (1.0 + gn)
        return C_use * np.power(1.0 + r, -mu) * f_ramp(uv) * l

    spacing = 2.0 * half / (n - 1)
    lattice = LatticeSpec(origin=(-half,) * Q, spacing=(spacing,) * Q,
                          dims=(n,) * Q)

    # interface sphere {u2 = 2 gamma}
    r_star = np.sqrt((2.0 * gamma) ** (2.0 / sigma) - 1.0)
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_interface, Q))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    interface = r_star * dirs

    # smooth calibration case: u = r^2 solves the equality for its own forcing
    us = RadialField(g, lambda t: t)

    def B_smooth(x, uv, grad):
        r = np.maximum(np.linalg.norm(x, axis=-1), 1e-12)
        return ((2.0 * (Q - 1) + 2.0 / (1.0 + 4.0 * r * r))
                / np.sqrt(1.0 + 4.0 * r * r))

    return GlueDemo(group=g, profile=profile, u_const=u1, u_witness=u2,
                    omega=lambda x: np.ones(np.asarray(x).shape[:-1], bool),
                    B=B, lattice=lattice, interface_points=interface,
                    gamma=gamma, C_use=C_use,
                    calibration_cases=[(us, B_smooth)])
