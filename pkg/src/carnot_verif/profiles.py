"""Operator profiles phi for the horizontal phi-Laplacian.

A profile packages phi (and optionally phi'), a coercivity certificate
(p, C) asserting phi(t) <= C t^(p-1) on a sampled range, and the helper
S(t) = t^(p-1)/phi(t) whose sampled infimum is tracked as S_*.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

__all__ = [
    "PhiProfile",
    "p_laplacian",
    "mean_curvature",
    "custom_profile",
    "wpc_check",
    "best_p",
    "profile_from_descriptor",
]


@dataclass(frozen=True)
class PhiProfile:
    kind: str
    phi: Callable[[np.ndarray], np.ndarray]
    phi_prime: Optional[Callable[[np.ndarray], np.ndarray]]
    wpc_p: float
    wpc_C: float
    p_interval: Optional[tuple[float, float]] = None
    params: dict = None

    def S(self, t):
        """S(t) = t^(p-1)/phi(t), the coercivity gap."""
        t = np.asarray(t, dtype=float)
        return np.power(t, self.wpc_p - 1.0) / self.phi(t)

    def S_star(self, n_samples: int = 1000) -> float:
        """Sampled infimum of S over a log grid; always >= 1/C."""
        t = np.logspace(-6, 6, n_samples)
        return float(np.min(self.S(t)))

    def monotone_on_samples(self, n_samples: int = 1000) -> bool:
        t = np.logspace(-8, 8, n_samples)
        return bool(np.all(np.diff(self.phi(t)) >= -1e-15))


def _validate(profile: PhiProfile) -> PhiProfile:
    t = np.logspace(-6, 6, 1000)
    v = np.asarray(profile.phi(t), dtype=float)
    if not np.all(v > 0):
        raise ValueError("phi must be positive on (0, inf)")
    if profile.wpc_p > 1.0:
        at0 = float(profile.phi(np.asarray(0.0)))
        if abs(at0) > 1e-14:
            raise ValueError(f"phi(0) must be 0, got {at0}")
    bound = profile.wpc_C * np.power(t, profile.wpc_p - 1.0)
    if not np.all(v <= bound * (1.0 + 1e-12)):
        raise ValueError("phi exceeds the declared coercivity bound C t^(p-1)")
    return profile


def p_laplacian(p: float) -> PhiProfile:
    """phi(t) = t^(p-1)."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return _validate(PhiProfile(
        kind="p_laplacian",
        phi=lambda t: np.power(np.asarray(t, float), p - 1.0),
        phi_prime=lambda t: (p - 1.0) * np.power(np.asarray(t, float), p - 2.0),
        wpc_p=p,
        wpc_C=1.0,
        p_interval=(p, p),
        params={"p": p},
    ))


def mean_curvature(k: float = 2.0) -> PhiProfile:
    """phi(t) = t^(k-1) (1+t^k)^(-1/2); admissible exponents [k/2, k]."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    def phi(t):
        t = np.asarray(t, dtype=float)
        return np.power(t, k - 1.0) / np.sqrt(1.0 + np.power(t, k))

    def phi_prime(t):
        t = np.asarray(t, dtype=float)
        tk = np.power(t, k)
        return np.power(t, k - 2.0) * ((k - 1.0) * (1.0 + tk) - 0.5 * k * tk) \
            / np.power(1.0 + tk, 1.5)

    return _validate(PhiProfile(
        kind="mean_curvature",
        phi=phi,
        phi_prime=phi_prime,
        wpc_p=k,
        wpc_C=1.0,
        p_interval=(k / 2.0, k),
        params={"k": k},
    ))


def custom_profile(phi, p: float, C: float, phi_prime=None,
                   p_interval=None) -> PhiProfile:
    return _validate(PhiProfile(
        kind="custom", phi=phi, phi_prime=phi_prime,
        wpc_p=float(p), wpc_C=float(C),
        p_interval=tuple(p_interval) if p_interval else None,
        params={},
    ))


@dataclass(frozen=True)
class WpcCertificate:
    p: float
    C_est: float
    t_min: float
    t_max: float
    tail_slope: float
    extrapolated: bool = True  # bound checked on samples only


def wpc_check(profile: PhiProfile, p: float,
              t_range: Optional[np.ndarray] = None) -> WpcCertificate:
    """Certify phi(t) <= C t^(p-1) on a sampled range.

    Requires samples spanning at least six decades.  C_est is the sampled
    sup of phi/t^(p-1); the log-log slope of phi over the top decades must
    not exceed p-1, otherwise the bound cannot hold near infinity and the
    check fails.
    """
    if t_range is None:
        t_range = np.logspace(-4, 8, 2000)
    t = np.sort(np.asarray(t_range, dtype=float))
    t = t[t > 0]
    if len(t) < 10 or t[-1] / t[0] < 1e6:
        raise ValueError("t_range must cover at least 6 decades")
    v = np.asarray(profile.phi(t), dtype=float)
    ratio = v / np.power(t, p - 1.0)
    C_est = float(np.max(ratio))
    if not np.isfinite(C_est):
        raise ValueError(f"phi/t^(p-1) is unbounded on samples for p={p}")
    tail = t >= t[-1] / 100.0
    slope = float(np.polyfit(np.log(t[tail]), np.log(v[tail]), 1)[0])
    if slope > p - 1.0 + 0.01:
        raise ValueError(
            f"phi grows like t^{slope:.3f} at infinity, exceeding t^{p - 1}")
    return WpcCertificate(p=float(p), C_est=C_est,
                          t_min=float(t[0]), t_max=float(t[-1]),
                          tail_slope=slope)


def best_p(profile: PhiProfile) -> float:
    """Largest admissible coercivity exponent; the strongest choice."""
    if profile.p_interval is None:
        raise ValueError("profile declares no admissible exponent interval")
    return float(profile.p_interval[1])


def with_p(profile: PhiProfile, p: float) -> PhiProfile:
    """Re-certify the profile at a different admissible exponent."""
    lo, hi = profile.p_interval or (profile.wpc_p, profile.wpc_p)
    if not lo <= p <= hi:
        raise ValueError(f"p={p} outside admissible interval [{lo}, {hi}]")
    cert = wpc_check(profile, p)
    return replace(profile, wpc_p=float(p), wpc_C=cert.C_est)


def profile_from_descriptor(doc: dict) -> PhiProfile:
    kind = doc.get("kind")
    if kind == "p_laplacian":
        return p_laplacian(float(doc["p"]))
    if kind == "mean_curvature":
        return mean_curvature(float(doc.get("k", 2.0)))
    raise ValueError(f"unknown profile kind {kind!r}; custom profiles are "
                     "constructed programmatically")
