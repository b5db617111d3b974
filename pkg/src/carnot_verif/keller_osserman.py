"""Integrability test for blow-up of coercive inequalities.

Builds F(t) = int_0^t f, K(t) = int_0^t phi/l (or s phi'/l), inverts K,
and classifies whether 1/(K^-1 o F) is integrable at infinity by a
combination of quadrature and log-log tail-slope fitting.  The verdict is
deliberately tri-state: slopes inside a small band around the critical
exponent -1 are reported as inconclusive rather than forced.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .profiles import PhiProfile

__all__ = [
    "NonlinearityTriple",
    "power_triple",
    "mean_curvature_family",
    "CumulativeIntegral",
    "big_F",
    "big_K",
    "K_inverse",
    "KInverter",
    "KOReport",
    "ko_test",
]


@dataclass(frozen=True)
class NonlinearityTriple:
    """Coefficient b, forcing f, gradient factor l with exponent certificates.

    The certificates record the power-law envelopes: b >= C_b (1+r)^(-mu),
    f(t) >= C_f t^omega for large t, l(t) >= C_l phi(t)/t^(p-1-chi).
    """

    b: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray], np.ndarray]
    l: Callable[[np.ndarray], np.ndarray]
    mu: float
    omega: float
    chi: float
    C_b: float = 1.0
    C_f: float = 1.0
    C_l: float = 1.0
    l_positive_at_zero: bool = False
    symmetric_f: bool = False
    params: dict = field(default_factory=dict)

    def check_certificates(self, profile: Optional[PhiProfile] = None,
                           n: int = 200) -> list[str]:
        """Sampled inequality checks; returns the list of violations."""
        bad = []
        r = np.logspace(-2, 6, n)
        if not np.all(np.asarray(self.b(r)) > 0):
            bad.append("b not positive on samples")
        elif np.any(np.asarray(self.b(r))
                    < self.C_b * np.power(1.0 + r, -self.mu) * (1 - 1e-9)):
            bad.append("b below its declared envelope")
        t = np.logspace(-3, 8, n)
        if not np.all(np.asarray(self.l(t)) > 0):
            bad.append("l not positive on samples")
        big = t[t >= 1.0]
        if np.any(np.asarray(self.f(big))
                  < self.C_f * np.power(big, self.omega) * (1 - 1e-9)):
            bad.append("f below its declared envelope at large t")
        if profile is not None:
            p = profile.wpc_p
            env = self.C_l * np.asarray(profile.phi(t)) \
                / np.power(t, p - 1.0 - self.chi)
            if np.any(np.asarray(self.l(t)) < env * (1 - 1e-9)):
                bad.append("l below its declared envelope")
        return bad


def power_triple(mu: float, omega: float, chi: float) -> NonlinearityTriple:
    """Pure powers: b = (1+r)^(-mu), f = t^omega, l = t^chi."""
    return NonlinearityTriple(
        b=lambda r: np.power(1.0 + np.asarray(r, float), -mu),
        f=lambda t: np.power(np.asarray(t, float), omega),
        l=lambda t: np.power(np.asarray(t, float), chi),
        mu=mu, omega=omega, chi=chi,
        l_positive_at_zero=(chi == 0.0),
        params={"family": "power"},
    )


def mean_curvature_family(chi: float, omega: float,
                          mu: float = 0.0) -> NonlinearityTriple:
    """l(t) = t^chi/(1+t), f = t^omega, b = (1+r)^(-mu)."""
    return NonlinearityTriple(
        b=lambda r: np.power(1.0 + np.asarray(r, float), -mu),
        f=lambda t: np.power(np.asarray(t, float), omega),
        l=lambda t: np.power(np.asarray(t, float), chi)
        / (1.0 + np.asarray(t, float)),
        mu=mu, omega=omega, chi=chi,
        # sup over t of phi(t) t^(chi-1) / l(t) is sqrt(2) for the k=2
        # bounded profile, attained at t = 1
        C_l=2.0 ** -0.5,
        params={"family": "mean_curvature", "chi": chi},
    )


class CumulativeIntegral:
    """int_0^t integrand, with knot caching and a power-law head.

    Below ``t0`` the integrand is modelled as c t^a with (c, a) fitted on
    [t0/100, t0]; an exponent a <= -1 means the integral diverges at 0 and
    construction fails.  Values above t0 accumulate quadrature increments
    between cached knots, so ascending sweeps cost one short quad each.
    """

    def __init__(self, integrand: Callable[[float], float], t0: float = 1e-6,
                 name: str = "integrand"):
        self.integrand = integrand
        self.t0 = t0
        ts = np.logspace(np.log10(t0) - 2, np.log10(t0), 9)
        vals = np.array([float(integrand(t)) for t in ts])
        if np.all(vals == 0.0):
            self.head_a, self.head_c = 0.0, 0.0
        else:
            if np.any(vals <= 0):
                raise ValueError(f"{name} must be positive near 0")
            self.head_a, logc = np.polyfit(np.log(ts), np.log(vals), 1)
            self.head_c = float(np.exp(logc))
            if self.head_a <= -1.0:
                raise ValueError(
                    f"{name} behaves like t^{self.head_a:.3f} near 0, "
                    "not integrable at 0+")
        head_val = self.head_c * t0 ** (self.head_a + 1.0) / (self.head_a + 1.0) \
            if self.head_c else 0.0
        self._knots_t = [t0]
        self._knots_v = [head_val]

    def _head(self, t: float) -> float:
        if not self.head_c:
            return 0.0
        return self.head_c * t ** (self.head_a + 1.0) / (self.head_a + 1.0)

    def __call__(self, t: float) -> float:
        t = float(t)
        if t < 0:
            raise ValueError("cumulative integral needs t >= 0")
        if t <= self.t0:
            return self._head(t)
        i = bisect.bisect_right(self._knots_t, t) - 1
        base_t, base_v = self._knots_t[i], self._knots_v[i]
        if base_t == t:
            return base_v
        inc, _ = quad(self.integrand, base_t, t, epsabs=1e-10, epsrel=1e-8,
                      limit=200)
        val = base_v + inc
        pos = i + 1
        self._knots_t.insert(pos, t)
        self._knots_v.insert(pos, val)
        return val


def big_F(f: Callable, t) -> float:
    """F(t) = int_0^t f(s) ds by adaptive quadrature."""
    t = float(t)
    if t < 0:
        raise ValueError("t must be >= 0")
    val, err = quad(f, 0.0, t, epsabs=1e-10, epsrel=1e-8, limit=200,
                    points=None)
    if not np.isfinite(val):
        raise ValueError("quadrature of f did not converge")
    return val


def _k_integrand(profile: PhiProfile, l: Callable, variant: str) -> Callable:
    if variant == "derivative":
        if profile.phi_prime is None:
            raise ValueError("'derivative' variant needs phi'")
        return lambda s: s * float(profile.phi_prime(s)) / float(l(s))
    if variant == "modified":
        return lambda s: float(profile.phi(np.asarray(s))) / float(l(s))
    raise ValueError(f"unknown K variant {variant!r}")


def big_K(profile: PhiProfile, l: Callable, t, variant: str = "modified",
          _cache: Optional[CumulativeIntegral] = None) -> float:
    acc = _cache or CumulativeIntegral(_k_integrand(profile, l, variant),
                                       name="K integrand")
    return acc(float(t))


class KInverter:
    """Invert the increasing map K with bracket reuse between calls."""

    OVERFLOW_CAP = 1e30

    def __init__(self, profile: PhiProfile, l: Callable,
                 variant: str = "modified"):
        self.K = CumulativeIntegral(_k_integrand(profile, l, variant),
                                    name="K integrand")
        self._last_t = 1.0

    def __call__(self, s: float) -> float:
        s = float(s)
        if s < 0:
            raise ValueError("K_inverse needs s >= 0")
        if s == 0.0:
            return 0.0
        lo = self._last_t
        while self.K(lo) > s:
            lo /= 4.0
            if lo < 1e-300:
                return 0.0
        hi = lo
        while self.K(hi) < s:
            hi *= 4.0
            if hi > self.OVERFLOW_CAP:
                raise ValueError(
                    "K appears bounded above; it does not reach the requested "
                    "value, so K is not onto (0, inf)")
        t = brentq(lambda u: self.K(u) - s, lo, hi, rtol=1e-13, maxiter=200)
        self._last_t = t
        return t


def K_inverse(profile: PhiProfile, l: Callable, s, variant: str = "modified",
              _inv: Optional[KInverter] = None) -> float:
    inv = _inv or KInverter(profile, l, variant)
    return inv(float(s))


@dataclass
class KOReport:
    variant: str
    holds: Optional[bool]          # None when inconclusive
    verdict: str                   # "holds" | "fails" | "inconclusive"
    tail_slope: float              # fitted log-log slope of 1/(K^-1 o F)
    slope_margin: float            # distance of the slope from -1
    delta_band: float
    K_tail_exponent: float
    F_tail_exponent: float
    integral_head: float           # quadrature of 1/(K^-1 o F) on [T0, T1]
    small_integrable: bool         # K integrand in L1(0+)
    large_nonintegrable: bool      # K integrand not in L1(+inf)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, default=float)

    @staticmethod
    def csv_header() -> list[str]:
        return ["variant", "verdict", "tail_slope", "slope_margin",
                "delta_band", "K_tail_exponent", "F_tail_exponent",
                "integral_head"]

    def csv_row(self) -> list[str]:
        return [self.variant, self.verdict, repr(self.tail_slope),
                repr(self.slope_margin), repr(self.delta_band),
                repr(self.K_tail_exponent), repr(self.F_tail_exponent),
                repr(self.integral_head)]


def ko_test(profile: PhiProfile, triple: NonlinearityTriple,
            variant: str = "modified", delta_band: float = 0.05,
            T0: float = 1.0, T1: float = 1e8) -> KOReport:
    """Decide integrability of 1/(K^-1 o F) at infinity.

    The fitted tail slope over [T1/100, T1] must clear the critical value
    -1 by at least ``delta_band`` for a definite verdict.
    """
    probe = np.logspace(-3, 6, 60)
    if not np.all(np.asarray(triple.f(probe)) > 0):
        raise ValueError("f must be positive on (0, inf) samples")

    notes: list[str] = []
    F = CumulativeIntegral(lambda s: float(triple.f(np.asarray(s))), name="f")
    inv = KInverter(profile, triple.l, variant)

    # (phi, l) endpoint behavior of the K integrand
    small_ok = inv.K.head_a > -1.0
    big_t = np.logspace(6, 9, 12)
    kint = np.array([_k_integrand(profile, triple.l, variant)(t)
                     for t in big_t])
    k_tail = float(np.polyfit(np.log(big_t), np.log(kint), 1)[0]) \
        if np.all(kint > 0) else -np.inf
    large_ok = k_tail >= -1.0 - 1e-6
    if not large_ok:
        notes.append("K integrand integrable at infinity, K is bounded")

    nodes = np.logspace(np.log10(T0), np.log10(T1), 60)
    F_vals = np.array([F(t) for t in nodes])
    fit = nodes >= T1 / 100.0
    if F_vals[fit][0] <= 0:
        notes.append("F not positive at the tail-fit start; no verdict")
        return KOReport(variant=variant, holds=None, verdict="inconclusive",
                        tail_slope=np.nan, slope_margin=np.nan,
                        delta_band=delta_band, K_tail_exponent=k_tail,
                        F_tail_exponent=np.nan, integral_head=np.nan,
                        small_integrable=small_ok, large_nonintegrable=large_ok,
                        notes=notes)
    G_vals = np.array([1.0 / inv(v) for v in F_vals])

    slope = float(np.polyfit(np.log(nodes[fit]), np.log(G_vals[fit]), 1)[0])
    F_tail = float(np.polyfit(np.log(nodes[fit]), np.log(F_vals[fit]), 1)[0])
    head = float(np.trapezoid(G_vals, nodes))

    margin = slope - (-1.0)
    if slope < -1.0 - delta_band:
        verdict, holds = "holds", True
    elif slope > -1.0 + delta_band:
        verdict, holds = "fails", False
    else:
        verdict, holds = "inconclusive", None
        notes.append("tail slope inside the critical band around -1")

    return KOReport(variant=variant, holds=holds, verdict=verdict,
                    tail_slope=slope, slope_margin=margin,
                    delta_band=delta_band, K_tail_exponent=k_tail,
                    F_tail_exponent=F_tail, integral_head=head,
                    small_integrable=small_ok, large_nonintegrable=large_ok,
                    notes=notes)
