"""Radial witness solutions and pointwise certification of their inequalities.

Witnesses are Euclidean radial fields u = h(r^2) with h a power or an
exponential of a power.  Each verifier evaluates the two sides of the
target differential inequality on a log-spaced radius grid, reports the
pointwise ratio, its minimum (the best admissible constant), and a tail
exponent comparison that distinguishes a genuine asymptotic failure from
a merely small constant.

The exponential witness grows beyond float range, so its ratios are
assembled in log space throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .calculus import phi_laplacian_radial
from .fields import RadialField
from .groups import make_euclidean
from .profiles import mean_curvature

__all__ = [
    "RadialWitness",
    "power_witness",
    "exponential_witness",
    "MarginReport",
    "verify_radial_lower_bound",
    "verify_growth_sharpness",
    "verify_exponent_counterexample",
    "OdeProbeReport",
    "ode_nonexistence_probe",
]

DEFAULT_RADII = (1e-3, 1e6, 4000)


def _radius_grid(r_samples) -> np.ndarray:
    if r_samples is None:
        lo, hi, n = DEFAULT_RADII
        return np.logspace(np.log10(lo), np.log10(hi), n)
    return np.asarray(r_samples, dtype=float)


@dataclass(frozen=True)
class RadialWitness:
    kind: str               # "power" | "exponential"
    sigma: float
    Q: int
    field: RadialField

    def gradient_magnitude(self, r):
        """|grad u| = 2 r h'(r^2); power case: sigma r (1+r^2)^((sigma-2)/2)."""
        r = np.asarray(r, dtype=float)
        _, d1, _ = self.field.h_derivs(r * r)
        return 2.0 * r * d1

    def log_profile(self, t):
        """(L, L', L'') with L = log h, for overflow-free evaluation."""
        t = np.asarray(t, dtype=float)
        s = self.sigma
        if self.kind == "exponential":
            L = np.power(1.0 + t, s / 2.0)
            L1 = (s / 2.0) * np.power(1.0 + t, s / 2.0 - 1.0)
            L2 = (s / 2.0) * (s / 2.0 - 1.0) * np.power(1.0 + t, s / 2.0 - 2.0)
        else:
            L = (s / 2.0) * np.log1p(t)
            L1 = (s / 2.0) / (1.0 + t)
            L2 = -(s / 2.0) / (1.0 + t) ** 2
        return L, L1, L2


def power_witness(sigma: float, Q: int) -> RadialWitness:
    """u = (1 + r^2)^(sigma/2) on R^Q."""
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if Q < 2:
        raise ValueError(f"Q must be >= 2, got {Q}")
    g = make_euclidean(Q)
    u = RadialField(g, lambda t: (1.0 + t) ** (sigma / 2.0))
    return RadialWitness(kind="power", sigma=float(sigma), Q=Q, field=u)


def exponential_witness(sigma: float, Q: int) -> RadialWitness:
    """u = exp((1 + r^2)^(sigma/2)) on R^Q."""
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if Q < 2:
        raise ValueError(f"Q must be >= 2, got {Q}")
    g = make_euclidean(Q)
    u = RadialField(g, lambda t: ((1.0 + t) ** (sigma / 2.0)).exp())
    return RadialWitness(kind="exponential", sigma=float(sigma), Q=Q, field=u)


@dataclass
class MarginReport:
    witness_kind: str
    params: dict
    radii: np.ndarray
    lhs: np.ndarray         # the curvature bracket (common 1/sqrt factor removed)
    rhs_shape: np.ndarray   # target shape at unit constant
    margins: np.ndarray     # lhs/rhs_shape
    C_star: float
    r_at_min: float
    tail_gap: float         # LHS minus RHS tail exponent
    verdict: str            # "certified" | "violated" | "asymptotic-failure"
    violation_radius: Optional[float] = None
    log_gamma: Optional[float] = None   # superlevel threshold, log scale
    notes: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_json(self) -> str:
        doc = {k: v for k, v in self.__dict__.items()
               if k not in ("radii", "lhs", "rhs_shape", "margins")}
        doc["n_radii"] = int(len(self.radii))
        return json.dumps(doc, default=float)

    def rows(self):
        for r, a, b, m in zip(self.radii, self.lhs, self.rhs_shape, self.margins):
            yield (r, a, b, m)


def _mc_bracket(h1, h2, t):
    """2(Q-1)-free part: returns (2 h' + 4 t h'')/(1 + 4 t h'^2)."""
    return (2.0 * h1 + 4.0 * t * h2) / (1.0 + 4.0 * t * h1 * h1)


def _assemble(witness, radii, lhs, rhs_shape, params,
              tail_gap, log_gamma=None, tol=1e-9) -> MarginReport:
    margins = lhs / rhs_shape
    i = int(np.argmin(margins))
    C_star = float(margins[i])
    if tail_gap < -tol:
        verdict = "asymptotic-failure"
    elif C_star > 0:
        verdict = "certified"
    else:
        verdict = "violated"
    return MarginReport(
        witness_kind=witness.kind, params=params, radii=radii,
        lhs=lhs, rhs_shape=rhs_shape, margins=margins,
        C_star=C_star, r_at_min=float(radii[i]), tail_gap=float(tail_gap),
        verdict=verdict,
        violation_radius=float(radii[i]) if verdict == "violated" else None,
        log_gamma=log_gamma)


def verify_radial_lower_bound(sigma: float, Q: int,
                              r_samples=None) -> MarginReport:
    """Curvature lower bound for the power witness.

    Certifies div(grad u/sqrt(1+|grad u|^2)) >= C (1+r)^(sigma-2)
    / sqrt(1+|grad u|^2) and reports the best C.  This always holds for
    sigma > 0, Q >= 2; a failure means a broken implementation and raises.
    """
    w = power_witness(sigma, Q)
    radii = _radius_grid(r_samples)
    t = radii * radii
    _, h1, h2 = w.field.h_derivs(t)
    bracket = 2.0 * (Q - 1) * h1 + _mc_bracket(h1, h2, t)
    rhs = np.power(1.0 + radii, sigma - 2.0)
    report = _assemble(w, radii, bracket, rhs,
                       {"sigma": sigma, "Q": Q}, tail_gap=0.0)
    if not report.certified:
        raise AssertionError(
            f"lower bound failed at r={report.r_at_min}: this witness is "
            "always certifiable, so the evaluator is broken")
    return report


def verify_growth_sharpness(chi: float, mu: float, sigma: float, Q: int,
                            r_samples=None) -> MarginReport:
    """Sharpness of the critical growth exponent for the curvature operator.

    For 0 <= chi < 1, mu < 2-chi and sigma >= (2-chi-mu)/(1-chi) the
    power witness satisfies the full inequality with gradient factor
    |grad u|^chi and weight (1+r)^(-mu); below the critical exponent the
    tails cross and the report flags an asymptotic failure.
    """
    if not (0 <= chi < 1):
        raise ValueError(f"chi must be in [0, 1), got {chi}")
    if not mu < 2 - chi:
        raise ValueError(f"mu must be < 2-chi, got mu={mu}, chi={chi}")
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    w = power_witness(sigma, Q)
    radii = _radius_grid(r_samples)
    t = radii * radii
    _, h1, h2 = w.field.h_derivs(t)
    bracket = 2.0 * (Q - 1) * h1 + _mc_bracket(h1, h2, t)
    grad = w.gradient_magnitude(radii)
    rhs = np.power(1.0 + radii, -mu) * np.power(grad, chi)
    # tail exponents: bracket ~ r^(sigma-2), shape ~ r^(chi(sigma-1)-mu)
    tail_gap = (sigma - 2.0) - (chi * (sigma - 1.0) - mu)
    return _assemble(w, radii, bracket, rhs,
                     {"chi": chi, "mu": mu, "sigma": sigma, "Q": Q}, tail_gap)


def _case3_report(chi, mu, Q, radii) -> MarginReport:
    sigma = (2.0 - chi - mu) / (1.0 - chi)
    w = exponential_witness(sigma, Q)
    t = radii * radii
    L, L1, L2 = w.log_profile(t)
    # (2h' + 4t h'')/h = 2L' + 4t(L'' + L'^2);  1 + 4t h'^2 = 1 + 4t L'^2 h^2
    num = 2.0 * L1 + 4.0 * t * (L2 + L1 * L1)
    log_den = np.logaddexp(0.0, np.log(4.0 * t * L1 * L1) + 2.0 * L)
    corr_over_h = np.sign(num) * np.exp(np.log(np.abs(num)) - log_den)
    bracket_over_h = 2.0 * (Q - 1) * L1 + corr_over_h
    # shape/h = (1+r)^(-mu) (2 r L')^chi  since omega = 1-chi cancels h
    rhs_over_h = np.power(1.0 + radii, -mu) * np.power(2.0 * radii * L1, chi)

    # bounded correction constant: sup |4t h''| / (1 + 4t h'^2)
    log_c0 = np.log(4.0 * t * np.abs(L2 + L1 * L1)) + L - log_den
    C0 = float(np.exp(np.max(log_c0)))

    # superlevel threshold: first radius beyond which the bracket stays positive
    pos = bracket_over_h > 0
    idx = len(pos) - 1
    while idx > 0 and pos[idx - 1]:
        idx -= 1
    log_gamma = float(L[idx])

    sl = slice(idx, None)
    report = _assemble(
        w, radii[sl], bracket_over_h[sl], rhs_over_h[sl],
        {"chi": chi, "mu": mu, "sigma": sigma, "Q": Q, "C0": C0},
        tail_gap=0.0, log_gamma=log_gamma)
    report.notes.append(
        f"certified on the superlevel set log u > {log_gamma:.6g}")
    return report


def verify_exponent_counterexample(range_case: int, chi: float, mu: float,
                                   omega: float, Q: int,
                                   sigma: Optional[float] = None,
                                   r_samples=None) -> MarginReport:
    """Witnesses for the three failure regimes of the forcing exponent.

    Case 1: omega < 1-chi; power witness with sigma delta >= 2-chi-mu,
    delta = 1-chi-omega.  Case 2: mu >= 2-chi, omega = 1-chi; any sigma > 0.
    Case 3: mu < 2-chi, omega = 1-chi; exponential witness at the critical
    sigma, certified above a superlevel threshold.
    """
    radii = _radius_grid(r_samples)
    if not (0 <= chi < 1):
        raise ValueError(f"chi must be in [0, 1), got {chi}")
    if range_case == 1:
        delta = 1.0 - chi - omega
        if delta <= 0:
            raise ValueError("case 1 needs omega < 1-chi")
        sigma_min = (2.0 - chi - mu) / delta
        if sigma is None:
            sigma = max(sigma_min, 1.0)
        elif sigma < sigma_min - 1e-12:
            raise ValueError(
                f"case 1 needs sigma >= (2-chi-mu)/delta = {sigma_min}")
        tail_gap = sigma * delta - (2.0 - chi - mu)
    elif range_case == 2:
        if abs(omega - (1.0 - chi)) > 1e-12:
            raise ValueError("case 2 needs omega = 1-chi")
        if mu < 2.0 - chi:
            raise ValueError("case 2 needs mu >= 2-chi")
        if sigma is None:
            sigma = 1.0
        tail_gap = mu - (2.0 - chi)
    elif range_case == 3:
        if abs(omega - (1.0 - chi)) > 1e-12:
            raise ValueError("case 3 needs omega = 1-chi")
        if mu >= 2.0 - chi:
            raise ValueError("case 3 needs mu < 2-chi")
        return _case3_report(chi, mu, Q, radii)
    else:
        raise ValueError(f"range_case must be 1, 2 or 3, got {range_case}")

    w = power_witness(sigma, Q)
    t = radii * radii
    h, h1, h2 = w.field.h_derivs(t)
    bracket = 2.0 * (Q - 1) * h1 + _mc_bracket(h1, h2, t)
    grad = w.gradient_magnitude(radii)
    rhs = np.power(1.0 + radii, -mu) * np.power(h, omega) * np.power(grad, chi)
    report = _assemble(
        w, radii, bracket, rhs,
        {"case": range_case, "chi": chi, "mu": mu, "omega": omega,
         "sigma": sigma, "Q": Q},
        tail_gap)
    return report


@dataclass
class OdeProbeReport:
    mu: float
    T: float
    entries: list   # dicts {slope, blew_up, blow_up_time or None}

    @property
    def all_blew_up(self) -> bool:
        return all(e["blew_up"] for e in self.entries if e["slope"] > 0)

    def to_json(self) -> str:
        return json.dumps(self.__dict__)


def ode_nonexistence_probe(mu: float, T: float = 1.0,
                           slopes=(0.1, 1.0, 10.0),
                           t_budget: float = 1e6,
                           overflow: float = 1e8) -> OdeProbeReport:
    """Integrate the borderline slope equation and look for finite blow-up.

    The equality case 4t g'/(1 + 4t g^2) = (1+t)^((1-mu)/2) g for g = h'
    has no global increasing solution when mu < 1; the probe integrates
    from t = T and reports the time at which g crosses the overflow guard.
    """
    if mu >= 1:
        raise ValueError(f"mu must be < 1, got {mu}")
    if T <= 0:
        raise ValueError("T must be > 0")

    def rhs(t, y):
        gv = y[0]
        return [(1.0 + t) ** ((1.0 - mu) / 2.0) * gv
                * (1.0 + 4.0 * t * gv * gv) / (4.0 * t)]

    def blow(t, y):
        return y[0] - overflow
    blow.terminal = True
    blow.direction = 1

    entries = []
    for g0 in slopes:
        if g0 == 0:
            entries.append({"slope": 0.0, "blew_up": False,
                            "blow_up_time": None})
            continue
        sol = solve_ivp(rhs, (T, T + t_budget), [float(g0)], events=[blow],
                        rtol=1e-8, atol=1e-12, max_step=np.inf)
        if sol.status == 1 and len(sol.t_events[0]):
            entries.append({"slope": float(g0), "blew_up": True,
                            "blow_up_time": float(sol.t_events[0][0])})
        elif sol.status == -1 and sol.y[0, -1] > 1e3 * g0:
            # the step size collapsed while g was exploding: blow-up reached
            # faster than the event machinery could bracket it
            entries.append({"slope": float(g0), "blew_up": True,
                            "blow_up_time": float(sol.t[-1])})
        else:
            entries.append({"slope": float(g0), "blew_up": False,
                            "blow_up_time": None,
                            "solver_status": int(sol.status)})
    return OdeProbeReport(mu=float(mu), T=float(T), entries=entries)
