"""Parameter-range decision functions for the Liouville-type results.

Each classifier encodes one result's inequalities exactly, strict where
strict, and returns a verdict carrying the constraint residuals so sweeps
can plot distance-to-boundary.  Nothing here inspects concrete (b, f, l)
closures; certificates are the caller's responsibility.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

__all__ = [
    "ParamSet",
    "RangeVerdict",
    "sigma_star",
    "eta",
    "h_constant",
    "classify_main",
    "classify_main2",
    "classify_superlevel",
    "compare_literature",
]

Number = Union[int, float, Fraction]

TOL = 1e-12       # comparisons
BOUNDARY_TOL = 1e-9   # "at the boundary" annotation


@dataclass(frozen=True)
class ParamSet:
    p: Number
    chi: Number
    mu: Number
    Q: int = 2
    omega: Optional[Number] = None
    sigma: Optional[Number] = None
    l_positive_at_zero: bool = False
    symmetric_f: bool = False

    def __post_init__(self):
        if self.p <= 1:
            raise ValueError(f"p must be > 1, got {self.p}")
        if self.chi < 0:
            raise ValueError(f"chi must be >= 0, got {self.chi}")
        if self.Q < 1 or int(self.Q) != self.Q:
            raise ValueError(f"Q must be a positive integer, got {self.Q}")


@dataclass
class RangeVerdict:
    tag: str          # Main | Main2 | Maximum | Superlevel | divergence_structure | high_gradient | none
    conclusion: str
    H: Optional[float] = None
    residuals: dict = field(default_factory=dict)
    boundary: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def applies(self) -> bool:
        return self.tag != "none"

    def to_json(self) -> str:
        return json.dumps({
            "tag": self.tag, "conclusion": self.conclusion, "H": self.H,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "boundary": self.boundary, "notes": self.notes,
        })


def _exactable(*vals) -> bool:
    return all(isinstance(v, (int, Fraction)) or float(v).is_integer()
               for v in vals)


def _lt(a, b) -> bool:
    return a < b - TOL if isinstance(a, float) or isinstance(b, float) else a < b


def _le(a, b) -> bool:
    return a <= b + TOL if isinstance(a, float) or isinstance(b, float) else a <= b


def _near(a, b) -> bool:
    return abs(float(a) - float(b)) <= BOUNDARY_TOL


def _mark_boundary(verdict: RangeVerdict, name: str, residual) -> None:
    verdict.residuals[name] = float(residual)
    if _near(residual, 0.0):
        verdict.boundary.append(name)


def sigma_star(p: Number, chi: Number, mu: Number) -> float:
    """Critical growth exponent (p - chi - mu)/(p - chi - 1)."""
    den = p - chi - 1
    if _le(den, 0):
        raise ValueError(
            f"sigma_star degenerates at chi >= p-1 (denominator {float(den)})")
    return float((p - chi - mu) / den)


def eta(p: Number, chi: Number, mu: Number, sigma: Number) -> float:
    """mu + (sigma - 1)(p - chi); sigma <= sigma_star iff sigma >= eta."""
    return float(mu + (sigma - 1) * (p - chi))


def h_constant(sigma: Number, chi: Number, p: Number, mu: Number,
               Q: int) -> RangeVerdict:
    """Sharp constant of the maximum principle at infinity.

    Valid range: 0 <= chi < p-1, mu <= p-chi, 0 <= sigma <= sigma_star.
    H = 0 when sigma < sigma_star, when sigma = sigma_star = 0, or when
    sigma = sigma_star > 0 with (p-1)(sigma-1) <= 1-Q; otherwise
    H = sigma^(p-chi-1) [(p-1)(sigma-1) + Q - 1].
    """
    v = RangeVerdict(tag="Maximum", conclusion="H_value")
    if not _le(0, chi) or not _lt(chi, p - 1):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            notes=["requires 0 <= chi < p-1"])
    if not _le(mu, p - chi):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            notes=["requires mu <= p-chi"])
    ss = sigma_star(p, chi, mu)
    if not _le(0, sigma) or not _le(sigma, ss):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            notes=[f"requires 0 <= sigma <= sigma_star={ss}"])
    _mark_boundary(v, "sigma_star_gap", ss - float(sigma))
    at_star = _near(sigma, ss) or not _lt(sigma, ss)
    if not at_star:
        v.H = 0.0
    elif _near(sigma, 0.0):
        v.H = 0.0
    elif _le((p - 1) * (sigma - 1), 1 - Q):
        v.H = 0.0
    else:
        v.H = float(sigma) ** float(p - chi - 1) \
            * float((p - 1) * (sigma - 1) + Q - 1)
    return v


def classify_main(params: ParamSet) -> RangeVerdict:
    """Boundedness-above result: 0 <= chi <= p-1, mu < p-chi, omega > p-1-chi."""
    p, chi, mu, omega = params.p, params.chi, params.mu, params.omega
    if omega is None:
        raise ValueError("classify_main needs omega")
    v = RangeVerdict(tag="Main", conclusion="bounded_above_fstar_le_0")
    _mark_boundary(v, "chi_upper", (p - 1) - chi)
    _mark_boundary(v, "mu_upper", (p - chi) - mu)
    _mark_boundary(v, "omega_lower", omega - (p - 1 - chi))
    if not _le(chi, p - 1):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            residuals=v.residuals,
                            notes=["chi <= p-1 violated"])
    if not _lt(mu, p - chi):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            residuals=v.residuals,
                            notes=["mu < p-chi violated"])
    if not _lt(p - 1 - chi, omega):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            residuals=v.residuals,
                            notes=["omega > p-1-chi violated"])
    if params.l_positive_at_zero:
        v.notes.append("solution is bounded above with f(sup u) <= 0")
    else:
        v.notes.append("solution is bounded above with f(sup u) <= 0, "
                       "unless it is constant")
    if params.symmetric_f:
        v.conclusion = "constant_or_nonpositive"
        v.notes.append("two-sided bound: f(sup u) <= 0 <= f(inf u)")
    return v


def classify_main2(params: ParamSet, little_o: bool = True) -> RangeVerdict:
    """Growth-restricted variant: 0 <= chi < p-1 (strict), mu < p-chi.

    ``sigma`` is the declared growth exponent of the positive part;
    ``little_o`` distinguishes o(r^sigma) from O(r^sigma).  Accepted when
    sigma < sigma_star, or sigma = sigma_star with little-o, or with big-O
    when sigma_star <= (p-Q)/(p-1).  mu = p-chi is accepted only with a
    boundedness note (sigma_star = 0 there).
    """
    p, chi, mu, Q, sigma = params.p, params.chi, params.mu, params.Q, params.sigma
    if sigma is None:
        raise ValueError("classify_main2 needs sigma")
    v = RangeVerdict(tag="Main2", conclusion="bounded_above_fstar_le_0")
    _mark_boundary(v, "chi_upper", (p - 1) - chi)
    if not _lt(chi, p - 1):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            residuals=v.residuals,
                            notes=["chi < p-1 violated (strict here)"])
    _mark_boundary(v, "mu_upper", (p - chi) - mu)
    if _near(mu, p - chi):
        v.notes.append("mu = p-chi: requires the solution bounded above")
        if not (_near(sigma, 0.0) or _lt(sigma, 0)):
            return RangeVerdict(tag="none", conclusion="out_of_range",
                                residuals=v.residuals,
                                notes=["mu = p-chi allows no growth "
                                       "(bounded solutions only)"])
        return v
    if not _lt(mu, p - chi):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            residuals=v.residuals,
                            notes=["mu < p-chi violated"])
    ss = sigma_star(p, chi, mu)
    _mark_boundary(v, "sigma_star_gap", ss - float(sigma))
    if _lt(sigma, ss) and not _near(sigma, ss):
        return v
    if _near(sigma, ss):
        if little_o:
            v.notes.append("critical growth accepted with little-o")
            return v
        border = float((p - Q) / (p - 1))
        _mark_boundary(v, "critical_big_o_gap", border - ss)
        if _le(ss, border):
            v.notes.append("critical big-O growth accepted: sigma_star <= "
                           f"(p-Q)/(p-1) = {border}")
            return v
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            residuals=v.residuals,
                            notes=["big-O at the critical exponent needs "
                                   f"sigma_star <= (p-Q)/(p-1) = {border}"])
    return RangeVerdict(tag="none", conclusion="out_of_range",
                        residuals=v.residuals,
                        notes=[f"sigma > sigma_star = {ss}"])


def classify_superlevel(params: ParamSet, gamma: float = 0.0,
                    K_pos: bool = True) -> RangeVerdict:
    """Nonexistence on superlevel sets: 0 <= chi <= p-1, mu < p-chi, omega > p-chi-1."""
    p, chi, mu, omega = params.p, params.chi, params.mu, params.omega
    if omega is None:
        raise ValueError("classify_superlevel needs omega")
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if not K_pos:
        raise ValueError("requires a positive constant in the inequality")
    v = RangeVerdict(tag="Superlevel", conclusion="no_nonconstant_solution")
    _mark_boundary(v, "chi_upper", (p - 1) - chi)
    _mark_boundary(v, "mu_upper", (p - chi) - mu)
    _mark_boundary(v, "omega_lower", omega - (p - chi - 1))
    if not _le(chi, p - 1):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            residuals=v.residuals, notes=["chi <= p-1 violated"])
    if not _lt(mu, p - chi):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            residuals=v.residuals, notes=["mu < p-chi violated"])
    if not _lt(p - chi - 1, omega):
        return RangeVerdict(tag="none", conclusion="out_of_range",
                            residuals=v.residuals,
                            notes=["omega > p-chi-1 violated"])
    return v


def compare_literature(params: ParamSet,
                       chi_low: Optional[Number] = None,
                       chi_high: Optional[Number] = None,
                       omega_low: Optional[Number] = None) -> list[RangeVerdict]:
    """Side-by-side verdicts from the two classical comparison ranges.

    The first verdict uses the constant-free structure conditions
    chi_high <= p-1, mu < p-chi_high, omega_low > p-1-chi_low (defaults
    collapse the extended exponents to chi and omega).  The second covers
    the high-gradient-exponent range p-1 < chi <= (Q-mu)(p-1)/(Q-1) with
    mu < 1, which needs omega = 0.
    """
    p, chi, mu, Q = params.p, params.chi, params.mu, params.Q
    chi_low = chi if chi_low is None else chi_low
    chi_high = chi if chi_high is None else chi_high
    omega_low = params.omega if omega_low is None else omega_low
    out = []

    fs = RangeVerdict(tag="divergence_structure", conclusion="constant")
    _mark_boundary(fs, "chi_high_upper", (p - 1) - chi_high)
    _mark_boundary(fs, "mu_upper", (p - chi_high) - mu)
    ok = _le(chi_high, p - 1) and _lt(mu, p - chi_high)
    if omega_low is None:
        fs = RangeVerdict(tag="none", conclusion="out_of_range",
                          notes=["needs omega"])
    else:
        _mark_boundary(fs, "omega_lower", omega_low - (p - 1 - chi_low))
        ok = ok and _lt(p - 1 - chi_low, omega_low)
        if not ok:
            fs = RangeVerdict(tag="none", conclusion="out_of_range",
                              residuals=fs.residuals,
                              notes=["comparison range violated"])
    out.append(fs)

    hc = RangeVerdict(tag="high_gradient", conclusion="no_nonconstant_solution")
    if not _lt(p - 1, chi):
        hc = RangeVerdict(tag="none", conclusion="not_applicable",
                          notes=["needs chi > p-1"])
    else:
        bound = (Q - mu) * (p - 1) / (Q - 1) if Q > 1 else float("inf")
        _mark_boundary(hc, "chi_upper", float(bound) - float(chi))
        _mark_boundary(hc, "mu_upper", 1 - float(mu))
        if not (_lt(mu, 1) and _le(chi, bound)):
            hc = RangeVerdict(tag="none", conclusion="out_of_range",
                              residuals=hc.residuals,
                              notes=["high-chi range violated"])
        elif params.omega not in (None, 0):
            hc.notes.append("stated for omega = 0 only")
    out.append(hc)
    return out
