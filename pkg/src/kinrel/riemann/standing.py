"""Standing waves over jumps of a geometric field, with optional loss.

Shallow water over a topography step and barotropic nozzle/porous-media
flow over a cross-section step share the same structure: mass is carried
across the zero-speed discontinuity, and the Bernoulli head

    B = v^2/2 + e(rho) + p(rho)/rho   (+ a for the topography model)

is conserved when the jump is loss-free.  Concentrated dissipation
(the singular momentum loss used in the engineering literature) replaces
the head equality by B_plus - B_minus = -kappa with kappa >= 0 evaluated
on the upstream side, so the entropy-flux jump is exactly -m*kappa.

The head is monotone in density on either side of the sonic point, which
pins one root per branch; resonance (sonic crossing) is excluded by a
configurable guard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import NoRootOnBranch, ResonanceGuard
from ..rootfind import MAX_EXPANSIONS, solve_bracketed

__all__ = [
    "BarotropicLaw",
    "StandingWaveProblem",
    "StandingWaveResult",
    "standing_wave",
    "entropy_flux",
]

SHALLOW_WATER = "shallow_water"
NOZZLE = "nozzle"


@dataclass(frozen=True)
class BarotropicLaw:
    """p(rho) = coeff * rho**exponent with exponent > 1.

    The default coeff=1/2, exponent=2 is the shallow-water pressure in
    units where gravity is one.
    """

    coeff: float = 0.5
    exponent: float = 2.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.coeff) and self.coeff > 0.0):
            raise ValueError("coeff must be positive")
        if not (np.isfinite(self.exponent) and self.exponent > 1.0):
            raise ValueError("exponent must exceed 1")

    def p(self, rho: float) -> float:
        return self.coeff * rho ** self.exponent

    def e(self, rho: float) -> float:
        # de/drho = p/rho^2
        return self.coeff * rho ** (self.exponent - 1.0) / (self.exponent - 1.0)

    def c_sq(self, rho: float) -> float:
        return self.coeff * self.exponent * rho ** (self.exponent - 1.0)

    @classmethod
    def from_dict(cls, obj: dict) -> "BarotropicLaw":
        return cls(float(obj.get("coeff", 0.5)), float(obj.get("exponent", 2.0)))

    def to_dict(self) -> dict:
        return {"coeff": self.coeff, "exponent": self.exponent}


@dataclass(frozen=True, eq=False)
class StandingWaveProblem:
    """A zero-speed jump of the geometric field a with prescribed loss.

    ``kappa`` is either a nonnegative number or a callable
    (rho_minus, v_minus, a_minus) -> float evaluated once on the upstream
    side.  ``branch`` selects the root: the downstream state keeps the
    requested flow regime.
    """

    model: str
    rho_minus: float
    v_minus: float
    a_minus: float
    a_plus: float
    kappa: float | Callable[[float, float, float], float] = 0.0
    branch: str = "subsonic"
    law: BarotropicLaw = field(default_factory=BarotropicLaw)
    resonance_guard: float = 1e-6

    def __post_init__(self) -> None:
        if self.model not in (SHALLOW_WATER, NOZZLE):
            raise ValueError(f"unknown model {self.model!r}")
        if self.branch not in ("subsonic", "supersonic"):
            raise ValueError(f"unknown branch {self.branch!r}")
        if not (self.rho_minus > 0.0 and np.isfinite(self.rho_minus)):
            raise ValueError("upstream density must be positive")
        if not (self.a_minus > 0.0 and self.a_plus > 0.0):
            raise ValueError("geometry values must be positive")
        if not (0.0 < self.resonance_guard < 1.0):
            raise ValueError("resonance guard must sit in (0, 1)")

    def kappa_value(self) -> float:
        k = self.kappa(self.rho_minus, self.v_minus, self.a_minus) \
            if callable(self.kappa) else float(self.kappa)
        if not (np.isfinite(k) and k >= 0.0):
            raise ValueError("loss coefficient must be nonnegative")
        return k


@dataclass(frozen=True, eq=False)
class StandingWaveResult:
    rho_plus: float
    v_plus: float
    dissipation: float          # entropy-flux jump, equals -m*kappa
    m: float                    # carried mass (a rho v for the nozzle)
    flux_minus: float
    flux_plus: float

    def to_dict(self) -> dict:
        return {"rho_plus": self.rho_plus, "v_plus": self.v_plus,
                "dissipation": self.dissipation, "m": self.m,
                "flux_minus": self.flux_minus, "flux_plus": self.flux_plus}


def entropy_flux(model: str, law: BarotropicLaw, rho: float, v: float,
                 a: float) -> float:
    """Entropy flux carried past a point: mass times the Bernoulli head
    (plus the topography for shallow water)."""
    head = 0.5 * v * v + law.e(rho) + law.p(rho) / rho
    if model == SHALLOW_WATER:
        return rho * v * (head + a)
    return a * rho * v * head


def standing_wave(prob: StandingWaveProblem) -> StandingWaveResult:
    """Resolve the standing wave: downstream (rho, v), loss and fluxes.

    Raises ``ResonanceGuard`` when either side sits within the guard of
    sonic and ``NoRootOnBranch`` when the requested branch carries no
    downstream state (choked geometry change).
    """
    law = prob.law
    rho_m, v_m = prob.rho_minus, prob.v_minus
    _guard(prob, rho_m, v_m)
    kappa = prob.kappa_value()

    if prob.model == SHALLOW_WATER:
        m = rho_m * v_m
        v_of = lambda rho: m / rho
        geom_jump = prob.a_plus - prob.a_minus
    else:
        m = prob.a_minus * rho_m * v_m
        v_of = lambda rho: m / (prob.a_plus * rho)
        geom_jump = 0.0

    upstream_supersonic = v_m * v_m > law.c_sq(rho_m)
    if (prob.a_plus == prob.a_minus and kappa == 0.0
            and (prob.branch == "supersonic") == upstream_supersonic):
        # no geometry jump, no loss: the wave is the identity
        flux = entropy_flux(prob.model, law, rho_m, v_m, prob.a_minus)
        return StandingWaveResult(rho_m, v_m, 0.0, m, flux, flux)

    head_minus = 0.5 * v_m * v_m + law.e(rho_m) + law.p(rho_m) / rho_m
    if prob.model == SHALLOW_WATER:
        head_minus += prob.a_minus

    def head_gap(rho: float) -> float:
        v = v_of(rho)
        head = 0.5 * v * v + law.e(rho) + law.p(rho) / rho
        if prob.model == SHALLOW_WATER:
            head += prob.a_plus
        return head - head_minus + kappa

    rho_plus = _root_on_branch(prob, law, head_gap, v_of, m)
    v_plus = v_of(rho_plus)
    if m != 0.0:
        _guard(prob, rho_plus, v_plus)
    fm = entropy_flux(prob.model, law, rho_m, v_m, prob.a_minus)
    fp = entropy_flux(prob.model, law, rho_plus, v_plus, prob.a_plus)
    return StandingWaveResult(float(rho_plus), float(v_plus), -m * kappa, m, fm, fp)


def _guard(prob: StandingWaveProblem, rho: float, v: float) -> None:
    ratio = v * v / prob.law.c_sq(rho)
    if abs(1.0 - ratio) < prob.resonance_guard:
        raise ResonanceGuard(f"|1 - v^2/c^2| = {abs(1.0 - ratio):.3e} "
                             f"inside the guard {prob.resonance_guard:g}")


def _root_on_branch(prob, law, head_gap, v_of, m: float) -> float:
    """One zero of the head imbalance on the requested branch; the head is
    strictly monotone on each side of the sonic density."""
    if m == 0.0:
        # resting fluid: the whole density axis is the subsonic branch and
        # the head grows monotonically
        if prob.branch == "supersonic":
            raise NoRootOnBranch("a resting fluid has no supersonic downstream state")
        hi = prob.rho_minus
        fhi = head_gap(hi)
        for _ in range(MAX_EXPANSIONS):
            if fhi > 0.0:
                break
            hi *= 2.0
            fhi = head_gap(hi)
        else:
            raise NoRootOnBranch("head balance unreachable at rest")
        lo = 0.5 * hi
        flo = head_gap(lo)
        for _ in range(MAX_EXPANSIONS):
            if flo < 0.0:
                break
            hi, fhi = lo, flo
            lo *= 0.5
            flo = head_gap(lo)
        else:
            raise NoRootOnBranch("head balance unreachable at rest")
        return solve_bracketed(head_gap, lo, hi, flo=flo, fhi=fhi)

    # sonic density for the downstream leg: v_of(rho)^2 = c^2(rho)
    gap_sq = lambda rho: v_of(rho) ** 2 - law.c_sq(rho)
    lo, hi = 1e-12, 1.0
    while gap_sq(hi) > 0.0 and hi < 1e12:
        hi *= 2.0
    while gap_sq(lo) < 0.0 and lo > 1e-24:
        lo *= 0.5
    rho_sonic = solve_bracketed(gap_sq, lo, hi)

    eps = max(prob.resonance_guard, 1e-9)
    if prob.branch == "subsonic":
        # head increases with density here
        lo = rho_sonic * (1.0 + eps)
        flo = head_gap(lo)
        if flo > 0.0:
            raise NoRootOnBranch("head already exceeds the upstream value at "
                                 "the sonic edge of the subsonic branch")
        hi = 2.0 * lo
        fhi = head_gap(hi)
        for _ in range(MAX_EXPANSIONS):
            if fhi > 0.0:
                break
            lo, flo = hi, fhi
            hi *= 2.0
            fhi = head_gap(hi)
        else:
            raise NoRootOnBranch("no subsonic state matches the head balance")
        return solve_bracketed(head_gap, lo, hi, flo=flo, fhi=fhi)

    hi = rho_sonic * (1.0 - eps)
    fhi = head_gap(hi)
    if fhi > 0.0:
        raise NoRootOnBranch("head already exceeds the upstream value at the "
                             "sonic edge of the supersonic branch")
    lo = 0.5 * hi
    flo = head_gap(lo)
    for _ in range(MAX_EXPANSIONS):
        if flo > 0.0:
            break
        hi, fhi = lo, flo
        lo *= 0.5
        flo = head_gap(lo)
    else:
        raise NoRootOnBranch("no supersonic state matches the head balance")
    return solve_bracketed(head_gap, lo, hi, flo=flo, fhi=fhi)
