"""Gamma-law thermodynamics for a gas carrying several independent entropies.

Each species keeps its own internal-energy law

    e_i(tau, s_i) = kappa_i * exp(s_i) * tau**(1 - gamma_i) / (gamma_i - 1),

so the partial pressure is p_i = -de_i/dtau = kappa_i exp(s_i) tau**(-gamma_i)
and the temperature T_i = de_i/ds_i coincides with e_i.  For gamma_i > 1 this
family satisfies, in closed form, every structural hypothesis the profile and
end-state analysis rely on: positive pressures and temperatures, strict
convexity of the total pressure in tau, blow-up of p and dp/dtau as tau -> 0,
decay to zero as tau -> +inf, and unbounded steepening as any entropy grows.

Construction accepts any positive gamma so that `validate_hypotheses` can be
pointed at mis-specified laws and report which property breaks; the solver
entry points demand `strictly_admissible` specs (all gamma_i > 1).

All quantities are nondimensional.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "Species",
    "EosSpec",
    "ThermoState",
    "ViscositySpec",
    "GridSpec",
    "HypothesisCheck",
    "HypothesisReport",
    "pressure",
    "temperature",
    "internal_energy",
    "species_internal_energy",
    "sound_speed_sq",
    "total_pressure",
    "species_pressure",
    "dp_dtau",
    "d2p_dtau2",
    "species_dp_ds",
    "species_viscosity",
    "validate_hypotheses",
]


@dataclass(frozen=True)
class Species:
    """One gamma-law: p = kappa * exp(s) * tau**(-gamma)."""

    gamma: float
    kappa: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.gamma) and self.gamma > 0.0):
            raise ValueError(f"gamma must be a positive finite number, got {self.gamma}")
        if not (np.isfinite(self.kappa) and self.kappa > 0.0):
            raise ValueError(f"kappa must be a positive finite number, got {self.kappa}")


@dataclass(frozen=True)
class EosSpec:
    """An ordered collection of N >= 1 species laws."""

    species: tuple[Species, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "species", tuple(self.species))
        if len(self.species) == 0:
            raise ValueError("EosSpec needs at least one species")

    @property
    def n(self) -> int:
        return len(self.species)

    @cached_property
    def gammas(self) -> np.ndarray:
        g = np.array([sp.gamma for sp in self.species], dtype=float)
        g.flags.writeable = False
        return g

    @cached_property
    def kappas(self) -> np.ndarray:
        k = np.array([sp.kappa for sp in self.species], dtype=float)
        k.flags.writeable = False
        return k

    @property
    def strictly_admissible(self) -> bool:
        """True when every gamma_i > 1 (all structural hypotheses hold)."""
        return bool(np.all(self.gammas > 1.0))

    @classmethod
    def gamma_law(cls, gammas, kappas=None) -> "EosSpec":
        gammas = np.atleast_1d(np.asarray(gammas, dtype=float))
        if kappas is None:
            kappas = np.ones_like(gammas)
        kappas = np.atleast_1d(np.asarray(kappas, dtype=float))
        if kappas.shape != gammas.shape:
            raise ValueError("gammas and kappas must have the same length")
        return cls(tuple(Species(g, k) for g, k in zip(gammas, kappas)))

    @classmethod
    def from_dict(cls, obj: dict) -> "EosSpec":
        return cls(tuple(Species(float(sp["gamma"]), float(sp.get("kappa", 1.0)))
                         for sp in obj["species"]))

    def to_dict(self) -> dict:
        return {"species": [{"gamma": sp.gamma, "kappa": sp.kappa} for sp in self.species]}


@dataclass(frozen=True, eq=False)
class ThermoState:
    """One point (tau, s_1..s_N) of the phase space, tau > 0."""

    tau: float
    s: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", float(self.tau))
        s = np.array(self.s, dtype=float, copy=True).reshape(-1)
        s.flags.writeable = False
        object.__setattr__(self, "s", s)
        if not (np.isfinite(self.tau) and self.tau > 0.0):
            raise ValueError(f"tau must be positive and finite, got {self.tau}")
        if s.size < 1 or not np.all(np.isfinite(s)):
            raise ValueError("entropy vector must be non-empty and finite")

    @property
    def n(self) -> int:
        return self.s.size


@dataclass(frozen=True, eq=False)
class ViscositySpec:
    """Per-species viscosity coefficients mu_i^0 and the closure mode.

    ``temperature`` mode sets mu_i = mu_i^0 * T_i; ``constant`` mode sets
    mu_i = mu_i^0.  At least one coefficient must be positive so the total
    viscosity never vanishes.
    """

    mu0: np.ndarray
    mode: str = "temperature"

    def __post_init__(self) -> None:
        mu0 = np.array(self.mu0, dtype=float, copy=True).reshape(-1)
        mu0.flags.writeable = False
        object.__setattr__(self, "mu0", mu0)
        if self.mode not in ("temperature", "constant"):
            raise ValueError(f"unknown viscosity mode {self.mode!r}")
        if mu0.size < 1 or not np.all(np.isfinite(mu0)):
            raise ValueError("mu0 must be non-empty and finite")
        if np.any(mu0 < 0.0):
            raise ValueError("viscosity coefficients must be nonnegative")
        if mu0.sum() <= 0.0:
            raise ValueError("total viscosity must be positive")

    @property
    def n(self) -> int:
        return self.mu0.size

    @classmethod
    def from_dict(cls, obj: dict) -> "ViscositySpec":
        return cls(np.asarray(obj["mu0"], dtype=float), str(obj.get("mode", "temperature")))

    def to_dict(self) -> dict:
        return {"mu0": list(map(float, self.mu0)), "mode": self.mode}


# ---------------------------------------------------------------------------
# raw evaluators on (tau, s); the ThermoState wrappers below are the
# published operation surface
# ---------------------------------------------------------------------------

def species_pressure(eos: EosSpec, tau: float, s: np.ndarray) -> np.ndarray:
    return eos.kappas * np.exp(s) * tau ** (-eos.gammas)


def total_pressure(eos: EosSpec, tau: float, s: np.ndarray) -> float:
    return float(species_pressure(eos, tau, s).sum())


def dp_dtau(eos: EosSpec, tau: float, s: np.ndarray) -> float:
    """Total dp/dtau, strictly negative for admissible laws."""
    return float(-(eos.gammas * eos.kappas * np.exp(s) * tau ** (-eos.gammas - 1.0)).sum())


def d2p_dtau2(eos: EosSpec, tau: float, s: np.ndarray) -> float:
    g = eos.gammas
    return float((g * (g + 1.0) * eos.kappas * np.exp(s) * tau ** (-g - 2.0)).sum())


def species_dp_ds(eos: EosSpec, tau: float, s: np.ndarray) -> np.ndarray:
    # dp_i/ds_i = p_i for the exponential entropy dependence
    return species_pressure(eos, tau, s)


def _species_energy(eos: EosSpec, tau: float, s: np.ndarray) -> np.ndarray:
    return eos.kappas * np.exp(s) * tau ** (1.0 - eos.gammas) / (eos.gammas - 1.0)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def pressure(eos: EosSpec, w: ThermoState) -> tuple[np.ndarray, float]:
    """Per-species pressures p_i(tau, s_i) and their total.

    Every p_i is positive for any valid state; the total is the plain sum.
    """
    _check_state(eos, w)
    ps = species_pressure(eos, w.tau, w.s)
    return ps, float(ps.sum())


def temperature(eos: EosSpec, w: ThermoState) -> np.ndarray:
    """Temperatures T_i = de_i/ds_i; equal to e_i for this family."""
    _check_state(eos, w)
    return _species_energy(eos, w.tau, w.s)


def species_internal_energy(eos: EosSpec, w: ThermoState) -> np.ndarray:
    _check_state(eos, w)
    return _species_energy(eos, w.tau, w.s)


def internal_energy(eos: EosSpec, w: ThermoState) -> float:
    """Total specific internal energy e(tau, s) = sum_i e_i(tau, s_i)."""
    _check_state(eos, w)
    return float(_species_energy(eos, w.tau, w.s).sum())


def sound_speed_sq(eos: EosSpec, w: ThermoState) -> float:
    """c^2 = -tau^2 * dp/dtau summed over species, positive."""
    _check_state(eos, w)
    return float((eos.gammas * eos.kappas * np.exp(w.s) * w.tau ** (1.0 - eos.gammas)).sum())


def species_viscosity(visc: ViscositySpec, eos: EosSpec, w: ThermoState) -> np.ndarray:
    """mu_i(w) under the chosen closure mode."""
    if visc.n != eos.n:
        raise ValueError("viscosity and EOS species counts differ")
    if visc.mode == "temperature":
        return visc.mu0 * temperature(eos, w)
    return visc.mu0.copy()


def _check_state(eos: EosSpec, w: ThermoState) -> None:
    if w.n != eos.n:
        raise ValueError(f"state has {w.n} entropies, EOS has {eos.n} species")


# ---------------------------------------------------------------------------
# hypothesis validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Rectangular (tau, s) sampling grid; the same s range applies to
    every species."""

    tau_min: float = 0.2
    tau_max: float = 5.0
    n_tau: int = 50
    s_min: float = -1.0
    s_max: float = 1.0
    n_s: int = 50

    def __post_init__(self) -> None:
        if not (0.0 < self.tau_min < self.tau_max):
            raise ValueError("need 0 < tau_min < tau_max")
        if self.n_tau < 2 or self.n_s < 2:
            raise ValueError("need at least 2 points per axis")
        if not self.s_min < self.s_max:
            raise ValueError("need s_min < s_max")

    @classmethod
    def from_dict(cls, obj: dict) -> "GridSpec":
        kwargs = dict(obj)
        for key in ("n_tau", "n_s"):
            if key in kwargs:
                kwargs[key] = int(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    worst: float
    detail: str = ""


@dataclass(frozen=True)
class HypothesisReport:
    checks: tuple[HypothesisCheck, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[HypothesisCheck]:
        return [c for c in self.checks if not c.passed]

    def by_name(self, name: str) -> HypothesisCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "all_pass": bool(self.all_pass),
            "checks": [
                {"name": c.name, "passed": bool(c.passed), "worst": float(c.worst),
                 "detail": c.detail}
                for c in self.checks
            ],
        }


# decay/growth factors any admissible law must show across the probe ladder
_LADDER_FACTOR = 1e3


def validate_hypotheses(eos: EosSpec, grid: GridSpec | None = None) -> HypothesisReport:
    """Check the structural hypotheses numerically on a sampling grid.

    Pointwise checks (positivity, dp_i/ds_i > 0, convexity of total p in
    tau) run on the full grid; asymptotic trends are probed on geometric
    ladders extending well past the grid; analytic derivatives are
    cross-checked against central finite differences with step
    h = 1e-6 * max(1, tau).  Violations are reported, never raised.
    """
    grid = grid or GridSpec()
    taus = np.linspace(grid.tau_min, grid.tau_max, grid.n_tau)
    svals = np.linspace(grid.s_min, grid.s_max, grid.n_s)
    checks: list[HypothesisCheck] = []

    with np.errstate(all="ignore"):
        checks.append(_check_pointwise(eos, taus, svals))
        checks.append(_check_entropy_monotonicity(eos, taus, svals))
        checks.append(_check_tau_convexity(eos, taus, svals))
        checks.append(_check_ladder(
            "pressure_asymptotics",
            eos, grid, svals,
            lambda tau, s: total_pressure(eos, tau, s),
            decreasing=True,
        ))
        checks.append(_check_ladder(
            "dp_dtau_asymptotics",
            eos, grid, svals,
            lambda tau, s: dp_dtau(eos, tau, s),
            decreasing=False, negative=True,
        ))
        checks.append(_check_entropy_steepening(eos, grid, svals))
        checks.append(_check_energy_asymptotics(eos, grid, svals))
        checks.append(_check_finite_differences(eos, taus, svals))

    return HypothesisReport(tuple(checks))


def _corner_rows(svals: np.ndarray, n: int) -> list[np.ndarray]:
    lo, hi, mid = svals[0], svals[-1], svals[svals.size // 2]
    return [np.full(n, lo), np.full(n, hi), np.full(n, mid)]


def _check_pointwise(eos, taus, svals) -> HypothesisCheck:
    worst = np.inf
    for srow in _corner_rows(svals, eos.n):
        for tau in taus:
            vals = np.concatenate([
                species_pressure(eos, tau, srow),
                _species_energy(eos, tau, srow),
            ])
            if not np.all(np.isfinite(vals)):
                return HypothesisCheck("positivity", False, float("nan"),
                                       "non-finite p_i or e_i on grid")
            worst = min(worst, float(vals.min()))
    return HypothesisCheck("positivity", worst > 0.0, worst,
                           "min over grid of p_i, T_i, e_i")


def _check_entropy_monotonicity(eos, taus, svals) -> HypothesisCheck:
    worst = np.inf
    for srow in _corner_rows(svals, eos.n):
        for tau in taus:
            worst = min(worst, float(species_dp_ds(eos, tau, srow).min()))
    return HypothesisCheck("entropy_monotonicity", bool(worst > 0.0), worst,
                           "min dp_i/ds_i over grid")


def _check_tau_convexity(eos, taus, svals) -> HypothesisCheck:
    worst = np.inf
    for srow in _corner_rows(svals, eos.n):
        for tau in taus:
            worst = min(worst, d2p_dtau2(eos, tau, srow))
    return HypothesisCheck("tau_convexity", bool(worst > 0.0), worst,
                           "min total d2p/dtau2 over grid")


def _check_ladder(name, eos, grid, svals, fn, *, decreasing, negative=False) -> HypothesisCheck:
    ladder = np.geomspace(grid.tau_min / 1e4, grid.tau_max * 1e4, 25)
    mid = ladder.size // 2
    ok = True
    worst = np.inf
    for srow in _corner_rows(svals, eos.n):
        vals = np.array([fn(tau, srow) for tau in ladder])
        if not np.all(np.isfinite(vals)):
            return HypothesisCheck(name, False, float("nan"), "non-finite values on ladder")
        if negative:
            ok &= bool(np.all(vals < 0.0))
            mags = -vals
        else:
            ok &= bool(np.all(vals > 0.0))
            mags = vals
        # magnitude must fall monotonically toward zero and blow up at small tau
        ok &= bool(np.all(np.diff(mags) < 0.0))
        growth = mags[0] / mags[mid]
        decay = mags[mid] / mags[-1]
        worst = min(worst, float(growth), float(decay))
        ok &= bool(growth > _LADDER_FACTOR and decay > _LADDER_FACTOR)
    return HypothesisCheck(name, ok, worst, "blow-up/decay factors across tau ladder")


def _check_entropy_steepening(eos, grid, svals) -> HypothesisCheck:
    # dp_i/dtau must steepen without bound as any single entropy grows
    tau = 0.5 * (grid.tau_min + grid.tau_max)
    base = np.full(eos.n, svals[-1])
    ok = True
    worst = np.inf
    for i in range(eos.n):
        mags = []
        for k in range(5):
            s = base.copy()
            s[i] += 5.0 * k
            g, kp = eos.gammas[i], eos.kappas[i]
            mags.append(g * kp * np.exp(s[i]) * tau ** (-g - 1.0))
        mags = np.array(mags)
        if not np.all(np.isfinite(mags)):
            return HypothesisCheck("entropy_steepening", False, float("nan"),
                                   "non-finite dp_i/dtau on s ladder")
        ratios = mags[1:] / mags[:-1]
        worst = min(worst, float(ratios.min()))
        ok &= bool(np.all(ratios > 10.0))
    return HypothesisCheck("entropy_steepening", ok, worst,
                           "growth of |dp_i/dtau| per +5 entropy increment")


def _check_energy_asymptotics(eos, grid, svals) -> HypothesisCheck:
    # internal energies may decay slowly (exponent gamma - 1), so probe a
    # much wider ladder and only demand a clear trend
    ladder = np.geomspace(grid.tau_min / 1e8, grid.tau_max * 1e8, 33)
    mid = ladder.size // 2
    ok = True
    worst = np.inf
    for srow in _corner_rows(svals, eos.n):
        vals = np.array([float(_species_energy(eos, tau, srow).sum()) for tau in ladder])
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
            return HypothesisCheck("energy_asymptotics", False, float("nan"),
                                   "non-finite or nonpositive energy on ladder")
        ok &= bool(np.all(np.diff(vals) < 0.0))
        growth = vals[0] / vals[mid]
        decay = vals[mid] / vals[-1]
        worst = min(worst, float(growth), float(decay))
        ok &= bool(growth > 2.0 and decay > 2.0)
    # e must also grow without bound in each entropy
    tau = 0.5 * (grid.tau_min + grid.tau_max)
    base = np.full(eos.n, svals[-1])
    for i in range(eos.n):
        mags = []
        for k in range(5):
            s = base.copy()
            s[i] += 5.0 * k
            mags.append(float(_species_energy(eos, tau, s)[i]))
        mags = np.array(mags)
        if not np.all(np.isfinite(mags)):
            return HypothesisCheck("energy_asymptotics", False, float("nan"),
                                   "non-finite energy on s ladder")
        ratios = mags[1:] / mags[:-1]
        worst = min(worst, float(ratios.min()))
        ok &= bool(np.all(ratios > 10.0))
    return HypothesisCheck("energy_asymptotics", ok, worst,
                           "blow-up/decay factors of total e across tau ladder")


def _check_finite_differences(eos, taus, svals) -> HypothesisCheck:
    # subsample the grid; full 50x50 FD everywhere buys nothing
    tsel = taus[:: max(1, taus.size // 8)]
    ssel = svals[:: max(1, svals.size // 4)]
    worst = 0.0
    for sval in ssel:
        srow = np.full(eos.n, sval)
        for tau in tsel:
            h = 1e-6 * max(1.0, abs(tau))
            fd_p = (total_pressure(eos, tau + h, srow) - total_pressure(eos, tau - h, srow)) / (2 * h)
            rel = abs(dp_dtau(eos, tau, srow) - fd_p) / abs(dp_dtau(eos, tau, srow))
            worst = max(worst, rel)
            # Maxwell: -de/dtau = p
            fd_e = (_species_energy(eos, tau + h, srow).sum()
                    - _species_energy(eos, tau - h, srow).sum()) / (2 * h)
            rel = abs(-fd_e - total_pressure(eos, tau, srow)) / total_pressure(eos, tau, srow)
            worst = max(worst, rel)
            # per-species entropy derivatives: dp_i/ds_i and T_i = de_i/ds_i
            hs = 1e-6
            for i in range(eos.n):
                sp, sm = srow.copy(), srow.copy()
                sp[i] += hs
                sm[i] -= hs
                fd = (species_pressure(eos, tau, sp)[i] - species_pressure(eos, tau, sm)[i]) / (2 * hs)
                ana = species_dp_ds(eos, tau, srow)[i]
                worst = max(worst, abs(fd - ana) / abs(ana))
                fd = (_species_energy(eos, tau, sp)[i] - _species_energy(eos, tau, sm)[i]) / (2 * hs)
                ana = _species_energy(eos, tau, srow)[i]
                worst = max(worst, abs(fd - ana) / abs(ana))
    return HypothesisCheck("fd_consistency", worst <= 1e-6, worst,
                           "max relative gap, analytic vs central differences")
