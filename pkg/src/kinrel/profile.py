"""Traveling-wave shooting for the multi-pressure viscous gas.

In the frame of the wave the profile obeys the autonomous system

    tau' = F(tau, s) / mu(tau, s),
    s_i' = mu_i(tau, s) * F(tau, s)^2 / (mu^2 T_i),

with F the pressure-balance residual of `endstate`.  The upstream state
omega_L is a rest point whose unstable manifold is one-dimensional and
tangent to the tau axis; launching a hair to the compressive side
(tau < tau_L) and integrating forward lands on the unique downstream
critical point.  The total specific energy combination H is an exact
first integral, so its drift along the computed orbit measures the
integrator error directly.

Integration uses an adaptive embedded 4(5) pair with dense output; the
run terminates when the residual and the whole vector field drop below
the stop tolerance on the subsonic side of the F landscape, or when the
pseudo-time budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp

from . import endstate as endlib
from . import eos as eoslib
from .endstate import EndstateContext
from .eos import EosSpec, ThermoState, ViscositySpec

__all__ = [
    "Tolerances",
    "ProfileProblem",
    "Orbit",
    "CONVERGED",
    "BUDGET_EXHAUSTED",
    "INVARIANT_VIOLATED",
    "F_residual",
    "hamiltonian",
    "vector_field",
    "shoot",
    "entropy_production",
    "write_orbit_csv",
]

CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget_exhausted"
INVARIANT_VIOLATED = "invariant_violated"

# the nominal launch offset; shrunk near the sonic limit so the hair
# stays inside the compressive pocket between the F-roots
_KICK_FRACTION = 1e-6


@dataclass(frozen=True)
class Tolerances:
    rel: float = 1e-10
    abs: float = 1e-12
    stop: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("rel", "abs", "stop"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"tolerance {name} must be positive, got {v}")


@dataclass(frozen=True, eq=False)
class ProfileProblem:
    """A shooting problem: upstream state, mass flux, closures, budgets.

    Construction checks the inflow Lax condition m > rho_L c_L; without
    it the upstream point has no unstable direction to launch from.
    """

    omega_L: ThermoState
    m: float
    eos: EosSpec
    visc: ViscositySpec
    tol: Tolerances = field(default_factory=Tolerances)
    t_max: float | None = None
    n_samples: int = 512
    kick: float | None = None  # launch offset override; default is computed

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", float(self.m))
        if self.visc.n != self.eos.n:
            raise ValueError("viscosity and EOS species counts differ")
        if self.n_samples < 2:
            raise ValueError("need at least 2 orbit samples")
        if self.kick is not None and not 0.0 < self.kick < self.omega_L.tau:
            raise ValueError("kick must sit in (0, tau_L)")
        _ = self.ctx  # validates species counts and the Lax condition

    @cached_property
    def ctx(self) -> EndstateContext:
        return EndstateContext(self.eos, self.omega_L, self.m)

    @property
    def t_budget(self) -> float:
        return self.t_max if self.t_max is not None else 1e6 / self.m


@dataclass(frozen=True, eq=False)
class Orbit:
    """A computed trajectory: samples at increasing pseudo-times, the
    terminal state, and the termination status."""

    t: np.ndarray
    tau: np.ndarray
    s: np.ndarray  # shape (M, N)
    F: np.ndarray
    H: np.ndarray
    terminal: ThermoState
    status: str
    h_drift_max: float
    exit_mach: float
    kick: float

    @property
    def n_samples(self) -> int:
        return self.t.size


def F_residual(w: ThermoState, prob: ProfileProblem) -> float:
    """Pressure-balance residual F(w) = p(w) - p_L + m^2 (tau - tau_L).

    Vanishes exactly at the upstream state and at every critical point of
    the profile dynamics.
    """
    return prob.ctx.F(w.tau, w.s)


def hamiltonian(w: ThermoState, prob: ProfileProblem) -> float:
    """First integral H(w); zero on the orbit through omega_L.

    Satisfies dH/dtau = -F at fixed s and dH/ds_i = T_i > 0.
    """
    return prob.ctx.H(w.tau, w.s)


def vector_field(w: ThermoState, prob: ProfileProblem) -> np.ndarray:
    """Right-hand side (tau', s_1'..s_N') of the profile system.

    The entropy components are nonnegative for every state; in
    temperature-proportional mode they are exact multiples of mu0.
    """
    mu_i = eoslib.species_viscosity(prob.visc, prob.eos, w)
    mu = float(mu_i.sum())
    if mu <= 0.0:
        raise ValueError("total viscosity must be positive")
    f = F_residual(w, prob)
    out = np.empty(prob.eos.n + 1)
    out[0] = f / mu
    if prob.visc.mode == "temperature":
        ratio = f / mu
        out[1:] = prob.visc.mu0 * (ratio * ratio)
    else:
        t_i = eoslib.temperature(prob.eos, w)
        out[1:] = mu_i * (f * f) / (mu * mu * t_i)
    return out


def shoot(prob: ProfileProblem) -> Orbit:
    """Integrate from the compressive hair off omega_L to the downstream
    critical point.

    Returns a converged orbit when |F| and the field norm fall under the
    stop tolerance on the subsonic side; `budget_exhausted` when the
    pseudo-time budget ran out first; `invariant_violated` when energy
    conservation, entropy monotonicity or the subsonic exit condition
    break beyond tolerance (an integrator misconfiguration, not a
    property of the model).
    """
    ctx = prob.ctx
    eos, visc = prob.eos, prob.visc
    n = eos.n
    gam, kap, mu0 = eos.gammas, eos.kappas, visc.mu0
    tau_L, s_L = ctx.tau_L, ctx.s_L
    m2, p_L = ctx.m2, ctx.p_L
    temp_mode = visc.mode == "temperature"
    fstop = prob.tol.stop * ctx.f_scale
    # the natural size of the tau-component of the field is F/mu; without
    # this factor the stop test sits below the integrator noise floor for
    # strong shocks
    mu_at_left = float(eoslib.species_viscosity(visc, eos, prob.omega_L).sum())
    xstop = prob.tol.stop * max(1.0, ctx.f_scale / mu_at_left)

    if prob.kick is not None:
        kick = prob.kick
    else:
        tau_bar_L = endlib.tau_bar(ctx, s_L)
        kick = min(_KICK_FRACTION * tau_L, 0.5 * (tau_L - tau_bar_L))
    y0 = np.empty(n + 1)
    y0[0] = tau_L - kick
    y0[1:] = s_L

    def rhs(t, y):
        tau = y[0]
        ps = kap * np.exp(y[1:]) * tau ** (-gam)
        f = ps.sum() - p_L + m2 * (tau - tau_L)
        mu_i = mu0 * (ps * tau / (gam - 1.0)) if temp_mode else mu0
        mu = mu_i.sum()
        out = np.empty(n + 1)
        out[0] = f / mu
        if temp_mode:
            r = f / mu
            out[1:] = mu0 * (r * r)
        else:
            t_i = ps * tau / (gam - 1.0)
            out[1:] = mu0 * (f * f) / (mu * mu * t_i)
        return out

    def stop_event(t, y):
        tau = y[0]
        ps = kap * np.exp(y[1:]) * tau ** (-gam)
        f = ps.sum() - p_L + m2 * (tau - tau_L)
        df = m2 - (gam * ps).sum() / tau
        if df >= 0.0:
            return 1.0  # still on the supersonic side; never stop here
        field = rhs(t, y)
        return max(abs(f) / fstop, np.abs(field).max() / xstop) - 1.0

    stop_event.terminal = True
    stop_event.direction = -1.0

    if stop_event(0.0, y0) <= 0.0:
        # vanishing-strength wave: the launch point already satisfies the
        # stop test, nothing to integrate
        return _assemble(prob, np.array([0.0]), y0[None, :], CONVERGED, kick)

    sol = solve_ivp(
        rhs,
        (0.0, prob.t_budget),
        y0,
        method="RK45",
        rtol=prob.tol.rel,
        atol=prob.tol.abs,
        dense_output=True,
        events=[stop_event],
    )
    if not sol.success and sol.status != 1:
        return _assemble(prob, sol.t, sol.y.T, INVARIANT_VIOLATED, kick)

    converged = sol.t_events[0].size > 0
    if not converged and stop_event(sol.t[-1], sol.y[:, -1]) <= 0.0:
        # the event machinery can step over the threshold when the
        # residual jitters at the noise floor; the terminal point itself
        # passing the stop test is what "reached" means
        converged = True
    t_end = float(sol.t[-1])
    t_grid = np.linspace(0.0, t_end, max(prob.n_samples, 2))
    ygrid = sol.sol(t_grid).T
    status = CONVERGED if converged else BUDGET_EXHAUSTED
    return _assemble(prob, t_grid, ygrid, status, kick)


def _assemble(prob: ProfileProblem, t: np.ndarray, y: np.ndarray,
              status: str, kick: float) -> Orbit:
    ctx = prob.ctx
    eos = prob.eos
    gam, kap = eos.gammas, eos.kappas
    tau = y[:, 0]
    s = y[:, 1:]
    ps = kap[None, :] * np.exp(s) * tau[:, None] ** (-gam[None, :])
    p_tot = ps.sum(axis=1)
    f_arr = p_tot - ctx.p_L + ctx.m2 * (tau - ctx.tau_L)
    e_tot = (ps * tau[:, None] / (gam[None, :] - 1.0)).sum(axis=1)
    h_arr = (e_tot - ctx.e_L - 0.5 * ctx.m2 * (tau ** 2 - ctx.tau_L ** 2)
             + (ctx.m2 * ctx.tau_L + ctx.p_L) * (tau - ctx.tau_L))
    h_drift_max = float(np.abs(h_arr).max())

    # invariant checks; failures mean the integration, not the model, is off
    drift_bound = 100.0 * prob.tol.rel * ctx.h_scale
    if np.any(tau <= 0.0):
        status = INVARIANT_VIOLATED
    elif s.shape[0] > 1 and np.any(np.diff(s, axis=0) < -1e-12):
        status = INVARIANT_VIOLATED
    elif h_drift_max > drift_bound:
        status = INVARIANT_VIOLATED

    terminal = ThermoState(tau[-1], s[-1])
    c_sq = eoslib.sound_speed_sq(eos, terminal)
    exit_mach = prob.m * terminal.tau / np.sqrt(c_sq)
    if status == CONVERGED:
        # subsonic exit, up to the stop tolerance
        df_end = ctx.m2 + eoslib.dp_dtau(eos, terminal.tau, terminal.s)
        if df_end > prob.tol.stop * ctx.f_scale:
            status = INVARIANT_VIOLATED

    for arr in (t, tau, s, f_arr, h_arr):
        arr.flags.writeable = False
    return Orbit(t, tau, s, f_arr, h_arr, terminal, status,
                 h_drift_max, float(exit_mach), kick)


def entropy_production(orbit: Orbit, prob: ProfileProblem) -> np.ndarray:
    """Per-species production rates m * (s_i^R - s_i^L), nonnegative.

    Species with zero viscosity coefficient produce exactly zero.
    """
    if orbit.status != CONVERGED:
        raise ValueError(f"orbit did not converge (status={orbit.status!r})")
    return prob.m * (orbit.terminal.s - prob.omega_L.s)


def write_orbit_csv(orbit: Orbit, path) -> None:
    """CSV export with header t,tau,s_1..s_N,F,H_drift at 17 significant
    digits."""
    n = orbit.s.shape[1]
    header = "t,tau," + ",".join(f"s_{i + 1}" for i in range(n)) + ",F,H_drift"
    lines = [header]
    for k in range(orbit.t.size):
        cells = [_fmt(orbit.t[k]), _fmt(orbit.tau[k])]
        cells += [_fmt(x) for x in orbit.s[k]]
        cells += [_fmt(orbit.F[k]), _fmt(orbit.H[k])]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"
