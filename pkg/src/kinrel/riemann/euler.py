"""Riemann solver for the multi-pressure gas with kinetic shock closures.

The smooth system conserves (rho, rho*u, rho*s_1..rho*s_N); across shocks
the entropy components are not conserved and the jump system is closed by
a kinetic relation: the per-species entropy jumps point along a prescribed
cone direction with a magnitude fixed by the traveling-wave energy
balance (exactly the F = 0, H = 0 system of `endstate`).  The wave
pattern is classical: an extreme left wave, a bundle of contact fields
moving with the flow speed across which velocity and total pressure are
continuous while the per-species (tau, s_i) jump freely, and an extreme
right wave handled by the x -> -x reflection.

The star solve iterates on the total star pressure: each side's wave
curve returns the velocity behind the wave, and the scalar matching
equation is driven to zero by bisection plus a Newton polish.  Shock
points on the curve come from a damped 2x2 Newton on the exact closure
(pressure residual and Hugoniot energy), with a nested-bisection fallback
when the Newton iteration stalls.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .. import eos as eoslib
from ..endstate import ConeDirection
from ..eos import EosSpec, ThermoState
from ..errors import (
    BracketFailure,
    NoConvergence,
    ResonanceGuard,
    VacuumFormation,
)
from ..rootfind import MAX_EXPANSIONS, solve_bracketed

__all__ = [
    "FluidState",
    "MultiPressureEulerFlux",
    "Wave",
    "WaveFan",
    "entropy_dissipation",
    "entropy_dissipation_pair",
    "solve_riemann_mp_euler",
    "write_solution_csv",
]


@dataclass(frozen=True, eq=False)
class FluidState:
    """Primitive state (rho, u, s_1..s_N)."""

    rho: float
    u: float
    s: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "u", float(self.u))
        s = np.array(self.s, dtype=float, copy=True).reshape(-1)
        s.flags.writeable = False
        object.__setattr__(self, "s", s)
        if not (np.isfinite(self.rho) and self.rho > 0.0):
            raise ValueError(f"density must be positive, got {self.rho}")
        if not np.isfinite(self.u):
            raise ValueError("velocity must be finite")
        if s.size < 1 or not np.all(np.isfinite(s)):
            raise ValueError("entropy vector must be non-empty and finite")

    @property
    def n(self) -> int:
        return self.s.size

    @property
    def tau(self) -> float:
        return 1.0 / self.rho

    def thermo(self) -> ThermoState:
        return ThermoState(self.tau, self.s)

    def conserved(self) -> np.ndarray:
        return np.concatenate(([self.rho, self.rho * self.u], self.rho * self.s))

    @classmethod
    def from_conserved(cls, cons: np.ndarray) -> "FluidState":
        cons = np.asarray(cons, dtype=float)
        rho = cons[0]
        return cls(rho, cons[1] / rho, cons[2:] / rho)

    def reflected(self) -> "FluidState":
        return FluidState(self.rho, -self.u, self.s)

    def to_dict(self) -> dict:
        return {"rho": self.rho, "u": self.u, "s": [float(x) for x in self.s]}


class MultiPressureEulerFlux:
    """Flux and characteristic structure in the conserved variables
    (rho, rho*u, rho*s_i)."""

    def __init__(self, eos: EosSpec):
        self.eos = eos

    @property
    def n(self) -> int:
        return self.eos.n

    def flux(self, cons: np.ndarray) -> np.ndarray:
        rho = cons[0]
        u = cons[1] / rho
        s = cons[2:] / rho
        p = eoslib.total_pressure(self.eos, 1.0 / rho, s)
        out = np.empty_like(cons)
        out[0] = cons[1]
        out[1] = cons[1] * u + p
        out[2:] = cons[2:] * u
        return out

    def jacobian(self, cons: np.ndarray) -> np.ndarray:
        m = cons.size
        jac = np.empty((m, m))
        for j in range(m):
            h = 1e-7 * max(1.0, abs(cons[j]))
            up, dn = cons.copy(), cons.copy()
            up[j] += h
            dn[j] -= h
            jac[:, j] = (self.flux(up) - self.flux(dn)) / (2.0 * h)
        return jac

    def sound_speed(self, state: FluidState) -> float:
        return float(np.sqrt(eoslib.sound_speed_sq(self.eos, state.thermo())))

    def lambda_family(self, state: FluidState, family: int) -> float:
        """Characteristic speed of the extreme family (1 or n+2) or of the
        contact bundle (anything in between)."""
        if family == 1:
            return state.u - self.sound_speed(state)
        if family == self.n + 2:
            return state.u + self.sound_speed(state)
        return state.u

    def eigen_extreme(self, state: FluidState, family: int) -> tuple[float, np.ndarray, np.ndarray]:
        """(lambda_j, r_j, l_j) for an extreme family, with r_j unit norm
        and l_j . r_j = 1.  The extreme eigenvalues are simple (u -+ c with
        c > 0), so the left eigenvector comes from the transposed Jacobian
        without touching the degenerate contact subspace."""
        cons = state.conserved()
        jac = self.jacobian(cons)
        vals, vecs = np.linalg.eig(jac)
        idx = int(np.argmin(vals.real)) if family == 1 else int(np.argmax(vals.real))
        lam = float(vals[idx].real)
        r = vecs[:, idx].real
        r = r / np.linalg.norm(r)
        lvals, lvecs = np.linalg.eig(jac.T)
        jdx = int(np.argmin(np.abs(lvals.real - lam)))
        l = lvecs[:, jdx].real
        l = l / float(l @ r)
        return lam, r, l


# ---------------------------------------------------------------------------
# entropy dissipation
# ---------------------------------------------------------------------------

def entropy_dissipation(k: int, lam: float, u0: FluidState, u1: FluidState) -> float:
    """Dissipation rate of the k-th species entropy pair (U, F) =
    (rho s_k, rho s_k u) across a jump from u0 to u1 moving at lam.

    Equals m * (s_k^1 - s_k^0) with m the relative mass flux whenever the
    mass jump relation holds; nonnegative across admissible waves in this
    specific-entropy convention.
    """
    return entropy_dissipation_pair(
        lambda state: state.rho * state.s[k],
        lambda state: state.rho * state.s[k] * state.u,
        lam, u0, u1,
    )


def entropy_dissipation_pair(U, F, lam: float, u0: FluidState, u1: FluidState) -> float:
    """Generic rate -lam*(U(u1)-U(u0)) + F(u1) - F(u0) for a user pair."""
    return float(-lam * (U(u1) - U(u0)) + F(u1) - F(u0))


def _species_dissipation(lam: float, u0: FluidState, u1: FluidState) -> np.ndarray:
    return (-lam * (u1.rho * u1.s - u0.rho * u0.s)
            + (u1.rho * u1.s * u1.u - u0.rho * u0.s * u0.u))


# ---------------------------------------------------------------------------
# scalar helpers on the EOS
# ---------------------------------------------------------------------------

def _tau_at_pressure(eos: EosSpec, s: np.ndarray, target: float, tau_start: float) -> float:
    """Solve p(tau, s) = target; p is strictly decreasing in tau."""
    f = lambda tau: eoslib.total_pressure(eos, tau, s) - target
    df = lambda tau: eoslib.dp_dtau(eos, tau, s)
    f0 = f(tau_start)
    if f0 == 0.0:
        return tau_start
    if f0 > 0.0:  # pressure too high: move to larger tau
        lo, flo = tau_start, f0
        hi = 2.0 * tau_start
        fhi = f(hi)
        for _ in range(MAX_EXPANSIONS):
            if fhi < 0.0:
                break
            lo, flo = hi, fhi
            hi *= 2.0
            fhi = f(hi)
        else:
            raise BracketFailure("pressure target not reachable at large tau")
    else:
        hi, fhi = tau_start, f0
        lo = 0.5 * tau_start
        flo = f(lo)
        for _ in range(MAX_EXPANSIONS):
            if flo > 0.0:
                break
            hi, fhi = lo, flo
            lo *= 0.5
            flo = f(lo)
        else:
            raise BracketFailure("pressure target not reachable at small tau")
    return solve_bracketed(f, lo, hi, df=df, flo=flo, fhi=fhi)


def _rarefaction_du(eos: EosSpec, s: np.ndarray, tau_a: float, tau_b: float,
                    steps: int = 256) -> float:
    """integral of c(tau, s)/tau over [tau_a, tau_b] by fixed-step RK4 in
    log-volume (where the integrand is smooth even for deep expansions;
    the midpoint stages collapse to Simpson weights for a pure
    quadrature), refined until a Richardson halving check settles."""
    w = eos.gammas * eos.kappas * np.exp(s)
    expo = 1.0 - eos.gammas
    x_a, x_b = np.log(tau_a), np.log(tau_b)

    def g(x: np.ndarray) -> np.ndarray:
        # c(tau) with tau = e^x; the 1/tau of the integrand cancels the
        # Jacobian of the substitution
        return np.sqrt((w[None, :] * np.exp(np.outer(x, expo))).sum(axis=1))

    def quad(nsteps: int) -> float:
        h = (x_b - x_a) / nsteps
        edges = x_a + h * np.arange(nsteps + 1)
        mids = edges[:-1] + 0.5 * h
        ge = g(edges)
        gm = g(mids)
        return float(h * (ge[:-1] + 4.0 * gm + ge[1:]).sum() / 6.0)

    coarse = quad(steps // 2)
    fine = quad(steps)
    for _ in range(4):
        if abs(fine - coarse) <= 1e-12 * (1.0 + abs(fine)):
            break
        steps *= 2
        coarse, fine = fine, quad(steps)
    return fine


def _kinetic_shock_for_pressure(eos: EosSpec, ahead: ThermoState, a: ConeDirection,
                                p_star: float) -> tuple[float, float, float]:
    """Shock point of the kinetic wave curve at total pressure p_star.

    Solves, for (tau, lambda_jump) with s = s_ahead + lambda_jump * a,

        p(tau, s) = p_star,
        e(tau, s) - e_a + (p_star + p_a)/2 * (tau - tau_a) = 0,

    which is the F = 0, H = 0 closure re-parametrized by the downstream
    pressure.  Returns (tau, lambda_jump, m).
    """
    av = a.a
    tau_a = ahead.tau
    p_a = eoslib.total_pressure(eos, tau_a, ahead.s)
    e_a = float(eoslib._species_energy(eos, tau_a, ahead.s).sum())
    if p_star <= p_a:
        raise ValueError("shock branch needs p_star > ahead pressure")
    half = 0.5 * (p_star + p_a)

    def residual(tau: float, lam: float) -> np.ndarray:
        s = ahead.s + lam * av
        p = eoslib.total_pressure(eos, tau, s)
        e = float(eoslib._species_energy(eos, tau, s).sum())
        return np.array([p - p_star, e - e_a + half * (tau - tau_a)])

    def jac(tau: float, lam: float) -> np.ndarray:
        s = ahead.s + lam * av
        ps = eoslib.species_pressure(eos, tau, s)
        t_i = eoslib._species_energy(eos, tau, s)
        return np.array([
            [eoslib.dp_dtau(eos, tau, s), float(ps @ av)],
            [-float(ps.sum()) + half, float(t_i @ av)],
        ])

    tau = _tau_at_pressure(eos, ahead.s, p_star, tau_a)  # isentropic start
    lam = 0.0
    scale = np.array([max(p_star, p_a), abs(e_a) + p_a * tau_a])
    r = residual(tau, lam)
    for _ in range(60):
        if np.all(np.abs(r) <= 1e-13 * scale):
            break
        try:
            step = np.linalg.solve(jac(tau, lam), -r)
        except np.linalg.LinAlgError:
            break
        alpha = 1.0
        improved = False
        for _ in range(40):
            tn = tau + alpha * step[0]
            ln = lam + alpha * step[1]
            if tn > 0.0 and ln >= 0.0:
                rn = residual(tn, ln)
                if np.linalg.norm(rn / scale) <= np.linalg.norm(r / scale):
                    tau, lam, r = tn, ln, rn
                    improved = True
                    break
            alpha *= 0.5
        if not improved:
            break
    else:
        pass
    if not np.all(np.abs(r) <= 1e-11 * scale):
        tau, lam = _kinetic_shock_fallback(eos, ahead, a, p_star, half, e_a, p_a)
    if tau >= tau_a:
        raise NoConvergence("shock closure produced no compression")
    m = float(np.sqrt((p_star - p_a) / (tau_a - tau)))
    return tau, lam, m


def _kinetic_shock_fallback(eos, ahead, a, p_star, half, e_a, p_a):
    # nested bisection: monotone outer residual in the jump magnitude
    av = a.a
    tau_a = ahead.tau

    def tau_of(lam: float) -> float:
        return _tau_at_pressure(eos, ahead.s + lam * av, p_star, tau_a)

    def outer(lam: float) -> float:
        tau = tau_of(lam)
        s = ahead.s + lam * av
        e = float(eoslib._species_energy(eos, tau, s).sum())
        return e - e_a + half * (tau - tau_a)

    lo, flo = 0.0, outer(0.0)
    if flo > 0.0:
        raise NoConvergence("energy residual positive on the isentrope")
    hi = 1e-3
    fhi = outer(hi)
    for _ in range(MAX_EXPANSIONS):
        if fhi > 0.0:
            break
        lo, flo = hi, fhi
        hi *= 2.0
        fhi = outer(hi)
    else:
        raise BracketFailure("no entropy jump closes the energy balance")
    lam = solve_bracketed(outer, lo, hi, flo=flo, fhi=fhi)
    return tau_of(lam), lam


# ---------------------------------------------------------------------------
# wave fan
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Wave:
    """One wave of the fan.  Shocks and contacts carry a single speed
    (head == tail); rarefactions span [head, tail].  ``left``/``right``
    are the states on either side in the actual (unreflected) frame."""

    kind: str  # "shock" | "rarefaction" | "contact"
    family: int
    speed_head: float
    speed_tail: float
    left: FluidState
    right: FluidState
    dissipation: np.ndarray
    mass_flux: float | None = None      # relative flux rho (u - speed)
    lax_margins: tuple[float, float] | None = None
    fan_tau: np.ndarray | None = None   # rarefaction interior tables
    fan_u: np.ndarray | None = None
    fan_xi: np.ndarray | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "family": self.family,
            "speed_head": self.speed_head,
            "speed_tail": self.speed_tail,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "dissipation": [float(x) for x in self.dissipation],
        }
        if self.mass_flux is not None:
            out["mass_flux"] = self.mass_flux
        if self.lax_margins is not None:
            out["lax_margins"] = list(self.lax_margins)
        return out


@dataclass(frozen=True, eq=False)
class WaveFan:
    """A solved Riemann problem: ordered waves and the star states."""

    left: FluidState
    right: FluidState
    waves: tuple[Wave, ...]
    star_left: FluidState
    star_right: FluidState
    p_star: float
    u_star: float
    eos: EosSpec

    def speeds(self) -> list[float]:
        out = []
        for w in self.waves:
            out.extend([w.speed_head, w.speed_tail])
        return out

    def sample(self, xi) -> dict[str, np.ndarray]:
        """Evaluate the self-similar solution at ratios xi = x/t."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        n = self.left.n
        rho = np.empty(xi.size)
        u = np.empty(xi.size)
        s = np.empty((xi.size, n))
        for i, x in enumerate(xi):
            st = self._state_at(float(x))
            rho[i], u[i], s[i] = st.rho, st.u, st.s
        p = np.array([eoslib.total_pressure(self.eos, 1.0 / rho[i], s[i])
                      for i in range(xi.size)])
        return {"xi": xi, "rho": rho, "u": u, "p_total": p, "s": s}

    def _state_at(self, x: float) -> FluidState:
        state = self.left
        for w in self.waves:
            if x < w.speed_head:
                return state
            if x <= w.speed_tail and w.kind == "rarefaction" and w.fan_xi is not None:
                tau = float(np.interp(x, w.fan_xi, w.fan_tau))
                uu = float(np.interp(x, w.fan_xi, w.fan_u))
                return FluidState(1.0 / tau, uu, w.left.s)
            if x <= w.speed_tail:
                return w.right
            state = w.right
        return state

    def to_dict(self) -> dict:
        return {
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "star_left": self.star_left.to_dict(),
            "star_right": self.star_right.to_dict(),
            "p_star": self.p_star,
            "u_star": self.u_star,
            "waves": [w.to_dict() for w in self.waves],
        }


def write_solution_csv(fan: WaveFan, xi, path) -> None:
    """Sampled solution CSV with header xi,rho,u,p_total,s_1..s_N."""
    data = fan.sample(xi)
    n = fan.left.n
    header = "xi,rho,u,p_total," + ",".join(f"s_{i + 1}" for i in range(n))
    lines = [header]
    for i in range(data["xi"].size):
        cells = [_fmt(data["xi"][i]), _fmt(data["rho"][i]), _fmt(data["u"][i]),
                 _fmt(data["p_total"][i])]
        cells += [_fmt(x) for x in data["s"][i]]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# star solve
# ---------------------------------------------------------------------------

_TRIVIAL_REL = 1e-12  # waves weaker than this in pressure are zero-strength


def solve_riemann_mp_euler(
    left: FluidState,
    right: FluidState,
    a_L: ConeDirection,
    a_R: ConeDirection,
    eos: EosSpec,
    *,
    closure: str = "kinetic",
    resonance_guard: float = 1e-6,
) -> WaveFan:
    """Solve the Riemann problem with kinetic shock branches.

    ``closure`` selects the shock relation: "kinetic" uses the
    traveling-wave end states along the given cone directions;
    "isentropic" freezes every entropy across shocks (the identically
    zero kinetic function).  Raises ``VacuumFormation`` when the data
    pull the star pressure to zero and ``ResonanceGuard`` when either
    datum is within the guard of sonic.
    """
    if left.n != right.n or left.n != eos.n:
        raise ValueError("state and EOS species counts differ")
    if closure not in ("kinetic", "isentropic"):
        raise ValueError(f"unknown closure {closure!r}")
    flux = MultiPressureEulerFlux(eos)
    for st in (left, right):
        c2 = eoslib.sound_speed_sq(eos, st.thermo())
        if abs(1.0 - st.u * st.u / c2) < resonance_guard:
            raise ResonanceGuard(
                f"|1 - u^2/c^2| = {abs(1.0 - st.u * st.u / c2):.3e} at a datum")

    p_left = eoslib.total_pressure(eos, left.tau, left.s)
    p_right = eoslib.total_pressure(eos, right.tau, right.s)

    def u_left_star(p: float) -> float:
        return _behind_velocity(eos, left, a_L, p, p_left, closure)

    def u_right_star(p: float) -> float:
        # reflect, treat as a left wave, reflect back
        return -_behind_velocity(eos, right.reflected(), a_R, p, p_right, closure)

    gap = lambda p: u_left_star(p) - u_right_star(p)

    p_floor = 1e-10 * min(p_left, p_right)
    if gap(p_floor) <= 0.0:
        raise VacuumFormation("data drive the star pressure to zero")
    p_star = _match_star_pressure(gap, p_left, p_right, left, right, flux, p_floor)
    u_star = 0.5 * (u_left_star(p_star) + u_right_star(p_star))

    left_wave, star_l = _build_extreme_wave(eos, flux, left, a_L, p_star, p_left,
                                            u_star, closure, side=+1)
    right_wave, star_r = _build_extreme_wave(eos, flux, right, a_R, p_star, p_right,
                                             u_star, closure, side=-1)
    contact = Wave("contact", 2, u_star, u_star, star_l, star_r,
                   np.zeros(eos.n))
    waves = (left_wave, contact, right_wave)
    _check_ordering(waves)
    return WaveFan(left, right, waves, star_l, star_r, float(p_star),
                   float(u_star), eos)


def _match_star_pressure(gap, p_left, p_right, left, right, flux,
                         p_floor) -> float:
    """Drive the velocity mismatch to zero: damped Newton from the
    linearized (acoustic) pressure guess, with a bracketed bisection
    fallback when the iteration leaves its attraction basin."""
    c_l, c_r = flux.sound_speed(left), flux.sound_speed(right)
    z_l, z_r = left.rho * c_l, right.rho * c_r
    vel_scale = max(1.0, abs(left.u), abs(right.u), c_l, c_r)
    tol = 1e-11 * vel_scale

    p = 0.5 * (p_left + p_right) - 0.125 * (right.u - left.u) * (z_l + z_r)
    p = min(max(p, 10.0 * p_floor), 4.0 * max(p_left, p_right))
    g = gap(p)
    for _ in range(30):
        if abs(g) <= tol:
            return p
        h = 1e-7 * p
        slope = (gap(p + h) - gap(p - h)) / (2.0 * h)
        if not np.isfinite(slope) or slope >= 0.0:
            break  # the mismatch must decrease in p; fall back
        step = -g / slope
        improved = False
        for _ in range(30):
            pn = p + step
            if pn > p_floor:
                gn = gap(pn)
                if abs(gn) < abs(g):
                    p, g = pn, gn
                    improved = True
                    break
            step *= 0.5
        if not improved:
            break
    if abs(g) <= tol:
        return p

    p_hi = 2.0 * max(p_left, p_right)
    ghi = gap(p_hi)
    for _ in range(MAX_EXPANSIONS):
        if ghi < 0.0:
            break
        p_hi *= 2.0
        ghi = gap(p_hi)
    else:
        raise NoConvergence("no star pressure matches the velocities")
    return solve_bracketed(gap, p_floor, p_hi, fhi=ghi)


def _behind_velocity(eos, ahead: FluidState, a: ConeDirection, p: float,
                     p_ahead: float, closure: str) -> float:
    """Velocity behind the left-family wave at star pressure p (the right
    family is handled by reflection upstream)."""
    if p > p_ahead * (1.0 + _TRIVIAL_REL):
        if closure == "kinetic":
            tau, _, m = _kinetic_shock_for_pressure(eos, ahead.thermo(), a, p)
        else:
            tau = _tau_at_pressure(eos, ahead.s, p, ahead.tau)
            m = float(np.sqrt((p - p_ahead) / (ahead.tau - tau)))
        return ahead.u - m * (ahead.tau - tau)
    if p < p_ahead * (1.0 - _TRIVIAL_REL):
        tau = _tau_at_pressure(eos, ahead.s, p, ahead.tau)
        return ahead.u + _rarefaction_du(eos, ahead.s, ahead.tau, tau)
    return ahead.u


def _build_extreme_wave(eos, flux, ahead: FluidState, a: ConeDirection,
                        p_star: float, p_ahead: float, u_star: float,
                        closure: str, side: int):
    """Construct the left (side=+1) or right (side=-1) extreme wave and its
    star-side state; the right side works in the reflected frame."""
    work = ahead if side > 0 else ahead.reflected()
    family = 1 if side > 0 else eos.n + 2

    if p_star > p_ahead * (1.0 + _TRIVIAL_REL):
        if closure == "kinetic":
            tau, lam_jump, m = _kinetic_shock_for_pressure(eos, work.thermo(), a, p_star)
            s_star = work.s + lam_jump * a.a
        else:
            tau = _tau_at_pressure(eos, work.s, p_star, work.tau)
            m = float(np.sqrt((p_star - p_ahead) / (work.tau - tau)))
            s_star = work.s.copy()
        speed_w = work.u - m * work.tau
        behind_w = FluidState(1.0 / tau, speed_w + m * tau, s_star)
        if side > 0:
            speed, behind = speed_w, behind_w
            w_left, w_right = ahead, behind
        else:
            speed, behind = -speed_w, behind_w.reflected()
            w_left, w_right = behind, ahead
        diss = _species_dissipation(speed, w_left, w_right)
        c_ahead = flux.sound_speed(ahead)
        c_behind = flux.sound_speed(behind)
        if side > 0:
            margins = ((ahead.u - c_ahead) - speed, speed - (behind.u - c_behind))
        else:
            margins = ((behind.u + c_behind) - speed, speed - (ahead.u + c_ahead))
        wave = Wave("shock", family, speed, speed, w_left, w_right, diss,
                    mass_flux=m if side > 0 else -m,
                    lax_margins=(float(margins[0]), float(margins[1])))
        return wave, behind

    if p_star < p_ahead * (1.0 - _TRIVIAL_REL):
        tau_star = _tau_at_pressure(eos, work.s, p_star, work.tau)
        taus = np.linspace(work.tau, tau_star, 129)
        us = np.empty(taus.size)
        us[0] = work.u
        for k in range(1, taus.size):
            us[k] = us[k - 1] + _rarefaction_du(eos, work.s, taus[k - 1], taus[k], steps=8)
        cs = np.sqrt([eoslib.sound_speed_sq(eos, ThermoState(t, work.s)) for t in taus])
        xis = us - cs
        behind_w = FluidState(1.0 / tau_star, us[-1], work.s)
        if side > 0:
            behind = behind_w
            head, tail = float(xis[0]), float(xis[-1])
            fan_xi, fan_tau, fan_u = xis, taus, us
            w_left, w_right = ahead, behind
        else:
            behind = behind_w.reflected()
            head, tail = float(-xis[-1]), float(-xis[0])
            fan_xi = -xis[::-1]
            fan_tau = taus[::-1].copy()
            fan_u = -us[::-1]
            w_left, w_right = behind, ahead
        wave = Wave("rarefaction", family, head, tail, w_left, w_right,
                    np.zeros(eos.n), fan_tau=fan_tau, fan_u=fan_u, fan_xi=fan_xi)
        return wave, behind

    # zero-strength wave
    lam = flux.lambda_family(ahead, family)
    behind = FluidState(ahead.rho, ahead.u, ahead.s)
    return Wave("rarefaction", family, lam, lam, ahead, behind,
                np.zeros(eos.n)), behind


def _check_ordering(waves: Sequence[Wave]) -> None:
    speeds = []
    for w in waves:
        speeds.extend([w.speed_head, w.speed_tail])
    arr = np.asarray(speeds)
    slack = 1e-8 * max(1.0, float(np.abs(arr).max()))
    if np.any(np.diff(arr) < -slack):
        raise NoConvergence(f"wave speeds out of order: {speeds}")
