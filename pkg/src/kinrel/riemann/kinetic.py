"""Kinetic jump closures: generalized Hugoniot states and their checks.

A kinetic function maps a supersonic-side state and a shock speed to the
vector of entropy dissipation rates that closes the otherwise
underdetermined jump system.  The traveling-wave closure evaluates the
profile end states of `endstate` on demand; the zero closure reproduces
the conservative jump relations.  Both extreme families are supported,
the right one through the x -> -x reflection: ``u_minus`` always denotes
the state on the supersonic side of the wave.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import endstate as endlib
from .. import eos as eoslib
from ..endstate import ConeDirection, EndstateContext
from ..eos import EosSpec, ThermoState
from ..errors import DomainError, NoConvergence
from ..rootfind import MAX_EXPANSIONS, solve_bracketed
from .euler import FluidState, MultiPressureEulerFlux

__all__ = [
    "KineticFunction",
    "zero_kinetic_function",
    "traveling_wave_kinetic_function",
    "kinetic_from_states",
    "kinetic_hugoniot",
    "TangencyReport",
    "hugoniot_tangency_check",
    "KineticFunctionReport",
    "validate_kinetic_function",
]


@dataclass(frozen=True, eq=False)
class KineticFunction:
    """Entropy-dissipation closure Phi(u_minus, Lambda) -> R^N.

    ``family`` names the attached extreme characteristic family (1 or
    N+2); ``direction``, when present, is the cone direction the entropy
    jumps point along.  The map vanishes at Lambda = lambda_family(u) and
    on the wrong side of it.
    """

    func: Callable[[FluidState, float], np.ndarray]
    family: int
    direction: ConeDirection | None = None

    def __call__(self, u_minus: FluidState, lam: float) -> np.ndarray:
        return np.asarray(self.func(u_minus, lam), dtype=float)

    def full(self, u_minus: FluidState, lam: float) -> np.ndarray:
        """The closure padded with zeros on the conservative components."""
        out = np.zeros(u_minus.n + 2)
        out[2:] = self(u_minus, lam)
        return out


def zero_kinetic_function(n: int, family: int = 1) -> KineticFunction:
    """The identically-zero closure: plain Rankine-Hugoniot relations."""
    return KineticFunction(lambda u, lam: np.zeros(n), family)


def traveling_wave_kinetic_function(eos: EosSpec, a: ConeDirection,
                                    family: int = 1) -> KineticFunction:
    """Closure generated by viscous profiles with viscosity ratios along a.

    For speeds at or beyond the attached characteristic (no compressive
    wave) the closure extends by zero, matching the cubic flatness of the
    dissipation at the sonic point.
    """
    if family not in (1, eos.n + 2):
        raise ValueError("kinetic closures attach to the extreme families")

    def phi(u_minus: FluidState, lam: float) -> np.ndarray:
        work, speed = (u_minus, lam) if family == 1 else (u_minus.reflected(), -lam)
        m = work.rho * (work.u - speed)
        w = work.thermo()
        c = np.sqrt(eoslib.sound_speed_sq(eos, w))
        if m <= work.rho * c * (1.0 + 1e-15):
            return np.zeros(eos.n)
        # in the working (family-1) frame m is positive and the behind
        # entropy is s + jump * a, so the closure reads m * jump * a for
        # both families
        jump = _entropy_jump_for_m(eos, w, a, float(m))
        return m * jump * a.a

    return KineticFunction(phi, family, a)


def tabulated_kinetic_function(eos: EosSpec, a: ConeDirection,
                               ahead: ThermoState, family: int = 1,
                               margin_range: tuple[float, float] = (1e-4, 1.0),
                               count: int = 48) -> KineticFunction:
    """Sampled-table variant of the traveling-wave closure.

    Precomputes the entropy-jump magnitude on a log grid of relative Lax
    margins for one fixed supersonic-side thermodynamic state and
    interpolates monotonically (PCHIP) in the relative mass flux, which
    trades exactness for speed in tight solver loops.  Speeds outside the
    tabulated range, or states that do not match the reference, fall back
    to the exact evaluation.
    """
    from scipy.interpolate import PchipInterpolator

    if family not in (1, eos.n + 2):
        raise ValueError("kinetic closures attach to the extreme families")
    m_sonic = float(np.sqrt(-eoslib.dp_dtau(eos, ahead.tau, ahead.s)))
    margins = np.geomspace(margin_range[0], margin_range[1], count)
    jumps = np.array([_entropy_jump_for_m(eos, ahead, a, m_sonic * (1.0 + d))
                      for d in margins])
    # the jump is cubic in the margin, so interpolate log-log to keep the
    # relative error uniform across the decades
    table = PchipInterpolator(np.log(margins), np.log(jumps))
    exact = traveling_wave_kinetic_function(eos, a, family)

    def phi(u_minus: FluidState, lam: float) -> np.ndarray:
        matches = (abs(u_minus.tau - ahead.tau) <= 1e-12 * ahead.tau
                   and np.all(np.abs(u_minus.s - ahead.s) <= 1e-12))
        work_u = u_minus.u if family == 1 else -u_minus.u
        speed = lam if family == 1 else -lam
        m = u_minus.rho * (work_u - speed)
        if m <= m_sonic * (1.0 + 1e-15):
            return np.zeros(eos.n)
        margin = m / m_sonic - 1.0
        if not matches or not margins[0] <= margin <= margins[-1]:
            return exact(u_minus, lam)
        return float(m) * float(np.exp(table(np.log(margin)))) * a.a

    return KineticFunction(phi, family, a)


def kinetic_from_states(phi: KineticFunction, u_minus: FluidState,
                        u_plus: FluidState) -> np.ndarray:
    """Evaluate a (u, Lambda) closure on a pair of states, recovering the
    speed from the mass jump relation."""
    drho = u_plus.rho - u_minus.rho
    if abs(drho) < 1e-14 * (u_minus.rho + u_plus.rho):
        raise DomainError("states carry no mass jump; speed is undetermined")
    lam = (u_plus.rho * u_plus.u - u_minus.rho * u_minus.u) / drho
    return phi(u_minus, float(lam))


def _entropy_jump_for_m(eos: EosSpec, ahead: ThermoState, a: ConeDirection,
                        m: float) -> float:
    """Magnitude of the entropy jump along ``a`` for relative flux m:
    the joint zero of F and H on the ray, by damped 2x2 Newton with the
    bisection construction of `endstate` as a fallback."""
    av = a.a
    ctx = EndstateContext(eos, ahead, m)

    def residual(tau: float, lam: float) -> np.ndarray:
        s = ahead.s + lam * av
        return np.array([ctx.F(tau, s), ctx.H(tau, s)])

    def jac(tau: float, lam: float) -> np.ndarray:
        s = ahead.s + lam * av
        ps = eoslib.species_pressure(eos, tau, s)
        t_i = eoslib._species_energy(eos, tau, s)
        f = ctx.F(tau, s)
        return np.array([
            [ctx.dF_dtau(tau, s), float(ps @ av)],
            [-f, float(t_i @ av)],
        ])

    # frozen-entropy compressive root as the starting point
    tau = _frozen_entropy_root(ctx)
    lam = 0.0
    scale = np.array([ctx.f_scale, ctx.h_scale])
    r = residual(tau, lam)
    for _ in range(60):
        if np.all(np.abs(r) <= 1e-13 * scale):
            return lam
        try:
            step = np.linalg.solve(jac(tau, lam), -r)
        except np.linalg.LinAlgError:
            break
        alpha, improved = 1.0, False
        for _ in range(40):
            tn, ln = tau + alpha * step[0], lam + alpha * step[1]
            if 0.0 < tn < ctx.tau_L and ln >= 0.0:
                rn = residual(tn, ln)
                if np.linalg.norm(rn / scale) <= np.linalg.norm(r / scale):
                    tau, lam, r = tn, ln, rn
                    improved = True
                    break
            alpha *= 0.5
        if not improved:
            break
    if np.all(np.abs(r) <= 1e-10 * scale):
        return lam
    return endlib.lambda0(ctx, a)


def _frozen_entropy_root(ctx: EndstateContext) -> float:
    roots = endlib.tau_roots(ctx, ctx.s_L)
    if roots.tau_minus is None:
        return ctx.tau_L
    return roots.tau_minus


# ---------------------------------------------------------------------------
# generalized Hugoniot states
# ---------------------------------------------------------------------------

def kinetic_hugoniot(u0: FluidState, lam: float, phi: KineticFunction,
                     flux: MultiPressureEulerFlux, *, tol: float = 1e-10,
                     max_iter: int = 60) -> FluidState:
    """State u1 connected to the supersonic-side state u0 by a jump at
    speed ``lam`` under the closure ``phi``:

        -lam (u1 - u0) + f(u1) - f(u0) = Phi(u0, lam).

    A closed-form reduction of the entropy rows seeds a damped Newton
    iteration on the full residual; the result satisfies the relation to
    ``tol`` times the flux magnitude at u0.  Raises ``DomainError`` for
    speeds outside the attached Lax range and ``NoConvergence`` when the
    iteration stagnates (a symptom of a closure evaluated outside its
    validity neighborhood).
    """
    family = phi.family
    n = u0.n
    if family == n + 2:
        wrapped = KineticFunction(
            lambda u, sp: phi.func(u.reflected(), -sp), 1, phi.direction)
        res = kinetic_hugoniot(u0.reflected(), -lam, wrapped, flux,
                               tol=tol, max_iter=max_iter)
        return res.reflected()
    if family != 1:
        raise ValueError("generalized Hugoniot attaches to an extreme family")

    lam1 = flux.lambda_family(u0, 1)
    c0 = flux.sound_speed(u0)
    if lam > lam1 + 1e-14 * max(1.0, abs(lam1)):
        raise DomainError(f"speed {lam} above the 1-characteristic {lam1}")
    if abs(lam - lam1) <= 1e-14 * max(1.0, c0):
        return FluidState(u0.rho, u0.u, u0.s)  # tangent point

    m = u0.rho * (u0.u - lam)
    phi_vec = phi(u0, lam)
    s1 = u0.s + phi_vec / m  # entropy rows are linear in the unknowns
    tau1 = _compressive_tau_guess(flux.eos, u0, s1, m)
    guess = FluidState(1.0 / tau1, lam + m * tau1, s1)

    cons0 = u0.conserved()
    f0 = flux.flux(cons0)
    target = phi.full(u0, lam)
    fscale = float(np.linalg.norm(f0)) + abs(lam) * float(np.linalg.norm(cons0))

    def residual(cons: np.ndarray) -> np.ndarray:
        return -lam * (cons - cons0) + flux.flux(cons) - f0 - target

    cons = guess.conserved()
    r = residual(cons)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= tol * fscale:
            break
        jac = flux.jacobian(cons) - lam * np.eye(n + 2)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian in Hugoniot solve: {exc}")
        alpha, improved = 1.0, False
        for _ in range(40):
            cn = cons + alpha * step
            if cn[0] > 0.0:
                rn = residual(cn)
                if np.linalg.norm(rn) < np.linalg.norm(r):
                    cons, r = cn, rn
                    improved = True
                    break
            alpha *= 0.5
        if not improved:
            raise NoConvergence("Hugoniot Newton stagnated")
    if np.linalg.norm(r) > tol * fscale:
        raise NoConvergence(
            f"Hugoniot residual {np.linalg.norm(r):.3e} above tolerance")
    return FluidState.from_conserved(cons)


def _compressive_tau_guess(eos: EosSpec, u0: FluidState, s1: np.ndarray,
                           m: float) -> float:
    """Root of p(tau, s1) - p0 + m^2 (tau - tau0) = 0 on the compressive
    side of its minimizer; falls back to a weak-compression estimate."""
    tau0 = u0.tau
    p0 = eoslib.total_pressure(eos, tau0, u0.s)
    m2 = m * m
    f = lambda tau: eoslib.total_pressure(eos, tau, s1) - p0 + m2 * (tau - tau0)
    g = lambda tau: eoslib.dp_dtau(eos, tau, s1) + m2
    hi = tau0
    ghi = g(hi)
    for _ in range(MAX_EXPANSIONS):
        if ghi > 0.0:
            break
        hi *= 2.0
        ghi = g(hi)
    lo = 0.5 * hi
    for _ in range(MAX_EXPANSIONS):
        if g(lo) < 0.0:
            break
        hi = lo
        lo *= 0.5
    tau_min = solve_bracketed(g, lo, hi)
    fmin = f(tau_min)
    if fmin >= 0.0:
        return 0.5 * (tau_min + tau0)
    blo = 0.5 * tau_min
    fblo = f(blo)
    for _ in range(MAX_EXPANSIONS):
        if fblo > 0.0:
            break
        blo *= 0.5
        fblo = f(blo)
    return solve_bracketed(f, blo, tau_min, flo=fblo, fhi=fmin)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TangencyReport:
    """How the generalized Hugoniot curve leaves its base point."""

    family: int
    lambda_at_base: float
    gradient_projection: float      # grad(lambda_j) . r_j at u0
    margins: np.ndarray             # relative Lax margins probed
    slope_ratios: np.ndarray        # measured/predicted speed slope, -> 1
    strength_ratios: np.ndarray     # |u1 - u0| over margin, bounded
    dissipation_slope: float | None
    tangency_ok: bool

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "lambda_at_base": self.lambda_at_base,
            "gradient_projection": self.gradient_projection,
            "margins": [float(x) for x in self.margins],
            "slope_ratios": [float(x) for x in self.slope_ratios],
            "strength_ratios": [float(x) for x in self.strength_ratios],
            "dissipation_slope": self.dissipation_slope,
            "tangency_ok": self.tangency_ok,
        }


def hugoniot_tangency_check(u0: FluidState, phi: KineticFunction,
                            flux: MultiPressureEulerFlux,
                            margins=None) -> TangencyReport:
    """Probe the Hugoniot curve near its base point.

    Checks that the shock speed leaves the base point with half the
    characteristic-speed gradient along the curve (ratio within 10% at
    the smallest margins), that the curve strength stays Lipschitz in the
    margin, and fits the log-log slope of the dissipation magnitude
    (cubic for profile-generated closures).
    """
    family = phi.family
    if margins is None:
        margins = np.geomspace(1e-2, 1e-4, 9)
    margins = np.asarray(margins, dtype=float)
    lam0, r0, _ = flux.eigen_extreme(u0, family)
    c0 = flux.sound_speed(u0)

    # directional derivative of lambda_j along r_j, by central differences
    cons0 = u0.conserved()
    h = 1e-6 * max(1.0, float(np.linalg.norm(cons0)))
    lp = flux.eigen_extreme(FluidState.from_conserved(cons0 + h * r0), family)[0]
    lm = flux.eigen_extreme(FluidState.from_conserved(cons0 - h * r0), family)[0]
    grad_proj = (lp - lm) / (2.0 * h)

    grad = np.empty(cons0.size)
    for j in range(cons0.size):
        hj = 1e-6 * max(1.0, abs(cons0[j]))
        up, dn = cons0.copy(), cons0.copy()
        up[j] += hj
        dn[j] -= hj
        grad[j] = (flux.eigen_extreme(FluidState.from_conserved(up), family)[0]
                   - flux.eigen_extreme(FluidState.from_conserved(dn), family)[0]) / (2 * hj)

    sign = -1.0 if family == 1 else 1.0
    slope_ratios = []
    strength_ratios = []
    diss = []
    for delta in margins:
        lam = lam0 + sign * delta * c0
        u1 = kinetic_hugoniot(u0, lam, phi, flux)
        du = u1.conserved() - cons0
        predicted = lam0 + 0.5 * float(grad @ du)
        slope_ratios.append((lam - lam0) / (predicted - lam0))
        strength_ratios.append(float(np.linalg.norm(du)) / (delta * c0))
        diss.append(float(np.linalg.norm(phi(u0, lam))))
    slope_ratios = np.asarray(slope_ratios)
    strength_ratios = np.asarray(strength_ratios)
    diss = np.asarray(diss)

    if np.all(diss > 0.0):
        fit = np.polyfit(np.log(margins * c0), np.log(diss), 1)
        diss_slope = float(fit[0])
    else:
        diss_slope = None
    small = margins <= margins.min() * 10.0
    tangency_ok = bool(np.all(np.abs(slope_ratios[small] - 1.0) <= 0.10))
    return TangencyReport(family, float(lam0), float(grad_proj), margins,
                          slope_ratios, strength_ratios, diss_slope, tangency_ok)


@dataclass(frozen=True, eq=False)
class KineticFunctionReport:
    c1: float                  # bound constant on |l . dPhi/dLambda| / |margin|
    c2: float                  # bound constant on |l . Phi| / margin^2
    max_value_at_tangent: float
    samples: int
    bounded: bool

    def to_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2,
                "max_value_at_tangent": self.max_value_at_tangent,
                "samples": self.samples, "bounded": self.bounded}


def validate_kinetic_function(phi: KineticFunction, samples,
                              flux: MultiPressureEulerFlux) -> KineticFunctionReport:
    """Estimate the defining bound constants of a closure over sample
    (state, speed) pairs inside the attached Lax range, and check that it
    vanishes on the characteristic itself."""
    c1 = 0.0
    c2 = 0.0
    worst_tangent = 0.0
    count = 0
    for state, lam in samples:
        lam_j, _, l = flux.eigen_extreme(state, phi.family)
        margin = lam - lam_j
        if margin == 0.0:
            continue
        val = float(abs(l @ phi.full(state, lam)))
        c2 = max(c2, val / margin ** 2)
        h = 1e-6 * max(abs(margin), 1e-3 * flux.sound_speed(state))
        dphi = (phi.full(state, lam + h) - phi.full(state, lam - h)) / (2.0 * h)
        c1 = max(c1, float(abs(l @ dphi)) / abs(margin))
        worst_tangent = max(worst_tangent, float(np.linalg.norm(phi(state, lam_j))))
        count += 1
    bounded = bool(np.isfinite(c1) and np.isfinite(c2) and worst_tangent <= 1e-9)
    return KineticFunctionReport(c1, c2, worst_tangent, count, bounded)
