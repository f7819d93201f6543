"""Algebraic characterization of the states a viscous profile can reach.

For a fixed upstream state (tau_L, s_L) and mass flux m above the sonic
value, the profile dynamics admit critical points exactly where the
pressure-balance residual

    F(tau, s) = p(tau, s) - p_L + m^2 (tau - tau_L)

and the energy balance

    H(tau, s) = e(tau, s) - e_L - m^2/2 (tau^2 - tau_L^2)
                + (m^2 tau_L + p_L) (tau - tau_L)

vanish together.  Along any ray s = s_L + lambda*a into the nonnegative
entropy cone, F(., s) is strictly convex in tau with a unique minimizer
tau_bar(s); its zeros tau-(s) < tau+(s) exist up to the cone radius
lambda_bar(a) where they collapse, and the energy balance closes on the
lower branch at a single radius lambda0(a) < lambda_bar(a).  The pair
(tau-(s_L + lambda0 a), s_L + lambda0 a) is the downstream state selected
by viscosity ratios proportional to a.

Everything reduces to monotone scalar root-finding: brackets are
guaranteed by convexity and the blow-up/decay of the pressure law, so
bisection plus a short Newton polish is both robust and fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import eos as eoslib
from .eos import EosSpec, ThermoState
from .errors import BracketFailure, DomainError, LaxViolation
from .rootfind import MAX_EXPANSIONS, solve_bracketed

__all__ = [
    "ConeDirection",
    "EndstateContext",
    "TauRoots",
    "HRoots",
    "ManifoldSample",
    "ManifoldBatch",
    "tau_bar",
    "tau_roots",
    "lambda_bar",
    "lambda0",
    "h_roots",
    "manifold_point",
    "sample_manifold",
    "sample_directions",
    "write_manifold_csv",
]


@dataclass(frozen=True, eq=False)
class ConeDirection:
    """Unit vector with nonnegative components: a ray of the entropy cone."""

    a: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.a, dtype=float, copy=True).reshape(-1)
        a.flags.writeable = False
        object.__setattr__(self, "a", a)
        if a.size < 1 or not np.all(np.isfinite(a)):
            raise ValueError("direction must be non-empty and finite")
        if np.any(a < 0.0):
            raise ValueError("direction components must be nonnegative")
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError("direction must have unit Euclidean norm")

    @classmethod
    def from_ratios(cls, v) -> "ConeDirection":
        v = np.asarray(v, dtype=float).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm <= 0.0:
            raise ValueError("cannot normalize a zero vector")
        return cls(v / nrm)

    @property
    def n(self) -> int:
        return self.a.size


@dataclass(frozen=True, eq=False)
class EndstateContext:
    """Frozen problem data: EOS, upstream state and mass flux.

    Construction checks the inflow Lax condition m > rho_L c_L; the whole
    root structure below degenerates without it.
    """

    eos: EosSpec
    omega_L: ThermoState
    m: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", float(self.m))
        if self.omega_L.n != self.eos.n:
            raise ValueError("state and EOS species counts differ")
        if not self.eos.strictly_admissible:
            raise ValueError("EOS must have gamma_i > 1 throughout")
        if not (np.isfinite(self.m) and self.m > 0.0):
            raise ValueError("mass flux m must be positive")
        if self.m2 + eoslib.dp_dtau(self.eos, self.tau_L, self.s_L) <= 0.0:
            raise LaxViolation(
                f"m={self.m} does not exceed the sonic flux rho_L c_L")

    @property
    def tau_L(self) -> float:
        return self.omega_L.tau

    @property
    def s_L(self) -> np.ndarray:
        return self.omega_L.s

    @cached_property
    def m2(self) -> float:
        return self.m * self.m

    @cached_property
    def p_L(self) -> float:
        return eoslib.total_pressure(self.eos, self.tau_L, self.s_L)

    @cached_property
    def e_L(self) -> float:
        return eoslib.internal_energy(self.eos, self.omega_L)

    @cached_property
    def f_scale(self) -> float:
        """Natural size of F: m^2 tau_L + p_L."""
        return self.m2 * self.tau_L + self.p_L

    @cached_property
    def h_scale(self) -> float:
        """Natural size of H: |e_L| + m^2 tau_L^2."""
        return abs(self.e_L) + self.m2 * self.tau_L ** 2

    # residuals ------------------------------------------------------------

    def F(self, tau: float, s: np.ndarray) -> float:
        return (eoslib.total_pressure(self.eos, tau, s) - self.p_L
                + self.m2 * (tau - self.tau_L))

    def dF_dtau(self, tau: float, s: np.ndarray) -> float:
        return eoslib.dp_dtau(self.eos, tau, s) + self.m2

    def H(self, tau: float, s: np.ndarray) -> float:
        e = float(eoslib._species_energy(self.eos, tau, s).sum())
        return (e - self.e_L - 0.5 * self.m2 * (tau ** 2 - self.tau_L ** 2)
                + (self.m2 * self.tau_L + self.p_L) * (tau - self.tau_L))


@dataclass(frozen=True)
class TauRoots:
    """Zeros of F(., s): none beyond the cone boundary, a double root on
    it, an interlaced pair tau_minus < tau_bar < tau_plus inside."""

    kind: str  # "none" | "double" | "pair"
    tau_minus: float | None
    tau_plus: float | None
    tau_bar: float


@dataclass(frozen=True)
class HRoots:
    """The three zeros of H(., s), interlaced with the F-roots as
    lower < tau_minus <= middle < tau_plus <= upper."""

    lower: float
    middle: float
    upper: float


@dataclass(frozen=True, eq=False)
class ManifoldSample:
    a: ConeDirection
    lambda0: float
    lambda_bar: float
    s_R: np.ndarray
    tau_R: float
    ill_conditioned: bool = False


@dataclass(frozen=True, eq=False)
class ManifoldBatch:
    samples: tuple[ManifoldSample, ...]
    failures: tuple[tuple[int, str], ...]


# ---------------------------------------------------------------------------
# scalar roots
# ---------------------------------------------------------------------------

def tau_bar(ctx: EndstateContext, s: np.ndarray) -> float:
    """Unique minimizer of F(., s): the zero of dp/dtau + m^2.

    The derivative runs from -inf at tau -> 0+ to m^2 > 0 at infinity and
    is strictly increasing, so a bracket always exists.
    """
    s = np.asarray(s, dtype=float)
    g = lambda tau: ctx.dF_dtau(tau, s)
    hi = ctx.tau_L
    ghi = g(hi)
    for _ in range(MAX_EXPANSIONS):
        if ghi > 0.0:
            break
        hi *= 2.0
        ghi = g(hi)
    else:
        raise BracketFailure("dF/dtau never turned positive")
    lo = 0.5 * hi
    glo = g(lo)
    for _ in range(MAX_EXPANSIONS):
        if glo < 0.0:
            break
        hi, ghi = lo, glo
        lo *= 0.5
        glo = g(lo)
    else:
        raise BracketFailure("dF/dtau never turned negative")
    return solve_bracketed(g, lo, hi, df=lambda tau: eoslib.d2p_dtau2(ctx.eos, tau, s),
                           flo=glo, fhi=ghi)


# classification tolerance on F(tau_bar(s), s), relative to ctx.f_scale
_CLASSIFY_TOL = 1e-12


def tau_roots(ctx: EndstateContext, s: np.ndarray) -> TauRoots:
    """Classify and compute the zeros of F(., s) for s in the cone."""
    s = np.asarray(s, dtype=float)
    if np.any(s < ctx.s_L - 1e-12):
        raise DomainError("entropy below the upstream value")
    tb = tau_bar(ctx, s)
    fb = ctx.F(tb, s)
    tol = _CLASSIFY_TOL * ctx.f_scale
    if fb > tol:
        return TauRoots("none", None, None, tb)
    if fb >= -tol:
        return TauRoots("double", tb, tb, tb)

    ffun = lambda tau: ctx.F(tau, s)
    dffun = lambda tau: ctx.dF_dtau(tau, s)
    lo = 0.5 * tb
    flo = ffun(lo)
    for _ in range(MAX_EXPANSIONS):
        if flo > 0.0:
            break
        lo *= 0.5
        flo = ffun(lo)
    else:
        raise BracketFailure("F never turned positive below tau_bar")
    tminus = solve_bracketed(ffun, lo, tb, df=dffun, flo=flo, fhi=fb)

    if np.all(s == ctx.s_L):
        tplus = ctx.tau_L  # exact: F(tau_L, s_L) = 0 by construction
    else:
        fhi = ffun(ctx.tau_L)  # = p(tau_L, s) - p_L >= 0 in the cone
        if fhi <= 0.0:
            tplus = ctx.tau_L
        else:
            tplus = solve_bracketed(ffun, tb, ctx.tau_L, df=dffun, flo=fb, fhi=fhi)
    return TauRoots("pair", tminus, tplus, tb)


def lambda_bar(ctx: EndstateContext, a: ConeDirection) -> float:
    """Cone radius where the two F-roots collapse onto tau_bar.

    phi(lambda) = F(tau_bar(s_L + lambda a), s_L + lambda a) is strictly
    increasing with phi(0) < 0; a positive probe value is found at the
    radius lambda_star where tau_bar returns to tau_L, located by driving
    dp/dtau(tau_L, .) + m^2 through zero.
    """
    _check_direction(ctx, a)
    av = a.a

    def phi(lam: float) -> float:
        s = ctx.s_L + lam * av
        return ctx.F(tau_bar(ctx, s), s)

    def dphi(lam: float) -> float:
        s = ctx.s_L + lam * av
        return float(eoslib.species_dp_ds(ctx.eos, tau_bar(ctx, s), s) @ av)

    theta = lambda lam: eoslib.dp_dtau(ctx.eos, ctx.tau_L, ctx.s_L + lam * av) + ctx.m2
    hi = 1.0
    for _ in range(MAX_EXPANSIONS):
        if theta(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise BracketFailure("upper probe for lambda_bar not found")
    lam_star = solve_bracketed(theta, 0.0, hi)
    fstar = phi(lam_star)
    for _ in range(MAX_EXPANSIONS):
        if fstar > 0.0:
            break
        lam_star *= 2.0
        fstar = phi(lam_star)
    else:
        raise BracketFailure("phi never turned positive")
    return solve_bracketed(phi, 0.0, lam_star, df=dphi, fhi=fstar)


def lambda0(ctx: EndstateContext, a: ConeDirection) -> float:
    """Kinetic radius: the zero of H along the lower F-root branch.

    Strictly increasing in lambda (its derivative is the direction-weighted
    temperature sum), negative at lambda = 0 and positive at lambda_bar.
    """
    return _lambda0_given_bar(ctx, a, lambda_bar(ctx, a))


def _lambda0_given_bar(ctx: EndstateContext, a: ConeDirection, lam_bar: float) -> float:
    av = a.a

    def tau_minus(lam: float) -> float:
        roots = tau_roots(ctx, ctx.s_L + lam * av)
        if roots.tau_minus is None:
            raise BracketFailure(f"no F-root at lambda={lam}")
        return roots.tau_minus

    def big_phi(lam: float) -> float:
        s = ctx.s_L + lam * av
        return ctx.H(tau_minus(lam), s)

    def dbig_phi(lam: float) -> float:
        s = ctx.s_L + lam * av
        return float(eoslib._species_energy(ctx.eos, tau_minus(lam), s) @ av)

    f0 = big_phi(0.0)
    if f0 >= 0.0:
        # the true value at the origin is negative but cubically small in
        # the Lax margin; when it drowns in rounding the radius is zero to
        # working precision
        if f0 <= _CLASSIFY_TOL * ctx.h_scale:
            return 0.0
        raise BracketFailure("energy residual positive at the cone origin")
    return solve_bracketed(big_phi, 0.0, lam_bar, df=dbig_phi, flo=f0)


def h_roots(ctx: EndstateContext, s: np.ndarray) -> HRoots:
    """The three zeros of H(., s) for s between s_L and the kinetic manifold.

    H decreases on (0, tau-), increases on (tau-, tau+), decreases beyond
    tau+, with H -> +inf at tau -> 0+ and -> -inf at tau -> inf, so each
    monotone piece holds exactly one zero.  At s_L the two upper roots
    coincide with tau_L; on the manifold the two lower roots coincide with
    tau-.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < ctx.s_L - 1e-12):
        raise DomainError("entropy below the upstream value")
    d = s - ctx.s_L
    lam = float(np.linalg.norm(d))
    tol_h = _CLASSIFY_TOL * ctx.h_scale

    if lam == 0.0:
        roots = tau_roots(ctx, s)
        lower = _h_root_below(ctx, s, roots.tau_minus)
        return HRoots(lower, ctx.tau_L, ctx.tau_L)

    a = ConeDirection(d / lam)
    lam0 = lambda0(ctx, a)
    if lam > lam0 * (1.0 + 1e-9) + 1e-12:
        raise DomainError(f"lambda={lam} beyond the kinetic radius {lam0}")

    roots = tau_roots(ctx, s)
    if roots.kind != "pair":
        raise DomainError("F-roots degenerate inside the kinetic cone")
    tminus, tplus = roots.tau_minus, roots.tau_plus

    hfun = lambda tau: ctx.H(tau, s)
    dhfun = lambda tau: -ctx.F(tau, s)
    hm = hfun(tminus)
    hp = hfun(tplus)

    if hm >= -tol_h:
        lower = middle = tminus  # on (or within tolerance of) the manifold
    else:
        lower = _h_root_below(ctx, s, tminus, fhi=hm)
        middle = solve_bracketed(hfun, tminus, tplus, df=dhfun, flo=hm, fhi=hp)

    hi = 2.0 * tplus
    fhi = hfun(hi)
    for _ in range(MAX_EXPANSIONS):
        if fhi < 0.0:
            break
        hi *= 2.0
        fhi = hfun(hi)
    else:
        raise BracketFailure("H never turned negative above tau_plus")
    upper = solve_bracketed(hfun, tplus, hi, df=dhfun, flo=hp, fhi=fhi)
    return HRoots(lower, middle, upper)


def _h_root_below(ctx, s, tminus, fhi=None) -> float:
    hfun = lambda tau: ctx.H(tau, s)
    fhi = hfun(tminus) if fhi is None else fhi
    lo = 0.5 * tminus
    flo = hfun(lo)
    for _ in range(MAX_EXPANSIONS):
        if flo > 0.0:
            break
        lo *= 0.5
        flo = hfun(lo)
    else:
        raise BracketFailure("H never turned positive below tau_minus")
    return solve_bracketed(hfun, lo, tminus, df=lambda tau: -ctx.F(tau, s),
                           flo=flo, fhi=fhi)


# ---------------------------------------------------------------------------
# manifold sampling
# ---------------------------------------------------------------------------

# lambda0 this close to lambda_bar means the F-root pair is nearly double
# and the computed end state carries reduced precision
_ILL_CONDITIONED_GAP = 1e-8


def manifold_point(ctx: EndstateContext, a: ConeDirection) -> ManifoldSample:
    """End state reached along direction a: radius lambda0 and tau-."""
    _check_direction(ctx, a)
    lam_bar = lambda_bar(ctx, a)
    lam0 = _lambda0_given_bar(ctx, a, lam_bar)
    s_R = ctx.s_L + lam0 * a.a
    roots = tau_roots(ctx, s_R)
    tau_R = roots.tau_minus if roots.tau_minus is not None else roots.tau_bar
    flag = (lam_bar - lam0) <= _ILL_CONDITIONED_GAP * max(1.0, lam_bar)
    return ManifoldSample(a, lam0, lam_bar, s_R, tau_R, flag)


def sample_manifold(ctx: EndstateContext, directions) -> ManifoldBatch:
    """Evaluate the manifold over many directions, collecting per-direction
    failures instead of aborting the batch."""
    samples: list[ManifoldSample] = []
    failures: list[tuple[int, str]] = []
    for i, a in enumerate(directions):
        try:
            samples.append(manifold_point(ctx, a))
        except Exception as exc:  # noqa: BLE001 - batch must continue
            failures.append((i, f"{type(exc).__name__}: {exc}"))
    return ManifoldBatch(tuple(samples), tuple(failures))


def sample_directions(n_species: int, count: int, seed: int = 0x5EED) -> list[ConeDirection]:
    """Deterministic direction sets: the full cone is the single point for
    N=1, a uniform angular grid for N=2, and a seeded low-discrepancy
    (Halton) cloud for N >= 3."""
    if n_species < 1 or count < 1:
        raise ValueError("need n_species >= 1 and count >= 1")
    if n_species == 1:
        return [ConeDirection(np.array([1.0]))]
    if n_species == 2:
        angles = np.linspace(0.0, np.pi / 2.0, count)
        return [ConeDirection(np.array([np.cos(t), np.sin(t)])) for t in angles]
    from scipy.stats import qmc

    sampler = qmc.Halton(d=n_species, scramble=True, seed=seed)
    out: list[ConeDirection] = []
    while len(out) < count:
        for row in sampler.random(count - len(out)):
            nrm = np.linalg.norm(row)
            if nrm > 1e-12:
                out.append(ConeDirection(row / nrm))
    return out


def write_manifold_csv(batch: ManifoldBatch, path) -> None:
    """CSV export: a_1..a_N, lambda0, lambda_bar, tau_R, s_R_1..s_R_N."""
    if not batch.samples:
        raise ValueError("no samples to write")
    n = batch.samples[0].a.n
    header = (",".join(f"a_{i + 1}" for i in range(n))
              + ",lambda0,lambda_bar,tau_R,"
              + ",".join(f"s_R_{i + 1}" for i in range(n)))
    lines = [header]
    for smp in batch.samples:
        cells = ([_fmt(x) for x in smp.a.a]
                 + [_fmt(smp.lambda0), _fmt(smp.lambda_bar), _fmt(smp.tau_R)]
                 + [_fmt(x) for x in smp.s_R])
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _check_direction(ctx: EndstateContext, a: ConeDirection) -> None:
    if a.n != ctx.eos.n:
        raise ValueError("direction dimension does not match species count")
