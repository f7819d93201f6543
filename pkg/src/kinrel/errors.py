"""Exception taxonomy shared by the solver modules.

Every failure that a caller may want to branch on carries a short
machine-readable ``code``; the CLI surfaces that code in its exit
message so batch drivers can grep for it.
"""

from __future__ import annotations

__all__ = [
    "KinrelError",
    "BracketFailure",
    "DomainError",
    "LaxViolation",
    "NoConvergence",
    "NoRootOnBranch",
    "ResonanceGuard",
    "VacuumFormation",
]


class KinrelError(Exception):
    """Base class for solver failures."""

    code = "error"


class BracketFailure(KinrelError):
    """A sign change could not be located within the expansion budget."""

    code = "bracket_failure"


class DomainError(KinrelError):
    """Input lies outside the domain where the operation is defined."""

    code = "domain_error"


class LaxViolation(KinrelError):
    """The inflow Lax condition m > rho_L c_L does not hold."""

    code = "lax_violated"


class NoConvergence(KinrelError):
    """An iterative solve stagnated before reaching its tolerance."""

    code = "no_convergence"


class NoRootOnBranch(KinrelError):
    """The requested standing-wave branch carries no solution."""

    code = "no_root_on_branch"


class ResonanceGuard(KinrelError):
    """State too close to sonic for the non-resonant theory to apply."""

    code = "resonance_guard"


class VacuumFormation(KinrelError):
    """Riemann data drive the star pressure to zero."""

    code = "vacuum_formation"
