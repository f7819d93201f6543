"""kinrel: viscous profiles, kinetic closures and Riemann solvers for
multi-pressure gas dynamics."""

from . import endstate, eos, errors, profile, riemann, rootfind

__all__ = ["endstate", "eos", "errors", "profile", "riemann", "rootfind"]
__version__ = "0.1.0"
