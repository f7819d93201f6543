"""Riemann machinery: kinetic jump closures, the multi-pressure Euler
solver, and standing waves over geometric jumps."""

from .euler import (
    FluidState,
    MultiPressureEulerFlux,
    Wave,
    WaveFan,
    entropy_dissipation,
    entropy_dissipation_pair,
    solve_riemann_mp_euler,
    write_solution_csv,
)
from .kinetic import (
    KineticFunction,
    KineticFunctionReport,
    TangencyReport,
    hugoniot_tangency_check,
    kinetic_from_states,
    kinetic_hugoniot,
    tabulated_kinetic_function,
    traveling_wave_kinetic_function,
    validate_kinetic_function,
    zero_kinetic_function,
)
from .standing import (
    NOZZLE,
    SHALLOW_WATER,
    BarotropicLaw,
    StandingWaveProblem,
    StandingWaveResult,
    entropy_flux,
    standing_wave,
)

__all__ = [
    "FluidState",
    "MultiPressureEulerFlux",
    "Wave",
    "WaveFan",
    "entropy_dissipation",
    "entropy_dissipation_pair",
    "solve_riemann_mp_euler",
    "write_solution_csv",
    "KineticFunction",
    "KineticFunctionReport",
    "TangencyReport",
    "hugoniot_tangency_check",
    "kinetic_from_states",
    "kinetic_hugoniot",
    "tabulated_kinetic_function",
    "traveling_wave_kinetic_function",
    "validate_kinetic_function",
    "zero_kinetic_function",
    "BarotropicLaw",
    "StandingWaveProblem",
    "StandingWaveResult",
    "entropy_flux",
    "standing_wave",
    "SHALLOW_WATER",
    "NOZZLE",
]
