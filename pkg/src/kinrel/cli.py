"""Command-line front end.

Parses a JSON problem config, dispatches to the library, and writes the
artifacts next to a ``summary.json`` that is produced even when the solve
fails (with the error code in the status).  Exit codes: 0 on success, 1
on config errors, 2 when a solver reports a failure; the failure message
names the library error code so batch drivers can grep for it.

Numeric table artifacts are CSV by default (17 significant digits,
deterministic bytes for a fixed config and seed) or JSON with
``--format json``.  Verbosity is controlled by the KR_LOG environment
variable (error, info, debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import endstate as endlib
from . import eos as eoslib
from . import profile as proflib
from . import riemann as rielib
from .errors import DomainError, KinrelError

log = logging.getLogger("kinrel")

DEFAULT_SEED = 0x5EED

COMMANDS = ("profile", "manifold", "hugoniot", "riemann", "standing-wave",
            "validate-eos")

__all__ = ["RunConfig", "run", "summarize", "main"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    config_path: Path
    out_dir: Path
    overrides: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")


# ---------------------------------------------------------------------------
# config schemas
# ---------------------------------------------------------------------------

_EOS = {
    "type": "object",
    "required": ["species"],
    "additionalProperties": False,
    "properties": {
        "species": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["gamma"],
                "additionalProperties": False,
                "properties": {
                    "gamma": {"type": "number", "exclusiveMinimum": 0},
                    "kappa": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
    },
}

_VISCOSITY = {
    "type": "object",
    "required": ["mu0"],
    "additionalProperties": False,
    "properties": {
        "mu0": {"type": "array", "minItems": 1,
                "items": {"type": "number", "minimum": 0}},
        "mode": {"enum": ["temperature", "constant"]},
    },
}

_THERMO = {
    "type": "object",
    "required": ["tau", "s"],
    "additionalProperties": False,
    "properties": {
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "s": {"type": "array", "minItems": 1, "items": {"type": "number"}},
    },
}

_FLUID = {
    "type": "object",
    "required": ["rho", "u", "s"],
    "additionalProperties": False,
    "properties": {
        "rho": {"type": "number", "exclusiveMinimum": 0},
        "u": {"type": "number"},
        "s": {"type": "array", "minItems": 1, "items": {"type": "number"}},
    },
}

_DIRECTION = {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}}

_TOLERANCES = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "rel": {"type": "number", "exclusiveMinimum": 0},
        "abs": {"type": "number", "exclusiveMinimum": 0},
        "stop": {"type": "number", "exclusiveMinimum": 0},
    },
}

SCHEMAS = {
    "profile": {
        "type": "object",
        "required": ["eos", "viscosity", "left", "m"],
        "additionalProperties": False,
        "properties": {
            "eos": _EOS,
            "viscosity": _VISCOSITY,
            "left": _THERMO,
            "m": {"type": "number", "exclusiveMinimum": 0},
            "tolerances": _TOLERANCES,
            "t_max": {"type": "number", "exclusiveMinimum": 0},
            "n_samples": {"type": "integer", "minimum": 2},
        },
    },
    "manifold": {
        "type": "object",
        "required": ["eos", "left", "m"],
        "additionalProperties": False,
        "properties": {
            "eos": _EOS,
            "left": _THERMO,
            "m": {"type": "number", "exclusiveMinimum": 0},
            "directions": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer", "minimum": 0},
        },
    },
    "hugoniot": {
        "type": "object",
        "required": ["eos", "left", "a"],
        "additionalProperties": False,
        "properties": {
            "eos": _EOS,
            "left": _FLUID,
            "a": _DIRECTION,
            "family": {"type": "integer", "minimum": 1},
            "margins": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "min": {"type": "number", "exclusiveMinimum": 0},
                    "max": {"type": "number", "exclusiveMinimum": 0},
                    "count": {"type": "integer", "minimum": 2},
                },
            },
        },
    },
    "riemann": {
        "type": "object",
        "required": ["eos", "left", "right", "a_L", "a_R"],
        "additionalProperties": False,
        "properties": {
            "eos": _EOS,
            "left": _FLUID,
            "right": _FLUID,
            "a_L": _DIRECTION,
            "a_R": _DIRECTION,
            "closure": {"enum": ["kinetic", "isentropic"]},
            "resonance_guard": {"type": "number", "exclusiveMinimum": 0},
            "xi": {
                "type": "object",
                "required": ["min", "max", "count"],
                "additionalProperties": False,
                "properties": {
                    "min": {"type": "number"},
                    "max": {"type": "number"},
                    "count": {"type": "integer", "minimum": 2},
                },
            },
        },
    },
    "standing-wave": {
        "type": "object",
        "required": ["model", "left", "a_minus", "a_plus"],
        "additionalProperties": False,
        "properties": {
            "model": {"enum": ["shallow_water", "nozzle"]},
            "left": {
                "type": "object",
                "required": ["rho", "v"],
                "additionalProperties": False,
                "properties": {
                    "rho": {"type": "number", "exclusiveMinimum": 0},
                    "v": {"type": "number"},
                },
            },
            "a_minus": {"type": "number", "exclusiveMinimum": 0},
            "a_plus": {"type": "number", "exclusiveMinimum": 0},
            "kappa": {"type": "number", "minimum": 0},
            "branch": {"enum": ["subsonic", "supersonic"]},
            "law": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "coeff": {"type": "number", "exclusiveMinimum": 0},
                    "exponent": {"type": "number", "exclusiveMinimum": 1},
                },
            },
            "resonance_guard": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "validate-eos": {
        "type": "object",
        "required": ["eos"],
        "additionalProperties": False,
        "properties": {
            "eos": _EOS,
            "grid": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "tau_min": {"type": "number", "exclusiveMinimum": 0},
                    "tau_max": {"type": "number", "exclusiveMinimum": 0},
                    "n_tau": {"type": "integer", "minimum": 2},
                    "s_min": {"type": "number"},
                    "s_max": {"type": "number"},
                    "n_s": {"type": "integer", "minimum": 2},
                },
            },
        },
    },
}


class ConfigError(Exception):
    """Config parse or schema failures; reported with exit code 1."""


def _load_config(cfg: RunConfig) -> dict:
    try:
        raw = cfg.config_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {cfg.config_path}: {exc}")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    import jsonschema

    validator = jsonschema.Draft202012Validator(SCHEMAS[cfg.command])
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "$" + "".join(f".{p}" if isinstance(p, str) else f"[{p}]"
                              for p in err.absolute_path)
        raise ConfigError(f"config error at {where}: {err.message}")
    return data


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------

def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    t0 = time.perf_counter()
    try:
        data = _load_config(cfg)
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        log.debug("config failure", exc_info=True)
        print(f"config error: {exc}", file=sys.stderr)
        _try_write_summary(cfg, {"status": "config_error", "message": str(exc)})
        return 1

    runner = {
        "profile": _run_profile,
        "manifold": _run_manifold,
        "hugoniot": _run_hugoniot,
        "riemann": _run_riemann,
        "standing-wave": _run_standing,
        "validate-eos": _run_validate_eos,
    }[cfg.command]
    try:
        summary, artifacts = runner(cfg, data)
    except KinrelError as exc:
        msg = f"{exc.code}: {exc}"
        log.debug("solver failure", exc_info=True)
        print(f"solver failure: {msg}", file=sys.stderr)
        _try_write_summary(cfg, {
            "status": "error",
            "error": exc.code,
            "message": str(exc),
            "command": cfg.command,
            "wall_clock_s": time.perf_counter() - t0,
        })
        return 2
    except ValueError as exc:
        # validation raised past the schema (e.g. a family index the
        # schema cannot know): a config problem, not a solver failure
        log.debug("config-level validation failure", exc_info=True)
        print(f"config error: {exc}", file=sys.stderr)
        _try_write_summary(cfg, {"status": "config_error", "message": str(exc)})
        return 1

    summary.setdefault("status", "ok")
    summary["command"] = cfg.command
    summary["wall_clock_s"] = time.perf_counter() - t0
    summarize(summary, artifacts, cfg.out_dir)
    return 0


def summarize(summary: dict, artifacts: list[Path], out_dir: Path) -> Path:
    """Check that the declared artifacts exist and write summary.json."""
    missing = [str(p) for p in artifacts if not p.exists()]
    if missing:
        raise DomainError(f"missing-artifact: {', '.join(missing)}")
    summary["artifacts"] = [p.name for p in artifacts]
    path = out_dir / "summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _try_write_summary(cfg: RunConfig, payload: dict) -> None:
    try:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        (cfg.out_dir / "summary.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError:
        log.debug("summary could not be written", exc_info=True)


def _table_path(cfg: RunConfig, stem: str) -> Path:
    ext = "json" if cfg.overrides.get("format") == "json" else "csv"
    return cfg.out_dir / f"{stem}.{ext}"


def _write_table(path: Path, header: list[str], rows: list[list[float]]) -> None:
    if path.suffix == ".json":
        payload = {"header": header, "rows": [[float(x) for x in row] for row in rows]}
        path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
        return
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{float(x):.17g}" for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _run_profile(cfg: RunConfig, data: dict):
    eos = eoslib.EosSpec.from_dict(data["eos"])
    visc = eoslib.ViscositySpec.from_dict(data["viscosity"])
    left = eoslib.ThermoState(data["left"]["tau"], np.asarray(data["left"]["s"]))
    tol_cfg = dict(data.get("tolerances", {}))
    for key, flag in (("rel", "tol_rel"), ("abs", "tol_abs")):
        if cfg.overrides.get(flag) is not None:
            tol_cfg[key] = cfg.overrides[flag]
    tol = proflib.Tolerances(**tol_cfg)
    t_max = cfg.overrides.get("t_max") or data.get("t_max")
    prob = proflib.ProfileProblem(left, data["m"], eos, visc, tol=tol, t_max=t_max,
                                  n_samples=int(data.get("n_samples", 512)))
    orbit = proflib.shoot(prob)

    path = _table_path(cfg, "orbit")
    n = eos.n
    header = ["t", "tau"] + [f"s_{i + 1}" for i in range(n)] + ["F", "H_drift"]
    rows = [[orbit.t[k], orbit.tau[k], *orbit.s[k], orbit.F[k], orbit.H[k]]
            for k in range(orbit.t.size)]
    _write_table(path, header, rows)

    ctx = prob.ctx
    summary = {
        "status": orbit.status if orbit.status == "converged" else orbit.status,
        "H_drift_max": orbit.h_drift_max,
        "H_drift_max_rel": orbit.h_drift_max / ctx.h_scale,
        "lax_margin_inflow": prob.m / np.sqrt(-eoslib.dp_dtau(eos, left.tau, left.s)) - 1.0,
        "exit_mach": orbit.exit_mach,
        "kick": orbit.kick,
        "n_samples": int(orbit.t.size),
        "terminal": {"tau": orbit.terminal.tau,
                     "s": [float(x) for x in orbit.terminal.s]},
        "residual_F_terminal": float(orbit.F[-1]),
    }
    if orbit.status == "converged":
        summary["entropy_jumps"] = [float(x) for x in
                                    proflib.entropy_production(orbit, prob)]
    return summary, [path]


def _run_manifold(cfg: RunConfig, data: dict):
    eos = eoslib.EosSpec.from_dict(data["eos"])
    left = eoslib.ThermoState(data["left"]["tau"], np.asarray(data["left"]["s"]))
    ctx = endlib.EndstateContext(eos, left, data["m"])
    count = int(cfg.overrides.get("directions") or data.get("directions", 32))
    seed = int(cfg.overrides.get("seed") if cfg.overrides.get("seed") is not None
               else data.get("seed", DEFAULT_SEED))
    dirs = endlib.sample_directions(eos.n, count, seed=seed)
    batch = endlib.sample_manifold(ctx, dirs)
    if not batch.samples:
        raise DomainError("every direction failed; nothing to write")

    path = _table_path(cfg, "manifold")
    n = eos.n
    header = ([f"a_{i + 1}" for i in range(n)] + ["lambda0", "lambda_bar", "tau_R"]
              + [f"s_R_{i + 1}" for i in range(n)])
    rows = [[*smp.a.a, smp.lambda0, smp.lambda_bar, smp.tau_R, *smp.s_R]
            for smp in batch.samples]
    _write_table(path, header, rows)

    lam0 = np.array([smp.lambda0 for smp in batch.samples])
    summary = {
        "n_directions": count,
        "n_rows": len(batch.samples),
        "n_failures": len(batch.failures),
        "failures": [{"index": i, "error": msg} for i, msg in batch.failures],
        "lambda0_min": float(lam0.min()),
        "lambda0_max": float(lam0.max()),
        "ill_conditioned": int(sum(s.ill_conditioned for s in batch.samples)),
        "seed": seed,
    }
    return summary, [path]


def _run_hugoniot(cfg: RunConfig, data: dict):
    eos = eoslib.EosSpec.from_dict(data["eos"])
    state = rielib.FluidState(data["left"]["rho"], data["left"]["u"],
                              np.asarray(data["left"]["s"]))
    a = endlib.ConeDirection.from_ratios(np.asarray(data["a"], dtype=float))
    family = int(data.get("family", 1))
    mcfg = data.get("margins", {})
    margins = np.geomspace(float(mcfg.get("max", 1e-1)), float(mcfg.get("min", 1e-4)),
                           int(mcfg.get("count", 9)))
    flux = rielib.MultiPressureEulerFlux(eos)
    phi = rielib.traveling_wave_kinetic_function(eos, a, family=family)

    lam_base = flux.lambda_family(state, family)
    c0 = flux.sound_speed(state)
    sign = -1.0 if family == 1 else 1.0
    rows = []
    pairs = []
    for delta in margins:
        lam = lam_base + sign * delta * c0
        u1 = rielib.kinetic_hugoniot(state, lam, phi, flux)
        diss = [rielib.entropy_dissipation(k, lam, *((state, u1) if family == 1
                                                     else (u1, state)))
                for k in range(eos.n)]
        p1 = eoslib.total_pressure(eos, u1.tau, u1.s)
        rows.append([lam, delta, u1.rho, u1.u, p1, *u1.s, *diss])
        pairs.append((state, lam))
    path = _table_path(cfg, "hugoniot")
    header = (["lambda", "margin", "rho", "u", "p_total"]
              + [f"s_{i + 1}" for i in range(eos.n)]
              + [f"E_{i + 1}" for i in range(eos.n)])
    _write_table(path, header, rows)

    tangency = rielib.hugoniot_tangency_check(state, phi, flux, margins=margins)
    report = rielib.validate_kinetic_function(phi, pairs, flux)
    summary = {"tangency": tangency.to_dict(), "kinetic_function": report.to_dict()}
    return summary, [path]


def _run_riemann(cfg: RunConfig, data: dict):
    eos = eoslib.EosSpec.from_dict(data["eos"])
    left = rielib.FluidState(data["left"]["rho"], data["left"]["u"],
                             np.asarray(data["left"]["s"]))
    right = rielib.FluidState(data["right"]["rho"], data["right"]["u"],
                              np.asarray(data["right"]["s"]))
    a_L = endlib.ConeDirection.from_ratios(np.asarray(data["a_L"], dtype=float))
    a_R = endlib.ConeDirection.from_ratios(np.asarray(data["a_R"], dtype=float))
    fan = rielib.solve_riemann_mp_euler(
        left, right, a_L, a_R, eos,
        closure=data.get("closure", "kinetic"),
        resonance_guard=float(data.get("resonance_guard", 1e-6)),
    )

    fan_path = cfg.out_dir / "wavefan.json"
    fan_path.write_text(json.dumps(fan.to_dict(), indent=2) + "\n", encoding="utf-8")

    xi_cfg = data.get("xi")
    if xi_cfg is None:
        span = 1.2 * max(1e-6, max(abs(s) for s in fan.speeds()))
        xi = np.linspace(-span, span, 401)
    else:
        xi = np.linspace(float(xi_cfg["min"]), float(xi_cfg["max"]),
                         int(xi_cfg["count"]))
    sol_path = _table_path(cfg, "solution")
    sample = fan.sample(xi)
    header = ["xi", "rho", "u", "p_total"] + [f"s_{i + 1}" for i in range(eos.n)]
    rows = [[sample["xi"][i], sample["rho"][i], sample["u"][i],
             sample["p_total"][i], *sample["s"][i]] for i in range(xi.size)]
    _write_table(sol_path, header, rows)

    summary = {
        "p_star": fan.p_star,
        "u_star": fan.u_star,
        "wave_speeds": fan.speeds(),
        "waves": [{"kind": w.kind, "family": w.family,
                   "dissipation": [float(x) for x in w.dissipation],
                   "lax_margins": list(w.lax_margins) if w.lax_margins else None}
                  for w in fan.waves],
    }
    return summary, [fan_path, sol_path]


def _run_standing(cfg: RunConfig, data: dict):
    law = rielib.BarotropicLaw.from_dict(data.get("law", {}))
    prob = rielib.StandingWaveProblem(
        model=data["model"],
        rho_minus=data["left"]["rho"],
        v_minus=data["left"]["v"],
        a_minus=data["a_minus"],
        a_plus=data["a_plus"],
        kappa=float(data.get("kappa", 0.0)),
        branch=data.get("branch", "subsonic"),
        law=law,
        resonance_guard=float(data.get("resonance_guard", 1e-6)),
    )
    res = rielib.standing_wave(prob)
    path = cfg.out_dir / "standing.json"
    path.write_text(json.dumps(res.to_dict(), indent=2) + "\n", encoding="utf-8")
    summary = dict(res.to_dict())
    summary["flux_jump_residual"] = res.flux_plus - res.flux_minus - res.dissipation
    return summary, [path]


def _run_validate_eos(cfg: RunConfig, data: dict):
    eos = eoslib.EosSpec.from_dict(data["eos"])
    grid = eoslib.GridSpec.from_dict(data.get("grid", {}))
    report = eoslib.validate_hypotheses(eos, grid)
    path = cfg.out_dir / "eos_report.json"
    path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    summary = {
        "all_pass": report.all_pass,
        "failures": [c.name for c in report.failures()],
    }
    return summary, [path]


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinrel",
        description="viscous profiles, kinetic manifolds and Riemann solvers "
                    "for multi-pressure gas dynamics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path,
                       help="JSON problem description")
        p.add_argument("--out", required=True, type=Path,
                       help="output directory for artifacts")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="table artifact format")
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed for direction sampling")
        p.add_argument("--directions", type=int, default=None,
                       help="number of cone directions (manifold)")
        p.add_argument("--tol-rel", type=float, default=None, dest="tol_rel")
        p.add_argument("--tol-abs", type=float, default=None, dest="tol_abs")
        p.add_argument("--t-max", type=float, default=None, dest="t_max")
    return parser


def _setup_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO,
             "debug": logging.DEBUG}.get(os.environ.get("KR_LOG", "error"), logging.ERROR)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    overrides = {
        "format": args.format,
        "seed": args.seed,
        "directions": args.directions,
        "tol_rel": args.tol_rel,
        "tol_abs": args.tol_abs,
        "t_max": args.t_max,
    }
    cfg = RunConfig(args.command, args.config, args.out, overrides)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
