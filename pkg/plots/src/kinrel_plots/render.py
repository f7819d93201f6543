"""Batch figure generation from kinrel CLI artifacts.

Reads only the documented CSV/JSON interfaces (orbit.csv, manifold.csv,
wavefan.json + solution.csv, hugoniot.csv) and writes one image per call.
Re-running on the same inputs produces byte-identical files: figures use
a fixed size and dpi, and no timestamps are embedded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "kinrel"  # deterministic SVG ids

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

KINDS = ("phase_portrait", "manifold", "wave_fan", "hugoniot_curve")

__all__ = ["FigureSpec", "SchemaMismatch", "render", "main"]


class SchemaMismatch(ValueError):
    """Input file does not carry the documented header or keys."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[Path, ...]
    out: Path
    style: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "out", Path(self.out))
        if not self.inputs:
            raise ValueError("at least one input file is required")
        for p in self.inputs:
            if not p.exists():
                raise FileNotFoundError(p)


def render(spec: FigureSpec) -> Path:
    """Produce the figure for ``spec`` and return the written path."""
    fig = {
        "phase_portrait": _phase_portrait,
        "manifold": _manifold,
        "wave_fan": _wave_fan,
        "hugoniot_curve": _hugoniot_curve,
    }[spec.kind](spec)
    fig.savefig(spec.out, dpi=110, metadata=_metadata(spec.out))
    plt.close(fig)
    return spec.out


def _metadata(out: Path):
    # SVG embeds a creation date unless suppressed; PNG carries none
    if out.suffix.lower() == ".svg":
        return {"Date": None}
    return None


def _read_csv(path: Path, required_prefix: list[str]) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path}: empty file")
        rows = [list(map(float, row)) for row in reader if row]
    if header[: len(required_prefix)] != required_prefix:
        raise SchemaMismatch(
            f"{path}: header starts with {header[:len(required_prefix)]}, "
            f"expected {required_prefix}")
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    return header, np.asarray(rows)


def _new_axes(nrows=1, height=3.2):
    fig, axes = plt.subplots(nrows, 1, figsize=(6.4, height * nrows),
                             squeeze=False, constrained_layout=True)
    return fig, axes[:, 0]


def _phase_portrait(spec: FigureSpec):
    header, data = _read_csv(spec.inputs[0], ["t", "tau", "s_1"])
    tau = data[:, 1]
    s1 = data[:, 2]
    fig, (ax,) = _new_axes()
    ax.plot(tau, s1, color="tab:blue", lw=1.5)
    ax.plot([tau[0]], [s1[0]], "o", color="tab:green", label="upstream")
    ax.plot([tau[-1]], [s1[-1]], "s", color="tab:red", label="downstream")
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$s_1$")
    ax.set_title(spec.style.get("title", "profile orbit"))
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    return fig


def _manifold(spec: FigureSpec):
    header, data = _read_csv(spec.inputs[0], ["a_1"])
    try:
        lam_col = header.index("lambda0")
    except ValueError:
        raise SchemaMismatch(f"{spec.inputs[0]}: no lambda0 column")
    n = lam_col  # a_1..a_N precede lambda0
    if n < 1 or header[:n] != [f"a_{i + 1}" for i in range(n)]:
        raise SchemaMismatch(f"{spec.inputs[0]}: malformed direction columns")
    lam0 = data[:, lam_col]
    fig, (ax,) = _new_axes()
    if n == 2:
        angle = np.arctan2(data[:, 1], data[:, 0])
        order = np.argsort(angle)
        ax.plot(angle[order], lam0[order], "-o", ms=3, color="tab:blue")
        ax.set_xlabel("direction angle")
    else:
        angle = np.arctan2(data[:, 1], data[:, 0]) if n > 1 else data[:, 0]
        sc = ax.scatter(angle, lam0, c=data[:, 2] if n > 2 else None,
                        s=16, cmap="viridis")
        if n > 2:
            fig.colorbar(sc, ax=ax, label=r"$a_3$")
        ax.set_xlabel("direction angle in the (1,2) plane")
    ax.set_ylabel(r"$\Lambda_0$")
    ax.set_title(spec.style.get("title", "kinetic manifold"))
    ax.grid(True, alpha=0.3)
    return fig


def _wave_fan(spec: FigureSpec):
    if len(spec.inputs) < 2:
        raise SchemaMismatch("wave_fan needs wavefan.json and solution.csv")
    fan_path, sol_path = spec.inputs[0], spec.inputs[1]
    if fan_path.suffix != ".json":
        fan_path, sol_path = sol_path, fan_path
    try:
        fan = json.loads(fan_path.read_text(encoding="utf-8"))
        waves = fan["waves"]
    except (json.JSONDecodeError, KeyError) as exc:
        raise SchemaMismatch(f"{fan_path}: not a wave-fan file ({exc})")
    header, data = _read_csv(sol_path, ["xi", "rho", "u", "p_total"])
    xi = data[:, 0]
    fig, axes = _new_axes(nrows=3, height=2.0)
    for ax, col, label in zip(axes, (1, 2, 3), (r"$\rho$", r"$u$", r"$p$")):
        ax.plot(xi, data[:, col], color="tab:blue", lw=1.4)
        for w in waves:
            for speed in {w["speed_head"], w["speed_tail"]}:
                ax.axvline(speed, color="gray", lw=0.6, ls="--", alpha=0.7)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes[-1].set_xlabel(r"$\xi = x/t$")
    axes[0].set_title(spec.style.get("title", "wave fan"))
    return fig


def _hugoniot_curve(spec: FigureSpec):
    header, data = _read_csv(spec.inputs[0], ["lambda", "margin", "rho", "u",
                                              "p_total"])
    e_cols = [i for i, name in enumerate(header) if name.startswith("E_")]
    if not e_cols:
        raise SchemaMismatch(f"{spec.inputs[0]}: no dissipation columns")
    margin = data[:, 1]
    tau = 1.0 / data[:, 2]
    p = data[:, 4]
    e_total = np.abs(data[:, e_cols]).sum(axis=1)
    fig, (ax1, ax2) = _new_axes(nrows=2, height=2.6)
    ax1.plot(tau, p, "-o", ms=3, color="tab:blue")
    ax1.set_xlabel(r"$\tau$")
    ax1.set_ylabel(r"$p$")
    ax1.set_title(spec.style.get("title", "generalized Hugoniot branch"))
    ax1.grid(True, alpha=0.3)
    pos = e_total > 0
    if np.any(pos):
        ax2.loglog(margin[pos], e_total[pos], "-o", ms=3, color="tab:red")
    ax2.set_xlabel("Lax margin")
    ax2.set_ylabel(r"$\sum_i |E_i|$")
    ax2.grid(True, which="both", alpha=0.3)
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="render figures from kinrel artifacts")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        type=Path, help="input artifact (repeatable)")
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    style = {"title": args.title} if args.title else {}
    try:
        render(FigureSpec(args.kind, tuple(args.inputs), args.out, style))
    except (SchemaMismatch, FileNotFoundError, ValueError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
