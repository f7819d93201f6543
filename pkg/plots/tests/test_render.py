from pathlib import Path

import pytest

from kinrel_plots import FigureSpec, SchemaMismatch, render
from kinrel_plots.render import main

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "phase_portrait": (GOLDEN / "orbit.csv",),
    "manifold": (GOLDEN / "manifold.csv",),
    "wave_fan": (GOLDEN / "wavefan.json", GOLDEN / "solution.csv"),
    "hugoniot_curve": (GOLDEN / "hugoniot.csv",),
}


@pytest.mark.parametrize("kind", sorted(CASES))
def test_renders_from_golden(tmp_path, kind):
    out = tmp_path / f"{kind}.png"
    path = render(FigureSpec(kind, CASES[kind], out))
    assert path == out and out.exists()
    assert out.stat().st_size > 4000  # an actual figure, not a stub


@pytest.mark.parametrize("kind", sorted(CASES))
def test_byte_stable_across_runs(tmp_path, kind):
    out1 = tmp_path / "a.png"
    out2 = tmp_path / "b.png"
    render(FigureSpec(kind, CASES[kind], out1))
    render(FigureSpec(kind, CASES[kind], out2))
    assert out1.read_bytes() == out2.read_bytes()


def test_svg_byte_stable(tmp_path):
    out1 = tmp_path / "a.svg"
    out2 = tmp_path / "b.svg"
    render(FigureSpec("phase_portrait", CASES["phase_portrait"], out1))
    render(FigureSpec("phase_portrait", CASES["phase_portrait"], out2))
    assert out1.read_bytes() == out2.read_bytes()


def test_schema_mismatch_wrong_file(tmp_path):
    with pytest.raises(SchemaMismatch):
        render(FigureSpec("phase_portrait", (GOLDEN / "manifold.csv",),
                          tmp_path / "x.png"))
    with pytest.raises(SchemaMismatch):
        render(FigureSpec("hugoniot_curve", (GOLDEN / "orbit.csv",),
                          tmp_path / "y.png"))
    with pytest.raises(SchemaMismatch):
        render(FigureSpec("wave_fan", (GOLDEN / "solution.csv",
                                       GOLDEN / "orbit.csv"),
                          tmp_path / "z.png"))


def test_missing_input_rejected(tmp_path):
    with pytest.raises(FileNotFoundError):
        FigureSpec("manifold", (tmp_path / "nope.csv",), tmp_path / "m.png")


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec("pie_chart", (GOLDEN / "orbit.csv",), tmp_path / "p.png")


class TestCli:
    def test_happy_path(self, tmp_path):
        out = tmp_path / "fig.png"
        rc = main(["--kind", "wave_fan",
                   "--in", str(GOLDEN / "wavefan.json"),
                   "--in", str(GOLDEN / "solution.csv"),
                   "--out", str(out)])
        assert rc == 0 and out.exists()

    def test_schema_error_exit_code(self, tmp_path, capsys):
        rc = main(["--kind", "manifold", "--in", str(GOLDEN / "orbit.csv"),
                   "--out", str(tmp_path / "m.png")])
        assert rc == 1
        assert "render error" in capsys.readouterr().err

    def test_title_passthrough(self, tmp_path):
        out = tmp_path / "fig.png"
        rc = main(["--kind", "phase_portrait",
                   "--in", str(GOLDEN / "orbit.csv"),
                   "--out", str(out), "--title", "custom"])
        assert rc == 0 and out.exists()
