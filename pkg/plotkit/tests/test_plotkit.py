"""plotkit: golden-fixture rendering, determinism, and schema failures."""

from pathlib import Path

import pytest

from plotkit.cli import entry
from plotkit.render import PlotJob
from plotkit.schemas import SchemaError, read_table

FX = Path(__file__).resolve().parent / "fixtures"

GOLDEN_JOBS = [
    ("curves", [FX / "curves.csv"]),
    ("hold", [FX / "hold_pd.csv", FX / "hold_muscle.csv"]),
    ("learning", [FX / "curve_seed0.csv", FX / "curve_mean.csv"]),
    ("hop", [FX / "hop_muscle.csv"]),
    ("beta-map", [FX / "sweep.csv"]),
]


def run(kind, inputs, out, extra=()):
    return entry([kind, "--in", *[str(p) for p in inputs],
                  "--out", str(out), *extra])


@pytest.mark.parametrize("kind,inputs", GOLDEN_JOBS,
                         ids=[k for k, _ in GOLDEN_JOBS])
def test_golden_fixture_renders(kind, inputs, tmp_path):
    out = tmp_path / f"{kind}.png"
    assert run(kind, inputs, out) == 0
    data = out.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 2000, "suspiciously small image"


def test_identical_inputs_give_identical_bytes(tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert run("beta-map", [FX / "sweep.csv"], a) == 0
    assert run("beta-map", [FX / "sweep.csv"], b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_title_flag_changes_the_figure(tmp_path):
    plain, titled = tmp_path / "p.png", tmp_path / "t.png"
    assert run("hop", [FX / "hop_muscle.csv"], plain) == 0
    assert run("hop", [FX / "hop_muscle.csv"], titled,
               ("--title", "hop height")) == 0
    assert plain.read_bytes() != titled.read_bytes()


def test_schema_violation_names_missing_columns(tmp_path, capsys):
    out = tmp_path / "x.png"
    rc = run("learning", [FX / "learning_missing_column.csv"], out)
    assert rc == 2
    err = capsys.readouterr().err
    assert "missing required column(s) max_return" in err
    assert not out.exists(), "no image may be left behind on failure"


def test_empty_csv_is_an_explicit_error(tmp_path, capsys):
    out = tmp_path / "x.png"
    assert run("hold", [FX / "empty_trace.csv"], out) == 2
    assert "no data rows" in capsys.readouterr().err
    assert not out.exists()


def test_missing_input_file(tmp_path, capsys):
    assert run("curves", [tmp_path / "absent.csv"],
               tmp_path / "x.png") == 2
    assert "no such file" in capsys.readouterr().err


def test_non_numeric_cell_is_located(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,q\n0.0,0.1\n0.005,oops\n")
    assert run("hold", [bad], tmp_path / "x.png") == 2
    err = capsys.readouterr().err
    assert f"{bad}:3" in err
    assert "non-numeric" in err


def test_incomplete_sweep_grid_is_rejected(tmp_path, capsys):
    partial = tmp_path / "partial.csv"
    lines = (FX / "sweep.csv").read_text().splitlines()
    partial.write_text("\n".join(lines[:-1]) + "\n")  # drop one grid cell
    assert run("beta-map", [partial], tmp_path / "x.png") == 2
    assert "incomplete" in capsys.readouterr().err


def test_beta_map_takes_exactly_one_input(tmp_path, capsys):
    assert run("beta-map", [FX / "sweep.csv", FX / "sweep.csv"],
               tmp_path / "x.png") == 2
    assert "exactly one" in capsys.readouterr().err


def test_plotjob_validates_kind_and_inputs():
    with pytest.raises(SchemaError, match="unknown plot kind"):
        PlotJob(kind="pie", inputs=("x.csv",), output="x.png")
    with pytest.raises(SchemaError, match="at least one input"):
        PlotJob(kind="hold", inputs=(), output="x.png")


def test_read_table_keeps_required_columns_only():
    cols = read_table(FX / "hold_pd.csv", ("t", "q"))
    assert set(cols) == {"t", "q"}
    assert len(cols["t"]) == len(cols["q"]) == 200
    assert cols["t"][0] == 0.0
