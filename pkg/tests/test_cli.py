"""Command-line surface: grid parsing, CSV schema and determinism, figure
presets, the self-check report, and its sensitivity to injected defects."""

import csv
import io

import pytest

import cellcorr.analytic_coverage as cov
from cellcorr import cli


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_parse_grid_forms():
    assert cli.parse_grid("0:3:0.25", "v") == tuple(
        0.25 * k for k in range(13))
    assert cli.parse_grid("1,2,5", "lambda") == (1.0, 2.0, 5.0)
    assert cli.parse_grid("2.0", "v") == (2.0,)
    for bad in ("3:1:0.5", "1:2", "a,b", ""):
        with pytest.raises(ValueError):
            cli.parse_grid(bad, "v")


@pytest.mark.parametrize("argv", [
    ["sweep", "--quantity", "jcp", "--method", "mc"],
    ["sweep", "--quantity", "corr", "--epsilon", "0"],
    ["sweep", "--quantity", "jcp", "--epsilon", "1"],
    ["sweep", "--quantity", "temporal-corr", "--v", "1"],
    ["sweep", "--quantity", "handoff", "--v", "3:1:0.5"],
    ["sweep", "--quantity", "corr", "--strategy", "skip"],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_sweep_schema_and_worker_independence(tmp_path):
    out = tmp_path / "s.csv"
    base = ["sweep", "--quantity", "jcp", "--method", "both",
            "--v", "0,0.8", "--trials", "5000", "--out", str(out)]
    assert cli.main(base + ["--workers", "1"]) == 0
    first = out.read_bytes()
    rows = _read(out)

    with open(out, encoding="utf-8") as fh:
        header = next(csv.reader(fh))
    assert tuple(header) == cli._COLUMNS
    assert len(rows) == 4
    for row in rows:
        if row["method"] == "analytic":
            assert row["ci_half_width"] == "" and row["n_trials"] == ""
            assert row["seed"] == "" and float(row["err_est"]) >= 0.0
        else:
            assert row["err_est"] == ""
            assert float(row["ci_half_width"]) > 0.0
            assert int(row["n_trials"]) == 5000
            assert int(row["seed"]) >= 0
        assert 0.0 <= float(row["value"]) <= 1.0

    assert cli.main(base + ["--workers", "4"]) == 0
    assert out.read_bytes() == first

    plot = tmp_path / "s_plot.py"
    assert plot.exists()
    compile(plot.read_text(encoding="utf-8"), str(plot), "exec")


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("# preset-style config\n"
                   "quantity=handoff\n"
                   "v=0:1:0.5\n"
                   "out=" + str(tmp_path / "c.csv") + "\n",
                   encoding="utf-8")
    assert cli.main(["sweep", "--config", str(cfg), "--v", "2.0"]) == 0
    rows = _read(tmp_path / "c.csv")
    assert [r["v"] for r in rows] == ["2.0"]
    assert rows[0]["quantity"] == "handoff"

    cfg2 = tmp_path / "bad.cfg"
    cfg2.write_text("quantify=jcp\n", encoding="utf-8")
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--config", str(cfg2)])
    assert exc.value.code == 2


def test_fig5_preset_reproduces_the_curve(tmp_path):
    out = tmp_path / "fig5.csv"
    assert cli.main(["preset", "fig5", "--trials", "2000",
                     "--out", str(out)]) == 0
    rows = _read(out)
    assert len(rows) == 26
    assert {r["quantity"] for r in rows} == {"jcp"}
    analytic = [r for r in rows if r["method"] == "analytic"]
    sampled = [r for r in rows if r["method"] == "mc"]
    assert len(analytic) == len(sampled) == 13
    assert [float(r["v"]) for r in analytic] == [
        0.25 * k for k in range(13)]
    # the static end dominates the far end on both sides
    assert float(analytic[0]["value"]) > float(analytic[-1]["value"])
    assert float(sampled[0]["value"]) > float(sampled[-1]["value"])
    # MC tracks the analytic curve loosely even at this tiny trial count
    for a, m in zip(analytic, sampled):
        assert abs(float(a["value"]) - float(m["value"])) < 0.05


def test_fig4_preset_shows_the_bell(tmp_path):
    out = tmp_path / "fig4.csv"
    assert cli.main(["preset", "fig4", "--out", str(out)]) == 0
    rows = _read(out)
    assert len(rows) == 13
    values = [float(r["value"]) for r in rows]
    peak = max(values)
    assert peak > values[0] + 0.01 and peak > values[-1] + 0.01
    diffs = [b - a for a, b in zip(values, values[1:])]
    sign_changes = sum(1 for a, b in zip(diffs, diffs[1:]) if a * b < 0)
    assert sign_changes == 1


def test_validate_passes_and_is_deterministic():
    buf1, buf2 = io.StringIO(), io.StringIO()
    assert cli.run_validate(stream=buf1) == 0
    assert cli.run_validate(stream=buf2) == 0
    assert buf1.getvalue() == buf2.getvalue()
    assert "0 failure(s)" in buf1.getvalue()


def test_validate_catches_a_sign_error(monkeypatch):
    orig = cov.b1_arc_integral
    monkeypatch.setattr(cov, "b1_arc_integral", lambda *a: -orig(*a))
    buf = io.StringIO()
    failures = cli.run_validate(stream=buf)
    report = buf.getvalue()
    assert failures >= 1
    assert "[FAIL] mc-vs-analytic-conventional" in report


def test_main_validate_exit_code(monkeypatch):
    monkeypatch.setattr(cli, "run_validate", lambda seed: 2)
    assert cli.main(["validate"]) == 1
    monkeypatch.setattr(cli, "run_validate", lambda seed: 0)
    assert cli.main(["validate"]) == 0
