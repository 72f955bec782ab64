import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from qotto.cli import ConfigError, main, parse_config, parse_grid

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _rows(path):
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _write(tmp_path, text, name="c.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cycle_run_engine(tmp_path, capsys):
    assert main(["cycle", "run", str(CONFIGS / "fig3_engine.cfg"), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["mode"] == "engine"
    assert rep["efficiency"] == pytest.approx(0.75, abs=1e-9)
    assert rep["units"] == "hbar=k_B=m=1"
    corners = (tmp_path / "corners.csv").read_text()
    assert corners.startswith("# units:")
    assert {r["corner"] for r in _rows(tmp_path / "corners.csv")} == {"A", "B", "C", "D"}


def test_cycle_run_refrigerator(tmp_path):
    assert main(["cycle", "run", str(CONFIGS / "fig4_refrigerator.cfg"), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["mode"] == "refrigerator"
    assert rep["cop"] == pytest.approx(0.2, rel=1e-9)


def test_config_errors_are_line_numbered(tmp_path, capsys):
    cfg = _write(tmp_path, "omega_c = 0.5\n# comment\nomega_hh = 2\n")
    assert main(["cycle", "run", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "c.cfg:3" in capsys.readouterr().err
    cfg = _write(tmp_path, "omega_c = 0.5\nomega_c = 0.6\n")
    assert main(["cycle", "run", cfg, "--out", str(tmp_path / "o")]) == 2
    assert ":2: duplicate" in capsys.readouterr().err
    cfg = _write(tmp_path, "omega_c = half\n")
    assert main(["cycle", "run", cfg, "--out", str(tmp_path / "o")]) == 2
    assert main(["cycle", "run", str(tmp_path / "missing.cfg"), "--out", str(tmp_path / "o")]) == 2


def test_missing_key_is_config_error():
    with pytest.raises(ConfigError, match="omega_h"):
        from qotto.cli import build_spec

        build_spec(parse_config("omega_c = 1\n"))


def test_no_limit_cycle_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, "omega_c = 0.5\nomega_h = 2\nT_c = 1\nT_h = 4\ntau_c = 0\ntau_h = 0\n")
    assert main(["cycle", "run", cfg, "--out", str(tmp_path / "o")]) == 3
    assert "no limit cycle" in capsys.readouterr().err


def test_infeasible_protocol_exit_code(tmp_path):
    assert main(["protocol", "design", "--kind", "ermakov", "--omega-i", "2", "--omega-f", "0.5",
                 "--duration", "0.3"]) == 4
    cfg = _write(tmp_path, "omega_c = 0.5\nomega_h = 2\nT_c = 1\nT_h = 4\ntau_c = 1\ntau_h = 1\n"
                           "expansion.kind = ermakov\nexpansion.duration = 0.3\n")
    assert main(["cycle", "run", cfg, "--out", str(tmp_path / "o")]) == 4


def test_protocol_design_table(tmp_path):
    out = tmp_path / "p.txt"
    assert main(["protocol", "design", "--omega-i", "2", "--omega-f", "0.5", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# delta_f=")
    assert float(text.split("=", 1)[1].split()[0]) < 1e-8


def test_oracle_check_exit_codes(capsys):
    assert main(["oracle-check", "--draws", "2", "--dim", "32", "--kinds", "sudden"]) == 0
    assert main(["oracle-check", "--draws", "2", "--dim", "32", "--kinds", "isochore", "--tol", "1e-300"]) == 5
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.parametrize("text, expected", [("lin(1, 2, 3)", [1.0, 1.5, 2.0]), ("1, 4", [1.0, 4.0]),
                                            ("geom(1, 100, 3)", [1.0, 10.0, 100.0])])
def test_parse_grid(text, expected):
    assert np.allclose(parse_grid(text), expected)


@pytest.mark.parametrize("text", ["", " , ", "lin(1, 2, 0)", "a, b"])
def test_parse_grid_rejects(text):
    with pytest.raises(ConfigError):
        parse_grid(text)


def test_sweep_argmax_and_threads(tmp_path, monkeypatch):
    outs = []
    for n in ("1", "4"):
        monkeypatch.setenv("QOTTO_THREADS", n)
        out = tmp_path / f"s{n}.csv"
        assert main(["sweep", str(CONFIGS / "sweep_compression.cfg"), "--out", str(out)]) == 0
        outs.append(out.read_text())
    assert outs[0] == outs[1]
    rows = _rows(tmp_path / "s1.csv")
    C = np.array([float(r["C"]) for r in rows])
    P = np.array([float(r["power"]) for r in rows])
    assert C[int(np.argmax(P))] == pytest.approx(2.0, abs=0.02)


def test_sweep_row_errors_do_not_abort(tmp_path):
    cfg = _write(tmp_path, "omega_c = 0.5\nomega_h = 2\nT_c = 1\nT_h = 8\ntau_c = 1\ntau_h = 1\n"
                           "sweep.axis1 = tau_iso\nsweep.grid1 = 0, 1\n")
    out = tmp_path / "s.csv"
    assert main(["sweep", cfg, "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0]["error"].startswith("NoLimitCycleError")
    assert math.isnan(float(rows[0]["work"]))
    assert rows[1]["error"] == "" and float(rows[1]["work"]) < 0


def test_sweep_empty_grid_is_config_error(tmp_path, capsys):
    cfg = _write(tmp_path, "omega_c = 0.5\nomega_h = 2\nT_c = 1\nT_h = 4\ntau_c = 1\ntau_h = 1\n"
                           "sweep.axis1 = C\nsweep.grid1 = ,\n")
    assert main(["sweep", cfg]) == 2
    assert "c.cfg:8" in capsys.readouterr().err


@pytest.mark.parametrize("fig", [2, 3, 4])
def test_figure_data_closes(tmp_path, fig):
    out = tmp_path / f"f{fig}.csv"
    assert main(["figure-data", str(fig), "--points", "60", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# units: hbar=k_B=m=1")
    gap = float(text.split("loop closure gap ")[1].split()[0])
    assert gap < 1e-8
    strokes = {r["stroke"] for r in _rows(out)}
    assert {"hot", "expansion", "cold", "compression"} <= strokes
    assert ("isotherm_hot" in strokes) == (fig != 2)


def test_thirdlaw_command(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["thirdlaw", "--out", str(out)]) == 0
    assert "alpha=" in out.read_text()
    cfg = _write(tmp_path, "thirdlaw.points = 1\n")
    assert main(["thirdlaw", "--config", cfg]) == 2
    assert "points" in capsys.readouterr().err
