import json
import os

import pytest
from click.testing import CliRunner

from graphkdv.cli import load_config, main


def _run(args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


def test_profile_task_writes_report(tmp_path):
    out = tmp_path / "run"
    result = _run(["profile", "--Z", "1.0", "--out", str(out)])
    assert result.exit_code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"]["profile"] is True
    assert report["results"]["profile"]["kind"] == "bump"
    assert (out / "profile_edge0.csv").exists()
    assert (out / "profile_edge1.csv").exists()


def test_profile_task_half_soliton(tmp_path):
    out = tmp_path / "run"
    result = _run(["profile", "--Z", "0.0", "--out", str(out)])
    assert result.exit_code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["results"]["profile"]["kind"] == "half_soliton"


def test_usage_errors_exit_one(tmp_path):
    assert _run(["profile", "--N", "4"]).exit_code == 1
    assert _run(["profile", "--L", "-3"]).exit_code == 1
    runner = CliRunner()
    assert runner.invoke(main, ["bogus"]).exit_code == 1
    assert (
        _run(["profile", "--config", str(tmp_path / "missing.ini")]).exit_code == 1
    )


def test_invalid_profile_is_numerical_failure(tmp_path):
    # Z beyond the existence threshold: config is valid, computation fails
    out = tmp_path / "run"
    result = _run(["profile", "--Z", "3.0", "--out", str(out)])
    assert result.exit_code == 2
    report = json.loads((out / "report.json").read_text())
    assert report["passed"]["profile"] is False
    assert "error" in report["results"]["profile"]


def test_config_file_roundtrip(tmp_path):
    cfg_path = tmp_path / "cfg.ini"
    cfg_path.write_text(
        "[graph]\nm = 2\nn = 2\nalpha = 0.5, 1.5\nbeta = -1.125, -1.375\n"
        "[discretization]\nL = 30\nN = 900\n"
        "[vertex]\nZ = 1.0\n"
        f"[output]\ndir = {tmp_path / 'out'}\n"
    )
    cfg = load_config(str(cfg_path))
    assert cfg.n == 2 and cfg.alpha == (0.5, 1.5) and cfg.N == 900
    result = _run(["profile", "--config", str(cfg_path)])
    assert result.exit_code == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["config"]["alpha"] == [0.5, 1.5]
    assert len(report["results"]["profile"]["vertex_value"]) == 2


def test_spectrum_task_reports_morse_index(tmp_path):
    out = tmp_path / "run"
    result = _run(["spectrum", "--Z", "0.5", "--N", "1200", "--out", str(out)])
    assert result.exit_code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["results"]["spectrum"]["morse_index"] == 2
    assert report["results"]["spectrum"]["kernel_dim"] == 0


def test_modes_task_reports_unstable_pair(tmp_path):
    out = tmp_path / "run"
    result = _run(["modes", "--Z", "-1", "--N", "500", "--out", str(out)])
    assert result.exit_code == 0
    payload = json.loads((out / "report.json").read_text())["results"]["modes"]
    assert payload["zeta"] > 0
    assert payload["mirror_gap"] < 1e-6
    assert (out / "mode_edge0.csv").exists()


def test_sweep_writes_table(tmp_path):
    out = tmp_path / "run"
    result = _run(
        ["sweep", "--z-list", "-0.5,0.5", "--N", "600", "--out", str(out)]
    )
    assert result.exit_code == 0
    rows = json.loads((out / "report.json").read_text())["results"]["sweep"]["rows"]
    assert [r["morse_index"] for r in rows] == [1, 2]
    assert all(r["pairing"] < 0 for r in rows)
    assert all(r["zeta"] > 0 for r in rows)
    table = (out / "sweep.csv").read_text().splitlines()
    assert table[1].startswith("Z,")
    assert len(table) == 4
