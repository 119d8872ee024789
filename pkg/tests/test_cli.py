from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from dnlw.cli import RunConfig, build_parser, flag_jumps, main, resolve_config
from dnlw.core import cubic_reaction, make_params
from dnlw.phase_plane import explicit_c0_trajectory


def _rows(path):
    with open(path, encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_cstar_classical(tmp_path, capsys):
    out = tmp_path / "c"
    assert main(["cstar", "--m", "1", "--p", "2", "--a", "0.3", "--tol", "1e-7",
                 "--out", str(out)]) == 0
    c = float(capsys.readouterr().out.strip())
    assert c == pytest.approx(0.4 / math.sqrt(2), abs=1e-6)
    assert _json(out / "result.json")["c_star"] == c
    assert (out / "profile.csv").exists()
    assert (out / "provenance.txt").read_text().startswith("dnlw ")
    cfg = RunConfig.from_json((out / "resolved_config.json").read_text())
    assert cfg.options["tol"] == 1e-7 and cfg.kind == "C"


def test_cstar_monostable(tmp_path, capsys):
    assert main(["cstar", "--m", "1", "--p", "2", "--kind", "Cprime",
                 "--out", str(tmp_path)]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(2 * math.sqrt(0.3), abs=1e-3)


@pytest.mark.parametrize("m,p", [("1", "1.5"), ("0.5", "2")])
def test_domain_errors_exit_2(tmp_path, capsys, m, p):
    assert main(["cstar", "--m", m, "--p", p, "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_model_exit_2(tmp_path):
    assert main(["cstar", "--p", "2", "--out", str(tmp_path)]) == 2
    assert main(["trajectory", "--m", "2", "--p", "2", "--out", str(tmp_path)]) == 2


def test_isocline_row_at_a(tmp_path):
    c = 0.2
    assert main(["isocline", "--m", "1", "--p", "2", "--c", str(c), "--n-points", "11",
                 "--out", str(tmp_path)]) == 0
    at_a = sorted(float(r["Z"]) for r in _rows(tmp_path / "isocline.csv")
                  if float(r["X"]) == 0.3)
    assert at_a == pytest.approx([0.0, c], abs=1e-12)


@pytest.mark.parametrize("m,p", [(1, 2), (2, 2)])
def test_trajectory_c0_matches_closed_form(tmp_path, m, p):
    assert main(["trajectory", "--m", str(m), "--p", str(p), "--c", "0",
                 "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "trajectory.csv")
    assert list(rows[0]) == ["tau", "X", "Z", "xi"]
    X = np.array([float(r["X"]) for r in rows])
    Z = np.array([float(r["Z"]) for r in rows])
    sel = (X > 0.05) & (X < 0.95)
    params, reaction = make_params(m, p), cubic_reaction("C", 0.3)
    assert np.max(np.abs(Z[sel] - explicit_c0_trajectory(params, reaction, X[sel]))) <= 1e-6
    assert _json(tmp_path / "result.json")["fate"]


def test_profile_anchor(tmp_path):
    assert main(["profile", "--m", "2", "--p", "2", "--anchor", "0.4",
                 "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "profile.csv")
    xi = np.array([float(r["xi"]) for r in rows])
    phi = np.array([float(r["phi"]) for r in rows])
    assert np.interp(0.0, xi, phi) == pytest.approx(0.4, abs=1e-6)


@pytest.mark.parametrize("wave", ["cs", "zero-to-a", "a-to-zero", "a-to-1"])
def test_profile_waves(tmp_path, wave):
    kind = "Cprime" if wave == "a-to-1" else "C"
    assert main(["profile", "--m", "2", "--p", "2", "--kind", kind, "--wave", wave,
                 "--out", str(tmp_path)]) == 0
    assert _rows(tmp_path / "profile.csv")
    assert (tmp_path / "result.json").exists()


def test_a_to_1_too_fast_exit_2(tmp_path):
    assert main(["profile", "--m", "2", "--p", "2", "--kind", "Cprime", "--wave", "a-to-1",
                 "--c", "3", "--out", str(tmp_path)]) == 2


def test_config_round_trip_is_bit_identical(tmp_path):
    first = tmp_path / "first"
    assert main(["simulate", "--m", "2", "--p", "2", "--L", "10", "--dx", "0.1",
                 "--t-end", "3", "--width", "4", "--snap-times", "1,2",
                 "--out", str(first)]) == 0
    assert (first / "snapshot_t1.csv").exists() and (first / "snapshot_t2.csv").exists()
    cfg = json.loads((first / "resolved_config.json").read_text())
    cfg["out"] = str(tmp_path / "second")
    replay = tmp_path / "replay.json"
    replay.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(replay)]) == 0
    for name in ("final.csv", "trace.csv"):
        assert (first / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_config_command_mismatch(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(RunConfig(command="cstar", m=2, p=2).to_json())
    assert main(["simulate", "--config", str(path)]) == 2


def test_explicit_flags_override_config(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(RunConfig(command="cstar", m=2, p=2, options={"tol": 1e-5}).to_json())
    args = build_parser().parse_args(["cstar", "--config", str(path), "--tol", "1e-7"])
    cfg = resolve_config(args, {})
    assert cfg.m == 2 and cfg.options == {"tol": 1e-7, "eps": 1e-5}


def test_output_dir_from_environment(tmp_path):
    args = build_parser().parse_args(["cstar", "--m", "2", "--p", "2"])
    assert resolve_config(args, {"DNLW_OUT": str(tmp_path)}).out == str(tmp_path / "cstar")
    assert resolve_config(args, {}).out == "dnlw_out/cstar"


def test_sweep_single_cell_matches_cstar(tmp_path, capsys):
    assert main(["cstar", "--m", "2", "--p", "2", "--out", str(tmp_path / "a")]) == 0
    direct = float(capsys.readouterr().out)
    assert main(["sweep", "--pairs", "2:2", "--out", str(tmp_path / "b")]) == 0
    rows = _rows(tmp_path / "b" / "sweep.csv")
    assert len(rows) == 1 and float(rows[0]["c_star"]) == direct
    assert rows[0]["status"] == "ok"


def test_sweep_isolates_failing_cell(tmp_path):
    assert main(["sweep", "--pairs", "2:2,0.5:2,1:3", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "sweep.csv")
    assert [r["status"].split(":")[0] for r in rows] == ["ok", "error", "ok"]
    assert rows[1]["c_star"] == "nan"
    report = _json(tmp_path / "report.json")
    assert report["n_errors"] == 1 and report["n_cells"] == 3


def test_flag_jumps():
    rows = [{"c_star": c, "status": "ok"} for c in (1.0, 1.02, 1.2)]
    rows.append({"c_star": None, "status": "error: DomainError: x"})
    worst = flag_jumps(rows, 0.05)
    assert worst == pytest.approx(0.18 / 1.02, rel=1e-12)
    assert rows[2]["jump"] == "JUMP" and rows[1]["jump"] == ""


def test_threshold_small(tmp_path):
    assert main(["threshold", "--m", "2", "--p", "2", "--L", "60", "--dx", "0.1",
                 "--t-end", "60", "--plateau", "5", "--out", str(tmp_path)]) == 0
    report = _json(tmp_path / "report.json")
    assert report["not_reacting"]["extinct"] is True
    assert report["not_reacting"]["t_stop"] < 100
    assert (tmp_path / "trace_reacting.csv").exists()


def test_saturate_small(tmp_path):
    assert main(["saturate", "--m", "2", "--p", "2", "--L", "30", "--dx", "0.2",
                 "--t-end", "20", "--out", str(tmp_path)]) == 0
    report = _json(tmp_path / "report.json")
    assert report["t_eps"] is not None and report["t_eps"] <= 20
    assert report["inner_max_dev"] <= 0.05


def test_barenblatt_small(tmp_path):
    assert main(["barenblatt", "--m", "2", "--p", "2", "--dx", "0.08", "--levels", "2",
                 "--out", str(tmp_path)]) == 0
    report = _json(tmp_path / "report.json")
    assert report["k"] == pytest.approx(1 / 12, rel=1e-14)
    rows = _rows(tmp_path / "convergence.csv")
    assert len(rows) == 2 and float(rows[1]["l1_error"]) < float(rows[0]["l1_error"])
