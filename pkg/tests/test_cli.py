import csv
import json
from pathlib import Path

import pytest

from nrthreat.cli import main
from nrthreat.threat import TABLE_COLUMNS

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_grid_default(tmp_path):
    assert main(["grid", "--out", str(tmp_path)]) == 0
    rows = {r["channel"]: r for r in _rows(tmp_path / "sparsity.csv")}
    assert float(rows["PBCH"]["re_fraction"]) + float(rows["PBCH_DMRS"]["re_fraction"]) == pytest.approx(0.0168, abs=1e-4)
    assert int(rows["PSS"]["re_count"]) == 508
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert set(manifest["outputs"]) == {"occupancy.csv", "occupancy.json", "sparsity.csv"}
    assert b"\r\n" not in (tmp_path / "occupancy.csv").read_bytes()


def test_grid_uplink_rows_only(tmp_path):
    assert main(["grid", "--config", str(CONFIGS / "grid_uplink.json"), "--out", str(tmp_path)]) == 0
    assert [r["channel"] for r in _rows(tmp_path / "sparsity.csv")] == ["PUCCH", "PRACH", "PUSCH"]


@pytest.mark.parametrize("text,status", [
    ("{not json", 2),
    ("[1, 2]", 2),
    ('{"bw_mhz": 20, "colour": 1}', 2),
    ('{"bw_mhz": 7}', 2),
    ('{"scs_khz": 25}', 2),
    ('{"coreset_time_dur": 9}', 2),
])
def test_grid_config_errors(tmp_path, capsys, text, status):
    cfg = _write(tmp_path, "bad.json", text)
    assert main(["grid", "--config", cfg, "--out", str(tmp_path / "o")]) == status
    assert "config error" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_threat_table_and_override(tmp_path):
    assert main(["threat", "--config", str(CONFIGS / "threat.json"), "--out", str(tmp_path / "a")]) == 0
    table = _rows(tmp_path / "a" / "threat_table.csv")
    assert list(table[0]) == list(TABLE_COLUMNS)
    assert len(table) == 9
    assert len(_rows(tmp_path / "a" / "ranking_scatter.csv")) == 9
    cfg = _write(tmp_path, "o.json", {"overrides": {"PBCH": {"js_ch_db": 3.0}}})
    assert main(["threat", "--config", cfg, "--out", str(tmp_path / "b")]) == 0
    base = {r["channel"]: float(r["js_frame_db"]) for r in _rows(tmp_path / "a" / "threat_table_raw.csv")}
    moved = {r["channel"]: float(r["js_frame_db"]) for r in _rows(tmp_path / "b" / "threat_table_raw.csv")}
    assert moved["PBCH"] - base["PBCH"] == pytest.approx(3.0, abs=1e-12)


def test_threat_unknown_attack(tmp_path):
    cfg = _write(tmp_path, "o.json", {"overrides": {"PDSCH": {"js_ch_db": 1}}})
    assert main(["threat", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_simulate_ber_and_zero_trials(tmp_path):
    cfg = _write(tmp_path, "s.json", {"seed": 2, "trials": 10, "ber": {"ebn0_db": [0, 4], "n_bits": 100000}})
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    for r in _rows(tmp_path / "s" / "ber_sweep.csv"):
        assert r["within_ci"] == "1" and r["ci_valid"] == "1"
    bad = _write(tmp_path, "z.json", {"trials": 0})
    assert main(["simulate", "--config", bad, "--out", str(tmp_path / "z")]) == 2
    assert main(["simulate", "--config", cfg, "--trials", "0", "--out", str(tmp_path / "z")]) == 2


def test_simulate_bler_columns(tmp_path):
    cfg = _write(tmp_path, "s.json", {"trials": 50, "bler": {"js_db": [-5, 10]}, "pss": {"js_db": [0]}})
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "bler_sweep.csv")
    assert {"ci_halfwidth_95", "ci_valid", "trials"} <= set(rows[0])
    assert float(rows[-1]["failure"]) >= 0.9
    results = json.loads((tmp_path / "results.json").read_text())
    assert {"config", "seed", "estimate", "ci", "trials"} <= set(results["records"][0])


def test_defend(tmp_path):
    cfg = _write(tmp_path, "d.json", {"trials": 100, "power_offsets_db": [6]})
    assert main(["defend", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    row = _rows(tmp_path / "a" / "defense_sweep.csv")[0]
    assert float(row["p_dos_mitigated"]) < float(row["p_dos_unmitigated"])
    none = _write(tmp_path, "n.json", {"trials": 50, "attacker": None})
    assert main(["defend", "--config", none, "--out", str(tmp_path / "b")]) == 0
    row = _rows(tmp_path / "b" / "defense_sweep.csv")[0]
    assert float(row["p_dos_mitigated"]) == float(row["p_dos_unmitigated"]) == 0.0


def test_defend_missing_scenario(tmp_path, capsys):
    assert main(["defend", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2
    assert "nope.json" in capsys.readouterr().err
    assert main(["defend", "--out", str(tmp_path)]) == 2


def test_rerun_byte_identical(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    cfg = _write(tmp_path, "s.json", {"seed": 4, "trials": 40, "bler": {"js_db": [0, 2]}})
    outs = []
    for run in ("a", "b"):
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / run)]) == 0
        outs.append({p.name: p.read_bytes() for p in (tmp_path / run).iterdir()})
    assert outs[0] == outs[1]
    assert json.loads(outs[0]["manifest.json"])["timestamp"].startswith("2023-11-14")
