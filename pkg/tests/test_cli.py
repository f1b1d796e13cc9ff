import io
import json
import subprocess
import sys

import pytest

from diophsieve.cli import EXIT_CAPACITY, EXIT_DOMAIN, EXIT_USAGE, PRESETS, load_config, resolve, run
from diophsieve.errors import ConfigError


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def test_ps_preset():
    code, out = call("ps", "--preset", "ps-180")
    assert code == 0
    doc = json.loads(out)
    assert 179 <= doc["result"]["rho_c_inverse"] <= 181
    assert abs(doc["result"]["laborde_margin"]) < 1e-9
    assert doc["provenance"]["c"] == "preset:ps-180"
    assert doc["constants"]["A2"] == 43.496


def test_ps_flags_override_preset():
    code, out = call("ps", "--preset", "ps-180", "--r", "3", "--c", "1.001")
    doc = json.loads(out)
    assert code == 0
    assert doc["config"]["r"] == 3 and doc["provenance"]["r"] == "flag"
    assert doc["result"]["laborde_passed"] is False


def test_optimize_preset_reports_feasible():
    code, out = call("optimize", "--preset", "paper-118")
    doc = json.loads(out)
    assert code == 0
    rep = doc["result"]["report"]
    assert rep["feasible"] and rep["h_max"] > 0
    assert rep["breakdown"]["most_negative_term"] == "F1_main"


def test_usage_errors_exit_64(capsys):
    assert call("nosuch")[0] == EXIT_USAGE
    assert call("ps", "--bogus-flag", "1")[0] == EXIT_USAGE
    assert call("ps", "--preset", "unknown")[0] == EXIT_USAGE
    assert call()[0] == EXIT_USAGE


def test_domain_error_exit_1(capsys):
    code, _ = call("ps", "--c", "1.5")
    assert code == EXIT_DOMAIN
    assert "DomainError" in capsys.readouterr().err
    assert call("hunt", "--lambda2", "1")[0] == EXIT_DOMAIN
    assert call("ps", "--r", "2.5")[0] == EXIT_DOMAIN


def test_capacity_error_exit_2(capsys):
    assert call("hunt", "--X", "1e9")[0] == EXIT_CAPACITY


def test_unknown_config_key(tmp_path, capsys):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"thheta": 4.0}))
    code, _ = call("optimize", "--config", str(p))
    assert code == EXIT_DOMAIN
    assert "thheta" in capsys.readouterr().err


def test_config_parse_error_location(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text('{\n  "rho": 0.01,\n  "c": ,\n}\n')
    with pytest.raises(ConfigError, match="line 3, column 8"):
        load_config(str(p))
    p.write_text('{"c": [1, 2]}')
    with pytest.raises(ConfigError, match="scalars"):
        load_config(str(p))


def test_layer_precedence(tmp_path):
    file_cfg = {"preset": "paper-118", "c": 3.9, "b": 1.0}
    cfg, prov, preset = resolve("optimize", None, file_cfg, {"c": "3.95"})
    assert preset == "paper-118"
    assert cfg["c"] == 3.95 and prov["c"] == "flag"
    assert prov["b"] == "config"
    assert prov["vartheta"] == "preset:paper-118"
    assert prov["harman"] == "default"


def test_preset_must_apply():
    with pytest.raises(ConfigError):
        resolve("windows", "ps-180", {}, {})
    assert set(PRESETS) == {"paper-118", "harman-147", "ps-180"}


def test_byte_identical_across_threads(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert call("hunt", "--X", "100000", "--threads", "1", "--out", str(a))[0] == 0
    assert call("hunt", "--X", "100000", "--threads", "4", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    summ = json.loads((tmp_path / "a.csv.summary.json").read_text())
    assert summ["result"]["records"] > 0


def test_csv_header_carries_config_and_constants():
    code, out = call("limits", "--points", "5")
    lines = out.splitlines()
    assert code == 0
    assert any(l.startswith("# constants:") and "43.496" in l for l in lines)
    assert any(l.startswith("# config:") for l in lines)
    assert lines[-6] == "s,f1,F1,F2"


def test_windows_and_verify_small():
    code, out = call("windows", "--format", "json", "--grid-points", "1000", "--coeffs", "20")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["selberg"]["sandwich_holds"]
    assert doc["result"]["smooth"]["coefficient_bound_holds"]
    code, out = call("verify", "--x", "10000", "--v-grid", "1000,10000", "--ps-n", "2000",
                     "--pi-x", "10000")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["ps_equivalence"]["mismatches"] == 0


def test_jrho_with_oracle():
    code, out = call("jrho", "--mc-samples", "200000", "--seed", "4")
    doc = json.loads(out)
    assert code == 0
    assert abs(doc["result"]["mc_z_score"]) < 4


def test_objective_and_density():
    code, out = call("objective", "--delta", "0.9445757")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["breakdown"]["total"] > 0
    assert doc["result"]["decomposition"]["applicable"] is False
    code, out = call("density", "--X", "100000", "--d-max", "10")
    assert code == 0 and out.splitlines()[-1].startswith("A,10,")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "diophsieve", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "diophsieve" in proc.stdout
