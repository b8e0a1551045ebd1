import csv
import json
import subprocess
import sys

import pytest

from shrinking_targets.cli import main


def run(tmp_path, *args):
    return main(["run", *args, "--out", str(tmp_path)])


def test_classify_support(tmp_path):
    assert run(tmp_path, "classify-support", "--measure", "cantor", "--point", "1/3") == 0
    d = json.loads((tmp_path / "classify-support.json").read_text())
    assert (d["kind"], d["y"], d["s_x"]) == ("IsolatedRight", "2/3", "1/3")
    assert d["config"]["point"] == "1/3"


def test_kgs_verify_end_to_end(tmp_path):
    assert run(tmp_path, "kgs-verify", "--horizon", "100000", "--samples", "200", "--seed", "7") == 0
    with open(tmp_path / "kgs-verify.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["h", "sample_index", "N", "Psi", "ratio"]
    assert len(rows) == 201
    d = json.loads((tmp_path / "kgs-verify.json").read_text())
    assert 0.9 <= d["statistics"]["ratio"]["mean"] <= 1.1
    assert d["config"]["seed"] == 7 and d["seeds"]["master"] == 7
    assert "exact" in d["statistics"]["psi"]


@pytest.mark.parametrize("content", ["{not json", "[1, 2]", '{"horizon": -3}', '{"frobnicate": 1}',
                                     '{"command": "t-sequence"}', '{"backend": "float"}'])
def test_malformed_config_writes_nothing(tmp_path, content):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(content)
    out = tmp_path / "out"
    assert main(["run", "kgs-verify", "--config", str(cfg), "--out", str(out)]) == 2
    assert not out.exists()


def test_flag_for_other_experiment_is_rejected(tmp_path):
    assert run(tmp_path, "kgs-verify", "--measure", "cantor") == 2
    assert list(tmp_path.iterdir()) == []


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"horizon": 7, "measure": "cantor", "point": "1/3"}))
    out = tmp_path / "out"
    assert main(["run", "t-sequence", "--config", str(cfg), "--horizon", "3", "--out", str(out)]) == 0
    rows = (out / "t-sequence.csv").read_text().splitlines()
    assert rows[0] == "n,t_n,error_bound" and len(rows) == 4


def test_outputs_are_byte_identical(tmp_path):
    def once():
        assert main(["run", "simult-expanding", "--horizon", "300", "--samples", "8", "--out", str(tmp_path)]) == 0
        assert main(["run", "rotation-counterexample", "--horizon", "60", "--out", str(tmp_path)]) == 0
        return {f.name: f.read_bytes() for f in tmp_path.iterdir()}

    first = once()
    assert len(first) == 6
    assert once() == first


def test_budget_exhaustion_is_flagged(tmp_path):
    code = run(tmp_path, "rotation-counterexample", "--horizon", "200", "--backend", "fixed", "--bits", "64")
    assert code == 3
    d = json.loads((tmp_path / "rotation-counterexample.json").read_text())
    assert d["partial"] is True and "PrecisionError" in d["error"]
    assert not (tmp_path / "rotation-counterexample.csv").exists()


def test_rational_theta_reports_partial_times(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"theta": "1/2"}))
    out = tmp_path / "out"
    assert main(["run", "rotation-counterexample", "--config", str(cfg), "--horizon", "5",
                 "--out", str(out)]) == 3
    d = json.loads((out / "rotation-counterexample.json").read_text())
    assert d["partial_result"]["times"] == [1, 2]


def test_counterexample_summaries(tmp_path):
    assert run(tmp_path, "rotation-counterexample", "--horizon", "300") == 0
    d = json.loads((tmp_path / "rotation-counterexample.json").read_text())
    assert d["nonincreasing"] and d["measure_sum"]["at_least_harmonic"]
    assert all(v["direct_sweep_agrees"] for v in d["tail_unions"].values())
    assert run(tmp_path, "denjoy-counterexample", "--horizon", "120") == 0
    d = json.loads((tmp_path / "denjoy-counterexample.json").read_text())
    assert d["nonincreasing"] and d["semiconjugacy_defect"]["sup"]["value"] <= d["semiconjugacy_defect"]["bound"]["value"]
    assert d["rotation_number"]["error"] <= d["rotation_number"]["bound"]


def test_oracle_suite(tmp_path):
    assert run(tmp_path, "oracle-suite", "--horizon", "400", "--samples", "200000") == 0
    assert json.loads((tmp_path / "oracle-suite.json").read_text())["all_passed"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "shrinking_targets", "run", "t-sequence", "--horizon", "2",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "t-sequence.json").exists()
