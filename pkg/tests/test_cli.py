"""CLI behaviour: exit codes, overrides, manifests, byte-identical reruns."""

import json
import subprocess
import sys

import pytest

from gaussdkw.cli import main
from gaussdkw.tables import read_table


def write_cfg(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture()
def dkw_cfg(tmp_path):
    return write_cfg(tmp_path, "dkw.json", {
        "experiment": "dkw_envelope", "m": 300, "delta": 0.05, "c_env": 2.0,
        "trials": 8, "base_seed": 11,
        "set_spec": {"kind": "sphere", "d": 6, "n": 5, "seed": 2},
    })


class TestExperimentCommand:
    def test_run_writes_outputs(self, tmp_path, dkw_cfg):
        out = tmp_path / "run1"
        assert main(["experiment", "dkw_envelope", "--config", dkw_cfg,
                     "--out-dir", str(out)]) == 0
        for name in ("outcomes.csv", "violation_rate.csv", "summary.json",
                     "manifest.json"):
            assert (out / name).exists()
        table = read_table(out / "outcomes.csv")
        assert table.schema == "outcomes"

    def test_override_applies(self, tmp_path, dkw_cfg):
        out = tmp_path / "run_o"
        assert main(["experiment", "dkw_envelope", "--config", dkw_cfg,
                     "--override", "trials=3", "--out-dir", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["trials"] == 3
        assert len(read_table(out / "outcomes.csv").rows) == 3

    def test_unknown_override_key_exit_1(self, tmp_path, dkw_cfg, capsys):
        out = tmp_path / "run_bad"
        code = main(["experiment", "dkw_envelope", "--config", dkw_cfg,
                     "--override", "tirals=3", "--out-dir", str(out)])
        assert code == 1
        assert "tirals" in capsys.readouterr().err

    def test_manifest_rerun_byte_identical(self, tmp_path, dkw_cfg):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["experiment", "dkw_envelope", "--config", dkw_cfg,
                     "--out-dir", str(out1)]) == 0
        assert main(["experiment", "dkw_envelope", "--config",
                     str(out1 / "manifest.json"), "--out-dir", str(out2)]) == 0
        for name in ("outcomes.csv", "violation_rate.csv", "summary.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_thread_count_invariance(self, tmp_path, dkw_cfg):
        out1, out4 = tmp_path / "t1", tmp_path / "t4"
        assert main(["experiment", "dkw_envelope", "--config", dkw_cfg,
                     "--threads", "1", "--out-dir", str(out1)]) == 0
        assert main(["experiment", "dkw_envelope", "--config", dkw_cfg,
                     "--threads", "4", "--out-dir", str(out4)]) == 0
        assert (out1 / "outcomes.csv").read_bytes() == (out4 / "outcomes.csv").read_bytes()

    def test_missing_config_file_exit_1(self, tmp_path):
        assert main(["experiment", "dkw_envelope", "--config",
                     str(tmp_path / "absent.json")]) == 1


class TestSetgenAndComplexity:
    def test_round_trip(self, tmp_path):
        out_csv = tmp_path / "cap.csv"
        assert main(["setgen", "cap", "--d", "8", "--n", "6", "--seed", "4",
                     "--out", str(out_csv)]) == 0
        assert out_csv.exists()
        assert (tmp_path / "cap.csv.manifest.json").exists()
        report = tmp_path / "report.json"
        assert main(["complexity", "report", str(out_csv), "--out", str(report)]) == 0
        payload = json.loads(report.read_text())
        assert payload["gamma1_upper"] >= 1.0
        assert payload["sudakov_lower"] <= payload["gamma1_upper"]

    def test_setgen_missing_n_exit_1(self, tmp_path):
        assert main(["setgen", "sphere", "--d", "5", "--out",
                     str(tmp_path / "s.csv")]) == 1


class TestDeviationAndTransport:
    def test_deviation_outputs(self, tmp_path):
        cfg = write_cfg(tmp_path, "dev.json", {
            "m": 200, "delta": 0.1, "base_seed": 3,
            "set_spec": {"kind": "cap", "d": 8, "n": 3, "seed": 1},
        })
        out = tmp_path / "dev_out"
        assert main(["deviation", "run", "--config", cfg, "--out-dir", str(out)]) == 0
        dev = read_table(out / "deviation.csv")
        assert dev.schema == "deviation"
        assert dev.header[:6] == ["trial", "seed", "m", "d", "delta", "direction_index"]
        assert len(dev.rows) == 6  # symmetrised cap: 2n directions
        env = read_table(out / "envelope.csv")
        assert env.schema == "envelope" and env.header == ["t", "abs_deviation",
                                                           "envelope"]

    def test_deviation_unknown_key_exit_1(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "dev.json", {
            "m": 100, "delta": 0.1, "base_sed": 3,
            "set_spec": {"kind": "single", "d": 4},
        })
        assert main(["deviation", "run", "--config", cfg,
                     "--out-dir", str(tmp_path / "x")]) == 1
        assert "base_sed" in capsys.readouterr().err

    def test_transport_outputs(self, tmp_path):
        cfg = write_cfg(tmp_path, "tr.json", {
            "m": 128, "base_seed": 5,
            "set_spec": {"kind": "sphere", "d": 6, "n": 4, "seed": 8},
        })
        out = tmp_path / "tr_out"
        assert main(["transport", "run", "--config", cfg, "--out-dir", str(out)]) == 0
        re_tab = read_table(out / "rearrangement.csv")
        assert re_tab.schema == "rearrangement"
        assert len(re_tab.rows) == 128
        cells = read_table(out / "cells.csv")
        assert cells.schema == "cells"
        assert all(float(row[1]) >= 0.0 for row in cells.rows)

    def test_transport_rerun_identical(self, tmp_path):
        cfg = write_cfg(tmp_path, "tr.json", {
            "m": 64, "base_seed": 5,
            "set_spec": {"kind": "sphere", "d": 5, "n": 3, "seed": 8},
        })
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["transport", "run", "--config", cfg, "--out-dir", str(out1)]) == 0
        assert main(["transport", "run", "--config", str(out1 / "manifest.json"),
                     "--out-dir", str(out2)]) == 0
        assert (out1 / "transport.csv").read_bytes() == (out2 / "transport.csv").read_bytes()


class TestAnalytics:
    def test_check_writes_summary(self, tmp_path):
        out = tmp_path / "an"
        assert main(["analytics", "check", "--out", str(out)]) == 0
        payload = json.loads((out / "analytics.json").read_text())
        assert payload["roundtrip_max_error"] <= 1e-10
        assert payload["density_fd_max_error"] <= 1e-6


class TestConsoleScript:
    def test_help_via_subprocess(self):
        proc = subprocess.run([sys.executable, "-m", "gaussdkw.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "experiment" in proc.stdout
