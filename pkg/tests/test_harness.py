"""Config validation, experiment dispatch, CLI, and report determinism."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from wicklab.harness import (
    ConfigError,
    bootstrap_params,
    load_config,
    resolve_config,
    run_experiment,
)
from wicklab.harness.cli import main as cli_main


def write_config(tmp_path: Path, text: str, name: str = "cfg.toml") -> Path:
    path = tmp_path / name
    path.write_text(text)
    return path


AUDIT_CFG = """
[experiment]
name = "resonance-audit"
radius = 8
"""

SOLVE_CFG = """
[experiment]
name = "solve"

[equation]
model = "cubic"

[grid]
n_modes = 32
dt = 1e-3
T = 1.0

[data]
kind = "single_mode"
n = 1
amplitude = 1.0
"""


class TestConfig:
    def test_unknown_key_rejected(self, tmp_path):
        path = write_config(tmp_path, AUDIT_CFG + "\n[grid]\nn_mode = 3\n")
        with pytest.raises(ConfigError) as err:
            load_config(path)
        assert "grid.n_mode" in str(err.value)

    def test_malformed_toml(self, tmp_path):
        path = write_config(tmp_path, "[experiment\nname = oops")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_unknown_experiment(self, tmp_path):
        path = write_config(tmp_path, "[experiment]\nname = 'explode'\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_json_config(self, tmp_path):
        raw = {"experiment": {"name": "resonance-audit", "radius": 4}}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(raw))
        cfg = load_config(path)
        assert cfg.experiment == "resonance-audit"
        assert cfg.options["radius"] == 4

    def test_auto_resolution(self, tmp_path):
        path = write_config(tmp_path, SOLVE_CFG)
        cfg = resolve_config(load_config(path), seed=5)
        s = cfg.params["s"]
        assert cfg.params["alpha"] == pytest.approx(-4 * s + 1e-3)
        assert isinstance(cfg.params["M"], int)
        assert 1 <= cfg.params["M"] <= cfg.torus_grid().max_mode
        assert cfg.data["seed"] == 5


class TestBootstrap:
    def test_zero_norm(self):
        assert bootstrap_params(0.0, -0.125) == (1, 1.0)

    def test_worked_example(self):
        # R = 1, defaults, s = -1/8: need 4 * M^(-1/4) < 1/4, so M > 16^4
        M, T0 = bootstrap_params(1.0, -0.125)
        assert M == 2**17
        assert M ** (-0.25) * 4.0 < 0.25
        assert (M // 2) ** (-0.25) * 4.0 >= 0.25
        cap_c = 0.125
        assert T0**0.25 * (M**cap_c * 4.0 + 16.0) < 0.25

    def test_monotone_in_radius(self):
        M1, T1 = bootstrap_params(1.0, -0.0625)
        M2, T2 = bootstrap_params(2.0, -0.0625)
        assert M2 >= M1 and T2 <= T1

    def test_constant_validation(self):
        with pytest.raises(ValueError):
            bootstrap_params(1.0, -0.1, C2=-1.0)


class TestRunners:
    def test_resonance_audit_report(self, tmp_path):
        cfg = load_config(write_config(tmp_path, AUDIT_CFG))
        report = run_experiment(cfg, tmp_path / "out")
        assert report["status"] == "ok"
        assert report["results"]["audit"]["total_failures"] == 0
        assert (tmp_path / "out" / "report.json").exists()
        assert (tmp_path / "out" / "resonance_audit.csv").exists()

    def test_solve_matches_closed_form(self, tmp_path):
        cfg = load_config(write_config(tmp_path, SOLVE_CFG))
        report = run_experiment(cfg, tmp_path / "out")
        final = {row[0]: complex(row[1], row[2]) for row in report["results"]["final_coeffs"]}
        expected = np.exp(1j * (1 + 1) * 1.0)
        assert abs(final[1] - expected) < 1e-9
        csv = (tmp_path / "out" / "trajectory.csv").read_text().splitlines()
        assert csv[0] == "t,n,re,im"
        assert len(csv) == 1 + 1001 * 32

    def test_blowup_is_structured(self, tmp_path):
        text = SOLVE_CFG.replace("amplitude = 1.0", "amplitude = 1e200")
        cfg = load_config(write_config(tmp_path, text))
        report = run_experiment(cfg, tmp_path / "out")
        assert report["status"] == "blowup"
        assert report["failure"]["step_index"] == 0

    def test_reports_bit_identical(self, tmp_path):
        cfg_path = write_config(tmp_path, SOLVE_CFG)
        cfg = load_config(cfg_path)
        run_experiment(cfg, tmp_path / "a", seed=9)
        run_experiment(cfg, tmp_path / "b", seed=9)
        assert (tmp_path / "a" / "report.json").read_bytes() == (
            tmp_path / "b" / "report.json"
        ).read_bytes()

    def test_rerun_from_embedded_config(self, tmp_path):
        cfg = load_config(write_config(tmp_path, SOLVE_CFG))
        report = run_experiment(cfg, tmp_path / "a", seed=3)
        embedded = report["resolved_config"]
        path = tmp_path / "embedded.json"
        path.write_text(json.dumps(embedded))
        report2 = run_experiment(load_config(path), tmp_path / "b")
        assert (tmp_path / "a" / "report.json").read_bytes() == (
            tmp_path / "b" / "report.json"
        ).read_bytes()

    def test_bootstrap_runner(self, tmp_path):
        text = """
[experiment]
name = "bootstrap"

[data]
kind = "single_mode"
n = 1
amplitude = 1.0

[params]
s = -0.125
"""
        cfg = load_config(write_config(tmp_path, text))
        report = run_experiment(cfg, tmp_path / "out")
        res = report["results"]
        assert res["M"] >= 1 and 0 < res["T0"] <= 1.0
        assert math.log2(res["M"]).is_integer()


class TestCli:
    def test_full_run_with_figures(self, tmp_path):
        cfg = write_config(tmp_path, AUDIT_CFG)
        code = cli_main(["resonance-audit", "--config", str(cfg), "--out", str(tmp_path / "out")])
        assert code == 0
        names = {p.name for p in (tmp_path / "out").iterdir()}
        assert {"report.json", "resonance_audit.csv", "resonance_audit.png", "run_meta.json"} <= names

    def test_verb_mismatch(self, tmp_path):
        cfg = write_config(tmp_path, AUDIT_CFG)
        assert cli_main(["solve", "--config", str(cfg)]) == 2

    def test_malformed_config_no_outputs(self, tmp_path):
        cfg = write_config(tmp_path, "[experiment\n")
        out = tmp_path / "out"
        assert cli_main(["solve", "--config", str(cfg), "--out", str(out)]) == 2
        assert not out.exists()

    def test_blowup_exit_code(self, tmp_path):
        text = SOLVE_CFG.replace("amplitude = 1.0", "amplitude = 1e200")
        cfg = write_config(tmp_path, text)
        out = tmp_path / "out"
        assert cli_main(["solve", "--config", str(cfg), "--out", str(out), "--no-figures"]) == 3
        report = json.loads((out / "report.json").read_text())
        assert report["status"] == "blowup"


class TestApriori:
    def test_small_sweep(self, tmp_path):
        text = """
[experiment]
name = "apriori"
amplitudes = [0.1, 0.2, 0.4]
horizons = [0.25]

[grid]
n_modes = 32
dt = 1e-3
T = 0.25

[params]
s = -0.0625
M = 8

[data]
kind = "random"
seed = 2
sobolev_s0 = 1.0
norm = 1.0
"""
        cfg = load_config(write_config(tmp_path, text))
        report = run_experiment(cfg, tmp_path / "out")
        rows = report["results"]["rows"]
        assert len(rows) == 3
        # small-data regime: the F-surrogate scales near-linearly in amplitude
        f = [r["F_s_alpha"] for r in rows]
        assert f[1] / f[0] == pytest.approx(2.0, rel=0.1)
        assert f[2] / f[1] == pytest.approx(2.0, rel=0.1)
        assert (tmp_path / "out" / "apriori.csv").exists()
