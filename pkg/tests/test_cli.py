import csv
import json

import pytest

from conftest import SCENARIOS
from swarmcov.cli import METRIC_COLUMNS, main, parse_axis
from swarmcov.config import ConfigError

SMALL = """
seed = 5
uav_count = 2
duration_s = 4.0

[roi]
ue_positions = [[20.0, 5.0], [-10.0, 12.0]]
"""


@pytest.fixture
def cfg_file(tmp_path):
    path = tmp_path / "scenario.toml"
    path.write_text(SMALL)
    return path


def test_run_writes_three_files(tmp_path, cfg_file):
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_file), "--out-dir", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"metrics.csv", "trajectories.json", "manifest.json"}
    rows = list(csv.reader((out / "metrics.csv").open()))
    assert tuple(rows[0]) == METRIC_COLUMNS and len(rows) == 5
    traj = json.loads((out / "trajectories.json").read_text())
    assert len(traj["steps"]) == 4 and len(traj["steps"][0]["uavs"][0]) == 2


def test_missing_seed_named(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text(SMALL.replace("seed = 5", ""))
    assert main(["run", "--config", str(path), "--out-dir", str(tmp_path / "o")]) != 0
    assert "seed" in capsys.readouterr().err


def test_bad_value_named(tmp_path, cfg_file, capsys):
    assert main(["run", "--config", str(cfg_file), "--out-dir", str(tmp_path / "o"), "--dynamics.a_max=-1"]) != 0
    assert "dynamics.a_max" in capsys.readouterr().err


def test_unknown_override_rejected(tmp_path, cfg_file, capsys):
    assert main(["run", "--config", str(cfg_file), "--out-dir", str(tmp_path / "o"), "--bogus=1"]) != 0
    assert "bogus" in capsys.readouterr().err


def test_override_in_manifest(tmp_path, cfg_file):
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_file), "--out-dir", str(out), "--k=1",
                 "--channel.fading_var_dbm2=0"]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["config"]["k"] == 1 and man["config"]["channel"]["fading_var_dbm2"] == 0.0


def test_seed_flag(tmp_path, cfg_file):
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_file), "--out-dir", str(out), "--seed", "99"]) == 0
    assert json.loads((out / "manifest.json").read_text())["seed"] == 99


def test_manifest_rerun_is_byte_identical(tmp_path, cfg_file):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(cfg_file), "--out-dir", str(a), "--k=2"]) == 0
    assert main(["run", "--config", str(a / "manifest.json"), "--out-dir", str(b)]) == 0
    assert (a / "metrics.csv").read_bytes() == (b / "metrics.csv").read_bytes()
    assert (a / "trajectories.json").read_bytes() == (b / "trajectories.json").read_bytes()


def test_timing_flag_fills_stage_ms(tmp_path, cfg_file):
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_file), "--out-dir", str(out), "--timing"]) == 0
    rows = list(csv.DictReader((out / "metrics.csv").open()))
    assert all(float(r["stage_ms"]) >= 0 for r in rows)


def test_verify_zero_instances(capsys):
    assert main(["verify", "--instances", "0"]) == 0
    assert "all 0 instances passed" in capsys.readouterr().out


def test_verify_small_batch(capsys):
    assert main(["verify", "--instances", "8", "--seed", "3"]) == 0
    assert capsys.readouterr().out.count("PASS") == 8


def test_verify_catches_sign_flip(capsys):
    assert main(["verify", "--instances", "12", "--inject-fault", "psi_r_sign"]) != 0
    assert "FAILED" in capsys.readouterr().out


def test_sweep_k_axis(tmp_path, cfg_file):
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(cfg_file), "--axis", "k=1,2,3", "--trials", "2", "--out-dir", str(out)]) == 0
    rows = list(csv.DictReader((out / "sweep.csv").open()))
    assert {r["value"] for r in rows} == {"1", "2", "3"} and len(rows) == 3 * 4


def test_sweep_controller_axis(tmp_path, cfg_file):
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(cfg_file), "--axis", "controller=coco,disk", "--trials", "1",
                 "--out-dir", str(out)]) == 0
    assert {r["value"] for r in csv.DictReader((out / "sweep.csv").open())} == {"coco", "disk"}


@pytest.mark.parametrize("axis", ["speed=1,2", "k=", "k=a,b", "controller=coco,lloyd", "k=0"])
def test_sweep_bad_axis(tmp_path, cfg_file, axis):
    assert main(["sweep", "--config", str(cfg_file), "--axis", axis, "--out-dir", str(tmp_path / "x")]) != 0


def test_parse_axis():
    assert parse_axis("uav_count=3,5,8") == ("uav_count", [3, 5, 8])
    with pytest.raises(ConfigError):
        parse_axis("k")


def test_sweep_default_trials_is_twenty():
    from swarmcov.cli import build_parser
    args = build_parser().parse_args(["sweep", "--config", "x", "--axis", "k=1"])
    assert args.trials == 20


@pytest.mark.parametrize("name", ["stationary", "dispersed", "moving", "single"])
def test_shipped_scenarios_load(name):
    from swarmcov.config import load_config
    load_config(SCENARIOS / f"{name}.toml")
