import hashlib
import json
import os

import numpy as np
import pytest

from instantform import cli
from instantform.errors import ConfigError


def run_cli(tmp_path, sub, cfg, out_name="out", seed=None):
    out = str(tmp_path / out_name)
    cfg_path = tmp_path / f"{sub}-config.json"
    cfg_path.write_text(json.dumps(cfg))
    argv = [sub, "--config", str(cfg_path), "--out", out]
    if seed is not None:
        argv += ["--seed", str(seed)]
    code = cli.main(argv)
    return code, out


def only_run_dir(out):
    entries = [os.path.join(out, d) for d in os.listdir(out)]
    assert len(entries) == 1
    return entries[0]


def read_json(run_dir, name):
    with open(os.path.join(run_dir, name)) as fh:
        return json.load(fh)


def test_validate_foliation_reports_inadmissible(tmp_path):
    cfg = {
        "embedding": {"kind": "rigid", "omega": 0.8},
        "grid": {"tau_min": 0.0, "tau_max": 0.4, "n_tau": 2,
                 "sigma_extent": 2.0, "n_sigma": 7},
    }
    code, out = run_cli(tmp_path, "validate-foliation", cfg)
    assert code == 0  # the run succeeded; the verdict lives in the report
    rd = only_run_dir(out)
    rep = read_json(rd, "report.json")
    assert rep["passed"] is False
    assert rep["n_violations"] > 0
    assert os.path.exists(os.path.join(rd, "violations.csv"))


def test_manifest_contents(tmp_path):
    cfg = {"embedding": {"kind": "differential", "omega": 1.0, "r0": 1.0}}
    code, out = run_cli(tmp_path, "validate-foliation", cfg)
    assert code == 0
    man = read_json(only_run_dir(out), "manifest.json")
    # resolved config includes every default, not just what was given
    assert man["config"]["sgn"] == 1
    assert man["config"]["c"] == 1.0
    assert man["config"]["seed"] == 0
    assert "numpy" in man["versions"]
    assert "scipy" in man["versions"]
    assert man["wall_time_s"] >= 0
    assert man["subcommand"] == "validate-foliation"
    assert "artifacts" in man


def test_radar_rows_and_horizon_status(tmp_path):
    cfg = {
        "worldline": {"kind": "rindler", "accel": 0.7},
        "events": [[0.1, 2.0, 0.0, 0.0],
                   [0.5, 3.0, 1.0, -1.0],
                   [2.0, 1.0, 0.0, 0.0]],  # beyond the horizon
    }
    code, out = run_cli(tmp_path, "radar", cfg)
    assert code == 0
    lines = open(os.path.join(only_run_dir(out), "radar.csv")).read().splitlines()
    assert len(lines) == 4
    assert lines[1].split(",")[-1] == "ok"
    assert lines[3].split(",")[-1].startswith("no_solution")


def test_radar_random_events(tmp_path):
    cfg = {
        "worldline": {"kind": "inertial", "origin": [0.0, 0.0, 0.0],
                      "h": [0.3, 0.0, 0.0]},
        "random_events": {"n": 12, "time_scale": 2.0, "space_scale": 2.0},
        "seed": 4,
    }
    code, out = run_cli(tmp_path, "radar", cfg)
    assert code == 0
    lines = open(os.path.join(only_run_dir(out), "radar.csv")).read().splitlines()
    assert len(lines) == 13
    assert all(line.split(",")[-1] == "ok" for line in lines[1:])


TUBE_CFG = {
    "particles": [
        {"m": 1.0, "x": [0.3, 0.1, -0.2], "p": [0.2, 0.0, 0.1]},
        {"m": 1.5, "x": [-0.4, 0.2, 0.5], "p": [-0.1, 0.3, 0.0]},
    ],
    "n_frames": 50, "rapidity_max": 2.5, "seed": 9,
}


def digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def test_repeated_runs_are_byte_identical(tmp_path):
    code_a, out_a = run_cli(tmp_path, "tube", TUBE_CFG, out_name="a")
    code_b, out_b = run_cli(tmp_path, "tube", TUBE_CFG, out_name="b")
    assert code_a == code_b == 0
    da, db = only_run_dir(out_a), only_run_dir(out_b)
    # the run directory name is a hash of the resolved config
    assert os.path.basename(da) == os.path.basename(db)
    names = sorted(os.listdir(da))
    assert names == sorted(os.listdir(db))
    for name in names:
        if name == "manifest.json":
            continue  # carries wall time
        assert digest(os.path.join(da, name)) == digest(os.path.join(db, name))


def test_seed_override_changes_run_dir(tmp_path):
    _, out_a = run_cli(tmp_path, "tube", TUBE_CFG, out_name="a")
    _, out_b = run_cli(tmp_path, "tube", TUBE_CFG, out_name="b", seed=123)
    assert (os.path.basename(only_run_dir(out_a))
            != os.path.basename(only_run_dir(out_b)))


def test_tube_output_within_bound(tmp_path):
    code, out = run_cli(tmp_path, "tube", TUBE_CFG)
    assert code == 0
    tube = read_json(only_run_dir(out), "tube.json")
    assert tube["within_bound"] is True
    assert tube["max_distance"] <= tube["bound"] * (1 + 1e-12)


def test_centers_invariants(tmp_path):
    cfg = {
        "particles": [
            {"m": 1.0, "x": [1.0, 0.0, 0.0], "p": [0.0, 0.4, 0.0]},
            {"m": 1.0, "x": [-1.0, 0.0, 0.0], "p": [0.0, -0.4, 0.3]},
        ],
    }
    code, out = run_cli(tmp_path, "centers", cfg)
    assert code == 0
    inv = read_json(only_run_dir(out), "invariants.json")
    want = np.linalg.norm(inv["S_bar"]) / inv["Mc"]
    assert inv["tube_radius"] == pytest.approx(want, abs=1e-15)


def test_evolve_free_h_column_constant(tmp_path):
    cfg = {
        "m1": 1.0, "m2": 2.0, "rho0": [1.0, 0.0, 0.0],
        "pi0": [0.0, 0.3, 0.0], "potential": "none",
        "dtau": 0.05, "n_steps": 200, "sample_every": 10,
    }
    code, out = run_cli(tmp_path, "evolve", cfg)
    assert code == 0
    rows = open(os.path.join(only_run_dir(out), "trajectory.csv")
                ).read().strip().splitlines()[1:]
    assert len(rows) == 21
    h_strings = {row.split(",")[7] for row in rows}
    assert len(h_strings) == 1  # literally the same 17-digit string


def test_spectrum_levels_and_convergence(tmp_path):
    cfg = {
        "n_points": 512, "length": 8000.0, "m1": 1.0, "m2": 1.0,
        "alpha": 0.01, "kinetic": "nonrelativistic", "n_levels": 2,
    }
    code, out = run_cli(tmp_path, "spectrum", cfg)
    assert code == 0
    rd = only_run_dir(out)
    rows = open(os.path.join(rd, "levels.csv")).read().strip().splitlines()
    assert rows[0] == "n,E_n,binding,bohr_ratio"
    ratio = float(rows[1].split(",")[3])
    assert ratio == pytest.approx(1.0, abs=0.01)
    conv = read_json(rd, "convergence.json")
    assert "relative_change" in conv
    assert "ground_binding_half_resolution" in conv
    assert conv["n_points"] == 512


def test_reconstruct_outputs(tmp_path):
    cfg = {
        "m1": 1.0, "m2": 1.0, "rho0": [1.0, 0.0, 0.0],
        "pi0": [0.0, 0.25, 0.0], "potential": "coulomb",
        "charge_product": -1.0, "dtau": 0.02, "n_steps": 100,
        "h": [0.5, 0.0, 0.0], "z": [0.0, 0.0, 0.0],
    }
    code, out = run_cli(tmp_path, "reconstruct", cfg)
    assert code == 0
    rd = only_run_dir(out)
    rec = read_json(rd, "reconstruct.json")
    assert rec["all_segments_causal"] is True
    lines = open(os.path.join(rd, "worldlines.csv")).read().splitlines()
    assert len(lines) == 1 + 2 * 101  # both worldlines, every sample


def test_validation_collects_every_problem():
    bad = {
        "particles": [
            {"m": -1.0, "x": [0, 0, 0], "p": [0, 0, 0], "q": 1.0},
            {"m": 1.0, "x": [0, 0, 0], "q": -1.0},
        ],
        "potential": "coulomb",
        "bogus_key": 7,
    }
    with pytest.raises(ConfigError) as err:
        cli.parse_config(json.dumps(bad), "centers")
    problems = err.value.problems
    text = "\n".join(problems)
    assert len(problems) >= 3
    assert "particles[0].m" in text
    assert "bogus_key" in text
    # coincident charged particles with a potential on is one of them
    assert "coincide" in text


def test_bad_config_exits_2(tmp_path):
    cfg = {"particles": [{"m": -1.0, "x": [0, 0, 0]}]}
    code, _ = run_cli(tmp_path, "centers", cfg)
    assert code == 2


def test_malformed_json_exits_2(tmp_path):
    out = str(tmp_path / "out")
    cfg_path = tmp_path / "broken.json"
    cfg_path.write_text("{not json")
    assert cli.main(["centers", "--config", str(cfg_path), "--out", out]) == 2


def test_numerical_failure_exits_3_with_report(tmp_path):
    cfg = {
        "m1": 1.0, "m2": 1.0, "rho0": [0.5, 0.0, 0.0], "pi0": [0.0, 0.0, 0.0],
        "potential": "coulomb", "charge_product": -5.0,
        "dtau": 0.05, "n_steps": 20000,
    }
    code, out = run_cli(tmp_path, "evolve", cfg)
    assert code == 3
    failure = read_json(only_run_dir(out), "failure.json")
    assert failure["error"] == "CollisionError"
    assert "message" in failure


def test_minimal_config_fills_defaults():
    resolved = cli.parse_config(
        json.dumps({"particles": [{"m": 2.0, "x": [0.0, 0.0, 0.0]}]}),
        "centers",
    )
    assert resolved["sgn"] == 1
    assert resolved["c"] == 1.0
    assert resolved["seed"] == 0
    assert resolved["particles"][0]["p"] == [0.0, 0.0, 0.0]
    assert resolved["particles"][0]["q"] == 0.0


def test_unknown_subcommand_exits_2(capsys):
    # argparse handles the usage error itself and exits with status 2
    with pytest.raises(SystemExit) as err:
        cli.main(["frobnicate", "--config", "x.json"])
    assert err.value.code == 2
    capsys.readouterr()
