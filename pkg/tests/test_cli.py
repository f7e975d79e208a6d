import json

import numpy as np
import pytest

from affine_semigroup import cli


def run(tmp_path, *args):
    return cli.main(list(args) + ["--out", str(tmp_path), "--workers", "1"])


def test_stationary_command(tmp_path):
    assert run(tmp_path, "stationary", "--a", "0.5", "--b", "1.25", "--p", "0.6") == 0
    header = (tmp_path / "stationary.csv").read_text().splitlines()[0]
    assert header == "u,x,cdf"
    side = json.loads((tmp_path / "stationary.json").read_text())
    assert abs(side["mean"] - 2.0) <= 0.01
    assert {"a", "b", "p", "N", "tol", "residual", "mass_at_infinity"} <= set(side)
    manifest = json.loads((tmp_path / "run.json").read_text())
    assert manifest["command"] == "stationary" and "versions" in manifest and "wall_seconds" in manifest


def test_coincidence_command(tmp_path):
    assert run(tmp_path, "coincidence", "--a", "1/2", "--b", "4/3", "--max-len", "5") == 0
    doc = json.loads((tmp_path / "coincidence.json").read_text())
    assert [c["words"] for c in doc["classes"]] == [["00110", "10001"]]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"a": "1/2", "b": "3/2", "x": 1.0, "y": 10.0, "eps": 0.5}))
    assert run(tmp_path, "steer", "--config", str(cfg), "--eps", "0.1") == 0
    info = json.loads((tmp_path / "steer.json").read_text())
    assert info["error"] < 0.1


def test_config_errors_are_field_level(tmp_path, capsys):
    assert run(tmp_path, "stationary", "--a", "2", "--p", "1.5") == 2
    err = capsys.readouterr().err
    assert "a: must satisfy" in err and "p: must satisfy" in err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"alpha": 1}))
    assert run(tmp_path, "stationary", "--config", str(bad)) == 2


def test_hard_failure_exit_status(tmp_path):
    assert run(tmp_path, "stationary", "--a", "1/2", "--b", "3", "--p", "0.5") == 1
    assert json.loads((tmp_path / "run.json").read_text())["exit_status"] == 1


def test_manifest_replay_is_byte_identical(tmp_path):
    first, second = tmp_path / "one", tmp_path / "two"
    assert run(first, "path-avg", "--n", "20000", "--seed", "4") == 0
    assert cli.main(["path-avg", "--config", str(first / "run.json"), "--out", str(second)]) == 0
    assert (first / "path.csv").read_bytes() == (second / "path.csv").read_bytes()


@pytest.mark.parametrize("args, artifact", [
    (["sphere-avg", "--n", "10"], "sphere.csv"),
    (["acim", "--gamma", "1.5", "--bins", "512"], "density.csv"),
    (["approx-seq", "--n", "50", "--a", "1/2", "--b", "3/2"], "sequence.txt"),
    (["holder-cert", "--a", "1/2", "--b", "3/2", "--p", "0.5"], "holder.json"),
    (["rotation", "--iters", "10000"], "rotation.json"),
])
def test_other_commands(tmp_path, args, artifact):
    assert run(tmp_path, *args) == 0
    assert (tmp_path / artifact).exists() and (tmp_path / "run.json").exists()


def test_density_csv_columns(tmp_path):
    run(tmp_path, "acim", "--gamma", "2", "--bins", "256")
    data = np.loadtxt(tmp_path / "density.csv", delimiter=",", skiprows=1)
    assert (tmp_path / "density.csv").read_text().startswith("bin_left,bin_right,mass\n")
    assert data.shape == (256, 3) and abs(data[:, 2].sum() - 1) < 1e-12
