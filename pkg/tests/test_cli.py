import csv
import subprocess
import sys

import pytest

from isacsim.cli import main

TINY_CFG = """\
[scenario]
num_antennas = 6

[training]
batch_size = 200
total_samples = 1200

[evaluation]
n_trials = 4000
pfa_target = 0.05
calibration_trials = 20000
"""


@pytest.fixture(scope="module")
def cfg_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "tiny.ini"
    path.write_text(TINY_CFG)
    return path


def run(*argv):
    return main([str(a) for a in argv])


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_train_writes_checkpoint_and_log(cfg_path, tmp_path):
    assert run("train", "--config", cfg_path, "--out", tmp_path) == 0
    ckpt = tmp_path / "ae_omega0.09_seed0.ckpt"
    log = tmp_path / "ae_omega0.09_seed0_log.csv"
    assert ckpt.exists() and log.exists()
    rows = read_rows(log)
    assert rows[0] == ["stage", "batch_index", "loss_cce", "loss_radar_term", "loss_total"]
    assert len(rows) == 1 + 6  # six training batches


def test_train_is_reproducible(cfg_path, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("train", "--config", cfg_path, "--out", a, "--omega-r", "1") == 0
    assert run("train", "--config", cfg_path, "--out", b, "--omega-r", "1") == 0
    name = "ae_omega1_seed0.ckpt"
    assert (a / name).read_bytes() == (b / name).read_bytes()


def test_train_rejects_bad_omega(cfg_path, tmp_path, capsys):
    out = tmp_path / "none"
    assert run("train", "--config", cfg_path, "--out", out, "--omega-r", "1.5") == 1
    assert "omega-r" in capsys.readouterr().err
    assert not out.exists()  # failed validation leaves nothing behind


def test_missing_config_is_validation_error(tmp_path):
    assert run("train", "--config", tmp_path / "nope.ini", "--out", tmp_path) == 1


def test_eval_baseline_writes_point(cfg_path, tmp_path):
    code = run("eval", "--config", cfg_path, "--out", tmp_path,
               "--baseline", "--rho", "1", "--beampattern")
    assert code == 0
    rows = read_rows(tmp_path / "eval_baseline.csv")
    assert len(rows) == 2
    assert rows[1][0] == "rho_phi"
    assert rows[1][1] == "1"
    pattern = read_rows(tmp_path / "beampattern_baseline.csv")
    assert pattern[0] == ["angle_deg", "e_db"]
    assert len(pattern) == 182


def test_eval_needs_exactly_one_system(cfg_path, tmp_path):
    assert run("eval", "--config", cfg_path, "--out", tmp_path) == 1
    assert run("eval", "--config", cfg_path, "--out", tmp_path,
               "--baseline", "--checkpoint", "x.ckpt") == 1


def test_eval_missing_checkpoint(cfg_path, tmp_path):
    assert run("eval", "--config", cfg_path, "--out", tmp_path,
               "--checkpoint", tmp_path / "missing.ckpt") == 1


def test_eval_rejects_rho_outside_unit_interval(cfg_path, tmp_path):
    assert run("eval", "--config", cfg_path, "--out", tmp_path,
               "--baseline", "--rho", "1.5") == 1


def test_eval_trained_checkpoint(cfg_path, tmp_path):
    assert run("train", "--config", cfg_path, "--out", tmp_path) == 0
    code = run("eval", "--config", cfg_path, "--out", tmp_path,
               "--checkpoint", tmp_path / "ae_omega0.09_seed0.ckpt",
               "--trials", "2000")
    assert code == 0
    rows = read_rows(tmp_path / "eval_ae.csv")
    assert rows[1][0] == "omega_r"
    assert rows[1][8] == "2000"


def test_eval_labels_row_with_given_omega(cfg_path, tmp_path):
    # the checkpoint carries no training metadata, so the row label comes
    # from --omega-r (or falls back to the configured value)
    assert run("train", "--config", cfg_path, "--out", tmp_path, "--omega-r", "0.3") == 0
    code = run("eval", "--config", cfg_path, "--out", tmp_path,
               "--checkpoint", tmp_path / "ae_omega0.3_seed0.ckpt",
               "--omega-r", "0.3", "--trials", "2000")
    assert code == 0
    rows = read_rows(tmp_path / "eval_ae.csv")
    assert rows[1][:2] == ["omega_r", "0.3"]


def test_sweep_baseline_grid(cfg_path, tmp_path):
    code = run("sweep", "--config", cfg_path, "--out", tmp_path,
               "--baseline", "--rhos", "0,1", "--phis", "0", "--trials", "2000")
    assert code == 0
    rows = read_rows(tmp_path / "sweep_baseline.csv")
    assert len(rows) == 3
    assert [r[1] for r in rows[1:]] == ["0", "1"]


def test_sweep_ae_trains_per_omega(cfg_path, tmp_path):
    code = run("sweep", "--config", cfg_path, "--out", tmp_path,
               "--ae", "--omegas", "0,1", "--trials", "2000")
    assert code == 0
    rows = read_rows(tmp_path / "sweep_ae.csv")
    assert len(rows) == 3
    assert (tmp_path / "ae_omega0_seed0.ckpt").exists()
    assert (tmp_path / "ae_omega1_seed1.ckpt").exists()  # seed advances per point


def test_sweep_impaired_suffix(cfg_path, tmp_path):
    code = run("sweep", "--config", cfg_path, "--out", tmp_path,
               "--ae", "--omegas", "0.5", "--trials", "2000", "--impaired")
    assert code == 0
    assert (tmp_path / "sweep_ae_impaired.csv").exists()
    assert (tmp_path / "ae_omega0.5_seed0_impaired.ckpt").exists()


def test_calibrate_prints_threshold(cfg_path, tmp_path, capsys):
    code = run("calibrate", "--config", cfg_path, "--out", tmp_path,
               "--baseline", "--trials", "20000")
    assert code == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("threshold=")
    assert "achieved_pfa=" in line


def test_beampattern_subcommand(cfg_path, tmp_path):
    code = run("beampattern", "--config", cfg_path, "--out", tmp_path,
               "--baseline", "--rho", "0.5")
    assert code == 0
    assert len(read_rows(tmp_path / "beampattern_baseline.csv")) == 182


def test_unknown_command_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_console_entry_point_help():
    proc = subprocess.run(
        [sys.executable, "-m", "isacsim.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "train" in proc.stdout and "sweep" in proc.stdout
