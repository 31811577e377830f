import numpy as np
import pytest

from isacsim.config import ExperimentConfig, config_text, load_config


def test_defaults_without_file():
    cfg = load_config(None)
    assert cfg == ExperimentConfig()
    scenario = cfg.to_scenario()
    assert scenario.num_antennas == 16
    assert scenario.radar_gain_var == pytest.approx(1.0)
    assert scenario.comm_gain_var == pytest.approx(100.0)
    assert scenario.target_angle_range == pytest.approx(
        (np.deg2rad(-20.0), np.deg2rad(20.0))
    )
    plan = cfg.to_plan()
    assert plan.omega_r == 0.09
    assert plan.total_samples == 2_000_000
    geom = cfg.to_geometry()
    assert geom.num_elements == 16
    assert np.allclose(geom.gaps, 0.5)


def test_load_config_overrides(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(
        "[scenario]\n"
        "num_antennas = 8\n"
        "snr_c_db = 10\n"
        "[training]\n"
        "batch_size = 100\n"
        "total_samples = 1000\n"
        "stage_fractions = 0.5, 0.25, 0.25\n"
        "[evaluation]\n"
        "n_trials = 5000\n"
    )
    cfg = load_config(path)
    assert cfg.scenario.num_antennas == 8
    assert cfg.scenario.snr_c_db == 10.0
    assert cfg.scenario.noise_psd == 1.0  # untouched key keeps its default
    assert cfg.training.batch_size == 100
    assert cfg.training.stage_fractions == (0.5, 0.25, 0.25)
    assert cfg.evaluation.n_trials == 5000
    assert cfg.to_scenario().comm_gain_var == pytest.approx(10.0)
    assert cfg.to_plan().batch_size == 100


def test_to_plan_overrides():
    cfg = ExperimentConfig()
    plan = cfg.to_plan(omega_r=0.4, seed=11)
    assert plan.omega_r == 0.4
    assert plan.seed == 11
    # base sections remain untouched
    assert cfg.training.omega_r == 0.09


def test_eval_options_override():
    cfg = ExperimentConfig()
    opts = cfg.eval_options()
    assert opts.n_trials == 300_000
    assert opts.target_pfa == 0.01
    assert cfg.eval_options(n_trials=42).n_trials == 42


def test_load_config_rejects_unknown_section(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[scnario]\nnum_antennas = 8\n")
    with pytest.raises(ValueError, match="unknown config section"):
        load_config(path)


def test_load_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[scenario]\nnum_antenas = 8\n")
    with pytest.raises(ValueError, match="unknown key"):
        load_config(path)


def test_load_config_rejects_bad_value(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[scenario]\nnum_antennas = many\n")
    with pytest.raises(ValueError, match="bad value"):
        load_config(path)


def test_load_config_missing_file():
    with pytest.raises(FileNotFoundError):
        load_config("/nonexistent/exp.ini")


def test_config_text_round_trips(tmp_path):
    cfg = ExperimentConfig()
    path = tmp_path / "dump.ini"
    path.write_text(config_text(cfg))
    assert load_config(path) == cfg
