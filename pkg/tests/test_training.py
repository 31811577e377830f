import numpy as np
import pytest

from isacsim import networks as nn
from isacsim.arrays import ArrayGeometry
from isacsim.channels import ScenarioConfig, comm_forward, draw_scene, radar_forward
from isacsim.losses import loss_cce, loss_isac, loss_td, loss_tr
from isacsim.model import build_model, comm_receive, radar_receive, transmit
from isacsim.rng import Rng
from isacsim.training import (
    TRAINING_LOG_HEADER,
    TrainingDiverged,
    TrainingPlan,
    stage_batch_counts,
    stage_losses,
    train,
    write_training_log,
)

TINY = dict(batch_size=50, total_samples=300, seed=1)


def small_cfg():
    return ScenarioConfig(num_antennas=6)


def test_plan_validation():
    with pytest.raises(ValueError):
        TrainingPlan(omega_r=1.5)
    with pytest.raises(ValueError):
        TrainingPlan(batch_size=100, total_samples=50)
    with pytest.raises(ValueError):
        TrainingPlan(stage_fractions=(0.5, 0.5))
    with pytest.raises(ValueError):
        TrainingPlan(stage_fractions=(0.5, 0.6, -0.1))
    with pytest.raises(ValueError):
        TrainingPlan(stage_fractions=(0.5, 0.3, 0.3))


def test_stage_batch_counts_largest_remainder():
    plan = TrainingPlan(batch_size=10_000, total_samples=2_000_000)
    assert stage_batch_counts(plan) == (67, 67, 66)
    assert sum(stage_batch_counts(plan)) == 200

    exact = TrainingPlan(batch_size=1, total_samples=8, stage_fractions=(0.5, 0.25, 0.25))
    assert stage_batch_counts(exact) == (4, 2, 2)

    # equal fractional parts break ties toward the earlier stage
    two = TrainingPlan(batch_size=1, total_samples=2)
    assert stage_batch_counts(two) == (1, 1, 0)
    one = TrainingPlan(batch_size=1, total_samples=1)
    assert stage_batch_counts(one) == (1, 0, 0)


@pytest.mark.parametrize("stage", [1, 2, 3])
@pytest.mark.parametrize("omega", [0.0, 0.5, 1.0])
def test_stage_losses_match_evaluation_path(stage, omega):
    # the hand-assembled training graph must agree with the closed-form
    # channel simulators plus the evaluation-path receivers
    cfg = small_cfg()
    geom = ArrayGeometry.nominal(6)
    model = build_model(Rng(12), cfg)
    sample = draw_scene(Rng(34), cfg, 64)

    j_ce, radar_term, total = stage_losses(model, cfg, geom, sample, stage, omega)

    x, v, y = transmit(model, sample.message)
    zr = radar_forward(geom, sample, y).z
    comm = comm_receive(model, *_comm_obs(geom, sample, v, x))
    j_ce_ref = loss_cce(comm, sample.message)
    q, theta, sigma = radar_receive(model, zr)
    present = sample.target_present
    if stage == 1:
        err = (theta - sample.target_angle)[present]
        radar_ref = cfg.target_prior * err @ err / max(present.sum(), 1)
    elif stage == 2:
        radar_ref = cfg.target_prior * loss_tr(theta, sigma, sample.target_angle, present)
    else:
        radar_ref = loss_td(q, present)

    assert float(j_ce) == pytest.approx(float(j_ce_ref), rel=1e-10)
    assert float(radar_term) == pytest.approx(float(radar_ref), rel=1e-10)
    assert float(total) == pytest.approx(float(loss_isac(radar_ref, j_ce_ref, omega)), rel=1e-10)


def _comm_obs(geom, sample, v, x):
    obs = comm_forward(geom, sample, v, x)
    return obs.z, obs.csi


def test_stage_losses_rejects_unknown_stage():
    cfg = small_cfg()
    geom = ArrayGeometry.nominal(6)
    model = build_model(Rng(0), cfg)
    sample = draw_scene(Rng(0), cfg, 4)
    with pytest.raises(ValueError):
        stage_losses(model, cfg, geom, sample, 4, 0.5)


def test_train_produces_log_rows_and_detached_model():
    cfg = small_cfg()
    geom = ArrayGeometry.nominal(6)
    plan = TrainingPlan(omega_r=0.5, **TINY)
    model, rows = train(plan, cfg, geom)

    counts = stage_batch_counts(plan)
    assert len(rows) == sum(counts)
    stages = [r[0] for r in rows]
    assert stages == [1] * counts[0] + [2] * counts[1] + [3] * counts[2]
    assert all(np.isfinite(r[2]) and np.isfinite(r[4]) for r in rows)
    # batch indices restart per stage
    assert [r[1] for r in rows if r[0] == 2] == list(range(counts[1]))
    assert all(isinstance(w, np.ndarray) for net in model.nets() for w in net.weights)


def test_train_is_deterministic():
    cfg = small_cfg()
    geom = ArrayGeometry.nominal(6)
    plan = TrainingPlan(omega_r=0.3, **TINY)
    m1, r1 = train(plan, cfg, geom)
    m2, r2 = train(plan, cfg, geom)
    assert r1 == r2
    for a, b in zip(m1.nets(), m2.nets()):
        assert all(x.tobytes() == y.tobytes() for x, y in zip(a.weights, b.weights))
        assert all(x.tobytes() == y.tobytes() for x, y in zip(a.biases, b.biases))


def test_train_at_omega_zero_freezes_radar_heads():
    # with a zero radar weight the loss has no radar path, so the presence,
    # angle and uncertainty heads must keep their init weights bit for bit
    cfg = small_cfg()
    geom = ArrayGeometry.nominal(6)
    plan = TrainingPlan(omega_r=0.0, **TINY)
    trained, _ = train(plan, cfg, geom)
    fresh = build_model(Rng(plan.seed), cfg)

    for name in ("presence", "angle", "uncertainty"):
        got, init = getattr(trained, name), getattr(fresh, name)
        assert all(x.tobytes() == y.tobytes() for x, y in zip(got.weights, init.weights))
        assert all(x.tobytes() == y.tobytes() for x, y in zip(got.biases, init.biases))
    for name in ("encoder", "beamformer", "comm_rx"):
        got, init = getattr(trained, name), getattr(fresh, name)
        assert not np.array_equal(got.weights[0], init.weights[0])


def test_train_reduces_comm_loss():
    cfg = small_cfg()
    geom = ArrayGeometry.nominal(6)
    plan = TrainingPlan(omega_r=0.0, batch_size=500, total_samples=30_000, seed=3)
    _, rows = train(plan, cfg, geom)
    first = np.mean([r[2] for r in rows[:5]])
    last = np.mean([r[2] for r in rows[-5:]])
    assert last < first * 0.5


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_train_divergence_guard():
    cfg = small_cfg()
    geom = ArrayGeometry.nominal(6)
    plan = TrainingPlan(learning_rate=1e200, **TINY)
    with pytest.raises(TrainingDiverged):
        train(plan, cfg, geom)


def test_train_rejects_mismatched_geometry():
    plan = TrainingPlan(**TINY)
    with pytest.raises(ValueError):
        train(plan, small_cfg(), ArrayGeometry.nominal(8))


def test_gradients_reach_transmitter_through_frozen_heads():
    # stage 2 freezes the angle head, but its input still carries gradient
    # back into the beamformer and encoder
    cfg = small_cfg()
    geom = ArrayGeometry.nominal(6)
    model = build_model(Rng(2), cfg)
    params = nn.lift_parameters(model.nets())
    sample = draw_scene(Rng(3), cfg, 32)
    _, _, total = stage_losses(model, cfg, geom, sample, 2, 1.0)
    total.backward()
    assert model.beamformer.weights[0].grad is not None
    assert np.any(model.beamformer.weights[0].grad != 0.0)
    assert np.any(model.encoder.weights[0].grad != 0.0)
    # the presence head sits outside every stage-2 loss
    assert model.presence.weights[0].grad is None
    nn.detach_parameters(model.nets())


def test_write_training_log(tmp_path):
    rows = [(1, 0, 1.386, 0.5, 1.0), (2, 0, 0.7, 0.25, 0.5)]
    path = tmp_path / "log.csv"
    write_training_log(path, rows)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == ",".join(TRAINING_LOG_HEADER)
    assert len(lines) == 3
    assert lines[1].startswith("1,0,1.386")
