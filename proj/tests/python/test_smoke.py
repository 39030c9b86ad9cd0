"""Smoke tests for the python bindings against the shipped configs."""

import math
import os

import numpy as np
import pytest

import mts3d

CONFIG_DIR = os.environ.get("MTS_CONFIG_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "configs"))


@pytest.fixture(scope="module")
def trial_config():
    return mts3d.load_trial_config(os.path.join(CONFIG_DIR, "trial_default.cfg"))


def test_scene_and_ray_hit():
    base = mts3d.SceneBaseConfig()
    scene = mts3d.build_scene((0.0, 0.0), (0.0, 0.0), 0.0, base)
    kind, distance, color = mts3d.ray_hit(
        np.array([base.start_camera[0] - 0.0, 0.0, 0.35]),
        np.array([1.0, 0.0, 0.0]),
        scene,
    )
    assert kind in (mts3d.HitKind.target, mts3d.HitKind.occluder)
    assert distance > 0.0


def test_render_and_segment(trial_config):
    intr = mts3d.CameraIntrinsics.square(64, math.radians(60.0))
    base = trial_config.scene
    base.include_occluder = False
    scene = mts3d.build_scene((0.0, 0.0), (0.0, 0.0), 0.0, base)
    pose = mts3d.Pose()
    pose.position = np.asarray(base.start_camera)
    pose.quaternion_wxyz = mts3d.look_orientation_wxyz(
        np.asarray(base.target_anchor) - np.asarray(base.start_camera)
    )
    img = mts3d.render(pose, intr, scene)
    assert img.shape == (64, 64, 3)
    assert img.min() >= 0.0 and img.max() <= 1.0

    score = mts3d.target_score(img, trial_config.segmentation)
    assert 0.05 < score < 0.6

    mask = mts3d.segment(img, trial_config.segmentation)
    assert mask.shape == (64, 64)
    assert mask.mean() == pytest.approx(score)

    noisy = mts3d.add_pixel_noise(img, 0.01, 7)
    assert noisy.shape == img.shape
    assert not np.array_equal(noisy, img)


def test_gradient_recovery_on_linear_field():
    intr = mts3d.CameraIntrinsics.square(64, math.radians(60.0))
    array = mts3d.CameraArray.grid_layout(0.027, 0.027, 0.03, intr)
    v = mts3d.direction_matrix(array)
    g = np.array([0.4, -0.2, 0.9])
    df = v @ g
    grad, residual = mts3d.estimate_gradient(v, df)
    assert np.allclose(grad, g, atol=1e-12)
    assert residual < 1e-12


def test_kinematics_roundtrip():
    arm, seed = mts3d.load_arm_config(os.path.join(CONFIG_DIR, "arm_7dof.cfg"))
    assert arm.dof == 7
    pose = mts3d.forward_kinematics(arm, seed)
    ik = mts3d.inverse_kinematics(arm, pose, seed)
    assert ik["converged"]
    assert ik["iterations"] == 0
    j = mts3d.jacobian(arm, seed)
    assert j.shape == (6, 7)
    assert mts3d.manipulability(arm, seed) > 0.0


def test_run_trial_both_methods(trial_config):
    log_p = mts3d.run_trial(trial_config, mts3d.Method.proposed)
    assert log_p.num_steps > 0
    assert log_p.termination == mts3d.Termination.score_reached
    assert log_p.a_end >= 0.4
    assert log_p.positions.shape == (log_p.num_steps, 3)
    assert "termination,score_reached" in log_p.to_csv()

    # The near-centered occluder defeats the straight-line baseline.
    log_n = mts3d.run_trial(trial_config, mts3d.Method.naive)
    assert log_n.termination == mts3d.Termination.target_lost
    assert log_n.a_end < log_n.a_start
