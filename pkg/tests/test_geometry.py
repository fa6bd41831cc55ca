import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rot_y_oracle, rot_z_oracle
from lumenlens.geometry import (PdLayout, ReceiverPose, lens_center, lens_normal, pd_position,
                                receiver_normal, rotation_receiver_to_lens,
                                rotation_room_to_receiver)

d = np.deg2rad
angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
P = np.array([2.5, 2.5, 1.0])


def test_rotation_identity():
    np.testing.assert_array_equal(rotation_room_to_receiver(0.0, 0.0), np.eye(3))


def test_rotation_pure_z_quarter_turn():
    R = rotation_room_to_receiver(d(90), 0.0)
    np.testing.assert_allclose(R, [[0, 1, 0], [-1, 0, 0], [0, 0, 1]], atol=1e-15)


def test_rotation_matches_elementary_product():
    R = rotation_room_to_receiver(d(30), d(20))
    np.testing.assert_allclose(R, rot_y_oracle(d(20)) @ rot_z_oracle(d(30)), atol=1e-15)


@given(angles, angles)
def test_rotation_is_orthonormal(t, p):
    R = rotation_room_to_receiver(t, p)
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)


def test_lens_rotation_has_same_form():
    np.testing.assert_array_equal(rotation_receiver_to_lens(0.4, 0.2),
                                  rotation_room_to_receiver(0.4, 0.2))


@pytest.mark.parametrize("t, p, expected", [(0, 0, [0, 0, 1]), (0, 90, [1, 0, 0])])
def test_receiver_normal_trivial(t, p, expected):
    np.testing.assert_allclose(receiver_normal(d(t), d(p)), expected, atol=1e-15)


def test_receiver_normal_matches_inverse_rotation():
    R = rot_y_oracle(d(30)) @ rot_z_oracle(d(45))
    np.testing.assert_allclose(receiver_normal(d(45), d(30)), R.T @ [0, 0, 1], atol=1e-15)


def test_pd_position_zero_rotation():
    pose = ReceiverPose(P)
    np.testing.assert_allclose(pd_position(pose, (0.003, -0.001)), P + [0.003, -0.001, 0])


def test_pd_position_quarter_turn():
    pose = ReceiverPose(P, d(90), 0.0)
    np.testing.assert_allclose(pd_position(pose, (0.004, 0.0)), P + [0, 0.004, 0], atol=1e-15)


def test_pd_position_matches_oracle():
    pose = ReceiverPose(P, d(30), d(20))
    R = rot_y_oracle(d(20)) @ rot_z_oracle(d(30))
    expected = R.T @ [0.005, -0.005, 0] + P
    np.testing.assert_allclose(pd_position(pose, (0.005, -0.005)), expected, atol=1e-15)


@given(angles, angles, st.floats(-0.01, 0.01), st.floats(-0.01, 0.01))
def test_pd_positions_lie_in_receiver_plane(t, p, a, b):
    pose = ReceiverPose(P, t, p)
    offset = pd_position(pose, (a, b)) - P
    assert abs(offset @ receiver_normal(t, p)) <= 1e-15
    assert np.linalg.norm(offset) == pytest.approx(np.hypot(a, b), abs=1e-15)


def test_lens_center_cases():
    np.testing.assert_allclose(lens_center(ReceiverPose(P), 0.02), P + [0, 0, 0.02])
    np.testing.assert_allclose(lens_center(ReceiverPose(P, 0.0, d(90)), 0.02), P + [0.02, 0, 0],
                               atol=1e-15)
    pose = ReceiverPose(P, d(45), d(30))
    np.testing.assert_allclose(lens_center(pose, 0.02), P + 0.02 * receiver_normal(d(45), d(30)))


def test_lens_center_rejects_nonpositive_standoff():
    with pytest.raises(ValueError):
        lens_center(ReceiverPose(P), 0.0)


def test_lens_normal_trivial_cases():
    np.testing.assert_array_equal(lens_normal(0, 0, 0, 0), [0, 0, 1])
    np.testing.assert_allclose(lens_normal(0, 0, 0, d(30)), [np.sin(d(30)), 0, np.cos(d(30))],
                               atol=1e-15)


def test_lens_normal_matches_rotation_chain():
    tR, pR, tL, pL = d(30), d(20), d(50), d(10)
    R = rot_y_oracle(pR) @ rot_z_oracle(tR)
    L = rot_y_oracle(pL) @ rot_z_oracle(tL)
    np.testing.assert_allclose(lens_normal(tR, pR, tL, pL), R.T @ L.T @ [0, 0, 1], atol=1e-15)


@given(angles, angles, angles, angles)
@settings(max_examples=200)
def test_lens_normal_is_unit(tR, pR, tL, pL):
    assert np.linalg.norm(lens_normal(tR, pR, tL, pL)) == pytest.approx(1.0, abs=1e-12)


def test_zero_lens_tilt_follows_receiver():
    np.testing.assert_allclose(lens_normal(0.7, 0.3, 1.9, 0.0), receiver_normal(0.7, 0.3),
                               atol=1e-15)


def test_pd_layout_row_major_and_centred():
    lay = PdLayout(4, 0.005, 0.004)
    np.testing.assert_allclose(lay.local_xy(), [[-0.0025, -0.0025], [0.0025, -0.0025],
                                                [-0.0025, 0.0025], [0.0025, 0.0025]])
    sq = lay.squares()[0]
    assert sq.shape == (4, 2)
    # counter-clockwise
    x, y = sq[:, 0], sq[:, 1]
    assert np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y) > 0


@pytest.mark.parametrize("n_r, d_rx, d_rs", [(5, 0.005, 0.004), (4, 0.004, 0.005), (4, 0.005, 0.0)])
def test_pd_layout_rejects_bad_geometry(n_r, d_rx, d_rs):
    with pytest.raises(ValueError):
        PdLayout(n_r, d_rx, d_rs)
