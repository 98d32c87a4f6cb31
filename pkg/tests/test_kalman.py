import numpy as np
import pytest

from motkit import kalman
from motkit.kalman import (
    DegenerateCovarianceError,
    KalmanState,
    NoiseConfig,
    OBSERVATION,
    TRANSITION,
    initial_state,
    predict,
    update,
)

NOISE = NoiseConfig()


def test_predict_zero_covariance_steps_position():
    state = KalmanState(x=[0.0, 0.0, 1.0, 0.0], P=np.zeros((4, 4)))
    out = predict(state, NOISE)
    assert np.allclose(out.x, [1.0, 0.0, 1.0, 0.0])
    assert np.allclose(out.P, NOISE.q_matrix)


def test_predict_zero_velocity_keeps_position():
    state = KalmanState(x=[5.0, 5.0, 0.0, 0.0], P=np.eye(4))
    out = predict(state, NOISE)
    assert np.allclose(out.x[:2], [5.0, 5.0])


def test_predict_three_steps_matches_matrix_oracle():
    state = KalmanState(x=[0.0, 0.0, 2.0, -1.0], P=np.eye(4))
    out = state
    for _ in range(3):
        out = predict(out, NOISE)
    assert np.allclose(out.x, [6.0, -3.0, 2.0, -1.0])
    # independent matrix-arithmetic oracle for the covariance recursion
    A, Q = TRANSITION, NOISE.q_matrix
    P = np.eye(4)
    for _ in range(3):
        P = A @ P @ A.T + Q
    assert np.allclose(out.P, P)


def test_predict_leaves_input_unchanged():
    x0 = np.array([1.0, 2.0, 3.0, 4.0])
    P0 = np.diag([1.0, 2.0, 3.0, 4.0])
    state = KalmanState(x=x0.copy(), P=P0.copy())
    predict(state, NOISE)
    assert np.array_equal(state.x, x0)
    assert np.array_equal(state.P, P0)


def test_update_zero_innovation_keeps_state_shrinks_covariance():
    state = KalmanState(x=[3.0, 4.0, 1.0, 1.0], P=np.diag([2.0, 2.0, 5.0, 5.0]))
    z = OBSERVATION @ state.x
    out = update(state, z, NOISE)
    assert np.array_equal(out.x, state.x)
    assert np.trace(out.P) <= np.trace(state.P)


def test_update_single_step_closed_form():
    state = KalmanState(x=np.zeros(4), P=np.eye(4))
    out = update(state, [1.0, 0.0], NOISE)
    # x-component: gain = 1 / (1 + r_x) = 0.5 with r_x = 1
    assert np.isclose(out.x[0], 0.5)
    # full posterior against a direct evaluation of the update equations
    H, R = OBSERVATION, NOISE.r_matrix
    P = np.eye(4)
    K = P @ H.T @ np.linalg.inv(H @ P @ H.T + R)
    x_ref = K @ np.array([1.0, 0.0])
    P_ref = (np.eye(4) - K @ H) @ P
    assert np.allclose(out.x, x_ref)
    assert np.allclose(out.P, (P_ref + P_ref.T) / 2)


def test_update_huge_r_ignores_measurement():
    big = NoiseConfig(r=(1e6, 1e7))
    state = KalmanState(x=[0.0, 0.0, 0.0, 0.0], P=np.eye(4))
    out = update(state, [50.0, 50.0], big)
    assert np.all(np.abs(out.x[:2]) < 1e-3)


def test_update_degenerate_covariance_raises():
    # P chosen so the innovation covariance cancels to the zero matrix
    state = KalmanState(x=np.zeros(4), P=np.diag([-1.0, -10.0, 1.0, 1.0]))
    with pytest.raises(DegenerateCovarianceError, match="degenerate covariance"):
        update(state, [0.0, 0.0], NOISE)


def test_noise_config_rejects_nonpositive_entries():
    with pytest.raises(ValueError):
        NoiseConfig(q=(0.0, 1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        NoiseConfig(r=(1.0, -2.0))


def test_initial_state_prior():
    state = initial_state([7.0, 9.0])
    assert np.array_equal(state.x, [7.0, 9.0, 0.0, 0.0])
    assert np.array_equal(state.P, np.diag([10.0, 10.0, 100.0, 100.0]))


def test_fuzz_symmetry_and_nonnegative_diagonal(rng):
    state = initial_state(rng.uniform(-100, 100, size=2))
    for _ in range(10_000):
        state = predict(state, NOISE)
        z = state.center + rng.normal(scale=2.0, size=2)
        state = update(state, z, NOISE)
        assert np.array_equal(state.P, state.P.T)
        assert np.all(np.diag(state.P) >= 0.0)


def test_fuzz_zero_innovation_identity(rng):
    for _ in range(200):
        x = rng.uniform(-50, 50, size=4)
        P = np.diag(rng.uniform(0.1, 20.0, size=4))
        state = predict(KalmanState(x=x, P=P), NOISE)
        out = update(state, OBSERVATION @ state.x, NOISE)
        assert np.array_equal(out.x, state.x)
