"""Constant-velocity Kalman filter over an object centroid.

State is ``[xc, yc, vx, vy]`` in pixels / pixels-per-frame with a unit
frame step.  Only the centroid is filtered; box extent is maintained
separately by the tracker.  ``predict`` and ``update`` are pure value
transformations so tracks can be processed independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# transition model: unit-step constant velocity
TRANSITION = np.array(
    [
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)

# observation model: centroid only
OBSERVATION = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ]
)


class DegenerateCovarianceError(ValueError):
    """Innovation covariance is numerically singular."""


@dataclass(frozen=True)
class NoiseConfig:
    """Diagonal process and observation noise variances.

    Defaults are the tuned tracker values: position/velocity process
    noise (1, 1, 1, 0.01) and observation noise (1, 10).  Entries must be
    strictly positive and are never mutated during a run.
    """

    q: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 0.01)
    r: tuple[float, float] = (1.0, 10.0)

    def __post_init__(self) -> None:
        if any(v <= 0 for v in self.q) or any(v <= 0 for v in self.r):
            raise ValueError("noise variances must be strictly positive")

    @property
    def q_matrix(self) -> np.ndarray:
        return np.diag(self.q)

    @property
    def r_matrix(self) -> np.ndarray:
        return np.diag(self.r)


@dataclass(frozen=True)
class KalmanState:
    """Filter state: 4-vector ``x`` and 4x4 covariance ``P``."""

    x: np.ndarray
    P: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(4))
        object.__setattr__(self, "P", np.asarray(self.P, dtype=float).reshape(4, 4))

    @property
    def center(self) -> np.ndarray:
        return self.x[:2].copy()


def initial_state(center: np.ndarray) -> KalmanState:
    """Weakly informative prior: zero velocity, P0 = diag(10, 10, 100, 100)."""
    cx, cy = np.asarray(center, dtype=float).reshape(2)
    return KalmanState(
        x=np.array([cx, cy, 0.0, 0.0]),
        P=np.diag([10.0, 10.0, 100.0, 100.0]),
    )


def _symmetrize(P: np.ndarray) -> np.ndarray:
    return (P + P.T) / 2.0


def predict(state: KalmanState, noise: NoiseConfig) -> KalmanState:
    """Propagate one frame: x' = A x, P' = A P A^T + Q."""
    A = TRANSITION
    x = A @ state.x
    P = _symmetrize(A @ state.P @ A.T + noise.q_matrix)
    return KalmanState(x=x, P=P)


def update(state: KalmanState, z: np.ndarray, noise: NoiseConfig) -> KalmanState:
    """Fuse a centroid measurement into a predicted state.

    Computes the Kalman gain K = P H^T (H P H^T + R)^-1 and returns the
    posterior x + K(z - Hx), (I - KH) P.

    Raises:
        DegenerateCovarianceError: innovation covariance is singular
            (cannot happen with the default R, guarded regardless).
    """
    H = OBSERVATION
    z = np.asarray(z, dtype=float).reshape(2)
    S = H @ state.P @ H.T + noise.r_matrix
    if not np.isfinite(S).all() or abs(np.linalg.det(S)) < 1e-12:
        raise DegenerateCovarianceError("degenerate covariance")
    K = state.P @ H.T @ np.linalg.inv(S)
    x = state.x + K @ (z - H @ state.x)
    P = _symmetrize((np.eye(4) - K @ H) @ state.P)
    return KalmanState(x=x, P=P)
