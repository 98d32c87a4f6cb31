"""Trajectory smoothing and geometric measurement correction.

Each track keeps three aligned centroid histories: the raw detector
centers, the Kalman posterior centers, and a smoothed set whose first
``k + 1`` entries are replaced by their orthogonal projections onto a
least-squares line fitted over the initial segment.  Once the fit exists,
raw detections are re-placed before entering the filter: the corrected
measurement sits at the average of the recent-motion radius and the
detection radius, along the bisector between the recent heading and the
bearing to the detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SmoothingParams:
    """Fit-point count ``k`` and anchor index distance ``dt``."""

    k: int = 5
    dt: int = 2

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.dt < 1:
            raise ValueError("dt must be >= 1")


@dataclass(frozen=True)
class LineFit:
    """Line y = a x + b; ``swapped`` means the fit is x = a y + b instead.

    The swapped parametrization is chosen when the fitted points spread
    more in y than in x, so near-vertical segments stay well conditioned.
    """

    a: float
    b: float
    swapped: bool = False


@dataclass
class TrajectoryMemory:
    """Aligned centroid histories plus the initial-segment line fit.

    ``hits`` counts successful filter updates; the creation centroid is
    entry 0 of every history, so after ``hits`` updates each history
    holds ``hits + 1`` points.  ``coasted`` flags entries appended from
    predictions while the track was unmatched.
    """

    raw_centers: list[np.ndarray] = field(default_factory=list)
    optimal_centers: list[np.ndarray] = field(default_factory=list)
    smoothed_set: list[np.ndarray] = field(default_factory=list)
    coasted: list[bool] = field(default_factory=list)
    fit: LineFit | None = None
    fit_degenerate: bool = False
    hits: int = 0

    @classmethod
    def from_center(cls, center: np.ndarray) -> "TrajectoryMemory":
        c = np.asarray(center, dtype=float).reshape(2)
        return cls(
            raw_centers=[c.copy()],
            optimal_centers=[c.copy()],
            smoothed_set=[c.copy()],
            coasted=[False],
        )

    def append_update(self, raw: np.ndarray, optimal: np.ndarray) -> None:
        """Record a matched frame: raw detection center + posterior center."""
        self.raw_centers.append(np.asarray(raw, dtype=float).reshape(2).copy())
        self.optimal_centers.append(np.asarray(optimal, dtype=float).reshape(2).copy())
        self.smoothed_set.append(np.asarray(optimal, dtype=float).reshape(2).copy())
        self.coasted.append(False)
        self.hits += 1

    def append_coast(self, predicted: np.ndarray) -> None:
        """Record an unmatched frame with the predicted centroid."""
        p = np.asarray(predicted, dtype=float).reshape(2)
        self.raw_centers.append(p.copy())
        self.optimal_centers.append(p.copy())
        self.smoothed_set.append(p.copy())
        self.coasted.append(True)

    def trailing_coast_run(self) -> int:
        n = 0
        for flag in reversed(self.coasted):
            if not flag:
                break
            n += 1
        return n


def project_onto_fit(point: np.ndarray, fit: LineFit) -> np.ndarray:
    """Orthogonal projection of ``point`` onto the fitted line."""
    px, py = np.asarray(point, dtype=float).reshape(2)
    if fit.swapped:
        px, py = py, px
    a, b = fit.a, fit.b
    denom = a * a + 1.0
    fx = (a * py + px - a * b) / denom
    fy = (a * a * py + a * px + b) / denom
    if fit.swapped:
        fx, fy = fy, fx
    return np.array([fx, fy])


def fit_initial_segment(memory: TrajectoryMemory, params: SmoothingParams) -> TrajectoryMemory:
    """Fit a line over the first ``k + 1`` posterior centers and project them.

    Called once per track, at the k-th successful update.  If every base
    point coincides the fit is skipped (``fit_degenerate`` is set) and the
    smoothed set keeps mirroring the posterior centers.
    """
    pts = np.asarray(memory.optimal_centers[: params.k + 1], dtype=float)
    xs, ys = pts[:, 0], pts[:, 1]
    x_spread = xs.max() - xs.min()
    y_spread = ys.max() - ys.min()
    if x_spread < 1e-12 and y_spread < 1e-12:
        memory.fit_degenerate = True
        return memory
    swapped = x_spread < y_spread
    if swapped:
        a, b = np.polyfit(ys, xs, 1)
    else:
        a, b = np.polyfit(xs, ys, 1)
    memory.fit = LineFit(a=float(a), b=float(b), swapped=swapped)
    for i in range(params.k + 1):
        memory.smoothed_set[i] = project_onto_fit(memory.optimal_centers[i], memory.fit)
    return memory


def correct_measurement(
    memory: TrajectoryMemory, B: np.ndarray, params: SmoothingParams
) -> np.ndarray:
    """Geometrically re-place a detection center before the filter update.

    With anchors O = M[n-1-dt] and A = M[n-1] from the smoothed history,
    the corrected point lies at radius (|OA| + |OB|) / 2 from O, rotated
    from the O->A polar angle by half the signed angle from OA to OB.
    The detection passes through verbatim while the track is younger than
    ``k`` hits, the smoothed history is too short, or either anchor
    vector degenerates to zero length.
    """
    B = np.asarray(B, dtype=float).reshape(2)
    if memory.hits < params.k:
        return B.copy()
    M = memory.smoothed_set
    n = len(M)
    if n < params.dt + 1:
        return B.copy()
    O = M[n - 1 - params.dt]
    A = M[n - 1]
    oa = A - O
    ob = B - O
    norm_oa = float(np.hypot(*oa))
    norm_ob = float(np.hypot(*ob))
    if norm_oa == 0.0 or norm_ob == 0.0:
        return B.copy()
    theta_oa = math.atan2(oa[1], oa[0])
    # signed angle from OA to OB, rotation toward B
    theta_half = 0.5 * math.atan2(
        oa[0] * ob[1] - oa[1] * ob[0], float(oa @ ob)
    )
    radius = 0.5 * (norm_oa + norm_ob)
    angle = theta_oa + theta_half
    return O + radius * np.array([math.cos(angle), math.sin(angle)])
