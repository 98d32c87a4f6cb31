"""Cost construction, fusion and depth-staged assignment.

Three affinity channels feed the matcher: IoU distance between predicted
and detected boxes, cosine distance against the track's appearance
memory, and the angular cost between the track's recent smoothed heading
and the bearing to the detection.  Pairs whose IoU distance exceeds the
gate are marked infeasible before fusion.  The default fusion takes
``lam * min(iou, cos) + (1 - lam) * direction``; a weighted-sum mode is
available as an alternative.

Assignment runs in depth-prioritised stages: tracks with many recent
successful matches (positive depth) relative to misses (negative depth)
are matched first, each stage solving a Hungarian subproblem over the
detections still unclaimed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .trajectory import SmoothingParams, TrajectoryMemory

#: Sentinel for pairs rejected before fusion; never appears in a match.
INFEASIBLE = np.inf

_LARGE = 1e9


@dataclass(frozen=True)
class AssociationConfig:
    """Fusion weights, gates and acceptance thresholds."""

    lam: float = 0.95
    iou_gate: float = 0.5
    appearance_threshold: float = 0.28
    iou_accept_min_overlap: float = 0.2
    cd_neutral: float = 0.0
    fusion_mode: str = "min"  # "min" or "weighted"
    lambda1: float = 0.45
    lambda2: float = 0.05

    def __post_init__(self) -> None:
        for name in ("lam", "iou_gate", "appearance_threshold", "iou_accept_min_overlap"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.fusion_mode not in ("min", "weighted"):
            raise ValueError(f"unknown fusion mode: {self.fusion_mode!r}")
        if not 0.0 <= self.lambda1 <= 1.0 or not 0.0 <= self.lambda2 <= 1.0:
            raise ValueError("lambda1/lambda2 must lie in [0, 1]")
        if self.lambda1 + self.lambda2 > 1.0:
            raise ValueError("lambda1 + lambda2 must not exceed 1")


@dataclass
class DepthCounters:
    """Match/miss history used to stage association priority."""

    pd_plus: int = 0
    nd_minus: int = 0


@dataclass
class MatchResult:
    """Partition of the inputs into matches and leftovers."""

    matches: list[tuple[int, int]] = field(default_factory=list)
    unmatched_tracks: list[int] = field(default_factory=list)
    unmatched_detections: list[int] = field(default_factory=list)


def iou(boxA, boxB) -> float:
    """Intersection over union of two (left, top, width, height) boxes."""
    ax, ay, aw, ah = (float(v) for v in boxA)
    bx, by, bw, bh = (float(v) for v in boxB)
    if aw <= 0 or ah <= 0 or bw <= 0 or bh <= 0:
        raise ValueError("degenerate box")
    ix = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    iy = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    inter = ix * iy
    union = aw * ah + bw * bh - inter
    return inter / union


def iou_distance(boxA, boxB) -> float:
    """1 - IoU; 0 for identical boxes, 1 for disjoint ones."""
    return 1.0 - iou(boxA, boxB)


def iou_distance_matrix(boxesA, boxesB) -> np.ndarray:
    out = np.empty((len(boxesA), len(boxesB)))
    for i, a in enumerate(boxesA):
        for j, b in enumerate(boxesB):
            out[i, j] = iou_distance(a, b)
    return out


def direction_cost(
    memory: TrajectoryMemory,
    det_center: np.ndarray,
    params: SmoothingParams,
    neutral: float = 0.0,
    max_coast_run: int | None = None,
) -> float:
    """Unsigned angle between the track heading and the bearing to a detection.

    The heading runs from M[n-1-dt] to M[n-1] in the smoothed history;
    the bearing runs from M[n-1] to the detection center.  Returns the
    neutral cost for short histories, zero-length vectors, or when the
    trailing run of coasted (prediction-only) points exceeds
    ``max_coast_run``.
    """
    M = memory.smoothed_set
    n = len(M)
    if n < params.dt + 1:
        return neutral
    if max_coast_run is not None and memory.trailing_coast_run() > max_coast_run:
        return neutral
    p1 = M[n - 1 - params.dt]
    p2 = M[n - 1]
    v1 = p2 - p1
    v2 = np.asarray(det_center, dtype=float).reshape(2) - p2
    n1 = float(np.hypot(*v1))
    n2 = float(np.hypot(*v2))
    if n1 == 0.0 or n2 == 0.0:
        return neutral
    cosang = float(v1 @ v2) / (n1 * n2)
    return math.acos(max(-1.0, min(1.0, cosang)))


def fuse(
    c_iou: np.ndarray,
    c_cos: np.ndarray,
    c_d: np.ndarray,
    cfg: AssociationConfig,
) -> np.ndarray:
    """Gate on IoU distance, then fuse the three channels into one matrix.

    NaN entries in ``c_cos`` mean missing appearance; there the fusion
    degrades to the IoU channel alone.
    """
    c_iou = np.asarray(c_iou, dtype=float)
    c_cos = np.asarray(c_cos, dtype=float)
    c_d = np.asarray(c_d, dtype=float)
    if not (c_iou.shape == c_cos.shape == c_d.shape):
        raise ValueError("cost matrices must share one shape")
    if cfg.fusion_mode == "min":
        base = np.fmin(c_iou, c_cos)  # fmin ignores NaN, keeping c_iou
        fused = cfg.lam * base + (1.0 - cfg.lam) * c_d
    else:
        cos_filled = np.where(np.isnan(c_cos), c_iou, c_cos)
        fused = (
            cfg.lambda1 * c_iou
            + cfg.lambda2 * c_d
            + (1.0 - cfg.lambda1 - cfg.lambda2) * cos_filled
        )
    fused = np.where(c_iou > cfg.iou_gate, INFEASIBLE, fused)
    return fused


def _lsa_total(cost: np.ndarray) -> float:
    if cost.size == 0 or min(cost.shape) == 0:
        return 0.0
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].sum())


def _optimality_tol(opt: float) -> float:
    # Base the tolerance on the finite part of the total, not the
    # infeasibility penalties, which would inflate it by nine orders of
    # magnitude; the flat term absorbs float error at the penalty scale.
    n_large = round(opt / _LARGE)
    finite = opt - n_large * _LARGE
    return 1e-9 * max(1.0, abs(finite)) + 1e-6


def solve_assignment(costs: np.ndarray) -> MatchResult:
    """Minimum-cost one-to-one assignment over the feasible entries.

    Among all optimal assignments, returns the lexicographically smallest
    one in (row, col) order, so results are reproducible regardless of
    solver internals.
    """
    costs = np.asarray(costs, dtype=float)
    if costs.size == 0:
        return MatchResult(
            matches=[],
            unmatched_tracks=list(range(costs.shape[0])) if costs.ndim == 2 else [],
            unmatched_detections=list(range(costs.shape[1])) if costs.ndim == 2 else [],
        )
    m, n = costs.shape
    work = np.where(np.isinf(costs), _LARGE, costs)

    rem_rows = list(range(m))
    rem_cols = list(range(n))
    opt = _lsa_total(work)
    fixed: list[tuple[int, int]] = []
    for r in range(m):
        rows_after = [x for x in rem_rows if x != r]
        matched = False
        tol = _optimality_tol(opt)
        for c in rem_cols:
            cols_after = [x for x in rem_cols if x != c]
            sub_opt = _lsa_total(work[np.ix_(rows_after, cols_after)])
            if work[r, c] + sub_opt <= opt + tol:
                fixed.append((r, c))
                rem_rows = rows_after
                rem_cols = cols_after
                opt = sub_opt
                matched = True
                break
        if not matched:
            # row stays unmatched (more rows than columns)
            rem_rows = rows_after
            opt = _lsa_total(work[np.ix_(rows_after, rem_cols)])

    matches = [(r, c) for r, c in fixed if np.isfinite(costs[r, c])]
    matched_rows = {r for r, _ in matches}
    matched_cols = {c for _, c in matches}
    return MatchResult(
        matches=matches,
        unmatched_tracks=[r for r in range(m) if r not in matched_rows],
        unmatched_detections=[c for c in range(n) if c not in matched_cols],
    )


def _stage_masks(depths: list[DepthCounters], staged: bool) -> list[list[int]]:
    if not staged:
        return [list(range(len(depths)))]
    stages: list[list[int]] = [[], [], [], []]
    for i, d in enumerate(depths):
        if d.pd_plus > 3 * d.nd_minus:
            stages[0].append(i)
        elif d.pd_plus > 2 * d.nd_minus:
            stages[1].append(i)
        elif d.pd_plus > d.nd_minus:
            stages[2].append(i)
        else:
            stages[3].append(i)
    return stages


def deep_association(
    depths: list[DepthCounters],
    c_iou: np.ndarray,
    c_cos: np.ndarray,
    c_d: np.ndarray,
    cfg: AssociationConfig,
    staged: bool = True,
) -> MatchResult:
    """Depth-staged assignment over full track x detection cost channels.

    Tracks enter their earliest qualifying stage only (pd > 3 nd, then
    pd > 2 nd, then pd > nd, then a residual stage for the rest); each
    stage fuses its own submatrix over the detections still unmatched.
    Stage matches are then screened: a match is rejected when its cosine
    distance exceeds the appearance threshold and its IoU overlap falls
    below the acceptance floor, i.e. it must pass at least one of the two
    criteria.
    """
    c_iou = np.asarray(c_iou, dtype=float)
    c_cos = np.asarray(c_cos, dtype=float)
    c_d = np.asarray(c_d, dtype=float)
    n_tracks, n_dets = c_iou.shape
    if len(depths) != n_tracks:
        raise ValueError("depth counters must align with cost rows")

    matches: list[tuple[int, int]] = []
    unmatched_tracks: list[int] = []
    free_dets = list(range(n_dets))

    for stage_rows in _stage_masks(depths, staged):
        if not stage_rows:
            continue
        if not free_dets:
            unmatched_tracks.extend(stage_rows)
            continue
        sub = np.ix_(stage_rows, free_dets)
        fused = fuse(c_iou[sub], c_cos[sub], c_d[sub], cfg)
        result = solve_assignment(fused)
        taken: set[int] = set()
        for r, c in result.matches:
            ti, di = stage_rows[r], free_dets[c]
            cos_bad = (not np.isnan(c_cos[ti, di])) and c_cos[ti, di] > cfg.appearance_threshold
            overlap_bad = (1.0 - c_iou[ti, di]) < cfg.iou_accept_min_overlap
            if cos_bad and overlap_bad:
                unmatched_tracks.append(ti)
            else:
                matches.append((ti, di))
                taken.add(di)
        unmatched_tracks.extend(stage_rows[r] for r in result.unmatched_tracks)
        free_dets = [d for d in free_dets if d not in taken]

    return MatchResult(
        matches=matches,
        unmatched_tracks=sorted(unmatched_tracks),
        unmatched_detections=free_dets,
    )
