"""Per-frame tracking orchestration and lifecycle management.

Frame loop: predict every live track, associate confirmed + lost tracks
against the detections in depth-prioritised stages, give tentative
tracks an IoU-only pass over the leftovers, then update matched tracks
(corrected measurement into the filter, appearance memory, depth
counters), age the unmatched ones through lost/deleted, and spawn
tentative tracks from confident leftover detections.  First-frame spawns
are confirmed immediately.

Robustness mechanisms are individually switchable so ablations can run
the same pipeline with pieces disabled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kalman
from .appearance import EmbeddingCluster, appearance_distance, update_coarse, update_fine
from .association import (
    AssociationConfig,
    DepthCounters,
    deep_association,
    direction_cost,
    iou_distance_matrix,
    solve_assignment,
)
from .kalman import KalmanState, NoiseConfig
from .mot_io import DetectionRecord, ResultRecord
from .trajectory import (
    SmoothingParams,
    TrajectoryMemory,
    correct_measurement,
    fit_initial_segment,
)

TENTATIVE = "tentative"
CONFIRMED = "confirmed"
LOST = "lost"
DELETED = "deleted"

_LEGAL_TRANSITIONS = {
    (TENTATIVE, CONFIRMED),
    (TENTATIVE, DELETED),
    (CONFIRMED, LOST),
    (LOST, CONFIRMED),
    (LOST, DELETED),
}

# smoothing factor for the per-track box extent
EXTENT_ALPHA = 0.9

# heading is considered stale after this many consecutive coasted points
MAX_COAST_FOR_HEADING = 5


@dataclass(frozen=True)
class TrackerConfig:
    """Pipeline thresholds plus the sub-module configurations."""

    new_track_conf: float = 0.7
    max_lost_frames: int = 30
    n_init: int = 3
    smoothing: SmoothingParams = field(default_factory=SmoothingParams)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    association: AssociationConfig = field(default_factory=AssociationConfig)
    interpolation: bool = True
    interpolation_max_gap: int = 20
    # feature switches for ablations
    enable_smoothing: bool = True  # trajectory fit + measurement correction
    enable_direction: bool = True  # direction-consistency cost channel
    enable_appearance: bool = True  # appearance channel (coarse memory)
    enable_fine_memory: bool = True  # confidence-binned fine slots
    enable_depth_staging: bool = True  # staged association priority

    def __post_init__(self) -> None:
        if not 0.0 <= self.new_track_conf <= 1.0:
            raise ValueError("new_track_conf must lie in [0, 1]")
        if self.max_lost_frames <= 0 or self.n_init <= 0 or self.interpolation_max_gap <= 0:
            raise ValueError("frame-count settings must be positive")


@dataclass
class Track:
    """One tracked identity and all of its per-track state."""

    track_id: int
    lifecycle: str
    state: KalmanState
    memory: TrajectoryMemory
    cluster: EmbeddingCluster
    depth: DepthCounters
    extent: np.ndarray  # smoothed (w, h)
    time_since_update: int = 0
    age: int = 1
    consecutive_hits: int = 1
    last_conf: float = 0.0

    def transition(self, new_state: str) -> None:
        if new_state == self.lifecycle:
            return
        if (self.lifecycle, new_state) not in _LEGAL_TRANSITIONS:
            raise RuntimeError(f"illegal lifecycle transition {self.lifecycle} -> {new_state}")
        self.lifecycle = new_state

    @property
    def predicted_box(self) -> tuple[float, float, float, float]:
        cx, cy = self.state.center
        w, h = self.extent
        return (cx - w / 2.0, cy - h / 2.0, float(w), float(h))


@dataclass
class FrameResult:
    """Confirmed-track emissions for one frame."""

    frame: int
    entries: list[tuple[int, tuple[float, float, float, float], float]] = field(
        default_factory=list
    )


class Tracker:
    """Stateful per-sequence tracker; feed frames in increasing order."""

    def __init__(self, config: TrackerConfig | None = None):
        self.config = config or TrackerConfig()
        self.tracks: list[Track] = []
        self._next_id = 1
        self._last_frame: int | None = None
        self._first_frame_seen = False

    # ------------------------------------------------------------------
    def _new_track(self, det: DetectionRecord, embedding: np.ndarray | None, first_frame: bool) -> Track:
        cluster = EmbeddingCluster()
        if embedding is not None:
            update_coarse(cluster, embedding)
            if self.config.enable_fine_memory:
                update_fine(cluster, embedding, det.conf)
        track = Track(
            track_id=self._next_id,
            lifecycle=CONFIRMED if first_frame else TENTATIVE,
            state=kalman.initial_state(det.center),
            memory=TrajectoryMemory.from_center(det.center),
            cluster=cluster,
            depth=DepthCounters(pd_plus=1, nd_minus=0),
            extent=np.array([det.bb_width, det.bb_height], dtype=float),
            last_conf=det.conf,
        )
        self._next_id += 1
        return track

    def _cost_channels(self, tracks: list[Track], dets: list[DetectionRecord],
                       embeddings: list[np.ndarray | None]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        cfg = self.config
        c_iou = iou_distance_matrix([t.predicted_box for t in tracks], [d.box for d in dets])
        c_cos = np.full_like(c_iou, np.nan)
        if cfg.enable_appearance:
            for i, t in enumerate(tracks):
                cluster = t.cluster
                if not cfg.enable_fine_memory and cluster.coarse is not None:
                    cluster = EmbeddingCluster(coarse=cluster.coarse, alpha=cluster.alpha)
                if cluster.is_empty():
                    continue
                for j, emb in enumerate(embeddings):
                    if emb is not None:
                        c_cos[i, j] = appearance_distance(cluster, emb, dets[j].conf)
        c_d = np.zeros_like(c_iou)
        if cfg.enable_direction:
            for i, t in enumerate(tracks):
                for j, d in enumerate(dets):
                    c_d[i, j] = direction_cost(
                        t.memory,
                        d.center,
                        cfg.smoothing,
                        neutral=cfg.association.cd_neutral,
                        max_coast_run=MAX_COAST_FOR_HEADING,
                    )
        return c_iou, c_cos, c_d

    def _update_matched(self, track: Track, det: DetectionRecord, embedding: np.ndarray | None) -> None:
        cfg = self.config
        if cfg.enable_smoothing:
            z = correct_measurement(track.memory, det.center, cfg.smoothing)
        else:
            z = det.center
        track.state = kalman.update(track.state, z, cfg.noise)
        track.memory.append_update(det.center, track.state.center)
        if cfg.enable_smoothing and track.memory.hits == cfg.smoothing.k and track.memory.fit is None:
            fit_initial_segment(track.memory, cfg.smoothing)
        track.extent = EXTENT_ALPHA * track.extent + (1.0 - EXTENT_ALPHA) * np.array(
            [det.bb_width, det.bb_height]
        )
        if cfg.enable_appearance and embedding is not None:
            update_coarse(track.cluster, embedding)
            if cfg.enable_fine_memory:
                update_fine(track.cluster, embedding, det.conf)
        track.depth.pd_plus += 1
        track.time_since_update = 0
        track.consecutive_hits += 1
        track.last_conf = det.conf
        if track.lifecycle == LOST:
            track.transition(CONFIRMED)
        elif track.lifecycle == TENTATIVE and track.consecutive_hits >= cfg.n_init:
            track.transition(CONFIRMED)

    def _age_unmatched(self, track: Track) -> None:
        track.depth.nd_minus += 1
        track.time_since_update += 1
        track.consecutive_hits = 0
        if track.lifecycle == TENTATIVE:
            track.transition(DELETED)
            return
        track.memory.append_coast(track.state.center)
        if track.lifecycle == CONFIRMED:
            track.transition(LOST)
        if track.time_since_update > self.config.max_lost_frames:
            track.transition(DELETED)

    # ------------------------------------------------------------------
    def step(
        self,
        frame: int,
        detections: list[DetectionRecord],
        embeddings: dict[int, np.ndarray] | None = None,
    ) -> FrameResult:
        """Advance the tracker by one frame and emit confirmed tracks.

        ``embeddings`` maps detection index within this frame to its
        appearance vector; missing entries disable the appearance channel
        for that detection.
        """
        if self._last_frame is not None and frame <= self._last_frame:
            raise ValueError("non-monotonic frame")
        self._last_frame = frame
        first_frame = not self._first_frame_seen
        self._first_frame_seen = True

        cfg = self.config
        dets = [d for d in detections if d.conf >= 0.1]
        embs: list[np.ndarray | None] = [
            (embeddings or {}).get(j) for j in range(len(dets))
        ]

        # 1. predict all live tracks
        for track in self.tracks:
            track.state = kalman.predict(track.state, cfg.noise)
            track.age += 1

        main_tracks = [t for t in self.tracks if t.lifecycle in (CONFIRMED, LOST)]
        tentative_tracks = [t for t in self.tracks if t.lifecycle == TENTATIVE]

        matched: list[tuple[Track, int]] = []
        free_dets = list(range(len(dets)))

        # 2. depth-staged association over confirmed + lost tracks
        if main_tracks and dets:
            c_iou, c_cos, c_d = self._cost_channels(main_tracks, dets, embs)
            result = deep_association(
                [t.depth for t in main_tracks],
                c_iou,
                c_cos,
                c_d,
                cfg.association,
                staged=cfg.enable_depth_staging,
            )
            for r, c in result.matches:
                matched.append((main_tracks[r], c))
            free_dets = result.unmatched_detections

        # 3. IoU-only residual association for tentative tracks
        if tentative_tracks and free_dets:
            sub_dets = [dets[j] for j in free_dets]
            c_iou = iou_distance_matrix(
                [t.predicted_box for t in tentative_tracks], [d.box for d in sub_dets]
            )
            gated = np.where(c_iou > cfg.association.iou_gate, np.inf, c_iou)
            result = solve_assignment(gated)
            for r, c in result.matches:
                matched.append((tentative_tracks[r], free_dets[c]))
            free_dets = [free_dets[c] for c in result.unmatched_detections]

        # 4. update matched tracks
        matched_ids = set()
        for track, det_idx in matched:
            self._update_matched(track, dets[det_idx], embs[det_idx])
            matched_ids.add(track.track_id)

        # 5. age unmatched tracks
        for track in self.tracks:
            if track.track_id not in matched_ids:
                self._age_unmatched(track)

        # 6. spawn tracks from confident leftover detections
        spawned: list[Track] = []
        for det_idx in free_dets:
            det = dets[det_idx]
            if det.conf > cfg.new_track_conf:
                track = self._new_track(det, embs[det_idx], first_frame)
                self.tracks.append(track)
                spawned.append(track)

        self.tracks = [t for t in self.tracks if t.lifecycle != DELETED]

        # 7. emit confirmed tracks refreshed this frame
        result = FrameResult(frame=frame)
        for track, det_idx in matched:
            if track.lifecycle == CONFIRMED:
                det = dets[det_idx]
                result.entries.append((track.track_id, det.box, det.conf))
        for track in spawned:
            if track.lifecycle == CONFIRMED:
                result.entries.append((track.track_id, track.predicted_box, track.last_conf))
        result.entries.sort(key=lambda e: e[0])
        return result


def run_sequence(
    detections: dict[int, list[DetectionRecord]],
    embeddings: dict[tuple[int, int], np.ndarray] | None = None,
    config: TrackerConfig | None = None,
) -> list[ResultRecord]:
    """Track a whole sequence and return (optionally interpolated) results."""
    config = config or TrackerConfig()
    tracker = Tracker(config)
    records: list[ResultRecord] = []
    last = max(detections) if detections else 0
    for frame in range(1, last + 1):
        dets = detections.get(frame, [])
        frame_embs = None
        if embeddings is not None:
            frame_embs = {
                j: embeddings[(frame, j)]
                for j in range(len(dets))
                if (frame, j) in embeddings
            }
        frame_result = tracker.step(frame, dets, frame_embs)
        for track_id, box, conf in frame_result.entries:
            records.append(ResultRecord(frame, track_id, box[0], box[1], box[2], box[3], conf))
    if config.interpolation:
        records = interpolate(records, config.interpolation_max_gap)
    return records


def interpolate(records: list[ResultRecord], max_gap: int) -> list[ResultRecord]:
    """Fill short per-identity gaps by linear box interpolation.

    A gap of g missing frames between consecutive observations of the
    same id is filled when g <= max_gap; longer gaps are left untouched.
    Original records are never modified.
    """
    by_id: dict[int, list[ResultRecord]] = {}
    for rec in records:
        by_id.setdefault(rec.track_id, []).append(rec)
    out = list(records)
    for track_id, recs in by_id.items():
        recs.sort(key=lambda r: r.frame)
        for prev, nxt in zip(recs, recs[1:]):
            gap = nxt.frame - prev.frame - 1
            if gap < 1 or gap > max_gap:
                continue
            for frame in range(prev.frame + 1, nxt.frame):
                t = (frame - prev.frame) / (nxt.frame - prev.frame)
                out.append(
                    ResultRecord(
                        frame,
                        track_id,
                        prev.bb_left + t * (nxt.bb_left - prev.bb_left),
                        prev.bb_top + t * (nxt.bb_top - prev.bb_top),
                        prev.bb_width + t * (nxt.bb_width - prev.bb_width),
                        prev.bb_height + t * (nxt.bb_height - prev.bb_height),
                        prev.conf + t * (nxt.conf - prev.conf),
                    )
                )
    out.sort(key=lambda r: (r.frame, r.track_id))
    return out
