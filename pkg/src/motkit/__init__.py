"""motkit: multi-pedestrian tracking-by-detection.

A tracking engine built around four robustness mechanisms:

* a constant-velocity Kalman filter over object centroids with
  line-fitted trajectory smoothing and geometric measurement correction,
* a per-track appearance memory holding one coarse EMA embedding plus
  nine confidence-binned fine EMA embeddings,
* fused IoU / appearance / direction-consistency association solved in
  depth-prioritised stages with the Hungarian algorithm,
* a track lifecycle (tentative / confirmed / lost / deleted) with linear
  tracklet interpolation as post-processing.

The package also ships a MOTChallenge-compatible file layer, a CLEAR-MOT
and IDF1 evaluator, and a deterministic synthetic-scenario generator used
as the oracle bed for the test suite.
"""

from .kalman import KalmanState, NoiseConfig, predict, update
from .trajectory import (
    LineFit,
    SmoothingParams,
    TrajectoryMemory,
    correct_measurement,
    fit_initial_segment,
    project_onto_fit,
)
from .appearance import (
    EmbeddingCluster,
    appearance_distance,
    bin_index,
    update_coarse,
    update_fine,
)
from .association import (
    INFEASIBLE,
    AssociationConfig,
    DepthCounters,
    MatchResult,
    deep_association,
    direction_cost,
    fuse,
    iou_distance,
    solve_assignment,
)
from .tracker import FrameResult, Track, Tracker, TrackerConfig, interpolate, run_sequence
from .metrics import MetricsReport, clear_mot, evaluate, idf1
from .synth import AgentPath, OcclusionWindow, Scenario, ScenarioSpec, generate, make_scenario
from .config import ConfigError, parse_config

__all__ = [
    "KalmanState",
    "NoiseConfig",
    "predict",
    "update",
    "LineFit",
    "SmoothingParams",
    "TrajectoryMemory",
    "correct_measurement",
    "fit_initial_segment",
    "project_onto_fit",
    "EmbeddingCluster",
    "appearance_distance",
    "bin_index",
    "update_coarse",
    "update_fine",
    "INFEASIBLE",
    "AssociationConfig",
    "DepthCounters",
    "MatchResult",
    "deep_association",
    "direction_cost",
    "fuse",
    "iou_distance",
    "solve_assignment",
    "FrameResult",
    "Track",
    "Tracker",
    "TrackerConfig",
    "interpolate",
    "run_sequence",
    "MetricsReport",
    "clear_mot",
    "evaluate",
    "idf1",
    "AgentPath",
    "OcclusionWindow",
    "Scenario",
    "ScenarioSpec",
    "generate",
    "make_scenario",
    "ConfigError",
    "parse_config",
]

__version__ = "0.1.0"
