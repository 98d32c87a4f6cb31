import numpy as np
import pytest

from motkit.metrics import evaluate
from motkit.tracker import TrackerConfig, run_sequence


def score_scenario(scenario, config=None):
    """Run the tracker on a generated scenario and evaluate against its gt."""
    records = run_sequence(scenario.detections, scenario.embeddings, config or TrackerConfig())
    by_frame = {}
    for rec in records:
        by_frame.setdefault(rec.frame, []).append(rec)
    return evaluate(scenario.gt, by_frame)


IOU_ONLY_CONFIG = TrackerConfig(
    enable_smoothing=False,
    enable_direction=False,
    enable_appearance=False,
    enable_fine_memory=False,
    enable_depth_staging=False,
)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
