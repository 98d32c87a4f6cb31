"""Ablation grid: progressively enable the robustness mechanisms.

Runs the tracker on one synthetic scenario under four configurations
(baseline, + trajectory smoothing/direction, + binned appearance memory,
+ depth-staged association) and reports MOTA / IDF1 / IDSW per row.
"""

from __future__ import annotations

from dataclasses import replace

from .metrics import evaluate
from .synth import Scenario, generate, make_scenario
from .tracker import TrackerConfig, run_sequence

ABLATION_ROWS: list[tuple[str, dict[str, bool]]] = [
    (
        "baseline",
        dict(
            enable_smoothing=False,
            enable_direction=False,
            enable_fine_memory=False,
            enable_depth_staging=False,
        ),
    ),
    (
        "+smooth-direction",
        dict(
            enable_smoothing=True,
            enable_direction=True,
            enable_fine_memory=False,
            enable_depth_staging=False,
        ),
    ),
    (
        "+binned-appearance",
        dict(
            enable_smoothing=True,
            enable_direction=True,
            enable_fine_memory=True,
            enable_depth_staging=False,
        ),
    ),
    (
        "+depth-staging",
        dict(
            enable_smoothing=True,
            enable_direction=True,
            enable_fine_memory=True,
            enable_depth_staging=True,
        ),
    ),
]


def run_ablation(scenario: Scenario, base_config: TrackerConfig | None = None):
    """Evaluate the four configurations; returns [(label, MetricsReport)]."""
    base = base_config or TrackerConfig()
    results = []
    for label, switches in ABLATION_ROWS:
        config = replace(base, **switches)
        records = run_sequence(scenario.detections, scenario.embeddings, config)
        by_frame: dict[int, list] = {}
        for rec in records:
            by_frame.setdefault(rec.frame, []).append(rec)
        results.append((label, evaluate(scenario.gt, by_frame)))
    return results


def format_grid(rows) -> str:
    lines = [f"{'configuration':<20} {'MOTA':>8} {'IDF1':>8} {'IDSW':>6}"]
    for label, report in rows:
        lines.append(
            f"{label:<20} {report.mota:>8.4f} {report.idf1:>8.4f} {report.idsw:>6d}"
        )
    return "\n".join(lines)


def run_preset_ablation(name: str = "crowd", seed: int = 0):
    scenario = generate(make_scenario(name, seed=seed))
    return run_ablation(scenario)
