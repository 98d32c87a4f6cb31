"""Track two pedestrians through a crossing under full occlusion.

Two agents walk toward each other, disappear behind an occluder for six
frames while reversing direction, and reappear half occluded. Pure box
overlap pairs them crosswise; the confidence-binned appearance memory
resolves the exchange. This script runs the tracker twice (full
configuration vs geometry only) and prints what happens to the ids.
"""

from motkit import TrackerConfig, evaluate, run_sequence
from motkit.synth import generate, make_scenario


def score(scenario, config):
    records = run_sequence(scenario.detections, scenario.embeddings, config)
    by_frame = {}
    for rec in records:
        by_frame.setdefault(rec.frame, []).append(rec)
    return evaluate(scenario.gt, by_frame)


def main():
    scenario = generate(make_scenario("crossing", seed=0))
    print(f"scenario: {scenario.spec.name}, {scenario.spec.n_frames} frames, "
          f"{scenario.spec.n_agents} agents\n")

    full = score(scenario, TrackerConfig())
    geometry_only = score(
        scenario,
        TrackerConfig(
            enable_smoothing=False,
            enable_direction=False,
            enable_appearance=False,
            enable_fine_memory=False,
            enable_depth_staging=False,
        ),
    )

    print(f"{'configuration':<16} {'MOTA':>8} {'IDF1':>8} {'IDSW':>6}")
    for label, report in (("full", full), ("geometry-only", geometry_only)):
        print(f"{label:<16} {report.mota:>8.4f} {report.idf1:>8.4f} {report.idsw:>6d}")

    print("\nThe geometry-only run swaps the two identities at the occluder;")
    print("the full run keeps both ids through the reversal.")


if __name__ == "__main__":
    main()
