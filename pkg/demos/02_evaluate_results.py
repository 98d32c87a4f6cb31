"""Round-trip a scenario through the file formats and score it.

Writes ground truth, detections, and the embedding sidecar to a
temporary directory, runs the tracker via the same code path the CLI
uses, writes a MOT result file, and evaluates it.
"""

import tempfile
from pathlib import Path

from motkit import TrackerConfig, evaluate, mot_io, run_sequence
from motkit.synth import generate, make_scenario


def main():
    scenario = generate(make_scenario("occlusion", seed=0, gap=15))
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        mot_io.write_ground_truth(scenario.gt, out / "gt.txt")
        mot_io.write_detections(scenario.detections, out / "det.txt")
        mot_io.write_sidecar(out / "emb.rtemb", scenario.spec.embed_dim,
                             scenario.embeddings)

        detections, skipped = mot_io.parse_detections(out / "det.txt")
        dim, embeddings = mot_io.read_sidecar(out / "emb.rtemb")
        mot_io.validate_sidecar(embeddings, detections)
        print(f"loaded {sum(len(v) for v in detections.values())} detections "
              f"({skipped} skipped), {len(embeddings)} embeddings of dim {dim}")

        records = run_sequence(detections, embeddings, TrackerConfig())
        mot_io.write_results(records, out / "res.txt")

        results = mot_io.parse_results(out / "res.txt")
        report = evaluate(mot_io.parse_ground_truth(out / "gt.txt"), results)
        for key, value in report.as_dict().items():
            print(f"{key:>8}: {value:.4f}" if isinstance(value, float)
                  else f"{key:>8}: {value}")


if __name__ == "__main__":
    main()
