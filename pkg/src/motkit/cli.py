"""Command line entry points.

Subcommands:

* ``run``      - track a detection file (plus optional embedding sidecar)
  and write MOT-format results.
* ``eval``     - score a result file against ground truth; prints a
  metrics table followed by machine-readable ``key=value`` lines.
* ``synth``    - generate a synthetic scenario to a directory.
* ``ablation`` - print the robustness-mechanism ablation grid on a
  seeded scenario.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import mot_io
from .ablation import format_grid, run_preset_ablation
from .config import ConfigError, parse_config
from .metrics import evaluate
from .synth import generate, make_scenario, trajectory_csv
from .tracker import TrackerConfig, run_sequence

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit((USAGE_ERROR, f"error: {message}"))


def _build_parser() -> _Parser:
    parser = _Parser(prog="motkit", description="multi-pedestrian tracking toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="track a detection file")
    run_p.add_argument("--detections", required=True, help="MOT detection file")
    run_p.add_argument("--embeddings", help="embedding sidecar (binary or CSV)")
    run_p.add_argument("--config", help="flat key = value configuration file")
    run_p.add_argument("--output", required=True, help="result file to write")
    run_p.add_argument("--no-interpolation", action="store_true")
    run_p.add_argument("--fusion-mode", choices=["min", "weighted"])

    eval_p = sub.add_parser("eval", help="score results against ground truth")
    eval_p.add_argument("--gt", required=True)
    eval_p.add_argument("--results", required=True)
    eval_p.add_argument("--iou-threshold", type=float, default=0.5)

    synth_p = sub.add_parser("synth", help="generate a synthetic scenario")
    synth_p.add_argument(
        "--scenario", required=True, choices=["linear", "crossing", "occlusion", "crowd"]
    )
    synth_p.add_argument("--seed", type=int, default=0)
    synth_p.add_argument("--out", required=True, help="output directory")
    synth_p.add_argument("--gap", type=int, help="occlusion gap length (occlusion scenario)")

    abl_p = sub.add_parser("ablation", help="print the ablation grid")
    abl_p.add_argument("--scenario", default="crowd")
    abl_p.add_argument("--seed", type=int, default=0)
    abl_p.add_argument("--out", help="also write the grid to this file")
    return parser


def _cmd_run(args) -> int:
    det_path = Path(args.detections)
    if not det_path.exists():
        print(f"detections file not found: {det_path}", file=sys.stderr)
        return DATA_ERROR
    config = TrackerConfig()
    if args.config:
        config = parse_config(args.config)
    if args.no_interpolation:
        config = replace(config, interpolation=False)
    if args.fusion_mode:
        config = replace(config, association=replace(config.association, fusion_mode=args.fusion_mode))

    detections, skipped = mot_io.parse_detections(det_path)
    if skipped:
        print(f"warning: skipped {skipped} malformed detection line(s)", file=sys.stderr)
    embeddings = None
    if args.embeddings:
        _, embeddings = mot_io.read_sidecar(args.embeddings)
        mot_io.validate_sidecar(embeddings, detections)
    records = run_sequence(detections, embeddings, config)
    mot_io.write_results(records, args.output)
    return 0


def _cmd_eval(args) -> int:
    gt = mot_io.parse_ground_truth(args.gt)
    results = mot_io.parse_results(args.results)
    report = evaluate(gt, results, args.iou_threshold)
    table = report.as_dict()
    width = max(len(k) for k in table)
    print(f"{'metric':<{width}}  value")
    for key, value in table.items():
        if isinstance(value, float):
            print(f"{key:<{width}}  {value:.4f}")
        else:
            print(f"{key:<{width}}  {value}")
    print()
    for key, value in table.items():
        if isinstance(value, float):
            print(f"{key}={value:.6f}")
        else:
            print(f"{key}={value}")
    return 0


def _cmd_synth(args) -> int:
    kwargs = {}
    if args.gap is not None:
        if args.scenario != "occlusion":
            print("--gap only applies to the occlusion scenario", file=sys.stderr)
        else:
            kwargs["gap"] = args.gap
    scenario = generate(make_scenario(args.scenario, seed=args.seed, **kwargs))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mot_io.write_ground_truth(scenario.gt, out / "gt.txt")
    mot_io.write_detections(scenario.detections, out / "det.txt")
    mot_io.write_sidecar(out / "embeddings.rtemb", scenario.spec.embed_dim, scenario.embeddings)
    (out / "trajectories.csv").write_text(trajectory_csv(scenario))
    print(f"wrote scenario '{args.scenario}' (seed {args.seed}) to {out}")
    return 0


def _cmd_ablation(args) -> int:
    rows = run_preset_ablation(args.scenario, args.seed)
    grid = format_grid(rows)
    print(grid)
    if args.out:
        Path(args.out).write_text(grid + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, tuple):
            code, message = exc.code
            print(message, file=sys.stderr)
            return code
        return USAGE_ERROR if exc.code else 0
    handlers = {
        "run": _cmd_run,
        "eval": _cmd_eval,
        "synth": _cmd_synth,
        "ablation": _cmd_ablation,
    }
    try:
        return handlers[args.command](args)
    except (mot_io.DataError, ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
