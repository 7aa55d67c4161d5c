"""Command line front end: batch analysis and phantom generation."""

import argparse
import json
import os
import sys
from pathlib import Path

from ._version import __version__
from .imagecore import ImageFormatError, mask_to_image, save_image
from .phantom import generate, standard_spec
from .pipeline import AnalysisConfig, InvalidInputError, analyze_tree, write_report
from .severity import format_rate

SEED_ENV_VAR = "SEVEROSCAN_SEED"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="severoscan",
        description="Score infected lung regions in CT slices and rank patients by severity.",
    )
    parser.add_argument("--version", action="version", version=f"severoscan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser(
        "analyze",
        help="analyze an input tree of patient directories and write a JSON report",
    )
    analyze.add_argument("--input", help="directory of <patient_id>/<slice>.pgm|.png trees")
    analyze.add_argument("--output", help="path of the JSON report to write")
    analyze.add_argument("--overlay", metavar="DIR", help="also write per-slice extraction overlays and masks")
    analyze.add_argument("--objective", choices=("otsu", "kapur"), default="otsu",
                         help="histogram objective for the threshold search (default: otsu)")
    analyze.add_argument("--thresholds", type=int, default=3, metavar="K",
                         help="number of threshold levels (default: 3)")
    analyze.add_argument("--artifact-threshold", type=int, default=184, metavar="N",
                         help="intensities >= N are removed as artifacts (default: 184)")
    analyze.add_argument("--hms", type=int, default=20, help="harmony memory size (default: 20)")
    analyze.add_argument("--hmcr", type=float, default=0.9, help="memory considering rate (default: 0.9)")
    analyze.add_argument("--par", type=float, default=0.3, help="pitch adjusting rate (default: 0.3)")
    analyze.add_argument("--bw", type=int, default=2, help="maximum pitch step (default: 2)")
    analyze.add_argument("--iters", type=int, default=2000,
                         help="improvisations per slice (default: 2000)")
    analyze.add_argument("--seed", type=int, default=None,
                         help=f"run seed (default: ${SEED_ENV_VAR} or 0)")
    analyze.add_argument("--jobs", type=int, default=0, metavar="N",
                         help="worker processes for slices (default: one per CPU)")
    analyze.add_argument("--print-config", action="store_true",
                         help="print the resolved configuration and exit")

    phantom = sub.add_parser(
        "phantom",
        help="generate a synthetic slice with exact ground-truth masks",
    )
    phantom.add_argument("--out", required=True, metavar="DIR", help="output directory")
    phantom.add_argument("--seed", type=int, default=0, help="phantom seed (default: 0)")
    phantom.add_argument("--width", type=int, default=512, help="image width (default: 512)")
    phantom.add_argument("--height", type=int, default=512, help="image height (default: 512)")
    phantom.add_argument("--target-rate", type=float, default=None, metavar="PCT",
                         help="aim the true infection rate near this percentage")
    phantom.add_argument("--blobs", type=int, default=None, metavar="N",
                         help="number of infection blobs (0 for a healthy slice)")
    return parser


def _resolve_seed(arg_seed, parser) -> int:
    if arg_seed is not None:
        return arg_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        parser.error(f"{SEED_ENV_VAR} must be an integer, got {env!r}")


def _run_analyze(args, parser) -> int:
    try:
        cfg = AnalysisConfig(
            objective=args.objective,
            thresholds=args.thresholds,
            artifact_threshold=args.artifact_threshold,
            hms=args.hms,
            hmcr=args.hmcr,
            par=args.par,
            bw=args.bw,
            iters=args.iters,
            seed=_resolve_seed(args.seed, parser),
            min_component_fraction=0.001,
            morph_radius=2,
        )
    except ValueError as exc:
        parser.error(str(exc))
    if args.print_config:
        print(f"severoscan {__version__}")
        print(json.dumps(cfg.report_config(), indent=2))
        return 0
    if not args.input or not args.output:
        parser.error("analyze requires --input and --output")

    try:
        report, code = analyze_tree(args.input, cfg, jobs=args.jobs, overlay_dir=args.overlay)
    except (InvalidInputError, ImageFormatError) as exc:
        print(f"severoscan: error: {exc}", file=sys.stderr)
        return 2
    write_report(report, args.output)

    for p in report["patients"]:
        mean = p["mean_infection_rate_percent"]
        shown = f"{format_rate(mean)}%" if mean is not None else "no lung found"
        print(f"rank {p['rank']:>2}  patient {p['patient_id']}  mean infection rate {shown}")
    if code == 3:
        print("severoscan: warning: at least one slice had no detectable lung", file=sys.stderr)
    return code


def _run_phantom(args, parser) -> int:
    try:
        spec = standard_spec(
            args.seed,
            width=args.width,
            height=args.height,
            target_rate_percent=args.target_rate,
            n_blobs=args.blobs,
        )
        truth = generate(spec)
    except ValueError as exc:
        parser.error(str(exc))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_image(truth.image, out / "image.pgm")
    save_image(mask_to_image(truth.body_mask), out / "body_mask.pgm")
    save_image(mask_to_image(truth.lung_mask), out / "lung_mask.pgm")
    save_image(mask_to_image(truth.infection_mask), out / "infection_mask.pgm")
    payload = {
        "seed": spec.seed,
        "width": spec.width,
        "height": spec.height,
        "true_infection_rate_percent": truth.true_infection_rate_percent,
        "lung_pixels": int(truth.lung_mask.sum()),
        "infection_pixels": int(truth.infection_mask.sum()),
        "body_pixels": int(truth.body_mask.sum()),
        "blobs": [
            {"cx": b.cx, "cy": b.cy, "radius": b.radius, "mean": b.mean}
            for b in spec.infection_blobs
        ],
        "files": {
            "image": "image.pgm",
            "body_mask": "body_mask.pgm",
            "lung_mask": "lung_mask.pgm",
            "infection_mask": "infection_mask.pgm",
        },
    }
    (out / "truth.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8", newline="\n")
    print(f"phantom written to {out} (true rate {format_rate(truth.true_infection_rate_percent)}%)")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "analyze":
        return _run_analyze(args, parser)
    return _run_phantom(args, parser)


if __name__ == "__main__":
    sys.exit(main())
