"""Command line entry point.

    subnet-walk <experiment-id> [<experiment-id> ...] [--config FILE]
                [--out DIR] [--seeds 0,1,2,3,4] [--format csv,json]
                [--mnist-images PATH --mnist-labels PATH] [--set key=value]

Exit code 0 iff every requested experiment passed. ``all`` expands to the
full catalogue. File config values are overridden by --seeds/--mnist-*/--set.
The SUBNET_WALK_THREADS environment variable caps per-experiment seed
concurrency (default 1).
"""

from __future__ import annotations

import argparse
import sys

from .exceptions import ConfigError
from .experiments import EXPERIMENT_IDS, SCHEMAS
from .harness import parse_config_file, run_experiment


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="subnet-walk",
        description="Train dropout MLPs and check claims about their subnetwork mask space.",
    )
    parser.add_argument(
        "experiments",
        nargs="+",
        metavar="experiment-id",
        help=f"one or more of: {', '.join(EXPERIMENT_IDS)}, or 'all'",
    )
    parser.add_argument("--config", help="flat 'key = value' config file")
    parser.add_argument("--out", default="runs", help="output directory (default: runs)")
    parser.add_argument("--seeds", help="comma-separated seed list, e.g. 0,1,2,3,4")
    parser.add_argument("--format", default="csv,json", help="artifact formats (csv,json)")
    parser.add_argument("--mnist-images", help="IDX image file (switches data to an MNIST subset)")
    parser.add_argument("--mnist-labels", help="IDX label file")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        dest="assignments",
        help="override any schema field (repeatable)",
    )
    parser.add_argument(
        "--describe",
        action="store_true",
        help="print each requested experiment's config schema and exit",
    )
    return parser


def _describe(ids) -> None:
    for experiment_id in ids:
        print(f"{experiment_id}:")
        for name, spec in SCHEMAS[experiment_id].items():
            default = ",".join(str(v) for v in spec.default) if isinstance(spec.default, list) else spec.default
            print(f"  {name:<14} {spec.kind:<10} default={default!r:<22} {spec.help}")


def _collect_overrides(args) -> dict:
    overrides = dict(parse_config_file(args.config)) if args.config else {}
    for item in args.assignments:
        if "=" not in item:
            raise ConfigError("--set", f"expected KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.seeds:
        overrides["seeds"] = args.seeds
    if args.mnist_images:
        overrides["mnist_images"] = args.mnist_images
    if args.mnist_labels:
        overrides["mnist_labels"] = args.mnist_labels
    return overrides


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    ids = list(args.experiments)
    if "all" in ids:
        ids = list(EXPERIMENT_IDS)
    unknown = [i for i in ids if i not in SCHEMAS]
    if unknown:
        parser.error(f"unknown experiment id(s) {unknown}; valid: {', '.join(EXPERIMENT_IDS)}, all")

    if args.describe:
        _describe(ids)
        return 0

    formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
    try:
        overrides = _collect_overrides(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    all_passed = True
    for experiment_id in ids:
        try:
            report = run_experiment(experiment_id, overrides, args.out, formats)
        except ConfigError as exc:
            print(f"{experiment_id}: config error: {exc}", file=sys.stderr)
            return 2
        verdict = "PASS" if report.passed else "FAIL"
        print(f"{experiment_id}: {verdict} ({args.out}/{experiment_id}/report.json)")
        all_passed = all_passed and report.passed
    return 0 if all_passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
