"""Command-line entry point: ``tcva <command> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .errors import TCVAError

log = logging.getLogger("tcva")


def _floats(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    return [float(v) for v in text.split(",") if v.strip()]


def _names(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcva", description="Temperature-controlled verdict aggregation."
    )
    parser.add_argument("--config", type=Path, help="YAML/JSON run config")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output-dir")
    parser.add_argument("--parallelism", type=int)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def run_options(p):
        p.add_argument("--dataset", dest="dataset_path")
        p.add_argument("--metric", dest="metric_name")
        p.add_argument("--cache", dest="cache_path")
        p.add_argument("--judge", dest="judge_backend", choices=["mock", "remote"])
        p.add_argument("--model", dest="judge_model")
        p.add_argument("--endpoint", dest="judge_endpoint")

    p = sub.add_parser("evaluate", help="judge samples and score them at each temperature")
    run_options(p)
    p.add_argument("--temperatures", type=_floats, help="comma separated, e.g. 0.2,0.5,0.9")
    p.add_argument("--scheme", dest="scheme_name")

    p = sub.add_parser("reaggregate", help="re-score cached verdicts (no judge calls)")
    run_options(p)
    p.add_argument("--temperatures", type=_floats)
    p.add_argument("--schemes", type=_names, help="comma separated scheme names")

    p = sub.add_parser("ablate", help="ablation configs A-D on cached verdicts")
    run_options(p)
    p.add_argument("--temperatures", type=_floats)
    p.add_argument("--scheme", dest="scheme_name")

    p = sub.add_parser("stats", help="correlate scores with human annotations")
    p.add_argument("--scores", required=True, type=Path)
    p.add_argument("--annotations", required=True, type=Path, help="dataset JSONL with human_score")
    p.add_argument("--baseline", type=Path, help="CSV with sample_id and final_score")
    p.add_argument("--n-resamples", type=int, default=10_000)

    p = sub.add_parser("sample", help="stratified subset by human score")
    p.add_argument("--dataset", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--per-bin", required=True, type=int)
    p.add_argument("--n-bins", type=int, default=5)

    p = sub.add_parser("plot", help="plot Spearman rho against temperature from stats.csv")
    p.add_argument("--stats", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    return parser


def _run_config(args) -> harness.RunConfig:
    overrides = {
        "dataset_path": getattr(args, "dataset_path", None),
        "metric_name": getattr(args, "metric_name", None),
        "cache_path": getattr(args, "cache_path", None),
        "scheme_name": getattr(args, "scheme_name", None),
        "seed": args.seed,
        "output_dir": args.output_dir,
        "parallelism": args.parallelism,
    }
    if args.command == "evaluate" and args.temperatures is not None:
        overrides["temperatures"] = args.temperatures
    if args.config:
        config = harness.RunConfig.from_file(args.config, **overrides)
    else:
        config = harness.RunConfig(**{k: v for k, v in overrides.items() if v is not None})
    judge_over = {
        "backend": getattr(args, "judge_backend", None),
        "model": getattr(args, "judge_model", None),
        "endpoint": getattr(args, "judge_endpoint", None),
    }
    if any(v is not None for v in judge_over.values()):
        config.judge = harness.replace(
            config.judge, **{k: v for k, v in judge_over.items() if v is not None}
        )
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "evaluate":
            config = _run_config(args)
            result = harness.cmd_evaluate(config)
            c = result.manifest["counts"]
            print(f"{c['scores']} scores for {c['samples'] - c['failed']}/{c['samples']} samples "
                  f"-> {result.scores_path}")
        elif args.command == "reaggregate":
            config = _run_config(args)
            rows = harness.cmd_reaggregate(config, args.temperatures, args.schemes)
            print(f"{len(rows)} scores -> {Path(config.output_dir) / 'reaggregate.csv'}")
        elif args.command == "ablate":
            config = _run_config(args)
            table = harness.cmd_ablate(config, args.temperatures, args.scheme_name)
            print(f"{len(table)} rows -> {Path(config.output_dir) / 'ablation_table.csv'}")
        elif args.command == "stats":
            out = args.output_dir or "tcva-out"
            report = harness.cmd_stats(
                args.scores, args.annotations, args.baseline, out,
                seed=args.seed or 0, n_resamples=args.n_resamples,
                n_jobs=args.parallelism or 1,
            )
            print(harness.format_stats_summary(report), end="")
        elif args.command == "sample":
            chosen = harness.cmd_sample(
                args.dataset, args.out, args.per_bin, args.n_bins, args.seed or 0
            )
            print(f"{len(chosen)} samples -> {args.out}")
        elif args.command == "plot":
            print(harness.cmd_plot(args.stats, args.out))
    except (TCVAError, FileNotFoundError) as exc:
        print(f"tcva {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
