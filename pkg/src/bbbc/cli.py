"""Command-line harness.

Subcommands: bench (benchmark-function batches), cluster (dataset batches),
compare (significance tests between two result files), verify (audit an
output directory), plot (re-render figures for an existing directory).

Exit codes: 0 success, 2 usage error, 3 data error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence, Union

from .clustering import DistanceMetric
from .datasets import CsvSchema, DataError, load_csv
from .experiments import (
    BENCH_ALGORITHMS,
    CLUSTER_ALGORITHMS,
    ExperimentPlan,
    UsageError,
    run_bench,
    run_cluster,
    run_compare,
    verify_outputs,
)
from .objectives import FUNCTION_NAMES
from .optimizer import OptimizerConfig

__all__ = ["main", "build_parser"]


def _metric(token: str) -> DistanceMetric:
    try:
        return DistanceMetric(token)
    except ValueError:
        raise UsageError(f"unknown metric '{token}'; choose sq or euclid") from None


def _algorithms(token: str, allowed: tuple[str, ...]) -> tuple[str, ...]:
    names = tuple(t.strip() for t in token.split(",") if t.strip())
    if not names:
        raise UsageError("--algorithms needs at least one name")
    for name in names:
        if name not in allowed:
            raise UsageError(
                f"unknown algorithm '{name}'; choose from {', '.join(allowed)}"
            )
    return names


def _label_column(token: Optional[str]) -> Optional[Union[int, str]]:
    if token is None:
        return None
    try:
        return int(token)
    except ValueError:
        return token


def _skip_columns(token: Optional[str]) -> frozenset[int]:
    if not token:
        return frozenset()
    try:
        return frozenset(int(t) for t in token.split(",") if t.strip())
    except ValueError:
        raise UsageError("--skip-columns must be a comma list of integers") from None


def _config(args: argparse.Namespace) -> OptimizerConfig:
    return OptimizerConfig(
        num_stars=args.stars,
        max_iters=args.iters,
        memory_capacity=args.memory,
        alpha0=args.alpha0,
        alpha_growth=args.alpha_growth,
        alpha_cap=args.alpha_cap,
        seed=args.seed,
        stall_tol=args.tol,
    )


def _schema(args: argparse.Namespace) -> CsvSchema:
    return CsvSchema(
        label_column=_label_column(args.label_column),
        delimiter=args.delimiter,
        has_header=args.header,
        skip_columns=_skip_columns(args.skip_columns),
    )


def _print_summaries(result: dict) -> None:
    print(f"target: {result['target']}")
    for alg in sorted(result["summaries"]):
        s = result["summaries"][alg]
        print(
            f"  {alg:8s} best {s.best:.6g}  avg {s.average:.6g}  "
            f"std {s.std:.6g}  runs {s.n_runs}"
        )


def _add_common_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--runs", type=int, default=50, help="seeded runs per algorithm")
    p.add_argument("--iters", type=int, default=100, help="iterations per run")
    p.add_argument("--stars", type=int, default=200, help="population per explosion")
    p.add_argument("--memory", type=int, default=10, help="solution archive capacity")
    p.add_argument("--alpha0", type=float, default=0.1, help="initial memory rate")
    p.add_argument(
        "--alpha-growth", type=float, default=0.01,
        help="per-iteration relative increase of the memory rate",
    )
    p.add_argument("--alpha-cap", type=float, default=1.0, help="memory rate ceiling")
    p.add_argument("--seed", type=int, default=0, help="base seed; run i adds i")
    p.add_argument(
        "--tol", type=float, default=None,
        help="optional early stop once best-so-far stops improving by more "
        "than this over a 10-iteration window (off by default)",
    )
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--json", action="store_true", help="also mirror results/summary as JSON"
    )
    p.add_argument(
        "--no-plot", action="store_true", help="skip rendering figures"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bbbc",
        description="Big bang / big crunch optimization and clustering harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="run algorithms on a benchmark function")
    p.add_argument(
        "--function", required=True,
        help=f"one of: {', '.join(FUNCTION_NAMES)}",
    )
    p.add_argument("--dim", type=int, default=50, help="problem dimension")
    p.add_argument(
        "--algorithms", default="bbbc,mebbbc",
        help=f"comma list from: {', '.join(BENCH_ALGORITHMS)}",
    )
    _add_common_run_flags(p)
    p.set_defaults(handler=_cmd_bench)

    p = sub.add_parser("cluster", help="run clustering algorithms on a CSV dataset")
    p.add_argument("--dataset", required=True, help="path to the CSV file")
    p.add_argument("--k", type=int, required=True, help="number of clusters")
    p.add_argument(
        "--metric", default="euclid",
        help="sq (summed squared distances) or euclid (summed distances)",
    )
    p.add_argument(
        "--algorithms", default="mebbbc,kmeans",
        help=f"comma list from: {', '.join(CLUSTER_ALGORITHMS)}",
    )
    p.add_argument(
        "--refine-steps", type=int, default=1,
        help="Lloyd iterations applied to each star by kmebb",
    )
    p.add_argument(
        "--label-column", default=None,
        help="class column, by 0-based index or header name",
    )
    p.add_argument("--header", action="store_true", help="first row is a header")
    p.add_argument("--delimiter", default=",", help="field delimiter")
    p.add_argument(
        "--skip-columns", default=None,
        help="comma list of raw column indices to drop (identifier columns)",
    )
    _add_common_run_flags(p)
    p.set_defaults(handler=_cmd_cluster)

    p = sub.add_parser(
        "compare", help="significance tests between two results.csv files"
    )
    p.add_argument("results_a", help="first results.csv")
    p.add_argument("results_b", help="second results.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("verify", help="audit an output directory for consistency")
    p.add_argument("out_dir", help="directory written by bench or cluster")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("plot", help="re-render figures for an output directory")
    p.add_argument("out_dir", help="directory written by bench or cluster")
    p.add_argument(
        "--target", default=None,
        help="target name for figure titles (default: read plan.json)",
    )
    p.set_defaults(handler=_cmd_plot)

    return parser


def _cmd_bench(args: argparse.Namespace) -> int:
    plan = ExperimentPlan(
        mode="bench",
        algorithms=_algorithms(args.algorithms, BENCH_ALGORITHMS),
        function=args.function,
        dim=args.dim,
        runs=args.runs,
        config=_config(args),
        out_dir=Path(args.out),
        jobs=args.jobs,
        write_json=args.json,
        make_plots=not args.no_plot,
    )
    result = run_bench(plan)
    _print_summaries(result)
    print(f"wrote {plan.out_dir}")
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    plan = ExperimentPlan(
        mode="cluster",
        algorithms=_algorithms(args.algorithms, CLUSTER_ALGORITHMS),
        dataset_path=Path(args.dataset),
        k=args.k,
        metric=_metric(args.metric),
        schema=_schema(args),
        refine_steps=args.refine_steps,
        runs=args.runs,
        config=_config(args),
        out_dir=Path(args.out),
        jobs=args.jobs,
        write_json=args.json,
        make_plots=not args.no_plot,
    )
    result = run_cluster(plan)
    _print_summaries(result)
    print(f"wrote {plan.out_dir}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    report = run_compare(args.results_a, args.results_b, Path(args.out))
    for target in report["targets"]:
        r = report["welch"][target]
        print(
            f"welch_t {target}: t = {r.statistic:.4f}, df = {r.df:.2f}, "
            f"p = {r.p_value:.6g}"
        )
    if report["friedman"] is not None:
        f = report["friedman"]
        print(
            f"friedman over {len(report['targets'])} targets: "
            f"chi2 = {f.statistic:.4f}, df = {f.df:.0f}, p = {f.p_value:.6g}"
        )
    if report["notice"]:
        print(report["notice"])
    print(f"wrote {Path(args.out) / 'significance.csv'}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    problems = verify_outputs(Path(args.out_dir))
    if problems:
        for problem in problems:
            print(f"FAIL {problem}", file=sys.stderr)
        return 3
    print(f"verify OK: {args.out_dir}")
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    from . import plotting

    out_dir = Path(args.out_dir)
    target = args.target
    dataset = None
    plan_path = out_dir / "plan.json"
    if plan_path.exists():
        with open(plan_path, encoding="utf-8") as fh:
            plan = json.load(fh)
        if target is None:
            if plan["mode"] == "bench":
                target = f"{plan['function']}_d{plan['dim']}"
            else:
                target = f"{Path(plan['dataset']).stem}_k{plan['k']}"
        if plan["mode"] == "cluster" and Path(plan["dataset"]).exists():
            s = plan.get("schema", {})
            dataset = load_csv(
                Path(plan["dataset"]),
                CsvSchema(
                    label_column=s.get("label_column"),
                    delimiter=s.get("delimiter", ","),
                    has_header=s.get("has_header", False),
                    skip_columns=frozenset(s.get("skip_columns", ())),
                ),
            )
    if target is None:
        raise UsageError("no plan.json found; pass --target explicitly")
    written = plotting.render_report(out_dir, target, dataset=dataset)
    if not written:
        print(f"nothing to plot in {out_dir}")
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
