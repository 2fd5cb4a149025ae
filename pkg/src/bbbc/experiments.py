"""Seeded experiment batches over benchmark functions and datasets.

A plan runs `runs` seeded repetitions (seed_i = base seed + i, shared across
algorithms so comparisons are paired) of every requested algorithm against one
target, then writes delimited result tables, per-run convergence traces, and
convergence figures into the output directory:

    plan.json        echo of the executed plan
    results.csv      one row per (algorithm, run): final cost
    timings.csv      wall-clock per run (excluded from determinism guarantees)
    summary.csv      best / average / std / n_runs per algorithm
    trace_<alg>_<run>.csv   iteration, best_so_far, center_of_mass_cost
    best_model.csv   cluster mode only: centers + assignments of each
                     algorithm's best run
    fig_*.png        rendered figures (disable with make_plots=False)

All delimited output is written with shortest round-trip float formatting in
deterministic (algorithm, run_index) order, so rerunning a plan reproduces
the files byte for byte; timings.csv is the one exception.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .clustering import (
    DistanceMetric,
    assign,
    clustering_cost,
    clustering_objective,
    kmeans,
    lloyd_refiner,
)
from .datasets import CsvSchema, Dataset, load_csv
from .objectives import BenchmarkFunction, FUNCTION_NAMES, objective_spec
from .optimizer import OptimizerConfig, RunTrace, optimize_bbbc, optimize_mebbbc
from .stats import TestResult, friedman_test, summarize, welch_t_test

__all__ = [
    "ExperimentPlan",
    "ResultRecord",
    "UsageError",
    "run_bench",
    "run_cluster",
    "run_compare",
    "verify_outputs",
]

BENCH_ALGORITHMS = ("bbbc", "mebbbc")
CLUSTER_ALGORITHMS = ("bbbc", "mebbbc", "kmebb", "kmeans")
# algorithms that produce an iteration trace (kmeans does not)
TRACED_ALGORITHMS = ("bbbc", "mebbbc", "kmebb")

RESULT_FIELDS = ("algorithm", "target", "run_index", "seed", "final_cost")
SUMMARY_FIELDS = ("algorithm", "target", "best", "average", "std", "n_runs")


class UsageError(ValueError):
    """Invalid plan or malformed request; maps to CLI exit code 2."""


@dataclass(frozen=True)
class ResultRecord:
    algorithm: str
    target: str
    run_index: int
    seed: int
    final_cost: float
    wall_time_ms: float


@dataclass(frozen=True)
class ExperimentPlan:
    """One batch: a mode, a target, the algorithms, and shared tunables."""

    mode: str  # "bench" | "cluster"
    algorithms: tuple[str, ...]
    out_dir: Path
    runs: int = 50
    config: OptimizerConfig = OptimizerConfig()
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN
    # bench targets
    function: Optional[str] = None
    dim: int = 50
    # cluster targets
    dataset_path: Optional[Path] = None
    k: Optional[int] = None
    schema: CsvSchema = CsvSchema()
    refine_steps: int = 1
    # execution / output
    jobs: int = 1
    write_json: bool = False
    make_plots: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.mode not in ("bench", "cluster"):
            raise UsageError(f"unknown mode '{self.mode}'")
        if self.runs < 1:
            raise UsageError("runs must be >= 1")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")
        if not self.algorithms:
            raise UsageError("at least one algorithm is required")
        allowed = BENCH_ALGORITHMS if self.mode == "bench" else CLUSTER_ALGORITHMS
        for alg in self.algorithms:
            if alg not in allowed:
                raise UsageError(
                    f"algorithm '{alg}' is not valid in {self.mode} mode "
                    f"(choose from {', '.join(allowed)})"
                )
        if self.mode == "bench":
            if self.function is None:
                raise UsageError("bench mode needs a function name")
            if self.function not in FUNCTION_NAMES:
                raise UsageError(
                    f"unknown function '{self.function}'; "
                    f"choose from {', '.join(FUNCTION_NAMES)}"
                )
            if self.dim < 1:
                raise UsageError("dim must be >= 1")
        else:
            if self.dataset_path is None:
                raise UsageError("cluster mode needs a dataset path")
            if self.k is None or self.k < 1:
                raise UsageError("cluster mode needs k >= 1")
            object.__setattr__(self, "dataset_path", Path(self.dataset_path))
        if self.refine_steps < 0:
            raise UsageError("refine_steps must be >= 0")

    def target_id(self, dataset_name: Optional[str] = None) -> str:
        if self.mode == "bench":
            return f"{self.function}_d{self.dim}"
        return f"{dataset_name or self.dataset_path.stem}_k{self.k}"

    def describe(self) -> dict:
        d = {
            "mode": self.mode,
            "algorithms": list(self.algorithms),
            "runs": self.runs,
            "metric": self.metric.value,
            "num_stars": self.config.num_stars,
            "max_iters": self.config.max_iters,
            "memory_capacity": self.config.memory_capacity,
            "alpha0": self.config.alpha0,
            "alpha_growth": self.config.alpha_growth,
            "alpha_cap": self.config.alpha_cap,
            "base_seed": self.config.seed,
            "epsilon_cost": self.config.epsilon_cost,
            "stall_tol": self.config.stall_tol,
        }
        if self.mode == "bench":
            d["function"] = self.function
            d["dim"] = self.dim
        else:
            d["dataset"] = str(self.dataset_path)
            d["k"] = self.k
            d["refine_steps"] = self.refine_steps
            d["schema"] = {
                "label_column": self.schema.label_column,
                "delimiter": self.schema.delimiter,
                "has_header": self.schema.has_header,
                "skip_columns": sorted(self.schema.skip_columns),
            }
        return d


# --- single-run execution (top level so a process pool can pickle it) ---


def _bench_single(task: dict) -> dict:
    fn = BenchmarkFunction(task["function"], task["dim"])
    config = OptimizerConfig(**task["config"])
    started = time.perf_counter()
    if task["algorithm"] == "bbbc":
        trace = optimize_bbbc(objective_spec(fn), config)
    else:
        trace = optimize_mebbbc(objective_spec(fn), config)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    return {
        "final_cost": trace.final_best_cost,
        "wall_time_ms": elapsed_ms,
        "best_so_far": trace.best_cost_per_iter,
        "com_cost": trace.com_cost_per_iter,
    }


def _cluster_single(task: dict) -> dict:
    data = task["data"]
    k = task["k"]
    metric = DistanceMetric(task["metric"])
    config = OptimizerConfig(**task["config"])
    algorithm = task["algorithm"]
    started = time.perf_counter()
    if algorithm == "kmeans":
        model = kmeans(
            data, k, max_iter=config.max_iters, metric=metric, seed=config.seed
        )
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return {
            "final_cost": model.cost,
            "wall_time_ms": elapsed_ms,
            "centers": model.centers,
            "assignments": model.assignments,
        }
    objective = clustering_objective(data, k, metric, name=task["target"])
    if algorithm == "bbbc":
        trace = optimize_bbbc(objective, config)
    elif algorithm == "mebbbc":
        trace = optimize_mebbbc(objective, config)
    else:  # kmebb
        refine = lloyd_refiner(data, k, task["refine_steps"])
        trace = optimize_mebbbc(objective, config, star_transform=refine)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    centers = trace.final_best_point.reshape(k, data.shape[1])
    return {
        "final_cost": clustering_cost(data, centers, metric),
        "wall_time_ms": elapsed_ms,
        "best_so_far": trace.best_cost_per_iter,
        "com_cost": trace.com_cost_per_iter,
        "centers": centers,
        "assignments": assign(data, centers),
    }


def _run_tasks(tasks: list[dict], worker, jobs: int) -> list[dict]:
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks, chunksize=1))


# --- formatting helpers ---


def _fmt(value) -> str:
    # shortest round-trip form; plain float() first so numpy scalars don't
    # leak their own repr into the files
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, header: tuple[str, ...], rows: list[tuple]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, header: tuple[str, ...], rows: list[tuple]) -> None:
    payload = [dict(zip(header, row)) for row in rows]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_trace(path: Path, best_so_far: np.ndarray, com_cost: np.ndarray) -> None:
    rows = [
        (it + 1, best, com)
        for it, (best, com) in enumerate(zip(best_so_far, com_cost))
    ]
    _write_csv(path, ("iteration", "best_so_far", "center_of_mass_cost"), rows)


# --- plan execution ---


def _execute(plan: ExperimentPlan) -> dict:
    """Run every (algorithm, run) pair and write the output directory."""
    out = plan.out_dir
    out.mkdir(parents=True, exist_ok=True)

    dataset: Optional[Dataset] = None
    data: Optional[np.ndarray] = None
    if plan.mode == "cluster":
        dataset = load_csv(plan.dataset_path, plan.schema)
        data = dataset.points
        if plan.k > dataset.n:
            raise UsageError(f"k = {plan.k} exceeds dataset size {dataset.n}")
    target = plan.target_id(dataset.name if dataset else None)

    pairs = [
        (alg, run)
        for alg in sorted(set(plan.algorithms))
        for run in range(plan.runs)
    ]
    tasks = []
    for alg, run in pairs:
        config = replace(plan.config, seed=plan.config.seed + run)
        task = {
            "algorithm": alg,
            "target": target,
            "config": config.__dict__,
        }
        if plan.mode == "bench":
            task.update(function=plan.function, dim=plan.dim)
        else:
            task.update(
                data=data, k=plan.k, metric=plan.metric.value,
                refine_steps=plan.refine_steps,
            )
        tasks.append(task)
    worker = _bench_single if plan.mode == "bench" else _cluster_single
    outcomes = _run_tasks(tasks, worker, plan.jobs)

    with open(out / "plan.json", "w", encoding="utf-8") as fh:
        json.dump(plan.describe(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    records: list[ResultRecord] = []
    by_algorithm: dict[str, list[float]] = {}
    best_models: dict[str, dict] = {}
    for (alg, run), outcome in zip(pairs, outcomes):
        seed = plan.config.seed + run
        records.append(
            ResultRecord(
                algorithm=alg,
                target=target,
                run_index=run,
                seed=seed,
                final_cost=float(outcome["final_cost"]),
                wall_time_ms=float(outcome["wall_time_ms"]),
            )
        )
        by_algorithm.setdefault(alg, []).append(float(outcome["final_cost"]))
        if alg in TRACED_ALGORITHMS and "best_so_far" in outcome:
            _write_trace(
                out / f"trace_{alg}_{run}.csv",
                outcome["best_so_far"],
                outcome["com_cost"],
            )
        if "centers" in outcome:
            current = best_models.get(alg)
            if current is None or outcome["final_cost"] < current["final_cost"]:
                best_models[alg] = {
                    "final_cost": float(outcome["final_cost"]),
                    "run_index": run,
                    "centers": outcome["centers"],
                    "assignments": outcome["assignments"],
                }

    result_rows = [
        (r.algorithm, r.target, r.run_index, r.seed, r.final_cost) for r in records
    ]
    _write_csv(out / "results.csv", RESULT_FIELDS, result_rows)
    timing_rows = [
        (r.algorithm, r.target, r.run_index, r.wall_time_ms) for r in records
    ]
    _write_csv(
        out / "timings.csv",
        ("algorithm", "target", "run_index", "wall_time_ms"),
        timing_rows,
    )

    summary_rows = []
    for alg in sorted(by_algorithm):
        s = summarize(by_algorithm[alg])
        summary_rows.append((alg, target, s.best, s.average, s.std, s.n_runs))
    _write_csv(out / "summary.csv", SUMMARY_FIELDS, summary_rows)

    if plan.write_json:
        _write_json(out / "results.json", RESULT_FIELDS, result_rows)
        _write_json(out / "summary.json", SUMMARY_FIELDS, summary_rows)

    if plan.mode == "cluster" and best_models:
        d = data.shape[1]
        header = ("algorithm", "kind", "index") + tuple(f"v{j}" for j in range(d))
        model_rows: list[tuple] = []
        for alg in sorted(best_models):
            model = best_models[alg]
            for ci, center in enumerate(model["centers"]):
                model_rows.append((alg, "center", ci) + tuple(float(v) for v in center))
            for pi, label in enumerate(model["assignments"]):
                model_rows.append(
                    (alg, "assignment", pi, int(label)) + ("",) * (d - 1)
                )
        _write_csv(out / "best_model.csv", header, model_rows)

    if plan.make_plots:
        from . import plotting

        plotting.render_report(out, target, dataset=dataset, k=plan.k)

    return {
        "target": target,
        "records": records,
        "summaries": {
            alg: summarize(costs) for alg, costs in by_algorithm.items()
        },
    }


def run_bench(plan: ExperimentPlan) -> dict:
    """Execute a bench-mode plan; returns the target, records, and summaries."""
    if plan.mode != "bench":
        raise UsageError("run_bench needs a bench-mode plan")
    return _execute(plan)


def run_cluster(plan: ExperimentPlan) -> dict:
    """Execute a cluster-mode plan; returns the target, records, and summaries."""
    if plan.mode != "cluster":
        raise UsageError("run_cluster needs a cluster-mode plan")
    return _execute(plan)


# --- comparison and verification over written outputs ---


def _load_results(path: Union[str, Path]) -> dict[str, list[float]]:
    """final_cost samples grouped by target."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(RESULT_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise UsageError(
                f"{path}: missing columns {sorted(missing)}; "
                "expected a results.csv written by this tool"
            )
        grouped: dict[str, list[float]] = {}
        for row in reader:
            grouped.setdefault(row["target"], []).append(float(row["final_cost"]))
    if not grouped:
        raise UsageError(f"{path}: no result rows")
    return grouped


def run_compare(
    results_a: Union[str, Path],
    results_b: Union[str, Path],
    out_dir: Union[str, Path],
) -> dict:
    """Welch-test the two result files per shared target and Friedman-test
    across targets (blocks = targets, treatments = the two files, scored by
    mean final cost). Writes significance.csv; the Friedman row is omitted,
    with a notice, when fewer than two targets are shared."""
    a = _load_results(results_a)
    b = _load_results(results_b)
    shared = sorted(set(a) & set(b))
    if not shared:
        raise UsageError("the result files share no target identifiers")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows: list[tuple] = []
    welch: dict[str, TestResult] = {}
    for target in shared:
        result = welch_t_test(a[target], b[target])
        welch[target] = result
        rows.append(("welch_t", target, result.statistic, result.df, result.p_value))

    friedman: Optional[TestResult] = None
    notice = None
    if len(shared) >= 2:
        scores = np.array(
            [[float(np.mean(a[t])), float(np.mean(b[t]))] for t in shared]
        )
        friedman = friedman_test(scores)
        rows.append(
            ("friedman", "all", friedman.statistic, friedman.df, friedman.p_value)
        )
    else:
        notice = "friedman skipped: needs at least 2 shared targets"

    header = ("test", "target", "statistic", "df", "p_value")
    _write_csv(out_dir / "significance.csv", header, rows)
    return {"welch": welch, "friedman": friedman, "targets": shared, "notice": notice}


def verify_outputs(out_dir: Union[str, Path]) -> list[str]:
    """Re-derive summary.csv from results.csv and audit the trace files.

    Returns a list of problems (empty means the directory is internally
    consistent): every summary row must match a fresh summarize() of the
    result rows exactly, every trace's best_so_far column must be
    non-increasing, and each final trace value must equal the recorded
    final cost of its run.
    """
    out_dir = Path(out_dir)
    problems: list[str] = []

    results_path = out_dir / "results.csv"
    summary_path = out_dir / "summary.csv"
    if not results_path.exists() or not summary_path.exists():
        return [f"{out_dir}: results.csv and summary.csv are both required"]

    per_alg: dict[str, list[float]] = {}
    final_by_run: dict[tuple[str, int], float] = {}
    with open(results_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            cost = float(row["final_cost"])
            per_alg.setdefault(row["algorithm"], []).append(cost)
            final_by_run[(row["algorithm"], int(row["run_index"]))] = cost

    seen = set()
    with open(summary_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            alg = row["algorithm"]
            seen.add(alg)
            if alg not in per_alg:
                problems.append(f"summary.csv: algorithm '{alg}' has no result rows")
                continue
            s = summarize(per_alg[alg])
            for name, expect in (
                ("best", s.best),
                ("average", s.average),
                ("std", s.std),
                ("n_runs", s.n_runs),
            ):
                got = float(row[name])
                if got != float(expect):
                    problems.append(
                        f"summary.csv: {alg}.{name} is {got}, recomputed {expect}"
                    )
    for alg in per_alg:
        if alg not in seen:
            problems.append(f"summary.csv: missing row for algorithm '{alg}'")

    for trace_path in sorted(out_dir.glob("trace_*.csv")):
        stem = trace_path.stem.split("_")
        alg, run = "_".join(stem[1:-1]), int(stem[-1])
        best = []
        with open(trace_path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                best.append(float(row["best_so_far"]))
        if not best:
            problems.append(f"{trace_path.name}: empty trace")
            continue
        if any(b2 > b1 for b1, b2 in zip(best, best[1:])):
            problems.append(f"{trace_path.name}: best_so_far increases")
        recorded = final_by_run.get((alg, run))
        # results.csv holds the model cost recomputed from scratch, which can
        # differ from the optimizer's batched evaluation in the last ulps
        if recorded is not None and not np.isclose(
            best[-1], recorded, rtol=1e-9, atol=1e-12
        ):
            problems.append(
                f"{trace_path.name}: final best_so_far {best[-1]} "
                f"!= recorded final cost {recorded}"
            )
    return problems
