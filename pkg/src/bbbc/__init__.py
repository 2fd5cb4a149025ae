"""Big bang / big crunch optimization toolkit: the classic and memory-enriched
optimizers, a benchmark function suite, centroid clustering on top of them,
multi-run statistics, and an experiment harness (see the `bbbc` CLI)."""

from .clustering import (
    ClusterEncoding,
    ClusterModel,
    DistanceMetric,
    assign,
    cluster_bbbc,
    cluster_kmebb,
    cluster_mebbbc,
    clustering_cost,
    clustering_objective,
    decode,
    encode,
    kmeans,
    lloyd_step,
)
from .datasets import (
    CsvFormatError,
    CsvParseError,
    CsvSchema,
    DataError,
    Dataset,
    feature_bounds,
    load_csv,
    save_csv,
    synthetic_blobs,
)
from .objectives import (
    BenchmarkFunction,
    Bounds,
    FUNCTION_NAMES,
    ObjectiveSpec,
    bounds_of,
    evaluate,
    evaluate_batch,
    known_minimum,
    objective_spec,
)
from .optimizer import (
    OptimizerConfig,
    RunTrace,
    SolutionMemory,
    alpha_update,
    big_bang_classic,
    big_bang_memory,
    center_of_mass,
    optimize_bbbc,
    optimize_mebbbc,
)
from .stats import (
    RunSummary,
    TestResult,
    friedman_test,
    summarize,
    welch_t_test,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkFunction",
    "Bounds",
    "ClusterEncoding",
    "ClusterModel",
    "CsvFormatError",
    "CsvParseError",
    "CsvSchema",
    "DataError",
    "Dataset",
    "DistanceMetric",
    "FUNCTION_NAMES",
    "ObjectiveSpec",
    "OptimizerConfig",
    "RunSummary",
    "RunTrace",
    "SolutionMemory",
    "TestResult",
    "alpha_update",
    "assign",
    "big_bang_classic",
    "big_bang_memory",
    "bounds_of",
    "center_of_mass",
    "cluster_bbbc",
    "cluster_kmebb",
    "cluster_mebbbc",
    "clustering_cost",
    "clustering_objective",
    "decode",
    "encode",
    "evaluate",
    "evaluate_batch",
    "feature_bounds",
    "friedman_test",
    "kmeans",
    "known_minimum",
    "lloyd_step",
    "load_csv",
    "objective_spec",
    "optimize_bbbc",
    "optimize_mebbbc",
    "save_csv",
    "summarize",
    "synthetic_blobs",
    "welch_t_test",
]
