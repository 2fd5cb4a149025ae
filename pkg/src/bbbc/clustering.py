"""Centroid clustering: the cost function, flat center encodings, Lloyd's
k-means, and clustering driven by the memory-enriched optimizer.

A candidate clustering is a flat vector of length k*d holding the k centers
concatenated row-major, which turns center placement into a bounded
continuous optimization problem over the data's per-feature ranges.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .objectives import Bounds, ObjectiveSpec
from .optimizer import OptimizerConfig, RunTrace, optimize_bbbc, optimize_mebbbc

__all__ = [
    "DistanceMetric",
    "ClusterEncoding",
    "ClusterModel",
    "assign",
    "clustering_cost",
    "encode",
    "decode",
    "lloyd_step",
    "lloyd_refiner",
    "kmeans",
    "cluster_bbbc",
    "cluster_mebbbc",
    "cluster_kmebb",
    "clustering_objective",
]


class DistanceMetric(enum.Enum):
    """Per-point distance summed into the clustering cost."""

    SQUARED_EUCLIDEAN = "sq"
    EUCLIDEAN = "euclid"


@dataclass(frozen=True)
class ClusterEncoding:
    """k centers of dimension d flattened row-major into one vector."""

    flat: np.ndarray
    k: int
    d: int

    def __post_init__(self) -> None:
        flat = np.asarray(self.flat, dtype=float).ravel()
        if self.k < 1 or self.d < 1:
            raise ValueError("k and d must be >= 1")
        if flat.size != self.k * self.d:
            raise ValueError(
                f"encoding length {flat.size} does not equal k*d = {self.k * self.d}"
            )
        object.__setattr__(self, "flat", flat)


@dataclass(frozen=True)
class ClusterModel:
    """A clustering result: centers, nearest-center assignments, and the cost
    of that geometry recomputed from scratch under `metric`."""

    centers: np.ndarray
    assignments: np.ndarray
    cost: float
    metric: DistanceMetric


def _as_matrix(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D matrix")
    return a


def assign(data: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Index of each point's nearest center; ties go to the lowest index."""
    data = _as_matrix(data, "data")
    centers = _as_matrix(centers, "centers")
    if data.shape[1] != centers.shape[1]:
        raise ValueError(
            f"data has {data.shape[1]} features but centers have {centers.shape[1]}"
        )
    d2 = ((data[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def clustering_cost(
    data: np.ndarray, centers: np.ndarray, metric: DistanceMetric
) -> float:
    """Sum over points of the distance to the nearest center."""
    data = _as_matrix(data, "data")
    centers = _as_matrix(centers, "centers")
    if data.shape[1] != centers.shape[1]:
        raise ValueError(
            f"data has {data.shape[1]} features but centers have {centers.shape[1]}"
        )
    d2 = ((data[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2).min(axis=1)
    if metric is DistanceMetric.EUCLIDEAN:
        return float(np.sqrt(d2).sum())
    return float(d2.sum())


def encode(centers: np.ndarray) -> ClusterEncoding:
    centers = _as_matrix(centers, "centers")
    return ClusterEncoding(centers.ravel().copy(), centers.shape[0], centers.shape[1])


def decode(encoding: ClusterEncoding) -> np.ndarray:
    """Row r of the result is flat[r*d : (r+1)*d]."""
    return encoding.flat.reshape(encoding.k, encoding.d).copy()


def lloyd_step(data: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """One k-means iteration: nearest-center assignment, then means.

    A cluster that captured no points is relocated to the data point farthest
    from its own cluster's updated center (ties go to the highest point index,
    and each empty cluster consumes a distinct point). Relocating an unused
    center never raises the cost, so the step stays monotone under the
    squared-Euclidean cost.
    """
    data = _as_matrix(data, "data")
    centers = _as_matrix(centers, "centers")
    labels = assign(data, centers)
    k = centers.shape[0]
    new_centers = centers.copy()
    empty: list[int] = []
    for c in range(k):
        members = labels == c
        if members.any():
            new_centers[c] = data[members].mean(axis=0)
        else:
            empty.append(c)
    if empty:
        dist = np.linalg.norm(data - new_centers[labels], axis=1)
        for c in empty:
            pick = dist.size - 1 - int(np.argmax(dist[::-1]))
            new_centers[c] = data[pick]
            dist[pick] = -np.inf
    return new_centers


def kmeans(
    data: np.ndarray,
    k: int,
    init_centers: Optional[np.ndarray] = None,
    max_iter: int = 100,
    metric: DistanceMetric = DistanceMetric.SQUARED_EUCLIDEAN,
    seed: int = 0,
) -> ClusterModel:
    """Lloyd's algorithm from the given (or seeded random-point) init.

    Iterates until no center component moves more than 1e-9 or max_iter is
    reached. The reported cost uses `metric`; the center updates themselves
    are always means, the squared-Euclidean minimizers.
    """
    data = _as_matrix(data, "data")
    n = data.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k = {k} exceeds the number of points ({n})")
    if init_centers is None:
        rng = np.random.default_rng(seed)
        centers = data[rng.choice(n, size=k, replace=False)].astype(float)
    else:
        centers = _as_matrix(init_centers, "init_centers").copy()
        if centers.shape != (k, data.shape[1]):
            raise ValueError(f"init_centers must have shape ({k}, {data.shape[1]})")
    for _ in range(max_iter):
        moved = lloyd_step(data, centers)
        if np.abs(moved - centers).max() <= 1e-9:
            centers = moved
            break
        centers = moved
    labels = assign(data, centers)
    return ClusterModel(
        centers=centers,
        assignments=labels,
        cost=clustering_cost(data, centers, metric),
        metric=metric,
    )


def _population_costs(
    data: np.ndarray, population: np.ndarray, k: int, metric: DistanceMetric
) -> np.ndarray:
    """Clustering cost of every flat encoding in the (m, k*d) population.

    Uses the expanded-square distance form so the whole population is one
    matrix product; tiny negative squared distances from cancellation are
    clipped to zero.
    """
    m = population.shape[0]
    n, d = data.shape
    centers = population.reshape(m * k, d)
    d2 = (
        (data**2).sum(axis=1)[:, None]
        + (centers**2).sum(axis=1)[None, :]
        - 2.0 * (data @ centers.T)
    )
    d2 = np.maximum(d2, 0.0).reshape(n, m, k).min(axis=2)
    if metric is DistanceMetric.EUCLIDEAN:
        return np.sqrt(d2).sum(axis=0)
    return d2.sum(axis=0)


def clustering_objective(
    data: np.ndarray, k: int, metric: DistanceMetric, name: str = "clustering"
) -> ObjectiveSpec:
    """The clustering cost over flat encodings, bounded by the per-feature
    data ranges replicated k times."""
    data = _as_matrix(data, "data")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > data.shape[0]:
        raise ValueError(f"k = {k} exceeds the number of points ({data.shape[0]})")
    from .datasets import feature_bounds_of_matrix

    bounds = feature_bounds_of_matrix(data).tile(k)
    return ObjectiveSpec(
        name=f"{name}_k{k}",
        bounds=bounds,
        evaluate_batch=lambda pop: _population_costs(data, pop, k, metric),
    )


def _model_from_trace(
    data: np.ndarray, k: int, metric: DistanceMetric, trace: RunTrace
) -> ClusterModel:
    centers = trace.final_best_point.reshape(k, data.shape[1])
    labels = assign(data, centers)
    return ClusterModel(
        centers=centers,
        assignments=labels,
        cost=clustering_cost(data, centers, metric),
        metric=metric,
    )


def cluster_bbbc(
    data: np.ndarray,
    k: int,
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN,
    config: OptimizerConfig = OptimizerConfig(),
) -> ClusterModel:
    """Cluster with the memoryless optimizer over center encodings."""
    objective = clustering_objective(data, k, metric)
    return _model_from_trace(data, k, metric, optimize_bbbc(objective, config))


def cluster_mebbbc(
    data: np.ndarray,
    k: int,
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN,
    config: OptimizerConfig = OptimizerConfig(),
) -> ClusterModel:
    """Cluster with the memory-enriched optimizer over center encodings."""
    objective = clustering_objective(data, k, metric)
    return _model_from_trace(data, k, metric, optimize_mebbbc(objective, config))


def lloyd_refiner(data: np.ndarray, k: int, refine_steps: int):
    """A population transform applying `refine_steps` Lloyd iterations to each
    flat encoding; refine_steps=0 returns the population untouched."""
    if refine_steps < 0:
        raise ValueError("refine_steps must be >= 0")
    data = _as_matrix(data, "data")
    d = data.shape[1]

    def refine(population: np.ndarray) -> np.ndarray:
        if refine_steps == 0:
            return population
        out = np.empty_like(population)
        for i, flat in enumerate(population):
            centers = flat.reshape(k, d)
            for _ in range(refine_steps):
                centers = lloyd_step(data, centers)
            out[i] = centers.ravel()
        return out

    return refine


def cluster_kmebb(
    data: np.ndarray,
    k: int,
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN,
    config: OptimizerConfig = OptimizerConfig(),
    refine_steps: int = 1,
) -> ClusterModel:
    """Hybrid clustering: every generated star is polished by `refine_steps`
    Lloyd iterations before evaluation, so the archive and the center of mass
    operate on the refined encodings. refine_steps=0 reproduces
    cluster_mebbbc exactly under the same seed."""
    data = _as_matrix(data, "data")
    objective = clustering_objective(data, k, metric)
    refine = lloyd_refiner(data, k, refine_steps)
    trace = optimize_mebbbc(objective, config, star_transform=refine)
    return _model_from_trace(data, k, metric, trace)
