"""Big bang / big crunch style optimizers: the classic form and the memory-enriched one.

The search alternates explosion and contraction. The explosion scatters a
population of candidate points ("stars") around the current center with a
Gaussian whose spread shrinks as 1/(1 + k) over iterations; the contraction
summarizes them into an inverse-cost weighted centroid (the center of mass).
The next explosion centers greedily on the best star of the round (the
best-fit-individual form of the crunch; recentering on the centroid itself
stalls in high dimension because inverse-cost weights barely differentiate a
spread-out population). The memory-enriched variant archives each round's
center of mass and, with a growing per-component probability alpha, copies
star components from random archive entries instead of sampling fresh noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .objectives import Bounds, ObjectiveSpec

__all__ = [
    "OptimizerConfig",
    "SolutionMemory",
    "RunTrace",
    "big_bang_classic",
    "big_bang_memory",
    "center_of_mass",
    "alpha_update",
    "optimize_bbbc",
    "optimize_mebbbc",
]


@dataclass(frozen=True)
class OptimizerConfig:
    """All run tunables.

    alpha0/alpha_growth/alpha_cap control the memory selection rate schedule
    (alpha multiplies by 1 + alpha_growth each iteration, clamped at alpha_cap).
    k_offset shifts the iteration index used in the 1/(1 + k) shrink factor;
    with the default 0 the first explosion uses factor 1/2.
    stall_tol, when set, stops a run early once the best-so-far cost improves
    by at most stall_tol over the last stall_window iterations.
    """

    num_stars: int = 200
    max_iters: int = 100
    memory_capacity: int = 10
    alpha0: float = 0.1
    alpha_growth: float = 0.01
    alpha_cap: float = 1.0
    seed: int = 0
    epsilon_cost: float = 1e-12
    k_offset: int = 0
    stall_tol: Optional[float] = None
    stall_window: int = 10

    def __post_init__(self) -> None:
        if self.num_stars < 2:
            raise ValueError("num_stars must be >= 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.memory_capacity < 1:
            raise ValueError("memory_capacity must be >= 1")
        if not (0.0 < self.alpha0 <= self.alpha_cap <= 1.0):
            raise ValueError("need 0 < alpha0 <= alpha_cap <= 1")
        if self.alpha_growth < 0.0:
            raise ValueError("alpha_growth must be >= 0")
        if self.epsilon_cost <= 0.0:
            raise ValueError("epsilon_cost must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.stall_window < 1:
            raise ValueError("stall_window must be >= 1")


class SolutionMemory:
    """Fixed-capacity archive of (point, cost) pairs with worst-replacement.

    While not full, every offered entry is appended. Once full, the entry with
    the maximum cost (ties resolved to the lowest index) is replaced, and only
    by a strictly cheaper candidate, so the archive's worst cost never rises.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = int(capacity)
        self._points: list[np.ndarray] = []
        self._costs: list[float] = []

    def __len__(self) -> int:
        return len(self._points)

    @property
    def is_full(self) -> bool:
        return len(self._points) >= self.capacity

    @property
    def costs(self) -> np.ndarray:
        return np.asarray(self._costs, dtype=float)

    def points_matrix(self) -> np.ndarray:
        """Stored points stacked as an (entries, dim) matrix."""
        return np.vstack(self._points)

    def entries(self) -> list[tuple[np.ndarray, float]]:
        return [(p.copy(), c) for p, c in zip(self._points, self._costs)]

    def worst_index(self) -> int:
        if not self._costs:
            raise ValueError("memory is empty")
        return int(np.argmax(self._costs))

    def insert(self, point: np.ndarray, cost: float) -> bool:
        """Offer a candidate; returns True when it was stored."""
        point = np.array(point, dtype=float, copy=True)
        if self._points and point.shape != self._points[0].shape:
            raise ValueError("candidate dimension does not match stored entries")
        cost = float(cost)
        if not self.is_full:
            self._points.append(point)
            self._costs.append(cost)
            return True
        worst = self.worst_index()
        if cost < self._costs[worst]:
            self._points[worst] = point
            self._costs[worst] = cost
            return True
        return False


@dataclass(frozen=True)
class RunTrace:
    """Per-iteration record of one seeded run.

    best_cost_per_iter is the running best over everything evaluated so far
    (the initial point, all stars, and each iteration's center of mass), so it
    is non-increasing. `evaluations` counts the charged search budget, the
    initial point plus one evaluation per star; the once-per-iteration center
    of mass costs recorded in com_cost_per_iter are diagnostics and are not
    charged. final_alpha is None for the memoryless optimizer.
    """

    best_point_per_iter: np.ndarray
    best_cost_per_iter: np.ndarray
    com_cost_per_iter: np.ndarray
    final_best_point: np.ndarray
    final_best_cost: float
    evaluations: int
    seed: int
    final_alpha: Optional[float] = None

    @property
    def iterations(self) -> int:
        return self.best_cost_per_iter.size


def big_bang_classic(
    center: np.ndarray,
    bounds: Bounds,
    iter_k: int,
    rng: np.random.Generator,
    num_stars: int,
    clip: bool = True,
) -> np.ndarray:
    """Scatter num_stars points around the center with shrinking Gaussian noise.

    Component j of each star is center[j] + r * width[j] / (1 + iter_k) with r
    a fresh standard normal draw, clamped into bounds unless clip=False (the
    unclamped form exposes the raw dispersion law for diagnostics).

    Consumes exactly one (num_stars, dim) standard-normal block from rng.
    """
    center = np.asarray(center, dtype=float)
    if center.shape != bounds.lower.shape:
        raise ValueError(
            f"center has dimension {center.size}, bounds have {bounds.dim}"
        )
    if iter_k < 1:
        raise ValueError("iter_k must be >= 1")
    scale = bounds.width / (1.0 + iter_k)
    stars = center + rng.standard_normal((num_stars, center.size)) * scale
    return bounds.clip(stars) if clip else stars


def big_bang_memory(
    center: np.ndarray,
    memory: SolutionMemory,
    alpha: float,
    bounds: Bounds,
    iter_k: int,
    rng: np.random.Generator,
    num_stars: int,
) -> np.ndarray:
    """Scatter stars, copying each component from a random archive entry with
    probability alpha and otherwise sampling as in big_bang_classic.

    The archive index is drawn fresh per (star, component) pair. An empty
    archive or alpha <= 0 falls back to the classic generator, which then
    consumes only the normal block; otherwise rng consumption is one uniform
    block, one normal block, and one index block (the index block only when at
    least one component selected the archive).
    """
    if memory is None or len(memory) == 0 or alpha <= 0.0:
        return big_bang_classic(center, bounds, iter_k, rng, num_stars)
    center = np.asarray(center, dtype=float)
    if center.shape != bounds.lower.shape:
        raise ValueError(
            f"center has dimension {center.size}, bounds have {bounds.dim}"
        )
    dim = center.size
    from_memory = rng.random((num_stars, dim)) <= alpha
    scale = bounds.width / (1.0 + iter_k)
    stars = center + rng.standard_normal((num_stars, dim)) * scale
    if from_memory.any():
        idx = rng.integers(len(memory), size=(num_stars, dim))
        recalled = memory.points_matrix()[idx, np.arange(dim)]
        stars = np.where(from_memory, recalled, stars)
    return bounds.clip(stars)


def center_of_mass(
    population: np.ndarray, costs: np.ndarray, epsilon_cost: float = 1e-12
) -> np.ndarray:
    """Inverse-cost weighted centroid of the population.

    Component j is (sum_i x_ij / f_i) / (sum_i 1 / f_i) with f_i the cost of
    point i floored at epsilon_cost. Any cost at or below the floor counts as
    an effectively exact optimum and short-circuits to that point (lowest
    index on ties).
    """
    population = np.asarray(population, dtype=float)
    costs = np.asarray(costs, dtype=float)
    if population.ndim != 2 or population.shape[0] == 0:
        raise ValueError("population must be a non-empty (n, dim) matrix")
    if costs.shape != (population.shape[0],):
        raise ValueError("costs must have one entry per population row")
    if (costs < 0).any():
        raise ValueError("costs must be nonnegative")
    if (costs <= epsilon_cost).any():
        return population[int(np.argmin(costs))].copy()
    weights = 1.0 / costs
    return (weights @ population) / weights.sum()


def alpha_update(alpha: float, growth: float, cap: float) -> float:
    """Grow the memory selection rate geometrically, clamped at cap."""
    return min(alpha * (1.0 + growth), cap)


def _optimize(
    objective: ObjectiveSpec,
    config: OptimizerConfig,
    use_memory: bool,
    star_transform: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> RunTrace:
    rng = np.random.default_rng(config.seed)
    bounds = objective.bounds
    center = rng.uniform(bounds.lower, bounds.upper)

    best_point = center.copy()
    best_cost = float(objective.evaluate_batch(center[None, :])[0])

    memory = SolutionMemory(config.memory_capacity) if use_memory else None
    alpha = config.alpha0

    best_points: list[np.ndarray] = []
    best_costs: list[float] = []
    com_costs: list[float] = []

    for it in range(1, config.max_iters + 1):
        iter_k = it + config.k_offset
        if use_memory:
            stars = big_bang_memory(
                center, memory, alpha, bounds, iter_k, rng, config.num_stars
            )
        else:
            stars = big_bang_classic(center, bounds, iter_k, rng, config.num_stars)
        if star_transform is not None:
            stars = star_transform(stars)

        costs = objective.evaluate_batch(stars)
        com = center_of_mass(stars, costs, config.epsilon_cost)
        com_cost = float(objective.evaluate_batch(com[None, :])[0])

        top = int(np.argmin(costs))
        if costs[top] < best_cost:
            best_cost = float(costs[top])
            best_point = stars[top].copy()
        if com_cost < best_cost:
            best_cost = com_cost
            best_point = com.copy()

        if use_memory:
            memory.insert(com, com_cost)
            alpha = alpha_update(alpha, config.alpha_growth, config.alpha_cap)
        center = stars[top].copy()

        best_points.append(best_point.copy())
        best_costs.append(best_cost)
        com_costs.append(com_cost)

        if config.stall_tol is not None and it >= config.stall_window:
            window_start = best_costs[-config.stall_window]
            if window_start - best_cost <= config.stall_tol:
                break

    return RunTrace(
        best_point_per_iter=np.vstack(best_points),
        best_cost_per_iter=np.asarray(best_costs),
        com_cost_per_iter=np.asarray(com_costs),
        final_best_point=best_point.copy(),
        final_best_cost=best_cost,
        evaluations=len(best_costs) * config.num_stars + 1,
        seed=config.seed,
        final_alpha=alpha if use_memory else None,
    )


def optimize_bbbc(objective: ObjectiveSpec, config: OptimizerConfig) -> RunTrace:
    """Classic run: explode around the center, crunch, recenter on the best star.

    Each round also evaluates the round's center of mass; it competes for the
    best-so-far record and is logged in the trace, but the next explosion
    centers on the round's cheapest star.
    """
    return _optimize(objective, config, use_memory=False)


def optimize_mebbbc(
    objective: ObjectiveSpec,
    config: OptimizerConfig,
    star_transform: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> RunTrace:
    """Memory-enriched run: archive each center of mass and recall components.

    star_transform, when given, maps the freshly generated (num_stars, dim)
    population to a refined population of the same shape before evaluation;
    the center of mass and the archive then operate on the refined points.
    """
    return _optimize(objective, config, use_memory=True, star_transform=star_transform)
