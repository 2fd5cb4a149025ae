"""Bounded objective functions: the benchmark suite and the generic objective wrapper.

All benchmark functions are minimization problems with a known global minimum
of exactly zero. Evaluators are pure and vectorized: the batch form takes an
(m, dim) matrix of candidate points and returns m costs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Bounds",
    "BenchmarkFunction",
    "ObjectiveSpec",
    "FUNCTION_NAMES",
    "evaluate",
    "evaluate_batch",
    "bounds_of",
    "known_minimum",
    "objective_spec",
]


@dataclass(frozen=True)
class Bounds:
    """Per-dimension box constraints, lower strictly below upper everywhere."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-D arrays of equal length")
        if lower.size < 1:
            raise ValueError("bounds need at least one dimension")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ValueError("bounds must be finite")
        if not (lower < upper).all():
            raise ValueError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, lower: float, upper: float, dim: int) -> "Bounds":
        """Uniform range replicated over `dim` dimensions."""
        return cls(np.full(dim, float(lower)), np.full(dim, float(upper)))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool((x >= self.lower).all() and (x <= self.upper).all())

    def tile(self, copies: int) -> "Bounds":
        """Concatenate `copies` repetitions of the box (cluster-center encodings)."""
        if copies < 1:
            raise ValueError("copies must be >= 1")
        return Bounds(np.tile(self.lower, copies), np.tile(self.upper, copies))


@dataclass(frozen=True)
class ObjectiveSpec:
    """A named cost function over a bounded real vector space.

    `evaluate_batch` maps an (m, dim) matrix to m nonnegative finite costs and
    is the only evaluation path the optimizers use.
    """

    name: str
    bounds: Bounds
    evaluate_batch: Callable[[np.ndarray], np.ndarray]

    def evaluate(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size != self.bounds.dim:
            raise ValueError(
                f"objective '{self.name}' expects vectors of length {self.bounds.dim}, "
                f"got shape {x.shape}"
            )
        return float(self.evaluate_batch(x[None, :])[0])


# --- benchmark formulas (batch form, X has shape (m, dim)) ---


def _rastrigin(X: np.ndarray) -> np.ndarray:
    return np.sum(X**2 - 10.0 * np.cos(2.0 * np.pi * X) + 10.0, axis=1)


def _step(X: np.ndarray) -> np.ndarray:
    # De Jong step: round each component toward -inf after the half shift.
    f = np.floor(X + 0.5)
    return np.sum(f * f, axis=1)


def _sphere(X: np.ndarray) -> np.ndarray:
    return np.sum(X**2, axis=1)


def _rosenbrock(X: np.ndarray) -> np.ndarray:
    return np.sum(
        100.0 * (X[:, 1:] - X[:, :-1] ** 2) ** 2 + (X[:, :-1] - 1.0) ** 2, axis=1
    )


def _zakharov(X: np.ndarray) -> np.ndarray:
    i = np.arange(1, X.shape[1] + 1, dtype=float)
    s = np.sum(0.5 * i * X, axis=1)
    return np.sum(X**2, axis=1) + s**2 + s**4


def _levy(X: np.ndarray) -> np.ndarray:
    w = 1.0 + (X - 1.0) / 4.0
    head = np.sin(np.pi * w[:, 0]) ** 2
    mid = np.sum(
        (w[:, :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:, :-1] + 1.0) ** 2),
        axis=1,
    )
    tail = (w[:, -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[:, -1]) ** 2)
    return head + mid + tail


def _dixonprice(X: np.ndarray) -> np.ndarray:
    i = np.arange(2, X.shape[1] + 1, dtype=float)
    return (X[:, 0] - 1.0) ** 2 + np.sum(
        i * (2.0 * X[:, 1:] ** 2 - X[:, :-1]) ** 2, axis=1
    )


def _zeros(dim: int) -> np.ndarray:
    return np.zeros(dim)


def _ones(dim: int) -> np.ndarray:
    return np.ones(dim)


def _dixonprice_minimizer(dim: int) -> np.ndarray:
    # x_i = 2^(-(2^i - 2) / 2^i) satisfies 2 x_i^2 = x_{i-1} for every i.
    p = 2.0 ** np.arange(1, dim + 1)
    return 2.0 ** (-(p - 2.0) / p)


@dataclass(frozen=True)
class _FunctionDef:
    batch: Callable[[np.ndarray], np.ndarray]
    lower: float
    upper: float
    min_dim: int
    minimizer: Callable[[int], np.ndarray]


_FUNCTIONS: dict[str, _FunctionDef] = {
    "rastrigin": _FunctionDef(_rastrigin, -5.12, 5.12, 1, _zeros),
    "step": _FunctionDef(_step, -100.0, 100.0, 1, _zeros),
    "sphere": _FunctionDef(_sphere, -100.0, 100.0, 1, _zeros),
    "rosenbrock": _FunctionDef(_rosenbrock, -30.0, 30.0, 2, _ones),
    "zakharov": _FunctionDef(_zakharov, -5.0, 10.0, 1, _zeros),
    "levy": _FunctionDef(_levy, -15.0, 30.0, 1, _ones),
    "dixonprice": _FunctionDef(_dixonprice, -10.0, 10.0, 2, _dixonprice_minimizer),
}

FUNCTION_NAMES: tuple[str, ...] = tuple(_FUNCTIONS)


@dataclass(frozen=True)
class BenchmarkFunction:
    """One suite function instantiated at a concrete dimension."""

    kind: str
    dimension: int = field(default=2)

    def __post_init__(self) -> None:
        kind = self.kind.lower()
        if kind not in _FUNCTIONS:
            raise ValueError(
                f"unknown benchmark function '{self.kind}'; "
                f"choose from {', '.join(FUNCTION_NAMES)}"
            )
        object.__setattr__(self, "kind", kind)
        if self.dimension < _FUNCTIONS[kind].min_dim:
            raise ValueError(
                f"{kind} needs dimension >= {_FUNCTIONS[kind].min_dim}, "
                f"got {self.dimension}"
            )


def evaluate_batch(fn: BenchmarkFunction, X: np.ndarray) -> np.ndarray:
    """Costs of the rows of X, shape (m, fn.dimension) -> shape (m,)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != fn.dimension:
        raise ValueError(
            f"{fn.kind} expects points of dimension {fn.dimension}, got shape {X.shape}"
        )
    return _FUNCTIONS[fn.kind].batch(X)


def evaluate(fn: BenchmarkFunction, x: np.ndarray) -> float:
    """Cost of a single point of length fn.dimension."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != fn.dimension:
        raise ValueError(
            f"{fn.kind} expects vectors of length {fn.dimension}, got shape {x.shape}"
        )
    return float(_FUNCTIONS[fn.kind].batch(x[None, :])[0])


def bounds_of(fn: BenchmarkFunction) -> Bounds:
    """The function's uniform search range replicated over its dimensions."""
    d = _FUNCTIONS[fn.kind]
    return Bounds.cube(d.lower, d.upper, fn.dimension)


def known_minimum(fn: BenchmarkFunction) -> tuple[np.ndarray, float]:
    """The analytic minimizer of the implemented formula and its value (always 0)."""
    return _FUNCTIONS[fn.kind].minimizer(fn.dimension), 0.0


def objective_spec(fn: BenchmarkFunction) -> ObjectiveSpec:
    """Package a benchmark function as a generic bounded objective."""
    return ObjectiveSpec(
        name=f"{fn.kind}_d{fn.dimension}",
        bounds=bounds_of(fn),
        evaluate_batch=lambda X: evaluate_batch(fn, X),
    )
