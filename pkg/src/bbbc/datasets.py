"""Dataset ingestion from delimited files, synthetic blob fixtures, and
per-feature range extraction.

Files are plain CSV: optional header row, one optional label column chosen by
index or header name, and an optional set of raw column indices to skip
(identifier columns). Every remaining cell must parse as a finite float;
missing values are rejected. Datasets are immutable once loaded.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .objectives import Bounds

__all__ = [
    "DataError",
    "CsvFormatError",
    "CsvParseError",
    "CsvSchema",
    "Dataset",
    "load_csv",
    "save_csv",
    "synthetic_blobs",
    "feature_bounds",
    "feature_bounds_of_matrix",
]

# widening applied to a constant feature so its bounds stay a proper interval
CONSTANT_FEATURE_EPS = 1e-9


class DataError(Exception):
    """Base class for dataset ingestion failures."""


class CsvFormatError(DataError):
    """Structural problem: empty file, ragged rows, bad schema."""


class CsvParseError(DataError):
    """A cell failed to parse; carries 0-based row and column indices."""

    def __init__(self, message: str, row: int, col: int):
        super().__init__(message)
        self.row = row
        self.col = col


@dataclass(frozen=True)
class CsvSchema:
    """How to read a delimited file.

    label_column selects the class column by raw 0-based index (negative
    counts from the end) or by header name; skip_columns lists raw indices to
    drop entirely. Both refer to positions in the file, before any removal.
    """

    label_column: Optional[Union[int, str]] = None
    delimiter: str = ","
    has_header: bool = False
    skip_columns: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if len(self.delimiter) != 1:
            raise CsvFormatError("delimiter must be a single character")
        object.__setattr__(self, "skip_columns", frozenset(self.skip_columns))


@dataclass(frozen=True)
class Dataset:
    """An (n, d) matrix of finite floats with optional per-point labels."""

    points: np.ndarray
    labels: Optional[tuple[str, ...]]
    name: str

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise ValueError("points must be a non-empty (n, d) matrix")
        if not np.isfinite(points).all():
            raise ValueError("points must be finite")
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != points.shape[0]:
                raise ValueError("need exactly one label per point")
            object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def label_names(self) -> tuple[str, ...]:
        if self.labels is None:
            return ()
        return tuple(sorted(set(self.labels)))


def _resolve_label_column(
    schema: CsvSchema, header: Optional[list[str]], n_cols: int
) -> Optional[int]:
    if schema.label_column is None:
        return None
    if isinstance(schema.label_column, str):
        if header is None:
            raise CsvFormatError(
                f"label column named '{schema.label_column}' needs a header row"
            )
        try:
            return header.index(schema.label_column)
        except ValueError:
            raise CsvFormatError(
                f"label column '{schema.label_column}' not found in header {header}"
            ) from None
    idx = int(schema.label_column)
    if idx < 0:
        idx += n_cols
    if not (0 <= idx < n_cols):
        raise CsvFormatError(
            f"label column index {schema.label_column} outside 0..{n_cols - 1}"
        )
    return idx


def load_csv(path: Union[str, Path], schema: CsvSchema = CsvSchema()) -> Dataset:
    """Read a delimited numeric file per the schema.

    Raises CsvFormatError for structural problems (empty file, ragged rows,
    unknown label column, no feature columns left) and CsvParseError, with
    0-based row/column coordinates, for any cell that is not a finite float.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh, delimiter=schema.delimiter)]
    # trailing fully-empty lines are tolerated, anything else must be rectangular
    while rows and rows[-1] == []:
        rows.pop()
    if not rows:
        raise CsvFormatError(f"{path}: file is empty")

    header: Optional[list[str]] = None
    data_rows = rows
    first_data_row = 0
    if schema.has_header:
        header = [c.strip() for c in rows[0]]
        data_rows = rows[1:]
        first_data_row = 1
        if not data_rows:
            raise CsvFormatError(f"{path}: no data rows after the header")

    n_cols = len(data_rows[0])
    if n_cols == 0:
        raise CsvFormatError(f"{path}: first data row has no columns")
    label_idx = _resolve_label_column(schema, header, n_cols)
    for off in schema.skip_columns:
        if not (0 <= off < n_cols):
            raise CsvFormatError(f"{path}: skip column {off} outside 0..{n_cols - 1}")
    feature_cols = [
        c for c in range(n_cols) if c != label_idx and c not in schema.skip_columns
    ]
    if not feature_cols:
        raise CsvFormatError(f"{path}: no feature columns left to load")

    points = np.empty((len(data_rows), len(feature_cols)), dtype=float)
    labels: list[str] = []
    for r, row in enumerate(data_rows):
        if len(row) != n_cols:
            raise CsvFormatError(
                f"{path}: row {r + first_data_row} has {len(row)} columns, "
                f"expected {n_cols}"
            )
        for j, c in enumerate(feature_cols):
            cell = row[c].strip()
            try:
                value = float(cell)
            except ValueError:
                raise CsvParseError(
                    f"{path}: cell '{cell}' at row {r + first_data_row}, "
                    f"column {c} is not numeric",
                    row=r + first_data_row,
                    col=c,
                ) from None
            if not np.isfinite(value):
                raise CsvParseError(
                    f"{path}: non-finite value at row {r + first_data_row}, "
                    f"column {c}",
                    row=r + first_data_row,
                    col=c,
                )
            points[r, j] = value
        if label_idx is not None:
            labels.append(row[label_idx].strip())

    return Dataset(
        points=points,
        labels=tuple(labels) if label_idx is not None else None,
        name=path.stem,
    )


def save_csv(dataset: Dataset, path: Union[str, Path]) -> None:
    """Write points (and the label column last, when present) at full
    round-trip float precision."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for i in range(dataset.n):
            row = [repr(float(v)) for v in dataset.points[i]]
            if dataset.labels is not None:
                row.append(dataset.labels[i])
            writer.writerow(row)


def synthetic_blobs(
    k: int,
    points_per_blob: int,
    d: int,
    centers: np.ndarray,
    spread: float,
    seed: int = 0,
) -> Dataset:
    """Isotropic Gaussian blobs around the given (k, d) centers; labels record
    the blob of origin as its index string."""
    centers = np.asarray(centers, dtype=float)
    if centers.shape != (k, d):
        raise ValueError(f"centers must have shape ({k}, {d})")
    if spread <= 0:
        raise ValueError("spread must be > 0")
    if points_per_blob < 1:
        raise ValueError("points_per_blob must be >= 1")
    rng = np.random.default_rng(seed)
    chunks = [
        rng.normal(loc=centers[b], scale=spread, size=(points_per_blob, d))
        for b in range(k)
    ]
    labels = [str(b) for b in range(k) for _ in range(points_per_blob)]
    return Dataset(points=np.vstack(chunks), labels=tuple(labels), name="blobs")


def feature_bounds_of_matrix(points: np.ndarray) -> Bounds:
    """Per-column min/max; a constant column is widened by a fixed epsilon on
    each side so the interval stays proper."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("points must be a non-empty (n, d) matrix")
    lower = points.min(axis=0).copy()
    upper = points.max(axis=0).copy()
    flat = lower == upper
    lower[flat] -= CONSTANT_FEATURE_EPS
    upper[flat] += CONSTANT_FEATURE_EPS
    return Bounds(lower, upper)


def feature_bounds(dataset: Dataset) -> Bounds:
    return feature_bounds_of_matrix(dataset.points)
