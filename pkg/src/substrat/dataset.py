"""Columnar datasets with interned cell symbols, plus row/column-subset views.

Every cell is interned to a small integer per column, so downstream measure
evaluation is integer counting instead of string hashing. Datasets and views
are immutable after construction and safe to share across threads.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from substrat.errors import (
    EmptyFileError,
    IndexOutOfRangeError,
    MissingTargetError,
    RaggedRowsError,
    SizeTooLargeError,
    TargetMissingError,
)

MISSING_TOKEN = "∅"  # empty cells intern to this dedicated symbol

CATEGORICAL = "categorical"
NUMERIC_AS_SYMBOL = "numeric-as-symbol"
NUMERIC_BINNED = "numeric-binned"


@dataclass(frozen=True)
class ColumnData:
    """One interned column: per-row symbol ids plus the id -> raw text table."""

    symbols: np.ndarray            # int32, one entry per row
    values: tuple[str, ...]        # dense dictionary, SymbolId -> raw value
    declared_kind: str = CATEGORICAL

    @property
    def dict_size(self) -> int:
        return len(self.values)

    def decode(self, symbol_id: int) -> str:
        return self.values[symbol_id]


@dataclass(frozen=True)
class SubsetIndices:
    """A candidate data subset: sorted unique row and column indices.

    Canonical (sorted) storage makes equality and hashing usable for
    de-duplication in search populations. The target column membership is
    checked against a concrete dataset in validate()/view(), not here.
    """

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(sorted(map(int, self.rows)))
        cols = tuple(sorted(map(int, self.cols)))
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ValueError("duplicate indices in subset")
        if not rows or len(cols) < 2:
            raise ValueError("subset needs >= 1 row and >= 2 columns")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.cols)

    def row_array(self) -> np.ndarray:
        arr = self.__dict__.get("_row_arr")  # cached; eq/hash use fields only
        if arr is None:
            arr = np.asarray(self.rows, dtype=np.int64)
            object.__setattr__(self, "_row_arr", arr)
        return arr

    def col_array(self) -> np.ndarray:
        arr = self.__dict__.get("_col_arr")
        if arr is None:
            arr = np.asarray(self.cols, dtype=np.int64)
            object.__setattr__(self, "_col_arr", arr)
        return arr

    def validate(self, dataset: "Dataset") -> None:
        if self.rows[0] < 0 or self.rows[-1] >= dataset.n_rows:
            raise IndexOutOfRangeError(f"row index out of range for N={dataset.n_rows}")
        if self.cols[0] < 0 or self.cols[-1] >= dataset.n_cols:
            raise IndexOutOfRangeError(f"column index out of range for M={dataset.n_cols}")
        if dataset.target_col not in self.cols:
            raise TargetMissingError("subset must contain the target column")


class Dataset:
    """Immutable table of interned symbols with a designated target column."""

    def __init__(self, name: str, column_names: Sequence[str],
                 columns: Sequence[ColumnData], target_col: int):
        if len(column_names) != len(columns):
            raise ValueError("column_names and columns disagree")
        if len(set(column_names)) != len(column_names):
            raise ValueError("column names must be unique")
        if len(columns) < 2:
            raise ValueError("need at least one feature column plus the target")
        n_rows = len(columns[0].symbols)
        if n_rows < 1:
            raise EmptyFileError("dataset has no rows")
        for cd in columns:
            if len(cd.symbols) != n_rows:
                raise RaggedRowsError("columns have differing lengths")
        if not 0 <= target_col < len(columns):
            raise IndexOutOfRangeError("target_col out of range")

        self.name = name
        self.column_names = tuple(column_names)
        self.columns = tuple(columns)
        self.n_rows = n_rows
        self.n_cols = len(columns)
        self.target_col = int(target_col)
        # column-major matrix: row j is column j, contiguous for fast gathers
        mat = np.empty((self.n_cols, self.n_rows), dtype=np.int32)
        for j, cd in enumerate(columns):
            mat[j] = cd.symbols
        mat.setflags(write=False)
        self._matrix = mat
        self._dict_sizes = np.asarray([cd.dict_size for cd in columns], dtype=np.int32)
        self._measure_cache: dict[str, float] = {}

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dict_sizes(self) -> np.ndarray:
        return self._dict_sizes

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def full_indices(self) -> SubsetIndices:
        return SubsetIndices(tuple(range(self.n_rows)), tuple(range(self.n_cols)))

    def cell(self, row: int, col: int) -> str:
        """Raw text of one cell (dictionary round-trip)."""
        return self.columns[col].values[self._matrix[col, row]]

    def __repr__(self):
        return f"Dataset({self.name!r}, {self.n_rows}x{self.n_cols}, target={self.column_names[self.target_col]!r})"


class DatasetView:
    """Read-only n x m window into a Dataset. Stores only the indices; cell
    data is materialized lazily by the accessors."""

    def __init__(self, dataset: Dataset, subset: SubsetIndices):
        subset.validate(dataset)
        self.dataset = dataset
        self.subset = subset
        self._rows = subset.row_array()
        self._cols = subset.col_array()

    @property
    def n_rows(self) -> int:
        return self.subset.n

    @property
    def n_cols(self) -> int:
        return self.subset.m

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(self.dataset.column_names[c] for c in self.subset.cols)

    @property
    def row_indices(self) -> np.ndarray:
        return self._rows

    @property
    def col_indices(self) -> np.ndarray:
        return self._cols

    def column_symbols(self, view_col: int) -> np.ndarray:
        """Interned symbols of the view's column (gathered copy)."""
        return self.dataset.matrix[self._cols[view_col], self._rows]

    def cell(self, view_row: int, view_col: int) -> str:
        return self.dataset.cell(self.subset.rows[view_row], self.subset.cols[view_col])

    def iter_rows(self) -> Iterator[tuple[str, ...]]:
        cols = [(c, self.dataset.columns[c].values) for c in self.subset.cols]
        mat = self.dataset.matrix
        for r in self.subset.rows:
            yield tuple(values[mat[c, r]] for c, values in cols)

    def to_csv(self, path, delimiter: str = ",") -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, delimiter=delimiter)
            writer.writerow(self.column_names)
            writer.writerows(self.iter_rows())


def view(dataset: Dataset, subset: SubsetIndices) -> DatasetView:
    """Project a dataset onto a subset's rows and columns, without copying."""
    return DatasetView(dataset, subset)


def _intern_column(raw: list[str], bins: int) -> ColumnData:
    """Intern one column. Numeric columns are binned when bins > 0, otherwise
    every distinct raw text is its own symbol."""
    cleaned = [v if v != "" else MISSING_TOKEN for v in raw]
    numeric = True
    parsed = []
    for v in cleaned:
        if v == MISSING_TOKEN:
            parsed.append(None)
            continue
        try:
            parsed.append(float(v))
        except ValueError:
            numeric = False
            break

    if numeric and bins > 0:
        present = [x for x in parsed if x is not None]
        lo, hi = min(present), max(present)
        width = (hi - lo) / bins if hi > lo else 1.0
        labels = []
        for x in parsed:
            if x is None:
                labels.append(MISSING_TOKEN)
            else:
                b = min(int((x - lo) / width), bins - 1)
                labels.append(f"bin{b}")
        cleaned = labels
        kind = NUMERIC_BINNED
    else:
        kind = NUMERIC_AS_SYMBOL if numeric else CATEGORICAL

    table: dict[str, int] = {}
    symbols = np.empty(len(cleaned), dtype=np.int32)
    for i, v in enumerate(cleaned):
        sid = table.get(v)
        if sid is None:
            sid = len(table)
            table[v] = sid
        symbols[i] = sid
    return ColumnData(symbols=symbols, values=tuple(table), declared_kind=kind)


def load_csv(path, target: str, *, delimiter: str = ",", bins: int = 0,
             name: Optional[str] = None) -> Dataset:
    """Load an RFC-4180-style CSV (header row required) into a Dataset.

    target: header name of the prediction target. bins > 0 turns on
    equal-width binning for numeric feature columns; the target is always
    interned by exact value so the prediction task is unchanged. Empty cells
    become a dedicated missing-value symbol.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFileError(f"{path}: file is empty") from None
        rows = list(reader)

    header = [h.strip() for h in header]
    if not rows:
        raise EmptyFileError(f"{path}: no data rows after the header")
    if target not in header:
        raise MissingTargetError(f"target column {target!r} not in header {header}")
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowsError(f"{path}: row {i + 2} has {len(row)} fields, expected {width}")

    target_col = header.index(target)
    columns = []
    for j in range(width):
        col_bins = 0 if j == target_col else bins
        columns.append(_intern_column([row[j] for row in rows], col_bins))
    ds_name = name if name is not None else str(path)
    return Dataset(ds_name, header, columns, target_col)


def default_subset_size(n_rows: int, n_cols: int) -> tuple[int, int]:
    """Default DST size: about sqrt(N) rows and a quarter of the columns
    (floor 2, target included in the count). Half-up rounding."""
    n = int(math.sqrt(n_rows) + 0.5)
    n = max(1, min(n_rows, n))
    m = max(2, int(0.25 * n_cols + 0.5))
    m = min(n_cols, m)
    return n, m


def draw_indices(rng: np.random.Generator, n_total: int, m_total: int,
                 n: int, m: int, target_col: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform row set and column set as sorted index arrays; the target
    column is always inserted and counts toward m."""
    rows = np.sort(rng.choice(n_total, size=n, replace=False))
    pool = np.delete(np.arange(m_total, dtype=np.int64), target_col)
    picked = rng.choice(pool, size=m - 1, replace=False)
    cols = np.sort(np.append(picked, target_col))
    return rows.astype(np.int64), cols.astype(np.int64)


def random_subset(dataset: Dataset, n: int, m: int,
                  rng: np.random.Generator) -> SubsetIndices:
    """Uniformly sampled SubsetIndices of size n x m (target always included)."""
    if n > dataset.n_rows or m > dataset.n_cols:
        raise SizeTooLargeError(
            f"requested {n}x{m} exceeds dataset {dataset.n_rows}x{dataset.n_cols}")
    if n < 1 or m < 2:
        raise ValueError("need n >= 1 and m >= 2")
    rows, cols = draw_indices(rng, dataset.n_rows, dataset.n_cols, n, m, dataset.target_col)
    return SubsetIndices(tuple(rows.tolist()), tuple(cols.tolist()))
