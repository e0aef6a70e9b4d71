"""Dataset-level measures and the measure-preservation loss.

The shipped measure is dataset entropy: the mean over columns of each
column's Shannon entropy, computed from the empirical distribution of the
column's distinct values. A registry keyed by measure name leaves room for
other measures without touching the search code.
"""
from __future__ import annotations

from typing import Callable, Optional, Union

from substrat import _kernels
from substrat.dataset import Dataset, DatasetView, SubsetIndices, view
from substrat.errors import EmptyViewError

MeasureFn = Callable[[DatasetView], float]
MeasureLike = Union[str, MeasureFn]

_REGISTRY: dict[str, MeasureFn] = {}


def register_measure(kind: str):
    """Register a measure function under a name (extension point)."""
    def deco(fn: MeasureFn) -> MeasureFn:
        _REGISTRY[kind] = fn
        return fn
    return deco


def get_measure(measure: MeasureLike) -> MeasureFn:
    if callable(measure):
        return measure
    try:
        return _REGISTRY[measure]
    except KeyError:
        raise KeyError(f"unknown measure {measure!r}; registered: {sorted(_REGISTRY)}") from None


def _measure_name(measure: MeasureLike) -> str:
    return measure if isinstance(measure, str) else getattr(measure, "__name__", repr(measure))


@register_measure("entropy")
def dataset_entropy(v: DatasetView) -> float:
    """Mean per-column Shannon entropy (base 2) of the view."""
    if v.n_rows == 0 or v.n_cols == 0:
        raise EmptyViewError("entropy of an empty view")
    return float(_kernels.mean_entropy(
        v.dataset.matrix, v.dataset.dict_sizes, v.row_indices, v.col_indices))


def full_measure(dataset: Dataset, measure: MeasureLike = "entropy") -> float:
    """Measure of the full dataset, cached on the dataset (constant per run)."""
    name = _measure_name(measure)
    cached = dataset._measure_cache.get(name)
    if cached is None:
        fn = get_measure(measure)
        cached = fn(view(dataset, dataset.full_indices()))
        dataset._measure_cache[name] = cached
    return cached


def subset_measure(dataset: Dataset, rows, cols, measure: MeasureLike = "entropy") -> float:
    """Measure over raw index arrays; the fast path used by the searches."""
    if isinstance(measure, str) and measure == "entropy":
        return float(_kernels.mean_entropy(dataset.matrix, dataset.dict_sizes, rows, cols))
    fn = get_measure(measure)
    return fn(view(dataset, SubsetIndices(tuple(rows.tolist()), tuple(cols.tolist()))))


def loss(dataset: Dataset, subset: SubsetIndices, measure: MeasureLike = "entropy",
         *, full_value: Optional[float] = None) -> float:
    """Measure-preservation loss: |F(subset view) - F(full dataset)|, >= 0.

    full_value short-circuits the F(D) computation when the caller already
    holds it (it is constant over all candidates of a run).
    """
    fn = get_measure(measure)
    if full_value is None:
        full_value = full_measure(dataset, measure)
    return abs(fn(view(dataset, subset)) - full_value)


def fitness(dataset: Dataset, subset: SubsetIndices, measure: MeasureLike = "entropy",
            *, full_value: Optional[float] = None) -> float:
    """Search fitness: negative loss. 0 is the optimum; always <= 0."""
    return -loss(dataset, subset, measure, full_value=full_value)
