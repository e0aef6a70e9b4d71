"""Alternative subset generators, drop-in comparable with the genetic search:
Monte-Carlo, an epsilon-greedy bandit, two greedy growers, k-means
representatives, and information-gain hybrids. All return SearchResult (or
SubsetIndices for the pure selectors) with the same validity guarantees.
"""
from __future__ import annotations

import math
import time
from typing import Optional

import numpy as np

from substrat.dataset import Dataset, SubsetIndices, draw_indices
from substrat.errors import SizeTooLargeError
from substrat.gendst import SearchResult
from substrat.kmeans import kmeans, nearest_distinct
from substrat.measures import MeasureLike, full_measure, loss, subset_measure

MC_100 = 100
MC_100K = 100_000
MC_24H_SECONDS = 24 * 3600.0


def _check_size(dataset: Dataset, n: int, m: int) -> None:
    if n > dataset.n_rows or m > dataset.n_cols:
        raise SizeTooLargeError(
            f"subset {n}x{m} exceeds dataset {dataset.n_rows}x{dataset.n_cols}")
    if n < 1 or m < 2:
        raise ValueError("need n >= 1 and m >= 2")


def mc_search(dataset: Dataset, measure: MeasureLike = "entropy", *,
              n: int, m: int, rng: np.random.Generator,
              iterations: Optional[int] = None, seconds: Optional[float] = None,
              dedupe: bool = False) -> SearchResult:
    """Monte-Carlo: draw random subsets until the budget runs out, return the
    minimizer seen.

    Budget is an iteration count or a wall-clock limit (at least one of the
    two). dedupe counts only first-seen subsets toward an iteration budget,
    so a budget equal to the whole subset space can cover it exhaustively.
    """
    _check_size(dataset, n, m)
    if iterations is None and seconds is None:
        raise ValueError("mc_search needs an iteration or wall-clock budget")
    if iterations is not None and iterations < 1:
        raise ValueError("budget must be positive")
    start = time.perf_counter()
    full_value = full_measure(dataset, measure)

    best_rows = best_cols = None
    best_loss = math.inf
    evaluations = 0
    seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    # dedupe mode redraws duplicates; cap raw draws so it always terminates
    max_draws = math.inf if not dedupe else 10_000 + 200 * (iterations or 0)
    draws = 0
    while draws < max_draws:
        if iterations is not None and evaluations >= iterations:
            break
        if seconds is not None and time.perf_counter() - start >= seconds:
            break
        rows, cols = draw_indices(rng, dataset.n_rows, dataset.n_cols, n, m,
                                  dataset.target_col)
        draws += 1
        if dedupe:
            key = (tuple(rows.tolist()), tuple(cols.tolist()))
            if key in seen:
                continue
            seen.add(key)
        l = abs(subset_measure(dataset, rows, cols, measure) - full_value)
        evaluations += 1
        if l < best_loss:
            best_loss = l
            best_rows, best_cols = rows, cols

    best = SubsetIndices(tuple(best_rows.tolist()), tuple(best_cols.tolist()))
    return SearchResult(best=best, best_loss=best_loss, generations_run=0,
                        evaluations=evaluations,
                        wall_time_s=time.perf_counter() - start, strategy="mc")


def mab_search(dataset: Dataset, measure: MeasureLike = "entropy", *,
               n: int, m: int, rounds: int, epsilon: float = 0.1,
               rng: np.random.Generator, record_trace: bool = False) -> SearchResult:
    """Epsilon-greedy bandit over row-arms and column-arms.

    Each round composes a subset slot by slot (greedy on the arm value
    estimates with probability 1-epsilon, uniform otherwise; target column
    always in), observes reward = -loss, and credits it to every
    participating arm by incremental mean. Arm values start at 0, the best
    possible reward, so untried arms get explored. record_trace keeps a
    per-round log of picks and pre-round value snapshots (diagnostics).
    """
    _check_size(dataset, n, m)
    if rounds < 1:
        raise ValueError("rounds must be positive")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1]")
    start = time.perf_counter()
    full_value = full_measure(dataset, measure)

    row_value = np.zeros(dataset.n_rows)
    row_count = np.zeros(dataset.n_rows, dtype=np.int64)
    col_value = np.zeros(dataset.n_cols)
    col_count = np.zeros(dataset.n_cols, dtype=np.int64)

    def pick(values: np.ndarray, k: int, banned: set[int]) -> list[int]:
        chosen: list[int] = []
        available = np.array([i for i in range(len(values)) if i not in banned])
        for _ in range(k):
            if rng.random() < epsilon:
                idx = int(available[rng.integers(len(available))])
            else:
                vals = values[available]
                ties = available[vals == vals.max()]
                idx = int(ties[rng.integers(len(ties))])
            chosen.append(idx)
            available = available[available != idx]
        return chosen

    best_subset = None
    best_loss = math.inf
    trace = []
    for _ in range(rounds):
        if record_trace:
            trace.append({"row_values": row_value.copy(),
                          "col_values": col_value.copy()})
        rows = sorted(pick(row_value, n, set()))
        cols = sorted(pick(col_value, m - 1, {dataset.target_col})
                      + [dataset.target_col])
        if record_trace:
            trace[-1]["rows"], trace[-1]["cols"] = rows, cols
        l = abs(subset_measure(dataset, np.asarray(rows, dtype=np.int64),
                               np.asarray(cols, dtype=np.int64), measure) - full_value)
        reward = -l
        for r in rows:
            row_count[r] += 1
            row_value[r] += (reward - row_value[r]) / row_count[r]
        for c in cols:
            col_count[c] += 1
            col_value[c] += (reward - col_value[c]) / col_count[c]
        if l < best_loss:
            best_loss = l
            best_subset = SubsetIndices(tuple(rows), tuple(cols))

    result = SearchResult(best=best_subset, best_loss=best_loss, generations_run=0,
                          evaluations=rounds,
                          wall_time_s=time.perf_counter() - start, strategy="mab")
    result.row_arm_values = row_value  # exposed for diagnostics/tests
    result.col_arm_values = col_value
    if record_trace:
        result.rounds_trace = trace
    return result


def greedy_seq(dataset: Dataset, measure: MeasureLike = "entropy", *,
               n: int, m: int) -> SearchResult:
    """Greedy two-phase grower: add the loss-minimizing row n times (against
    all columns), then the loss-minimizing column m-1 times with the rows
    fixed. Deterministic; ties break to the lowest index."""
    _check_size(dataset, n, m)
    start = time.perf_counter()
    full_value = full_measure(dataset, measure)
    all_cols = np.arange(dataset.n_cols, dtype=np.int64)
    evaluations = 0

    rows: list[int] = []
    for _ in range(n):
        best_r, best_l = None, math.inf
        for r in range(dataset.n_rows):
            if r in rows:
                continue
            trial = np.asarray(sorted(rows + [r]), dtype=np.int64)
            l = abs(subset_measure(dataset, trial, all_cols, measure) - full_value)
            evaluations += 1
            if l < best_l:
                best_r, best_l = r, l
        rows.append(best_r)
        rows.sort()

    row_arr = np.asarray(rows, dtype=np.int64)
    cols: list[int] = [dataset.target_col]
    while len(cols) < m:
        best_c, best_l = None, math.inf
        for c in range(dataset.n_cols):
            if c in cols:
                continue
            trial = np.asarray(sorted(cols + [c]), dtype=np.int64)
            l = abs(subset_measure(dataset, row_arr, trial, measure) - full_value)
            evaluations += 1
            if l < best_l:
                best_c, best_l = c, l
        cols.append(best_c)
        cols.sort()

    best = SubsetIndices(tuple(rows), tuple(cols))
    return SearchResult(best=best, best_loss=loss(dataset, best, measure, full_value=full_value),
                        generations_run=0, evaluations=evaluations,
                        wall_time_s=time.perf_counter() - start, strategy="greedy_seq")


def greedy_mult(dataset: Dataset, measure: MeasureLike = "entropy", *,
                n: int, m: int) -> SearchResult:
    """Greedy simultaneous grower: commit the (row, column) pair minimizing
    the partial-subset loss each step; once a dimension fills, continue on
    the other. Deterministic; ties break lexicographically."""
    _check_size(dataset, n, m)
    start = time.perf_counter()
    full_value = full_measure(dataset, measure)
    evaluations = 0

    rows: list[int] = []
    cols: list[int] = [dataset.target_col]

    def partial_loss(trial_rows: list[int], trial_cols: list[int]) -> float:
        nonlocal evaluations
        evaluations += 1
        return abs(subset_measure(dataset, np.asarray(trial_rows, dtype=np.int64),
                                  np.asarray(trial_cols, dtype=np.int64),
                                  measure) - full_value)

    while len(rows) < n or len(cols) < m:
        grow_rows = len(rows) < n
        grow_cols = len(cols) < m
        best_pair, best_l = None, math.inf
        if grow_rows and grow_cols:
            for r in range(dataset.n_rows):
                if r in rows:
                    continue
                for c in range(dataset.n_cols):
                    if c in cols:
                        continue
                    l = partial_loss(sorted(rows + [r]), sorted(cols + [c]))
                    if l < best_l:
                        best_pair, best_l = (r, c), l
            rows.append(best_pair[0])
            cols.append(best_pair[1])
        elif grow_rows:
            for r in range(dataset.n_rows):
                if r in rows:
                    continue
                l = partial_loss(sorted(rows + [r]), cols)
                if l < best_l:
                    best_pair, best_l = (r, None), l
            rows.append(best_pair[0])
        else:
            for c in range(dataset.n_cols):
                if c in cols:
                    continue
                l = partial_loss(rows, sorted(cols + [c]))
                if l < best_l:
                    best_pair, best_l = (None, c), l
            cols.append(best_pair[1])
        rows.sort()
        cols.sort()

    best = SubsetIndices(tuple(rows), tuple(cols))
    return SearchResult(best=best, best_loss=loss(dataset, best, measure, full_value=full_value),
                        generations_run=0, evaluations=evaluations,
                        wall_time_s=time.perf_counter() - start, strategy="greedy_mult")


def _cell_encoding(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Two (N, M) matrices per cell: the symbol's empirical frequency within
    its column, and a normalized symbol identity. Frequency alone is
    scale-free but collapses equifrequent values to one point (uniform
    duplicated rows would all coincide); the identity component keeps
    distinct rows distinct while staying type-agnostic and in (0, 1]."""
    freq = np.empty((dataset.n_rows, dataset.n_cols))
    ident = np.empty((dataset.n_rows, dataset.n_cols))
    for j, col in enumerate(dataset.columns):
        counts = np.bincount(col.symbols, minlength=col.dict_size)
        freq[:, j] = counts[col.symbols] / dataset.n_rows
        ident[:, j] = (col.symbols + 1) / col.dict_size
    return freq, ident


def _pick_representatives(points: np.ndarray, k: int, index_pool: list[int],
                          rng: np.random.Generator) -> list[int]:
    """k-means the points and take the nearest point per centroid; with
    fewer distinct points than clusters, take one index per distinct point
    and fill the remainder at random."""
    if len(np.unique(points, axis=0)) < k:
        chosen, seen = [], set()
        for i, p in enumerate(map(tuple, points)):
            if p not in seen:
                seen.add(p)
                chosen.append(index_pool[i])
        pool = np.setdiff1d(np.asarray(index_pool), chosen)
        fill = rng.choice(pool, size=k - len(chosen), replace=False)
        return sorted(chosen + [int(x) for x in fill])
    centroids, _ = kmeans(points, k, rng)
    return sorted(index_pool[i] for i in nearest_distinct(points, centroids))


def _km_rows(dataset: Dataset, n: int, rng: np.random.Generator) -> list[int]:
    freq, ident = _cell_encoding(dataset)
    points = np.hstack([freq, ident])
    return _pick_representatives(points, n, list(range(dataset.n_rows)), rng)


def km_select(dataset: Dataset, n: int, m: int, rng: np.random.Generator) -> SubsetIndices:
    """Clustering representatives: k-means over rows (k=n) and over feature
    columns (k=m-1), picking the point nearest each centroid; the target
    column is appended, not clustered."""
    _check_size(dataset, n, m)
    rows = _km_rows(dataset, n, rng)

    freq, ident = _cell_encoding(dataset)
    feature_cols = [c for c in range(dataset.n_cols) if c != dataset.target_col]
    col_points = np.hstack([freq[:, feature_cols].T, ident[:, feature_cols].T])
    cols = _pick_representatives(col_points, m - 1, feature_cols, rng)
    return SubsetIndices(tuple(rows), tuple(sorted(cols + [dataset.target_col])))


def _column_entropy(symbols: np.ndarray, dict_size: int) -> float:
    counts = np.bincount(symbols, minlength=dict_size)
    nz = counts[counts > 0]
    p = nz / nz.sum()
    return float(-(p @ np.log2(p)))


def _conditional_entropy(col_sym: np.ndarray, v_size: int,
                         t_sym: np.ndarray, t_size: int) -> float:
    """H(target | column) from the joint symbol counts."""
    joint = np.bincount(col_sym.astype(np.int64) * t_size + t_sym,
                        minlength=v_size * t_size).reshape(v_size, t_size).astype(float)
    n_v = joint.sum(axis=1)
    present = n_v > 0
    p = joint[present] / n_v[present, None]
    plogp = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return float((n_v[present] / n_v.sum()) @ -plogp.sum(axis=1))


def ig_rank(dataset: Dataset) -> list[int]:
    """Feature columns ranked by information gain about the target,
    descending; ties break to the lowest index."""
    target = dataset.columns[dataset.target_col]
    h_target = _column_entropy(target.symbols, target.dict_size)

    gains: list[tuple[float, int]] = []
    for j, col in enumerate(dataset.columns):
        if j == dataset.target_col:
            continue
        h_cond = _conditional_entropy(col.symbols, col.dict_size,
                                      target.symbols, target.dict_size)
        gains.append((h_target - h_cond, j))
    gains.sort(key=lambda t: (-t[0], t[1]))
    return [j for _, j in gains]


def _ig_cols(dataset: Dataset, m: int) -> tuple[int, ...]:
    top = ig_rank(dataset)[:m - 1]
    return tuple(sorted(top + [dataset.target_col]))


def ig_rand(dataset: Dataset, n: int, m: int, rng: np.random.Generator) -> SubsetIndices:
    """Top information-gain columns, uniformly random rows."""
    _check_size(dataset, n, m)
    rows = np.sort(rng.choice(dataset.n_rows, size=n, replace=False))
    return SubsetIndices(tuple(int(r) for r in rows), _ig_cols(dataset, m))


def ig_km(dataset: Dataset, n: int, m: int, rng: np.random.Generator) -> SubsetIndices:
    """Top information-gain columns, k-means representative rows."""
    _check_size(dataset, n, m)
    return SubsetIndices(tuple(_km_rows(dataset, n, rng)), _ig_cols(dataset, m))


def run_baseline(kind: str, dataset: Dataset, measure: MeasureLike = "entropy", *,
                 n: int, m: int, rng: Optional[np.random.Generator] = None,
                 iterations: Optional[int] = None, seconds: Optional[float] = None,
                 rounds: int = 1000, epsilon: float = 0.1) -> SearchResult:
    """Dispatch a baseline by name; pure selectors (km, ig_*) are wrapped
    into a SearchResult with their loss filled in."""
    rng = rng if rng is not None else np.random.default_rng(0)
    if kind in ("mc", "mc_100", "mc_100k", "mc_24h"):
        if kind == "mc_100":
            iterations = MC_100
        elif kind == "mc_100k":
            iterations = MC_100K
        elif kind == "mc_24h":
            seconds = MC_24H_SECONDS if seconds is None else seconds
        elif iterations is None and seconds is None:
            iterations = MC_100  # bare "mc" defaults to the smallest preset
        return mc_search(dataset, measure, n=n, m=m, rng=rng,
                         iterations=iterations, seconds=seconds)
    if kind == "mab":
        return mab_search(dataset, measure, n=n, m=m, rounds=rounds,
                          epsilon=epsilon, rng=rng)
    if kind == "greedy_seq":
        return greedy_seq(dataset, measure, n=n, m=m)
    if kind == "greedy_mult":
        return greedy_mult(dataset, measure, n=n, m=m)
    if kind in ("km", "ig_rand", "ig_km"):
        start = time.perf_counter()
        selector = {"km": km_select, "ig_rand": ig_rand, "ig_km": ig_km}[kind]
        subset = selector(dataset, n, m, rng)
        return SearchResult(best=subset, best_loss=loss(dataset, subset, measure),
                            generations_run=0, evaluations=1,
                            wall_time_s=time.perf_counter() - start, strategy=kind)
    raise ValueError(f"unknown baseline kind {kind!r}")
