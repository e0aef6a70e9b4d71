"""Genetic search for measure-preserving data subsets, plus an exhaustive
oracle for instances small enough to enumerate.

A candidate is a SubsetIndices genome: n row indices and m column indices
(target column always present). Fitness is the negative measure-preservation
loss, so 0 is optimal. Selection is a royalty tournament: the top slice
passes deterministically, the rest are fitness-weighted samples.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from substrat.dataset import Dataset, SubsetIndices, default_subset_size, random_subset
from substrat.errors import (
    EmptyPopulationError,
    IncompatibleShapesError,
    SizeTooLargeError,
    TooManyCombinationsError,
)
from substrat.measures import MeasureLike, full_measure, subset_measure

# fitness-weight shift: keeps sampling well-defined when all fitness values
# are <= 0 and preserves "fitter is likelier"
WEIGHT_EPS = 1e-9


@dataclass
class GaParams:
    """Hyperparameters of the genetic subset search (defaults are the tuned
    production configuration)."""

    generations: int = 30          # hard cap on evolved generations
    population: int = 100
    mutation_prob: float = 0.025   # per-candidate, per-generation
    elite_fraction: float = 0.05
    row_col_prob: float = 0.9      # P(operate on rows) vs columns
    convergence_eps: float = 0.0   # 0 disables early stopping
    convergence_patience: int = 3
    seed: int = 0
    subset_rows: Optional[int] = None   # None -> round(sqrt(N))
    subset_cols: Optional[int] = None   # None -> max(2, round(0.25*M))

    def validate(self) -> None:
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        for name in ("mutation_prob", "elite_fraction", "row_col_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.convergence_eps < 0:
            raise ValueError("convergence_eps must be >= 0")

    def resolve_size(self, dataset: Dataset) -> tuple[int, int]:
        dn, dm = default_subset_size(dataset.n_rows, dataset.n_cols)
        n = self.subset_rows if self.subset_rows is not None else dn
        m = self.subset_cols if self.subset_cols is not None else dm
        if n > dataset.n_rows or m > dataset.n_cols:
            raise SizeTooLargeError(
                f"subset {n}x{m} exceeds dataset {dataset.n_rows}x{dataset.n_cols}")
        return n, m


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best_fitness: float   # best seen up to and including this generation
    mean_fitness: float   # mean over the generation's selected population


@dataclass
class SearchResult:
    """Outcome of any subset search (genetic, brute-force, or baseline)."""

    best: SubsetIndices
    best_loss: float
    generations_run: int
    evaluations: int
    trace: list[GenerationStats] = field(default_factory=list)
    wall_time_s: float = 0.0
    strategy: str = ""

    def to_dict(self, deterministic: bool = False) -> dict:
        return {
            "strategy": self.strategy,
            "rows": list(self.best.rows),
            "cols": list(self.best.cols),
            "loss": self.best_loss,
            "generations": self.generations_run,
            "evaluations": self.evaluations,
            "wall_time_s": None if deterministic else self.wall_time_s,
            "trace": [
                {"generation": t.generation, "best_fitness": t.best_fitness,
                 "mean_fitness": t.mean_fitness}
                for t in self.trace
            ],
        }


def _draw_outside(members, universe: int, rng: np.random.Generator) -> int:
    """Uniform index not in `members`. Rejection sampling when the set is
    sparse (O(1) expected), exact complement otherwise."""
    if len(members) <= universe // 2:
        while True:
            cand = int(rng.integers(universe))
            if cand not in members:
                return cand
    pool = np.setdiff1d(np.arange(universe), sorted(members), assume_unique=True)
    return int(rng.choice(pool))


def mutate(candidate: SubsetIndices, n_total: int, m_total: int, target_col: int,
           p_rc: float, rng: np.random.Generator) -> SubsetIndices:
    """Replace exactly one index with one not in the set.

    Rows are mutated with probability p_rc, columns otherwise; the target
    column is never touched. A saturated dimension (nothing to swap in)
    returns the candidate unchanged.
    """
    if rng.random() < p_rc:
        if candidate.n == n_total:
            return candidate
        out_pos = rng.integers(candidate.n)
        new_idx = _draw_outside(set(candidate.rows), n_total, rng)
        rows = list(candidate.rows)
        rows[out_pos] = new_idx
        return SubsetIndices(tuple(rows), candidate.cols)
    if candidate.m == m_total:
        return candidate
    mutable = [c for c in candidate.cols if c != target_col]
    out = mutable[rng.integers(len(mutable))]
    new_idx = _draw_outside(set(candidate.cols), m_total, rng)
    cols = [new_idx if c == out else c for c in candidate.cols]
    return SubsetIndices(candidate.rows, tuple(cols))


def _repair(indices: set[int], size: int, universe: int, forced: Optional[int],
            rng: np.random.Generator) -> tuple[int, ...]:
    """Bring an index set to the exact size: drop random droppable members if
    oversized, insert random non-members if undersized; `forced` stays in."""
    if forced is not None:
        indices.add(forced)
    while len(indices) > size:
        droppable = sorted(indices - {forced} if forced is not None else indices)
        indices.discard(droppable[rng.integers(len(droppable))])
    while len(indices) < size:
        indices.add(_draw_outside(indices, universe, rng))
    return tuple(sorted(indices))


def crossover(a: SubsetIndices, b: SubsetIndices, n_total: int, m_total: int,
              target_col: int, p_rc: float,
              rng: np.random.Generator) -> tuple[SubsetIndices, SubsetIndices]:
    """Recombine two same-shape candidates into two offspring.

    One dimension is crossed (rows with probability p_rc): a split size
    1 < s < len is drawn, both parents are split at the same random
    positions, and complementary parts are unified. Overlapping unions are
    refilled with random indices, always keeping the target column. When no
    legal split size exists the parents pass through unchanged.
    """
    if a.n != b.n or a.m != b.m:
        raise IncompatibleShapesError(f"cannot cross {a.n}x{a.m} with {b.n}x{b.m}")
    cross_rows = rng.random() < p_rc
    length = a.n if cross_rows else a.m
    if length <= 2:  # no s with 1 < s < length
        return a, b
    s = int(rng.integers(2, length))
    pos = rng.permutation(length).tolist()
    head, tail = pos[:s], pos[s:]

    if cross_rows:
        ra, rb = a.rows, b.rows
        r_ab = {ra[p] for p in head} | {rb[p] for p in tail}
        r_ba = {rb[p] for p in head} | {ra[p] for p in tail}
        child_ab = SubsetIndices(_repair(r_ab, a.n, n_total, None, rng), a.cols)
        child_ba = SubsetIndices(_repair(r_ba, b.n, n_total, None, rng), b.cols)
    else:
        ca, cb = a.cols, b.cols
        c_ab = {ca[p] for p in head} | {cb[p] for p in tail}
        c_ba = {cb[p] for p in head} | {ca[p] for p in tail}
        child_ab = SubsetIndices(a.rows, _repair(c_ab, a.m, m_total, target_col, rng))
        child_ba = SubsetIndices(b.rows, _repair(c_ba, b.m, m_total, target_col, rng))
    return child_ab, child_ba


def select(population: list[tuple[SubsetIndices, float]], elite_fraction: float,
           rng: np.random.Generator) -> list[tuple[SubsetIndices, float]]:
    """Royalty tournament: the top ceil(alpha*phi) candidates pass
    deterministically; the remaining slots are sampled with replacement,
    weighted by shifted fitness (fitter candidates likelier)."""
    if not population:
        raise EmptyPopulationError("selection over an empty population")
    phi = len(population)
    n_elite = min(phi, math.ceil(elite_fraction * phi))
    order = sorted(range(phi), key=lambda i: -population[i][1])
    chosen = [population[i] for i in order[:n_elite]]
    n_rest = phi - n_elite
    if n_rest:
        fit = np.array([f for _, f in population])
        weights = fit - fit.min() + WEIGHT_EPS
        probs = weights / weights.sum()
        picks = rng.choice(phi, size=n_rest, replace=True, p=probs)
        chosen.extend(population[int(i)] for i in picks)
    return chosen


def run_gendst(dataset: Dataset, measure: MeasureLike = "entropy",
               params: Optional[GaParams] = None) -> SearchResult:
    """Evolve a population of subset candidates to minimize the
    measure-preservation loss; returns the best candidate ever evaluated."""
    params = params or GaParams()
    params.validate()
    n, m = params.resolve_size(dataset)
    rng = np.random.default_rng(params.seed)
    start = time.perf_counter()

    full_value = full_measure(dataset, measure)
    memo: dict[SubsetIndices, float] = {}
    evaluations = 0

    def eval_loss(cand: SubsetIndices) -> float:
        nonlocal evaluations
        cached = memo.get(cand)
        if cached is None:
            cached = abs(subset_measure(dataset, cand.row_array(), cand.col_array(),
                                        measure) - full_value)
            memo[cand] = cached
            evaluations += 1
        return cached

    phi = params.population
    population = [random_subset(dataset, n, m, rng) for _ in range(phi)]
    losses = [eval_loss(c) for c in population]
    best_idx = int(np.argmin(losses))
    best, best_loss = population[best_idx], losses[best_idx]

    scored = list(zip(population, [-l for l in losses]))
    trace = [GenerationStats(0, -best_loss, float(np.mean([f for _, f in scored])))]

    generations_run = 0
    stale = 0
    for gen in range(1, params.generations + 1):
        generations_run = gen
        prev_best_fit = -best_loss

        pop = [c for c, _ in scored]
        mutate_mask = rng.random(phi) < params.mutation_prob
        pop = [
            mutate(c, dataset.n_rows, dataset.n_cols, dataset.target_col,
                   params.row_col_prob, rng) if hit else c
            for c, hit in zip(pop, mutate_mask)
        ]

        perm = rng.permutation(phi)
        crossed: list[Optional[SubsetIndices]] = [None] * phi
        for k in range(0, phi - 1, 2):
            i, j = int(perm[k]), int(perm[k + 1])
            crossed[i], crossed[j] = crossover(
                pop[i], pop[j], dataset.n_rows, dataset.n_cols,
                dataset.target_col, params.row_col_prob, rng)
        if phi % 2:
            leftover = int(perm[-1])
            crossed[leftover] = pop[leftover]

        scored = []
        for cand in crossed:
            l = eval_loss(cand)
            scored.append((cand, -l))
            if l < best_loss:
                best, best_loss = cand, l

        scored = select(scored, params.elite_fraction, rng)
        trace.append(GenerationStats(gen, -best_loss,
                                     float(np.mean([f for _, f in scored]))))

        improvement = (-best_loss) - prev_best_fit
        stale = stale + 1 if improvement < params.convergence_eps else 0
        if params.convergence_eps > 0 and stale >= params.convergence_patience:
            break

    return SearchResult(
        best=best, best_loss=best_loss, generations_run=generations_run,
        evaluations=evaluations, trace=trace,
        wall_time_s=time.perf_counter() - start, strategy="gendst")


def brute_force_dst(dataset: Dataset, measure: MeasureLike = "entropy",
                    n: Optional[int] = None, m: Optional[int] = None,
                    limit: int = 2_000_000) -> SearchResult:
    """Enumerate every valid n x m subset and return the global loss
    minimizer. Ties keep the first subset in enumeration order (column
    combinations outer, row combinations inner). Test oracle."""
    dn, dm = default_subset_size(dataset.n_rows, dataset.n_cols)
    n = n if n is not None else dn
    m = m if m is not None else dm
    if n > dataset.n_rows or m > dataset.n_cols:
        raise SizeTooLargeError(f"subset {n}x{m} exceeds dataset shape")
    total = math.comb(dataset.n_rows, n) * math.comb(dataset.n_cols - 1, m - 1)
    if total > limit:
        raise TooManyCombinationsError(f"{total} subsets exceed the limit {limit}")

    start = time.perf_counter()
    full_value = full_measure(dataset, measure)
    feature_cols = [c for c in range(dataset.n_cols) if c != dataset.target_col]
    best_rows = best_cols = None
    best_loss = math.inf
    for col_pick in combinations(feature_cols, m - 1):
        cols = np.array(sorted(col_pick + (dataset.target_col,)), dtype=np.int64)
        for row_pick in combinations(range(dataset.n_rows), n):
            rows = np.asarray(row_pick, dtype=np.int64)
            l = abs(subset_measure(dataset, rows, cols, measure) - full_value)
            if l < best_loss:
                best_loss = l
                best_rows, best_cols = row_pick, tuple(int(c) for c in cols)

    best = SubsetIndices(best_rows, best_cols)
    return SearchResult(
        best=best, best_loss=best_loss, generations_run=0, evaluations=total,
        wall_time_s=time.perf_counter() - start, strategy="brute_force")
