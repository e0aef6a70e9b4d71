import math

import numpy as np
import pytest

from substrat.dataset import SubsetIndices, load_csv, random_subset
from substrat.errors import (
    EmptyPopulationError,
    IncompatibleShapesError,
    SizeTooLargeError,
    TooManyCombinationsError,
)
from substrat.gendst import (
    GaParams,
    brute_force_dst,
    crossover,
    mutate,
    run_gendst,
    select,
)
from substrat.measures import loss
from synth import synth_dataset

NEAR_SUBSET = SubsetIndices((0, 1, 2, 5, 7), (0, 3, 4))


def check_valid(s, n_total, m_total, target, n, m):
    assert s.n == n and s.m == m
    assert len(set(s.rows)) == n and len(set(s.cols)) == m
    assert 0 <= s.rows[0] and s.rows[-1] < n_total
    assert 0 <= s.cols[0] and s.cols[-1] < m_total
    assert target in s.cols


class TestMutate:
    def test_saturated_rows_unchanged(self):
        cand = SubsetIndices((0, 1, 2), (0, 1))
        out = mutate(cand, 3, 4, 1, p_rc=1.0, rng=np.random.default_rng(0))
        assert out == cand

    def test_saturated_cols_unchanged(self):
        cand = SubsetIndices((0, 1), (0, 1, 2))
        out = mutate(cand, 5, 3, 1, p_rc=0.0, rng=np.random.default_rng(0))
        assert out == cand

    def test_two_row_enumeration(self):
        # first two of three rows: the only legal mutations swap one of them
        # for the remaining row
        cand = SubsetIndices((0, 1), (0, 1))
        seen = set()
        for seed in range(200):
            out = mutate(cand, 3, 2, 0, p_rc=1.0, rng=np.random.default_rng(seed))
            seen.add(out.rows)
        assert seen == {(0, 2), (1, 2)}

    def test_target_never_mutated(self):
        rng = np.random.default_rng(7)
        cand = SubsetIndices((0, 2, 4), (1, 3, 5))
        for _ in range(500):
            out = mutate(cand, 8, 7, 3, p_rc=0.0, rng=rng)
            assert 3 in out.cols
            cand = out

    def test_exactly_one_index_changes(self):
        rng = np.random.default_rng(42)
        n_total, m_total, target = 12, 6, 2
        cand = random_subset(_dims(n_total, m_total, target), 5, 3, rng)
        for _ in range(10_000):
            out = mutate(cand, n_total, m_total, target, p_rc=0.5, rng=rng)
            check_valid(out, n_total, m_total, target, 5, 3)
            row_diff = len(set(out.rows) ^ set(cand.rows))
            col_diff = len(set(out.cols) ^ set(cand.cols))
            assert (row_diff, col_diff) in ((2, 0), (0, 2))  # one swapped index
            cand = out


def _dims(n_rows, n_cols, target_col):
    class Dims:
        pass

    Dims.n_rows, Dims.n_cols, Dims.target_col = n_rows, n_cols, target_col
    return Dims


class TestCrossover:
    def test_identical_parents_closed(self):
        # shared positional split: crossing a candidate with itself is identity
        a = SubsetIndices((0, 2, 5, 7), (1, 3, 4))
        for seed in range(100):
            c1, c2 = crossover(a, a, 10, 6, 3, p_rc=0.5,
                               rng=np.random.default_rng(seed))
            assert c1 == a and c2 == a

    def test_m2_no_legal_split(self):
        a = SubsetIndices((0, 1), (0, 2))
        b = SubsetIndices((2, 3), (1, 2))
        c1, c2 = crossover(a, b, 6, 3, 2, p_rc=0.0, rng=np.random.default_rng(0))
        assert (c1, c2) == (a, b)

    def test_incompatible_shapes(self):
        a = SubsetIndices((0, 1), (0, 1))
        b = SubsetIndices((0, 1, 2), (0, 1))
        with pytest.raises(IncompatibleShapesError):
            crossover(a, b, 5, 3, 0, p_rc=0.5, rng=np.random.default_rng(0))

    def test_structural_validity_bulk(self):
        rng = np.random.default_rng(3)
        n_total, m_total, target = 15, 7, 4
        dims = _dims(n_total, m_total, target)
        for _ in range(10_000):
            a = random_subset(dims, 6, 4, rng)
            b = random_subset(dims, 6, 4, rng)
            c1, c2 = crossover(a, b, n_total, m_total, target, p_rc=0.5, rng=rng)
            check_valid(c1, n_total, m_total, target, 6, 4)
            check_valid(c2, n_total, m_total, target, 6, 4)

    def test_offspring_anchor_rows_on_column_cross(self):
        rng = np.random.default_rng(11)
        dims = _dims(20, 8, 0)
        for _ in range(200):
            a = random_subset(dims, 5, 4, rng)
            b = random_subset(dims, 5, 4, rng)
            c1, c2 = crossover(a, b, 20, 8, 0, p_rc=0.0, rng=rng)  # force columns
            assert c1.rows == a.rows and c2.rows == b.rows


class TestSelect:
    def _population(self, k):
        # k candidates with fitness -i (candidate 0 is best)
        return [(SubsetIndices((i, i + 1), (0, 1)), -float(i)) for i in range(k)]

    def test_alpha_one_full_elitism(self):
        pop = self._population(10)
        out = select(pop, elite_fraction=1.0, rng=np.random.default_rng(0))
        assert out == sorted(pop, key=lambda t: -t[1])

    def test_population_size_preserved(self):
        pop = self._population(23)
        out = select(pop, elite_fraction=0.1, rng=np.random.default_rng(0))
        assert len(out) == 23

    def test_top_candidates_pass(self):
        pop = self._population(20)
        out = select(pop, elite_fraction=0.25, rng=np.random.default_rng(5))
        n_elite = math.ceil(0.25 * 20)
        assert [f for _, f in out[:n_elite]] == [-float(i) for i in range(n_elite)]

    def test_zero_loss_candidate_survives(self):
        pop = self._population(20)  # candidate 0 has fitness 0 == zero loss
        best = pop[0]
        for seed in range(50):
            out = select(pop, elite_fraction=0.05, rng=np.random.default_rng(seed))
            assert best in out

    def test_empty_population(self):
        with pytest.raises(EmptyPopulationError):
            select([], 0.5, np.random.default_rng(0))

    def test_fitter_sampled_more_often(self):
        pop = self._population(10)
        rng = np.random.default_rng(77)
        n_elite = math.ceil(0.1 * 10)  # candidate 0 is the elite
        best_nonelite, worst = 0, 0
        for _ in range(1000):
            out = select(pop, elite_fraction=0.1, rng=rng)
            sampled = out[n_elite:]
            best_nonelite += sum(1 for c, _ in sampled if c == pop[1][0])
            worst += sum(1 for c, _ in sampled if c == pop[9][0])
        assert best_nonelite > worst


class TestRunGendst:
    def test_full_size_zero_loss_immediately(self, flight_reviews):
        params = GaParams(generations=1, population=4, subset_rows=10,
                          subset_cols=5, seed=0)
        res = run_gendst(flight_reviews, "entropy", params)
        assert res.best_loss == 0.0
        assert res.trace[0].best_fitness == 0.0

    def test_seed_determinism(self, flight_reviews):
        params = GaParams(generations=10, population=20, subset_rows=5,
                          subset_cols=3, seed=123)
        a = run_gendst(flight_reviews, "entropy", params)
        b = run_gendst(flight_reviews, "entropy", params)
        assert a.best == b.best
        assert a.best_loss == b.best_loss
        assert a.evaluations == b.evaluations
        assert [(t.best_fitness, t.mean_fitness) for t in a.trace] == \
               [(t.best_fitness, t.mean_fitness) for t in b.trace]

    def test_trace_monotone_and_loss_recomputes(self, flight_reviews):
        params = GaParams(generations=25, population=16, subset_rows=4,
                          subset_cols=3, seed=5)
        res = run_gendst(flight_reviews, "entropy", params)
        fits = [t.best_fitness for t in res.trace]
        assert all(b >= a for a, b in zip(fits, fits[1:]))
        assert res.best_loss == pytest.approx(loss(flight_reviews, res.best), abs=1e-12)
        assert res.best_loss <= -res.trace[0].best_fitness + 1e-15

    def test_convergence_early_stop(self, flight_reviews):
        params = GaParams(generations=200, population=12, subset_rows=5,
                          subset_cols=3, seed=2, convergence_eps=1e-12)
        res = run_gendst(flight_reviews, "entropy", params)
        assert res.generations_run < 200

    def test_size_too_large(self, flight_reviews):
        with pytest.raises(SizeTooLargeError):
            run_gendst(flight_reviews, "entropy", GaParams(subset_rows=11, subset_cols=3))

    def test_param_validation(self):
        with pytest.raises(ValueError):
            GaParams(population=1).validate()
        with pytest.raises(ValueError):
            GaParams(mutation_prob=1.5).validate()

    def test_reaches_oracle_on_small_instance(self, tmp_path):
        ds = synth_dataset(8, 4, seed=21, tmp_path=tmp_path)
        oracle = brute_force_dst(ds, "entropy", 3, 2)
        hits = 0
        for seed in range(10):
            res = run_gendst(ds, "entropy", GaParams(
                generations=60, population=30, subset_rows=3, subset_cols=2,
                seed=seed))
            hits += res.best_loss <= oracle.best_loss + 0.01
        assert hits >= 9


class TestBruteForce:
    def test_near_attains_optimum(self, flight_reviews):
        res = brute_force_dst(flight_reviews, "entropy", 5, 3)
        assert res.evaluations == 1512  # C(10,5) * C(4,2)
        # the optimum is exactly the near subset's loss (ties exist)
        assert res.best_loss == pytest.approx(loss(flight_reviews, NEAR_SUBSET), abs=1e-12)
        assert res.best_loss == pytest.approx(0.025, abs=0.005)

    def test_full_size_zero(self, flight_reviews):
        res = brute_force_dst(flight_reviews, "entropy", 10, 5)
        assert res.best_loss == 0.0
        assert res.best == flight_reviews.full_indices()

    def test_limit(self, flight_reviews):
        with pytest.raises(TooManyCombinationsError):
            brute_force_dst(flight_reviews, "entropy", 5, 3, limit=100)

    def test_oracle_dominates_random_draws(self, tmp_path):
        header = ["a", "b", "label"]
        rows = [["x", "p", "0"], ["x", "p", "0"], ["y", "q", "1"],
                ["z", "q", "1"], ["y", "r", "0"], ["w", "p", "1"]]
        from synth import write_csv
        path = write_csv(tmp_path / "dup.csv", header, rows)
        ds = load_csv(str(path), "label")
        oracle = brute_force_dst(ds, "entropy", 3, 2)
        rng = np.random.default_rng(0)
        for _ in range(100):
            s = random_subset(ds, 3, 2, rng)
            assert oracle.best_loss <= loss(ds, s) + 1e-12
