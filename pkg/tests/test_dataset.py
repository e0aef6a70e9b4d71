import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from substrat.dataset import (
    CATEGORICAL,
    MISSING_TOKEN,
    NUMERIC_AS_SYMBOL,
    NUMERIC_BINNED,
    SubsetIndices,
    default_subset_size,
    load_csv,
    random_subset,
    view,
)
from substrat.errors import (
    EmptyFileError,
    IndexOutOfRangeError,
    MissingTargetError,
    RaggedRowsError,
    SizeTooLargeError,
    TargetMissingError,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoadCsv:
    def test_flight_reviews_shape(self, flight_reviews):
        assert flight_reviews.n_rows == 10
        assert flight_reviews.n_cols == 5
        assert flight_reviews.target_col == 4
        assert flight_reviews.column_names == ("Age", "Gender", "FlightDistance",
                                       "Delay", "Satisfied")

    def test_interning_round_trips(self, flight_reviews, flight_csv):
        with open(flight_csv, newline="") as fh:
            raw = list(csv.reader(fh))[1:]
        for i in range(flight_reviews.n_rows):
            for j in range(flight_reviews.n_cols):
                assert flight_reviews.cell(i, j) == raw[i][j]

    def test_numeric_kind_detected(self, flight_reviews):
        assert all(c.declared_kind == NUMERIC_AS_SYMBOL for c in flight_reviews.columns)

    def test_minimal_file(self, tmp_path):
        path = write(tmp_path / "mini.csv", "a,b\nx,1\n")
        ds = load_csv(path, "b")
        assert ds.shape == (1, 2)

    def test_header_only_is_empty(self, tmp_path):
        path = write(tmp_path / "empty.csv", "a,b\n")
        with pytest.raises(EmptyFileError):
            load_csv(path, "b")

    def test_zero_byte_file(self, tmp_path):
        path = write(tmp_path / "zero.csv", "")
        with pytest.raises(EmptyFileError):
            load_csv(path, "b")

    def test_missing_target(self, tmp_path):
        path = write(tmp_path / "t.csv", "a,b\nx,1\n")
        with pytest.raises(MissingTargetError):
            load_csv(path, "nope")

    def test_ragged_rows(self, tmp_path):
        path = write(tmp_path / "r.csv", "a,b\nx,1\ny\n")
        with pytest.raises(RaggedRowsError):
            load_csv(path, "b")

    def test_duplicate_column_names(self, tmp_path):
        path = write(tmp_path / "d.csv", "a,a\nx,1\n")
        with pytest.raises(ValueError):
            load_csv(path, "a")

    def test_missing_cells_get_dedicated_symbol(self, tmp_path):
        path = write(tmp_path / "m.csv", "a,b\n,1\nx,0\n")
        ds = load_csv(path, "b")
        assert ds.cell(0, 0) == MISSING_TOKEN
        assert ds.columns[0].declared_kind == CATEGORICAL

    def test_binning(self, tmp_path):
        vals = "\n".join(f"{x / 10},1" for x in range(100))
        path = write(tmp_path / "b.csv", "x,y\n" + vals + "\n")
        ds = load_csv(path, "y", bins=4)
        assert ds.columns[0].declared_kind == NUMERIC_BINNED
        assert ds.columns[0].dict_size == 4
        # target column is never binned
        assert ds.columns[1].declared_kind == NUMERIC_AS_SYMBOL

    def test_custom_delimiter(self, tmp_path):
        path = write(tmp_path / "s.csv", "a;b\nx;1\n")
        ds = load_csv(path, "b", delimiter=";")
        assert ds.shape == (1, 2)


class TestSubsetIndices:
    def test_canonical_sorted(self):
        s = SubsetIndices((3, 1, 2), (4, 0))
        assert s.rows == (1, 2, 3)
        assert s.cols == (0, 4)

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            SubsetIndices((1, 1), (0, 2))

    def test_too_few_cols_rejected(self):
        with pytest.raises(ValueError):
            SubsetIndices((0,), (1,))

    def test_equality_and_hash(self):
        assert SubsetIndices((2, 1), (0, 3)) == SubsetIndices((1, 2), (3, 0))
        assert len({SubsetIndices((1, 2), (0, 3)), SubsetIndices((2, 1), (3, 0))}) == 1

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_random_subset_invariants(self, seed):
        rng = np.random.default_rng(seed)
        n_total, m_total = int(rng.integers(1, 30)), int(rng.integers(2, 12))
        target = int(rng.integers(m_total))
        n = int(rng.integers(1, n_total + 1))
        m = int(rng.integers(2, m_total + 1))

        class Dims:  # minimal stand-in with the fields random_subset reads
            n_rows, n_cols, target_col = n_total, m_total, target

        s = random_subset(Dims, n, m, rng)
        assert len(set(s.rows)) == s.n == n
        assert len(set(s.cols)) == s.m == m
        assert s.rows == tuple(sorted(s.rows))
        assert s.cols == tuple(sorted(s.cols))
        assert 0 <= s.rows[0] and s.rows[-1] < n_total
        assert 0 <= s.cols[0] and s.cols[-1] < m_total
        assert target in s.cols


class TestRandomSubset:
    def test_full_draw_is_identity(self, flight_reviews, rng):
        s = random_subset(flight_reviews, 10, 5, rng)
        assert s == flight_reviews.full_indices()

    def test_seed_determinism(self, flight_reviews):
        a = random_subset(flight_reviews, 5, 3, np.random.default_rng(9))
        b = random_subset(flight_reviews, 5, 3, np.random.default_rng(9))
        assert a == b

    def test_target_always_included(self, flight_reviews):
        for seed in range(50):
            s = random_subset(flight_reviews, 5, 3, np.random.default_rng(seed))
            assert flight_reviews.target_col in s.cols

    def test_size_too_large(self, flight_reviews, rng):
        with pytest.raises(SizeTooLargeError):
            random_subset(flight_reviews, 11, 3, rng)
        with pytest.raises(SizeTooLargeError):
            random_subset(flight_reviews, 5, 6, rng)


class TestView:
    def test_identity_view_equals_dataset(self, flight_reviews):
        v = view(flight_reviews, flight_reviews.full_indices())
        for i in range(10):
            for j in range(5):
                assert v.cell(i, j) == flight_reviews.cell(i, j)

    def test_near_subset_view(self, flight_reviews):
        near = SubsetIndices((0, 1, 2, 5, 7), (0, 3, 4))
        v = view(flight_reviews, near)
        assert (v.n_rows, v.n_cols) == (5, 3)
        assert v.column_names == ("Age", "Delay", "Satisfied")
        assert [v.cell(i, 0) for i in range(5)] == ["25", "62", "25", "41", "25"]

    def test_view_without_target_rejected(self, flight_reviews):
        with pytest.raises(TargetMissingError):
            view(flight_reviews, SubsetIndices((0, 1), (0, 1)))

    def test_view_out_of_range(self, flight_reviews):
        with pytest.raises(IndexOutOfRangeError):
            view(flight_reviews, SubsetIndices((0, 99), (0, 4)))

    def test_csv_round_trip(self, flight_reviews, tmp_path):
        near = SubsetIndices((0, 1, 2, 5, 7), (0, 3, 4))
        out = tmp_path / "near.csv"
        view(flight_reviews, near).to_csv(out)
        ds = load_csv(str(out), "Satisfied")
        assert ds.shape == (5, 3)
        assert ds.cell(1, 0) == "62"


class TestDefaultSize:
    @pytest.mark.parametrize("n_rows,n_cols,expect", [
        (10000, 20, (100, 5)),
        (10, 5, (3, 2)),       # round(sqrt(10))=3, max(2, round(1.25))=2
        (1000, 12, (32, 3)),
        (100, 8, (10, 2)),
        (4, 10, (2, 3)),       # 0.25*10=2.5 rounds half-up to 3
    ])
    def test_policy(self, n_rows, n_cols, expect):
        assert default_subset_size(n_rows, n_cols) == expect
