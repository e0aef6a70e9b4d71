#!/usr/bin/env python3
"""Independent recomputation of every frozen constant in the test suite.

Uses only hash-map counting over raw CSV text (no interning, no numpy, none
of the library's code paths), so it can arbitrate if the fast kernels ever
drift. Run from the repo root; compare the output against the constants in
tests/test_measures.py and tests/test_baselines.py.
"""
import csv
import itertools
import math
import os
from collections import Counter

CSV_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir,
                        "tests", "data", "flight_reviews.csv")


def load(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    return header, rows


def column_entropy(values):
    n = len(values)
    return -sum(c / n * math.log2(c / n) for c in Counter(values).values())


def view_entropy(rows, row_idx, col_idx):
    terms = [column_entropy([rows[i][j] for i in row_idx]) for j in col_idx]
    return sum(terms) / len(terms)


def info_gain(rows, col, target):
    h_target = column_entropy([r[target] for r in rows])
    groups = {}
    for r in rows:
        groups.setdefault(r[col], []).append(r[target])
    h_cond = sum(len(g) / len(rows) * column_entropy(g) for g in groups.values())
    return h_target - h_cond


def main():
    header, rows = load(CSV_PATH)
    target = header.index("Satisfied")
    all_rows = range(len(rows))
    all_cols = range(len(header))

    print("full-dataset per-column entropies:")
    for j, name in enumerate(header):
        print(f"  {name}: {column_entropy([r[j] for r in rows]):.6f}")
    h_full = view_entropy(rows, all_rows, all_cols)
    print(f"mean entropy: {h_full:.6f}")

    near_rows, near_cols = (0, 1, 2, 5, 7), (0, 3, 4)
    far_rows, far_cols = (3, 4, 6, 8, 9), (1, 2, 4)
    print("\nreference subsets:")
    for j in near_cols:
        print(f"  near {header[j]}: "
              f"{column_entropy([rows[i][j] for i in near_rows]):.6f}")
    h_near = view_entropy(rows, near_rows, near_cols)
    h_far = view_entropy(rows, far_rows, far_cols)
    print(f"  near mean: {h_near:.6f}  loss: {abs(h_near - h_full):.6f}")
    print(f"  far mean:   {h_far:.6f}  loss: {abs(h_far - h_full):.6f}")

    best_loss = min(
        abs(view_entropy(rows, r, tuple(sorted(c + (target,)))) - h_full)
        for r in itertools.combinations(all_rows, 5)
        for c in itertools.combinations([j for j in all_cols if j != target], 2))
    print(f"\nexhaustive 5x3 optimum loss: {best_loss:.6f} "
          f"(near attains it: {abs(best_loss - abs(h_near - h_full)) < 1e-12})")

    print("\ninformation gain vs target:")
    gains = sorted(((info_gain(rows, j, target), j) for j in all_cols
                    if j != target), key=lambda t: (-t[0], t[1]))
    for g, j in gains:
        print(f"  {header[j]}: {g:.6f}")
    print(f"ranking: {[j for _, j in gains]}")


if __name__ == "__main__":
    main()
