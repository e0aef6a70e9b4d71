"""Seeded synthetic tabular data for tests: categorical columns with varied
cardinality and skew, optionally correlated with a class label."""
import csv

import numpy as np

from substrat.dataset import Dataset, load_csv


def synth_table(n_rows, n_cols, seed, *, classes=2, signal=0.0, max_card=12,
                min_card=2, skew=(0.2, 1.5), log_card=False):
    """(header, rows) with n_cols-1 feature columns and a trailing label.

    signal is the per-cell probability that a feature repeats a
    class-specific preferred symbol; 0 gives label-independent columns.
    Column cardinalities and skews vary to spread the per-column entropies;
    log_card samples cardinalities log-uniformly (gives some columns whose
    full entropy no small row subset can match, a hard search landscape).
    """
    rng = np.random.default_rng(seed)
    header = [f"f{j}" for j in range(n_cols - 1)] + ["label"]
    y = rng.integers(classes, size=n_rows)
    feature_cols = []
    for j in range(n_cols - 1):
        if log_card:
            card = int(np.exp(rng.uniform(np.log(min_card), np.log(max_card))))
        else:
            card = int(rng.integers(min_card, max_card + 1))
        base = (np.arange(card) + 1.0) ** -rng.uniform(*skew)
        base /= base.sum()
        col = rng.choice(card, size=n_rows, p=base)
        if signal > 0:
            preferred = (j + y) % card
            col = np.where(rng.random(n_rows) < signal, preferred, col)
        feature_cols.append(col)
    rows = [
        [f"v{feature_cols[j][i]}" for j in range(n_cols - 1)] + [f"c{y[i]}"]
        for i in range(n_rows)
    ]
    return header, rows


def hard_synth_dataset(n_rows, n_cols, seed, tmp_path=None):
    """Search-resistant profile: log-uniform cardinalities up to well past
    sqrt(n_rows) with strong skews, so near-zero losses are rare and
    adaptive search has room to beat random draws."""
    return synth_dataset(n_rows, n_cols, seed, tmp_path=tmp_path,
                         min_card=8, max_card=120, skew=(0.3, 1.2),
                         log_card=True)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return str(path)


def synth_csv(path, n_rows, n_cols, seed, **kw):
    header, rows = synth_table(n_rows, n_cols, seed, **kw)
    return write_csv(path, header, rows)


def synth_dataset(n_rows, n_cols, seed, tmp_path=None, **kw) -> Dataset:
    import tempfile

    header, rows = synth_table(n_rows, n_cols, seed, **kw)
    if tmp_path is not None:
        path = str(tmp_path / f"synth-{n_rows}x{n_cols}-{seed}.csv")
    else:
        path = tempfile.mktemp(suffix=".csv", prefix="substrat-synth-")
    write_csv(path, header, rows)
    return load_csv(path, "label", name=f"synth-{n_rows}x{n_cols}-{seed}")
