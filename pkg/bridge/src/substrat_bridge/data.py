"""CSV loading for the bridge: all cells are treated as categorical strings,
matching the symbol-table semantics of the data files the pipeline exports."""
import csv

import numpy as np


def load_table(path: str, target: str):
    """Returns (feature_names, X, y): X is an object array of strings with
    the target column removed, y the target column."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        rows = list(reader)
    if header is None or not rows:
        raise ValueError(f"{path}: empty data file")
    if target not in header:
        raise ValueError(f"target {target!r} not in header")
    t = header.index(target)
    data = np.array(rows, dtype=object)
    mask = np.arange(len(header)) != t
    return [h for i, h in enumerate(header) if i != t], data[:, mask], data[:, t]
