"""Pure-numpy entropy kernel: the fallback when the compiled extension is
unavailable. Same contract as entropy_fast.mean_entropy."""
import numpy as np


def mean_entropy(colmajor, dict_sizes, rows, cols):
    """Mean per-column Shannon entropy (base 2) of a row/column subset.

    colmajor: int32 array of shape (M, N), one interned column per row.
    dict_sizes: int32 array of per-column dictionary sizes.
    rows: int64 row indices, or None for all rows.
    cols: int64 column indices.
    """
    total = 0.0
    for c in cols:
        sym = colmajor[c] if rows is None else colmajor[c, rows]
        counts = np.bincount(sym, minlength=int(dict_sizes[c]))
        nz = counts[counts > 0]
        n = nz.sum()
        p = nz / n
        total -= float(p @ np.log2(p))
    return total / len(cols)
