# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled entropy kernel. Subset searches evaluate this millions of times,
so the counting loop runs without the interpreter."""
from libc.math cimport log2
from libc.stdlib cimport calloc, free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()


def mean_entropy(const cnp.int32_t[:, ::1] colmajor, const cnp.int32_t[:] dict_sizes,
                 rows, const cnp.int64_t[:] cols):
    """Mean per-column Shannon entropy (base 2) of a row/column subset.

    Matches substrat._kernels.entropy_py.mean_entropy; rows=None means all.
    """
    if rows is None:
        rows = np.arange(colmajor.shape[1], dtype=np.int64)
    cdef const cnp.int64_t[:] row_idx = rows
    cdef Py_ssize_t n_rows = row_idx.shape[0]
    cdef Py_ssize_t n_cols = cols.shape[0]
    if n_rows == 0 or n_cols == 0:
        raise ValueError("empty subset")

    cdef Py_ssize_t j, i, t
    cdef cnp.int64_t c
    cdef cnp.int32_t s
    cdef int max_dict = 0
    for j in range(n_cols):
        if dict_sizes[cols[j]] > max_dict:
            max_dict = dict_sizes[cols[j]]

    cdef long* counts = <long*> calloc(max_dict, sizeof(long))
    cdef cnp.int32_t* touched = <cnp.int32_t*> malloc(n_rows * sizeof(cnp.int32_t))
    if counts == NULL or touched == NULL:
        free(counts)
        free(touched)
        raise MemoryError()

    cdef double total = 0.0, col_ent, p
    cdef Py_ssize_t n_touched
    cdef double inv_n = 1.0 / n_rows
    try:
        with nogil:
            for j in range(n_cols):
                c = cols[j]
                n_touched = 0
                for i in range(n_rows):
                    s = colmajor[c, row_idx[i]]
                    if counts[s] == 0:
                        touched[n_touched] = s
                        n_touched += 1
                    counts[s] += 1
                col_ent = 0.0
                for t in range(n_touched):
                    p = counts[touched[t]] * inv_n
                    col_ent -= p * log2(p)
                    counts[touched[t]] = 0  # reset for the next column
                total += col_ent
    finally:
        free(counts)
        free(touched)
    return total / n_cols
