# cython: language_level=3, boundscheck=False, wraparound=False
"""Batch steps-to-block kernel, compiled variant.

Must stay semantically identical to _mcsim_py; both operate on integers
only, so results are bit-for-bit interchangeable.
"""

from libc.stdint cimport int64_t, uint8_t
from libc.stdlib cimport free, malloc


def steps_to_block_batch(int64_t[:, ::1] orders,
                         uint8_t[:, ::1] covers,
                         int64_t threshold,
                         int64_t[::1] out):
    """Fill out[k] with the 1-based step at which trial k's mitigation
    order has applied `threshold` covering mitigations to every
    technique, or -1 if the full order never does.

    orders: (trials, m) permutations of row indices into covers.
    covers: (m, t) 0/1 incidence of mitigation rows over techniques.
    """
    cdef Py_ssize_t trials = orders.shape[0]
    cdef Py_ssize_t m = orders.shape[1]
    cdef Py_ssize_t t = covers.shape[1]
    cdef Py_ssize_t k, step, j, row, blocked
    cdef int64_t result
    cdef int64_t* counts = <int64_t*> malloc(t * sizeof(int64_t)) if t else NULL
    if t and counts == NULL:
        raise MemoryError()
    try:
        for k in range(trials):
            for j in range(t):
                counts[j] = 0
            blocked = 0
            result = -1
            for step in range(m):
                row = orders[k, step]
                for j in range(t):
                    if covers[row, j] and counts[j] < threshold:
                        counts[j] += 1
                        if counts[j] == threshold:
                            blocked += 1
                if blocked == t:
                    result = step + 1
                    break
            if t == 0:
                result = -1
            out[k] = result
    finally:
        if counts != NULL:
            free(counts)
