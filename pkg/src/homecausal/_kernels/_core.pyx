# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling/tabulation kernels.

Must stay bit-identical to homecausal._kernels._pyfallback: the same
SplitMix64 counter stream, the same uniform mapping ((bits >> 11) *
2**-53) and the same strict `u < p` comparison.
"""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15u
cdef uint64_t M1 = 0xBF58476D1CE4E5B9u
cdef uint64_t M2 = 0x94D049BB133111EBu
cdef double TWO_NEG53 = 2.0 ** -53


cdef inline uint64_t mix64(uint64_t z) nogil:
    z ^= z >> 30
    z *= M1
    z ^= z >> 27
    z *= M2
    return z ^ (z >> 31)


def sample_records(
    seed,
    int n,
    int m,
    cnp.ndarray[cnp.int64_t, ndim=1] parent_cols,
    cnp.ndarray[cnp.int64_t, ndim=1] parent_offsets,
    cnp.ndarray[cnp.float64_t, ndim=1] cpt_values,
    cnp.ndarray[cnp.int64_t, ndim=1] cpt_offsets,
    cnp.ndarray[cnp.int64_t, ndim=1] topo,
):
    """See homecausal._kernels._pyfallback.sample_records."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((n, m), dtype=np.uint8)
    if n == 0 or m == 0:
        return out
    cdef uint64_t useed = <uint64_t> (int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t base, bits
    cdef double u, p
    cdef int r, t, c, j, lo, hi
    cdef int64_t row
    cdef int n_topo = topo.shape[0]
    for r in range(n):
        base = useed + (<uint64_t> r * <uint64_t> m + 1u) * GOLDEN
        for t in range(n_topo):
            c = <int> topo[t]
            bits = mix64(base + <uint64_t> c * GOLDEN)
            u = <double> (bits >> 11) * TWO_NEG53
            lo = <int> parent_offsets[c]
            hi = <int> parent_offsets[c + 1]
            row = 0
            for j in range(hi - lo):
                row |= (<int64_t> out[r, <int> parent_cols[lo + j]]) << j
            p = cpt_values[<int> cpt_offsets[c] + row]
            out[r, c] = 1 if u < p else 0
    return out


def tabulate_pair(
    cnp.ndarray[cnp.uint8_t, ndim=2] values,
    int x_col,
    int y_col,
    cnp.ndarray[cnp.int64_t, ndim=1] filter_cols,
    cnp.ndarray[cnp.uint8_t, ndim=1] filter_vals,
):
    """See homecausal._kernels._pyfallback.tabulate_pair."""
    cdef cnp.ndarray[cnp.int64_t, ndim=2] counts = np.zeros((2, 2), dtype=np.int64)
    cdef int n = values.shape[0]
    cdef int nf = filter_cols.shape[0]
    cdef int r, f
    cdef bint keep
    for r in range(n):
        keep = True
        for f in range(nf):
            if values[r, <int> filter_cols[f]] != filter_vals[f]:
                keep = False
                break
        if keep:
            counts[values[r, x_col], values[r, y_col]] += 1
    return counts
