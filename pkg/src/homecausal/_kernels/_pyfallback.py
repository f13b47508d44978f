"""Pure-numpy kernels, bit-identical to the compiled extension.

Both backends consume the counter-based SplitMix64 stream documented in
:mod:`homecausal.rng`: the draw for record ``r`` and variable column ``c``
is stream output ``r * m + c``, and a value is sampled true when the
uniform lies strictly below the CPT row probability.  All arithmetic here
is exact (uint64 wraparound, power-of-two scaling), so the two backends
return identical arrays.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO_NEG53 = 2.0 ** -53


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> _S30)
    z = z * _M1
    z = z ^ (z >> _S27)
    z = z * _M2
    return z ^ (z >> _S31)


def sample_records(
    seed: int,
    n: int,
    m: int,
    parent_cols: np.ndarray,
    parent_offsets: np.ndarray,
    cpt_values: np.ndarray,
    cpt_offsets: np.ndarray,
    topo: np.ndarray,
) -> np.ndarray:
    """Ancestral-sample ``n`` records over ``m`` Boolean variables.

    Columns are in declared variable order; ``topo`` lists column indices
    in a valid evaluation order.  ``parent_cols[parent_offsets[c]:
    parent_offsets[c+1]]`` are the parent columns of column ``c`` (bit j of
    the CPT row index is the value of the j-th listed parent), and
    ``cpt_values[cpt_offsets[c]:cpt_offsets[c+1]]`` its row probabilities.
    """
    out = np.zeros((n, m), dtype=np.uint8)
    if n == 0 or m == 0:
        return out
    mask = (1 << 64) - 1
    base = (
        np.arange(n, dtype=np.uint64) * np.uint64(m) + np.uint64(1)
    ) * _GOLDEN + np.uint64(int(seed) & mask)
    golden_int = int(_GOLDEN)
    for c in map(int, topo):
        bits = _mix64(base + np.uint64((c * golden_int) & mask))
        u = (bits >> _S11).astype(np.float64) * _TWO_NEG53
        lo, hi = int(parent_offsets[c]), int(parent_offsets[c + 1])
        rows = np.zeros(n, dtype=np.int64)
        for j in range(hi - lo):
            rows |= out[:, int(parent_cols[lo + j])].astype(np.int64) << j
        p = cpt_values[int(cpt_offsets[c]) + rows]
        out[:, c] = u < p
    return out


def tabulate_pair(
    values: np.ndarray,
    x_col: int,
    y_col: int,
    filter_cols: np.ndarray,
    filter_vals: np.ndarray,
) -> np.ndarray:
    """2x2 co-occurrence counts of columns ``x_col`` (rows) and ``y_col``
    (columns) over the records matching the filter assignment."""
    mask = np.ones(values.shape[0], dtype=bool)
    for fc, fv in zip(filter_cols, filter_vals):
        mask &= values[:, int(fc)] == fv
    x = values[mask, x_col].astype(np.int64)
    y = values[mask, y_col].astype(np.int64)
    counts = np.bincount(2 * x + y, minlength=4)
    return counts.reshape(2, 2).astype(np.int64)
