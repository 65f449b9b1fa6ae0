"""Vectorized numpy implementation of the ordered-transmission stopping rule.

Used when the compiled ``_kernels`` extension is unavailable. Results are
bit-identical to the compiled kernel: both accumulate the partial sums
sequentially in transmission order and evaluate thresholds with the same
floating-point expressions.
"""

import numpy as np


def transmission_order(values):
    """Row-wise permutation by descending ``|L|``, ties by ascending index."""
    return np.argsort(-np.abs(values), axis=1, kind="stable")


def ordered_stops(values, two_tau):
    """Return ``(stop_index, decision)`` for each row of ``values``.

    ``stop_index`` is the number of transmissions (1..K) and ``decision`` is
    1 for H1, 0 for H0.
    """
    L = np.ascontiguousarray(values, dtype=np.float64)
    if L.ndim != 2 or L.shape[1] == 0:
        raise ValueError("values must be a non-empty (n, K) array")
    n, K = L.shape
    order = transmission_order(L)
    ls = np.take_along_axis(L, order, axis=1)
    mags = np.abs(ls)
    partial = np.cumsum(ls, axis=1)
    remaining = (K - np.arange(1, K + 1)).astype(np.float64)
    upper = partial >= two_tau + remaining * mags
    lower = partial < two_tau - remaining * mags
    first = np.argmax(upper | lower, axis=1)
    rows = np.arange(n)
    return (first + 1).astype(np.int64), upper[rows, first].astype(np.int8)
