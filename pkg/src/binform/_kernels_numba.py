"""numba implementations of the uint64 marching kernels.

Each kernel advances a forward-difference table of a polynomial's fractional
parts in 64-bit fixed point. Addition mod 2^64 is exact mod-1 arithmetic on
the top 64 fraction bits, so the only error is the initial truncation of each
table entry, amplified binomially; callers bound it via the segment schedule.

Tables are mutated in place; callers pass disposable copies.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U0 = np.uint64(0)


@njit(cache=True, nogil=True)
def march_values(table, out):
    """Write p(x0 + t) mod 1 (top-64 fixed point) for t = 0..len(out)-1."""
    d = table.shape[0] - 1
    for t in range(out.shape[0]):
        out[t] = table[0]
        for j in range(d):
            table[j] = table[j] + table[j + 1]


@njit(cache=True, nogil=True)
def march_min(table, n):
    """Min distance-to-integer over n marched values.

    Returns (dist, t) where dist = min(v, 2^64 - v) in 2^-64 units and t is
    the first offset attaining it.
    """
    d = table.shape[0] - 1
    best = np.uint64(0xFFFFFFFFFFFFFFFF)
    arg = np.int64(0)
    for t in range(n):
        v = table[0]
        w = _U0 - v
        dist = v if v < w else w
        if dist < best:
            best = dist
            arg = t
        for j in range(d):
            table[j] = table[j] + table[j + 1]
    return best, arg


@njit(cache=True, nogil=True)
def march_collect(table, n, thresh, out_idx):
    """Collect offsets whose distance-to-integer is <= thresh.

    Fills out_idx up to its capacity; returns the total number found (which
    may exceed the capacity -- the caller must then treat the run as a flood).
    """
    d = table.shape[0] - 1
    cap = out_idx.shape[0]
    cnt = 0
    for t in range(n):
        v = table[0]
        w = _U0 - v
        dist = v if v < w else w
        if dist <= thresh:
            if cnt < cap:
                out_idx[cnt] = t
            cnt += 1
        for j in range(d):
            table[j] = table[j] + table[j + 1]
    return cnt
