"""Pure-numpy implementations of the uint64 marching kernels.

Value t of a marched difference table is sum_j C(t, j) * D_j mod 2^64, which
an iterated wrapped cumulative sum reproduces exactly: uint64 addition is
modular, so these kernels are bit-identical to the serial numba marchers.

As with the numba backend, the input table is scratch: its contents after a
call are unspecified.
"""

from __future__ import annotations

import numpy as np

_U0 = np.uint64(0)


def _values(table: np.ndarray, n: int) -> np.ndarray:
    d = table.shape[0] - 1
    out = np.full(n, table[d], dtype=np.uint64)
    if d == 0:
        return out
    tmp = np.empty(n, dtype=np.uint64)
    for j in range(d - 1, -1, -1):
        # exclusive prefix sum: cumsum(out) - out, all mod 2^64
        tmp[:] = out
        np.cumsum(out, out=out)
        out -= tmp
        out += table[j]
    return out


def march_values(table, out):
    out[:] = _values(table, out.shape[0])


def march_min(table, n):
    vals = _values(table, n)
    dist = np.minimum(vals, _U0 - vals)
    arg = int(np.argmin(dist))
    return dist[arg], np.int64(arg)


def march_collect(table, n, thresh, out_idx):
    vals = _values(table, n)
    dist = np.minimum(vals, _U0 - vals)
    idx = np.nonzero(dist <= thresh)[0]
    cnt = idx.shape[0]
    cap = out_idx.shape[0]
    k = min(cnt, cap)
    out_idx[:k] = idx[:k]
    return cnt
