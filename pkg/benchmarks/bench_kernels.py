#!/usr/bin/env python3
"""Benchmark the uint64 marching kernels: numba vs pure numpy.

Measures the inner loop of the box search (segmented ``march_min`` over a
polynomial difference table) and one end-to-end diagonal search per backend.
Backends must agree bit-for-bit on every measured quantity before a time is
reported.

Usage: python3 benchmarks/bench_kernels.py [--points N] [--repeats R] [--X X]
"""

from __future__ import annotations

import argparse
import time

from binform import kernels
from binform.fixedpoint import (
    SEARCH_EPS_BITS,
    build_table,
    fix_coeffs,
    iter_segments,
    segment_length,
)
from binform.numerics import PrecReal
from binform.search import DiagonalForm, min_fracpart_diagonal

_U64_MAX = (1 << 64) - 1


def _backends() -> list[str]:
    names = ["numpy"]
    try:
        kernels.use_backend("numba")
        names.insert(0, "numba")
    except ImportError as err:
        print(f"note: numba backend unavailable ({err}); timing numpy only")
    return names


def _march(coeffs, x0: int, n: int, seg: int, wide: int) -> tuple[int, int]:
    table = build_table(fix_coeffs(coeffs, wide), wide, x0)
    best, arg = _U64_MAX, 0
    for off, m, scratch in iter_segments(table, n, seg):
        b, a = kernels.march_min(scratch, m)
        if int(b) < best:
            best, arg = int(b), off + int(a)
    return best, arg


def _best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_march(n: int, repeats: int, names: list[str]) -> list[dict]:
    pi = PrecReal.named("pi").as_fraction()
    e = PrecReal.named("e").as_fraction()
    rows = []
    for k in (2, 3, 4):
        coeffs = [e] + [0] * (k - 1) + [pi]       # pi x^k + e, one search row
        wide = max(256, k * max(2, n.bit_length()) + 96)
        seg = segment_length(k, SEARCH_EPS_BITS)
        results, times = {}, {}
        for name in names:
            kernels.use_backend(name)
            results[name] = _march(coeffs, 1, n, seg, wide)  # also warms JIT
            times[name] = _best_time(
                lambda: _march(coeffs, 1, n, seg, wide), repeats)
        assert len(set(results.values())) == 1, results  # bit-identical
        rows.append({"bench": f"march_min k={k}", "n": n, "times": times})
    return rows


def bench_search(X: int, repeats: int, names: list[str]) -> dict:
    d = DiagonalForm(alpha=PrecReal.named("sqrt2"),
                     beta=PrecReal.named("sqrt3"), k=2)
    results, times = {}, {}
    for name in names:
        kernels.use_backend(name)
        results[name] = min_fracpart_diagonal(d, X, X).to_dict()
        times[name] = _best_time(lambda: min_fracpart_diagonal(d, X, X),
                                 repeats)
    assert len({repr(r) for r in results.values()}) == 1, results
    return {"bench": f"diagonal search X={X}", "n": X * X + 2 * X,
            "times": times}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=5_000_000,
                    help="points per march_min row (default 5e6)")
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repeats, best kept (default 3)")
    ap.add_argument("--X", type=int, default=3000,
                    help="box side for the end-to-end search (default 3000)")
    args = ap.parse_args()

    names = _backends()
    rows = bench_march(args.points, args.repeats, names)
    rows.append(bench_search(args.X, args.repeats, names))

    width = max(len(r["bench"]) for r in rows)
    header = f"{'benchmark':<{width}}  {'points':>12}"
    for name in names:
        header += f"  {name + ' ns/pt':>14}"
    if len(names) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for r in rows:
        line = f"{r['bench']:<{width}}  {r['n']:>12,}"
        per = {nm: r["times"][nm] / r["n"] * 1e9 for nm in names}
        for nm in names:
            line += f"  {per[nm]:>14.2f}"
        if len(names) == 2:
            line += f"  {per[names[1]] / per[names[0]]:>7.1f}x"
        print(line)
    print("\nbackends agreed bit-for-bit on every benchmark")


if __name__ == "__main__":
    main()
