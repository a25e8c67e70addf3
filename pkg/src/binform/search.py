"""Exhaustive minimization of ||Psi(x, y)|| over integer boxes.

The engine runs two passes per box. Pass 1 marches every y-row with the
64-bit finite-difference kernels (certified per-value error E ulps, E fixed
by the segment schedule), recording each row's approximate minimum. Pass 2
revisits only the rows whose approximate minimum lies within 2E ulps of the
global approximate minimum, collects every position inside that window, and
re-evaluates the candidates in exact rational arithmetic; the winner is the
exact lexicographic minimum of (value, x, y). Ties therefore break toward
the smallest x, then the smallest y, and the result is identical for any
worker count or row order.

If the candidate window floods (more than FLOOD_CAP positions, which only
happens when the form takes near-zero values on a dense set, e.g. rational
coefficients), the engine abandons marching and scans the whole box in exact
arithmetic in tie-break order, stopping early at the first exact zero —
which no later point can beat.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .config import check_budget
from .errors import DomainError
from .fixedpoint import (
    SEARCH_EPS_BITS,
    build_table,
    err_ulps,
    fix_coeffs,
    iter_segments,
    segment_length,
)
from .forms import BinaryForm
from .numerics import PrecReal
from .smooth import enumerate_smooth

#: candidate ceiling before the engine falls back to the exact scan
FLOOD_CAP = 200_000


@dataclass(frozen=True)
class SearchBox:
    """0 <= x <= x_max, 0 <= y <= y_max, origin excluded.

    include_axes=False shrinks both lower bounds to 1. y_max=0 with axes
    included degenerates to the single row y=0 (x from 1).
    """

    x_max: int
    y_max: int
    include_axes: bool = True
    exclude_origin: bool = True

    def __post_init__(self):
        if self.x_max < 1:
            raise DomainError("x_max must be >= 1")
        if self.y_max < 0:
            raise DomainError("y_max must be >= 0")
        if not self.exclude_origin:
            raise DomainError("the origin is never a valid point")
        if not self.include_axes and self.y_max < 1:
            raise DomainError("an axes-free box needs y_max >= 1")

    def y_values(self) -> range:
        return range(0 if self.include_axes else 1, self.y_max + 1)

    def x_start(self, y: int) -> int:
        if y == 0:
            return 1  # origin exclusion; x=0 only meets y=0 at the origin
        return 0 if self.include_axes else 1

    def size(self) -> int:
        return sum(self.x_max - self.x_start(y) + 1 for y in self.y_values())

    def to_dict(self) -> dict:
        return {"x_max": self.x_max, "y_max": self.y_max,
                "include_axes": self.include_axes,
                "exclude_origin": self.exclude_origin}


@dataclass(frozen=True)
class SearchResult:
    best_x: int
    best_y: int
    min_value: float
    box: SearchBox
    evaluations: int
    elapsed_ms: float = 0.0
    provenance: str = "exhaustive"

    def to_dict(self) -> dict:
        return {"best_x": self.best_x, "best_y": self.best_y,
                "min_value": self.min_value, "box": self.box.to_dict(),
                "evaluations": self.evaluations,
                "provenance": self.provenance}


@dataclass(frozen=True)
class DiagonalForm:
    """The two-term form alpha * x^k + beta * y^k."""

    alpha: PrecReal
    beta: PrecReal
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise DomainError("a diagonal form needs k >= 2")

    def to_binary_form(self) -> BinaryForm:
        return BinaryForm(k=self.k, l=0, alpha_k=self.alpha,
                          lower_coeffs=(self.beta,))


def _coeff_fractions(f: BinaryForm) -> tuple[Fraction, list[Fraction]]:
    return (f.alpha_k.as_fraction(),
            [f.coeff(j).as_fraction() for j in range(f.l + 1)])


def _row_coeffs(top: Fraction, lowers: Sequence[Fraction], k: int, y: int
                ) -> list[Fraction]:
    """Coefficients (ascending powers of x) of Psi(x, y) at fixed y."""
    coeffs = [Fraction(0)] * (k + 1)
    coeffs[k] = top
    yp = y ** (k - len(lowers) + 1)  # y^(k-l)
    for j in reversed(range(len(lowers))):
        coeffs[j] += lowers[j] * yp
        yp *= y
    return coeffs


def _exact_dist(top: Fraction, lowers: Sequence[Fraction], k: int,
                x: int, y: int) -> Fraction:
    acc = top * x ** k
    for j, a in enumerate(lowers):
        if a:
            acc += a * x ** j * y ** (k - j)
    fp = acc - (acc.numerator // acc.denominator)
    return min(fp, 1 - fp)


_U64_MAX = (1 << 64) - 1


def _march_row(coeffs: list[Fraction], x0: int, n: int, seg: int,
               wide: int) -> tuple[int, int]:
    """(min uint64 distance, arg offset) over x = x0..x0+n-1."""
    table = build_table(fix_coeffs(coeffs, wide), wide, x0)
    best, arg = _U64_MAX, 0
    for off, m, scratch in iter_segments(table, n, seg):
        b, a = kernels.march_min(scratch, m)
        if int(b) < best:
            best, arg = int(b), off + int(a)
    return best, arg


def _collect_row(coeffs: list[Fraction], x0: int, n: int, seg: int,
                 wide: int, thresh: int, cap: int) -> list[int] | None:
    """Offsets with uint64 distance <= thresh; None when the row floods."""
    table = build_table(fix_coeffs(coeffs, wide), wide, x0)
    hits: list[int] = []
    scratch_idx = np.empty(min(n, cap) + 1, dtype=np.int64)
    t = np.uint64(thresh)
    for off, m, seg_scratch in iter_segments(table, n, seg):
        cnt = int(kernels.march_collect(seg_scratch, m, t, scratch_idx))
        if cnt > scratch_idx.size:
            return None
        hits.extend(int(i) + off for i in scratch_idx[:cnt])
        if len(hits) > cap:
            return None
    return hits


def _exact_scan(top: Fraction, lowers: Sequence[Fraction], k: int,
                rows: Sequence[tuple[int, int, int]]
                ) -> tuple[Fraction, int, int, int]:
    """Tie-break-ordered exact scan; stops at the first exact zero.

    Returns (value, x, y, points_scanned).
    """
    best: tuple[Fraction, int, int] | None = None
    scanned = 0
    x_lo = min(x0 for _, x0, _ in rows)
    x_hi = max(x0 + n - 1 for _, x0, n in rows)
    for x in range(x_lo, x_hi + 1):
        for y, x0, n in rows:
            if not x0 <= x < x0 + n:
                continue
            scanned += 1
            d = _exact_dist(top, lowers, k, x, y)
            cand = (d, x, y)
            if best is None or cand < best:
                best = cand
                if d == 0:
                    return best[0], best[1], best[2], scanned
    assert best is not None
    return best[0], best[1], best[2], scanned


def _minimize(f: BinaryForm, rows: Sequence[tuple[int, int, int]],
              box: SearchBox, workers: int, provenance: str
              ) -> SearchResult:
    """Core two-pass engine over rows = [(y, x_start, length), ...]."""
    t0 = time.perf_counter()
    top, lowers = _coeff_fractions(f)
    k = f.k
    total = sum(n for _, _, n in rows)
    x_hi = max(x0 + n for _, x0, n in rows)
    wide = max(256, k * max(2, x_hi.bit_length()) + 96)
    seg = segment_length(k, SEARCH_EPS_BITS)
    E = err_ulps(k, seg)

    def pass1(row: tuple[int, int, int]) -> tuple[int, int]:
        y, x0, n = row
        return _march_row(_row_coeffs(top, lowers, k, y), x0, n, seg, wide)

    if workers > 1 and len(rows) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mins = list(pool.map(pass1, rows))
    else:
        mins = [pass1(row) for row in rows]

    approx = min(m for m, _ in mins)
    thresh = min(approx + 2 * E, _U64_MAX)

    candidates: list[tuple[int, int]] = []
    flooded = False
    for (y, x0, n), (row_min, _) in zip(rows, mins):
        if row_min > thresh:
            continue
        hits = _collect_row(_row_coeffs(top, lowers, k, y), x0, n, seg, wide,
                            thresh, FLOOD_CAP - len(candidates))
        if hits is None:
            flooded = True
            break
        candidates.extend((x0 + off, y) for off in hits)
        if len(candidates) > FLOOD_CAP:
            flooded = True
            break

    if flooded:
        val, bx, by, scanned = _exact_scan(top, lowers, k, rows)
        elapsed = (time.perf_counter() - t0) * 1e3
        return SearchResult(best_x=bx, best_y=by, min_value=float(val),
                            box=box, evaluations=total + scanned,
                            elapsed_ms=elapsed,
                            provenance=provenance + "+exact-scan")

    best: tuple[Fraction, int, int] | None = None
    for x, y in candidates:
        cand = (_exact_dist(top, lowers, k, x, y), x, y)
        if best is None or cand < best:
            best = cand
    assert best is not None, "the pass-1 argmin row always yields a candidate"
    elapsed = (time.perf_counter() - t0) * 1e3
    return SearchResult(best_x=best[1], best_y=best[2],
                        min_value=float(best[0]), box=box, evaluations=total,
                        elapsed_ms=elapsed, provenance=provenance)


def _box_rows(box: SearchBox, ys: Iterable[int]) -> list[tuple[int, int, int]]:
    rows = []
    for y in ys:
        x0 = box.x_start(y)
        n = box.x_max - x0 + 1
        if n > 0:
            rows.append((y, x0, n))
    return rows


def min_fracpart(f: BinaryForm, box: SearchBox, workers: int = 1,
                 budget: int | None = None) -> SearchResult:
    """Exhaustive min of ||Psi(x, y)|| over the box (origin excluded)."""
    rows = _box_rows(box, box.y_values())
    check_budget(sum(n for _, _, n in rows), budget)
    return _minimize(f, rows, box, workers, "exhaustive")


def min_fracpart_diagonal(d: DiagonalForm, X: int, Y: int, workers: int = 1,
                          budget: int | None = None) -> SearchResult:
    """Exhaustive min of ||alpha x^k + beta y^k|| over [0,X] x [0,Y]."""
    return min_fracpart(d.to_binary_form(), SearchBox(x_max=X, y_max=Y),
                        workers=workers, budget=budget)


def min_fracpart_smooth_y(f: BinaryForm, X: int, Y: int, R: int,
                          include_axes: bool = True, workers: int = 1,
                          budget: int | None = None) -> SearchResult:
    """Min with y restricted to the R-smooth integers in [1, Y].

    With include_axes (default) the x=0 column and the y=0 row stay in the
    box exactly as in min_fracpart, so R >= Y reproduces it verbatim; with
    include_axes=False only x >= 1 and smooth y >= 1 are scanned.
    """
    if Y < 1 or R < 1:
        raise DomainError("smooth search needs Y >= 1 and R >= 1")
    box = SearchBox(x_max=X, y_max=Y, include_axes=include_axes)
    ys: list[int] = [0] if include_axes else []
    ys.extend(enumerate_smooth(Y, R).members)
    rows = _box_rows(box, ys)
    check_budget(sum(n for _, _, n in rows), budget)
    return _minimize(f, rows, box, workers, f"smooth-y R={R}")
