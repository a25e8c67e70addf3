"""Exact fixed-point difference tables for polynomial rows.

The bulk enumerations all reduce to scanning p(x) mod 1 for a univariate
polynomial p over consecutive integers. Strategy:

1. Coefficients are fixed to WIDE fraction bits (>= 256): an integer
   c_fixed = floor(frac(c) * 2^WIDE). Rational/dyadic coefficients convert
   exactly or to within 2^-WIDE.
2. A forward-difference table D_j = Delta^j p(x0) mod 1 is built exactly at
   WIDE bits, then truncated to ROW_BITS = 128 fraction bits. Integer adds
   mod 2^128 are exact mod-1 arithmetic, so the only error per entry is the
   truncation, < 2^-128.
3. Each segment hands the top 64 bits of the table to a kernel
   (kernels.march_*), which marches in uint64. After t steps the accumulated
   error of a value is below (sum_{j<=d} C(t, j)) * 2^-64 + 2^-96; the
   segment schedule keeps this under 2^-eps_bits.
4. Between segments the 128-bit table is advanced exactly with binomial
   "jumps" (D_j(x0+s) = sum_t C(s, t-j) D_t(x0) mod 2^128), so error never
   accumulates across segments.

Certified bound consumed by callers: a marched uint64 value differs from the
true fractional part by less than ERR_ULPS(d, seg) units of 2^-64, computed
below from the same binomial sums.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .numerics import RealLike, fixed_frac, _to_fraction

ROW_BITS = 128
_ROW_MASK = (1 << ROW_BITS) - 1
_SHIFT_64 = ROW_BITS - 64

#: eps_bits presets: certified per-value error < 2^-eps_bits.
SEARCH_EPS_BITS = 32
SUM_EPS_BITS = 50


def wide_bits(*precision_bits: int) -> int:
    """Fraction bits for exact coefficient fixing."""
    return max(256, max(precision_bits, default=0) + 64)


@lru_cache(maxsize=None)
def segment_length(degree: int, eps_bits: int) -> int:
    """Largest s with sum_{j<=degree} C(s, j) <= 2^(64 - eps_bits)."""
    if not 0 <= eps_bits <= 62:
        raise ValueError("eps_bits out of range")
    limit = 1 << (64 - eps_bits)

    def total(s: int) -> int:
        return sum(comb(s, j) for j in range(min(s, degree) + 1))

    lo, hi = 1, 2
    while total(hi) <= limit:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if total(mid) <= limit:
            lo = mid
        else:
            hi = mid
    return lo


def err_ulps(degree: int, seg: int) -> int:
    """Certified error of marched values within a segment, in 2^-64 units."""
    return sum(comb(seg, j) for j in range(min(seg, degree) + 1)) + 1


def fix_coeffs(coeffs: list[Fraction | RealLike], frac_bits: int) -> list[int]:
    """Fixed-point images of polynomial coefficients (ascending powers)."""
    return [fixed_frac(c, frac_bits) for c in coeffs]


def scale_fixed(coeff_fixed: int, mult: int, frac_bits: int) -> int:
    """(coeff * mult) mod 1 in fixed point; exact given an exact coeff image."""
    return (coeff_fixed * mult) % (1 << frac_bits)


def build_table(coeffs_fixed: list[int], frac_bits: int, x0: int) -> list[int]:
    """Forward-difference table of p at x0, truncated to ROW_BITS.

    coeffs_fixed: ascending-power fixed-point coefficients mod 2^frac_bits.
    Returns [D_0, ..., D_d] with D_j = Delta^j p(x0) mod 1 at ROW_BITS.
    """
    d = len(coeffs_fixed) - 1
    mask = (1 << frac_bits) - 1
    vals = []
    for t in range(d + 1):
        x = x0 + t
        acc = 0
        xp = 1
        for c in coeffs_fixed:
            acc += c * xp
            xp *= x
        vals.append(acc & mask)
    table = [vals[0]]
    for j in range(1, d + 1):
        for t in range(d - j + 1):
            vals[t] = (vals[t + 1] - vals[t]) & mask
        table.append(vals[0])
    shift = frac_bits - ROW_BITS
    if shift < 0:
        raise ValueError("frac_bits below ROW_BITS")
    return [v >> shift for v in table]


@lru_cache(maxsize=4096)
def _binom_row(s: int, d: int) -> tuple[int, ...]:
    return tuple(comb(s, j) for j in range(d + 1))


def jump_table(table: list[int], s: int) -> list[int]:
    """Advance a ROW_BITS difference table by s steps exactly (mod 2^128)."""
    d = len(table) - 1
    binoms = _binom_row(s, d)
    out = []
    for j in range(d + 1):
        acc = 0
        for t in range(j, d + 1):
            acc += binoms[t - j] * table[t]
        out.append(acc & _ROW_MASK)
    return out


def table_u64(table: list[int]) -> np.ndarray:
    """Top 64 fraction bits of a ROW_BITS table, as a kernel scratch array."""
    return np.fromiter((v >> _SHIFT_64 for v in table), dtype=np.uint64,
                       count=len(table))


def iter_segments(table: list[int], n: int, seg: int):
    """Yield (offset, length, u64_scratch_table) covering n row positions.

    The u64 table is a fresh scratch array per segment; the exact 128-bit
    table is advanced by exact jumps between segments.
    """
    done = 0
    cur = table
    while done < n:
        m = min(seg, n - done)
        yield done, m, table_u64(cur)
        done += m
        if done < n:
            cur = jump_table(cur, m)


def eval_fixed(coeffs_fixed: list[int], frac_bits: int, x: int) -> int:
    """p(x) mod 1 in fixed point (exact given exact coefficient images)."""
    mask = (1 << frac_bits) - 1
    acc = 0
    xp = 1
    for c in coeffs_fixed:
        acc += c * xp
        xp *= x
    return acc & mask


def exact_poly_frac(coeffs: list[Fraction], x: int) -> Fraction:
    """Exact p(x) mod 1 as a Fraction (candidate re-verification path)."""
    acc = Fraction(0)
    xp = 1
    for c in coeffs:
        acc += c * xp
        xp *= x
    return acc - (acc.numerator // acc.denominator)
