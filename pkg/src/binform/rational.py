"""Continued fractions and best rational (Dirichlet) approximations.

The expansion runs on exact rationals. For a PrecReal that denotes a rational
(p/q or a decimal literal) the expansion is plain Euclid and terminates. For
an irrational constant the stored dyadic witness is only trusted to half an
ulp, so the algorithm tracks the interval [x - tol, x + tol] through the
recursion and raises PrecisionExhaustedError the moment the two endpoints
disagree about the next partial quotient -- a quotient is emitted only when
every real consistent with the stored precision shares it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DomainError, PrecisionExhaustedError
from .numerics import PrecReal, RealLike, _to_fraction


@dataclass(frozen=True)
class RationalApproximation:
    """a/q with |alpha - a/q| <= 1/(q*N), q <= N, gcd(a, q) = 1."""

    a: int
    q: int
    err: float      # |q*alpha - a|, exact value rounded once to float64
    bound_N: int


def _witness_interval(alpha: RealLike) -> tuple[Fraction, Fraction]:
    """[lo, hi] containing every real consistent with alpha's precision."""
    if isinstance(alpha, PrecReal):
        x = alpha.as_fraction()
        if alpha.exact is not None:
            return x, x
        # witness correct to half an ulp (an ulp is 2^exp of the mantissa LSB)
        _, man, exp, _ = alpha.value._mpf_
        if man == 0:
            return x, x
        tol = Fraction(1, 2) * Fraction(2) ** int(exp)
        return x - tol, x + tol
    x = _to_fraction(alpha)
    return x, x


def continued_fraction(alpha: RealLike, max_terms: int = 64
                       ) -> tuple[list[int], list[tuple[int, int]]]:
    """Partial quotients and convergents of alpha.

    Returns (quotients, convergents) with convergents as (p, q) pairs.
    Stops at max_terms, earlier if alpha is rational and fully expanded, and
    raises PrecisionExhaustedError when the remaining precision cannot
    certify the next quotient.
    """
    if max_terms < 1:
        raise DomainError("max_terms must be >= 1")
    lo, hi = _witness_interval(alpha)
    quotients: list[int] = []
    convergents: list[tuple[int, int]] = []
    p_prev, q_prev = 0, 1
    p_cur, q_cur = 1, 0  # (p_{-1}, q_{-1}) = (1, 0); p_0/q_0 built in loop
    for _ in range(max_terms):
        a_lo = lo.numerator // lo.denominator
        a_hi = hi.numerator // hi.denominator
        if a_lo != a_hi:
            raise PrecisionExhaustedError(
                "stored precision cannot certify the next partial quotient")
        a = a_lo
        quotients.append(a)
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        convergents.append((p_cur, q_cur))
        frac_lo = lo - a
        frac_hi = hi - a
        if frac_hi == 0:  # exactly rational, fully expanded
            break
        if frac_lo <= 0:
            # lo hit the integer: the true value could sit at the boundary
            if lo == hi:
                break  # exact rational, done
            raise PrecisionExhaustedError(
                "stored precision cannot certify the next partial quotient")
        lo, hi = 1 / frac_hi, 1 / frac_lo
    return quotients, convergents


def dirichlet_approx(alpha: RealLike, N: int, exact_best: bool = False
                     ) -> RationalApproximation:
    """Best rational approximation with denominator at most N.

    Default: the last continued-fraction convergent with q <= N, which
    satisfies |q*alpha - a| < 1/N (Dirichlet's guarantee). With
    exact_best=True a full brute-force scan over q <= N is used instead
    (same guarantee, minimizes |q*alpha - a| outright).
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    x = alpha.as_fraction() if isinstance(alpha, PrecReal) else _to_fraction(alpha)
    if exact_best:
        best = None
        for q in range(1, N + 1):
            t = x * q
            a = (2 * t.numerator + t.denominator) // (2 * t.denominator)  # round half up
            err = abs(t - a)
            if best is None or err < best[0]:
                best = (err, q, a)
        err, q, a = best
        g = gcd(abs(a), q) or 1
        a, q = a // g, q // g
        return RationalApproximation(a=a, q=q, err=float(abs(x * q - a)), bound_N=N)
    _, convergents = continued_fraction(alpha, max_terms=3 * N.bit_length() + 24)
    chosen = None
    for p, q in convergents:
        if q <= N:
            chosen = (p, q)
        else:
            break
    if chosen is None:  # cannot happen: q_1 = 1
        raise AssertionError("no convergent with q <= N")
    a, q = chosen
    return RationalApproximation(a=a, q=q, err=float(abs(x * q - a)), bound_N=N)
