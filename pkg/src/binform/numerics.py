"""Exact-mod-1 arbitrary-precision scalars.

Everything downstream reduces to computing ||t|| (distance from t to the
nearest integer) and e(t) = exp(2*pi*i*t) without losing the fractional part
of very large arguments. A binary float of any precision is a dyadic rational
m * 2^e, so "t mod 1" is exact integer arithmetic on (m, e); no working-
precision escalation is ever needed. PrecReal stores the mpmath witness
rounded to `precision_bits` and, when the constructor argument was itself a
rational (p/q or a decimal string), the exact rational it denotes. Exact code
paths (continued fractions, fixed-point coefficient tables, candidate
re-verification) consume `as_fraction()`; display paths consume the float.

Accuracy contract for e_of: the fractional part is computed exactly, so the
phase carries no cancellation error even for arguments near 10^30; the only
error is one float64 rounding of the reduced argument plus libm sin/cos,
well below 2^-40.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math

import mpmath

MIN_PRECISION_BITS = 64
DEFAULT_PRECISION_BITS = 256

#: Irrational constants usable by name in CLI/form literals.
NAMED_CONSTANTS = ("sqrt2", "sqrt3", "pi", "e", "golden")


def _compute_named(name: str, precision_bits: int) -> mpmath.mpf:
    with mpmath.workprec(precision_bits):
        if name == "sqrt2":
            return mpmath.sqrt(2)
        if name == "sqrt3":
            return mpmath.sqrt(3)
        if name == "pi":
            return +mpmath.pi
        if name == "e":
            return +mpmath.e
        if name == "golden":
            return +mpmath.phi
    raise ValueError(f"unknown named constant {name!r}; known: {NAMED_CONSTANTS}")


def mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    """Exact rational value of a finite mpf (it is a dyadic rational)."""
    raw = getattr(x, "_mpf_", None)
    if raw is None:
        # exact for floats/ints; never re-round an existing mpf
        raw = mpmath.mpf(x)._mpf_
    sign, man, exp, _ = raw
    if man == 0 and exp != 0:
        raise ValueError("non-finite value has no rational representation")
    # mpmath's gmpy backend hands back gmpy2.mpz here; keep Fraction internals
    # on plain ints so downstream arithmetic never crosses into gmpy2.
    man, exp = int(man), int(exp)
    m = -man if sign else man
    if exp >= 0:
        return Fraction(m << exp, 1)
    return Fraction(m, 1 << (-exp))


@dataclass(frozen=True)
class PrecReal:
    """A real scalar at a fixed working precision.

    value: mpmath float rounded to `precision_bits` significant bits.
    precision_bits: >= 64.
    exact: the exact rational denoted by the constructor argument, when the
        argument was rational (from_rational / from_decimal / parse of a
        numeric literal); None for irrational named constants and raw floats
        of unknown provenance (whose dyadic value is then the ground truth).
    """

    value: mpmath.mpf
    precision_bits: int = DEFAULT_PRECISION_BITS
    exact: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION_BITS:
            raise ValueError(f"precision_bits must be >= {MIN_PRECISION_BITS}")
        if not mpmath.isfinite(self.value):
            raise ValueError("PrecReal requires a finite value")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_decimal(cls, text: str, precision_bits: int = DEFAULT_PRECISION_BITS) -> "PrecReal":
        frac = _decimal_to_fraction(text)
        return cls.from_rational(frac.numerator, frac.denominator, precision_bits)

    @classmethod
    def from_rational(cls, p: int, q: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> "PrecReal":
        if q == 0:
            raise ZeroDivisionError("rational with zero denominator")
        frac = Fraction(p, q)
        with mpmath.workprec(precision_bits):
            val = mpmath.mpf(frac.numerator) / frac.denominator
        return cls(val, precision_bits, exact=frac)

    @classmethod
    def from_float(cls, x: float, precision_bits: int = DEFAULT_PRECISION_BITS) -> "PrecReal":
        # A float64 is already dyadic; this is exact.
        with mpmath.workprec(precision_bits):
            val = mpmath.mpf(x)
        return cls(val, precision_bits, exact=Fraction(x))

    @classmethod
    def named(cls, name: str, precision_bits: int = DEFAULT_PRECISION_BITS) -> "PrecReal":
        return cls(_compute_named(name, precision_bits), precision_bits)

    @classmethod
    def parse(cls, token: str, precision_bits: int = DEFAULT_PRECISION_BITS) -> "PrecReal":
        """Parse a scalar literal: named constant, integer, decimal, or p/q."""
        tok = token.strip()
        neg = tok.startswith("-")
        body = tok[1:] if neg else tok
        if body in NAMED_CONSTANTS:
            r = cls.named(body, precision_bits)
            return r.neg() if neg else r
        if "/" in tok:
            p_str, q_str = tok.split("/", 1)
            return cls.from_rational(int(p_str), int(q_str), precision_bits)
        return cls.from_decimal(tok, precision_bits)

    # -- views -------------------------------------------------------------

    def as_fraction(self) -> Fraction:
        """Exact rational ground truth (denoted rational, else dyadic witness)."""
        if self.exact is not None:
            return self.exact
        return mpf_to_fraction(self.value)

    def __float__(self) -> float:
        return float(self.value)

    def neg(self) -> "PrecReal":
        return PrecReal(-self.value, self.precision_bits,
                        exact=None if self.exact is None else -self.exact)

    def __repr__(self) -> str:
        return f"PrecReal({mpmath.nstr(self.value, 20)}, bits={self.precision_bits})"


def _decimal_to_fraction(text: str) -> Fraction:
    """Exact Fraction for a decimal literal (supports exponents)."""
    t = text.strip()
    try:
        return Fraction(t)  # Fraction parses '3', '2.3', '1e3', '-0.5'
    except ValueError as err:
        raise ValueError(f"not a numeric literal: {text!r}") from err


RealLike = PrecReal | Fraction | int | float


def _to_fraction(x: RealLike) -> Fraction:
    if isinstance(x, PrecReal):
        return x.as_fraction()
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite argument")
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        return mpf_to_fraction(x)
    raise TypeError(f"unsupported scalar type {type(x)!r}")


def frac_part(x: RealLike) -> Fraction:
    """Exact x mod 1 in [0, 1)."""
    f = _to_fraction(x)
    return f - (f.numerator // f.denominator)


def frac_norm(x: RealLike) -> float:
    """||x||: distance from x to the nearest integer, in [0, 1/2].

    Computed exactly on the rational/dyadic value, rounded once to float64.
    """
    f = frac_part(x)
    return float(min(f, 1 - f))


def fixed_frac(x: RealLike, frac_bits: int) -> int:
    """floor((x mod 1) * 2^frac_bits), exactly.

    The fixed-point workhorse: the result is in [0, 2^frac_bits) and differs
    from the true fractional part by less than 2^-frac_bits (zero error when
    x is dyadic with <= frac_bits fractional bits).
    """
    f = _to_fraction(x)
    num, den = f.numerator, f.denominator
    return ((num << frac_bits) // den) % (1 << frac_bits)


@dataclass(frozen=True)
class UnitComplex:
    """A point on the unit circle, |z| = 1 to within float64 rounding."""

    re: float
    im: float

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def conj(self) -> "UnitComplex":
        return UnitComplex(self.re, -self.im)

    def mul(self, other: "UnitComplex") -> "UnitComplex":
        return UnitComplex(self.re * other.re - self.im * other.im,
                           self.re * other.im + self.im * other.re)


def e_of(x: RealLike) -> UnitComplex:
    """e(x) = exp(2*pi*i*x), with the argument reduced mod 1 exactly first."""
    f = frac_part(x)
    t = float(f)  # one correctly-rounded conversion of the exact fraction
    ang = 2.0 * math.pi * t
    return UnitComplex(math.cos(ang), math.sin(ang))
