"""Binary forms with a sparse lower block, Weyl differencing, and the
coefficient-annihilating change of variables.

A form here is

    Psi(x, y) = alpha_k x^k + alpha_l x^l y^(k-l) + ... + alpha_0 y^k,

with 0 <= l <= k - 2: the top coefficient sits alone, the remaining
monomials carry y-power at least 2. `weyl_difference` expands iterated
forward differences

    Delta_h^x Psi(x, y) = Psi(x + h, y) - Psi(x, y)

symbolically over exact rational coefficient arithmetic, so the expanded
polynomial agrees with telescoped direct evaluation exactly, not just to
working precision. `change_of_variables` maps an integer form to an
equivalent one whose x1^(k-1)*y1 coefficient vanishes, the entry point the
reduction machinery expects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import DegenerateFormError
from .numerics import DEFAULT_PRECISION_BITS, PrecReal

# polynomial as {(x_power, y_power): Fraction}, zero coefficients dropped
PolyDict = dict[tuple[int, int], Fraction]


@dataclass(frozen=True)
class BinaryForm:
    """Psi(x,y) = alpha_k x^k + sum_{j<=l} alpha_j x^j y^(k-j)."""

    k: int
    l: int
    alpha_k: PrecReal
    lower_coeffs: tuple[PrecReal, ...]  # (alpha_l, ..., alpha_0)

    def __post_init__(self):
        if self.k < 2:
            raise DegenerateFormError(f"degree k={self.k} must be >= 2")
        if not 0 <= self.l <= self.k - 2:
            raise DegenerateFormError(f"need 0 <= l <= k-2, got l={self.l}, k={self.k}")
        if len(self.lower_coeffs) != self.l + 1:
            raise DegenerateFormError(
                f"lower_coeffs must list alpha_l..alpha_0 ({self.l + 1} entries), "
                f"got {len(self.lower_coeffs)}")

    @property
    def precision_bits(self) -> int:
        return max(c.precision_bits for c in (self.alpha_k, *self.lower_coeffs))

    def coeff(self, j: int) -> PrecReal:
        """alpha_j for 0 <= j <= l (coefficient of x^j y^(k-j))."""
        if not 0 <= j <= self.l:
            raise IndexError(f"no lower coefficient alpha_{j}")
        return self.lower_coeffs[self.l - j]

    def poly(self) -> PolyDict:
        out: PolyDict = {}
        ak = self.alpha_k.as_fraction()
        if ak:
            out[(self.k, 0)] = ak
        for j in range(self.l, -1, -1):
            c = self.coeff(j).as_fraction()
            if c:
                out[(j, self.k - j)] = c
        return out

    def describe(self) -> str:
        terms = [f"alpha_k x^{self.k}"]
        terms += [f"alpha_{j} x^{j} y^{self.k - j}" for j in range(self.l, -1, -1)]
        return " + ".join(terms)


@dataclass(frozen=True)
class IntegerBinaryForm:
    """phi(x,y) = sum_i c_i x^i y^(k-i), coeffs descending (c_k, ..., c_0)."""

    k: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise DegenerateFormError("degree must be >= 1")
        if len(self.coeffs) != self.k + 1:
            raise DegenerateFormError(
                f"need {self.k + 1} coefficients c_k..c_0, got {len(self.coeffs)}")

    def coeff(self, i: int) -> int:
        """c_i, the coefficient of x^i y^(k-i)."""
        return self.coeffs[self.k - i]

    def evaluate(self, x: int, y: int) -> int:
        acc = 0
        for i in range(self.k, -1, -1):
            acc += self.coeff(i) * x**i * y**(self.k - i)
        return acc


@dataclass(frozen=True)
class Substitution:
    """x = x1 + x_shift * y1, y = y_scale * y1."""

    x_shift: int
    y_scale: int
    k: int
    c_top: int
    c_next: int

    def apply(self, x1: int, y1: int) -> tuple[int, int]:
        return x1 + self.x_shift * y1, self.y_scale * y1

    def box(self, X: int) -> tuple[int, int]:
        """(x1_max, y1_max) with image guaranteed inside |x|,|y| <= X."""
        y1_max = X // (self.k * (1 + abs(self.c_top)) * (1 + abs(self.c_next)))
        return X // 2, y1_max


@dataclass(frozen=True)
class DifferencedForm:
    """Expanded j-fold forward difference of a BinaryForm along one axis."""

    base: BinaryForm
    axis: str                      # 'x' or 'y'
    shifts: tuple[int, ...]
    coeffs: PolyDict = field(compare=False)

    def evaluate(self, x: int, y: int) -> Fraction:
        acc = Fraction(0)
        for (a, b), c in self.coeffs.items():
            acc += c * x**a * y**b
        return acc

    def degree_in(self, axis: str) -> int:
        idx = 0 if axis == "x" else 1
        return max((mono[idx] for mono in self.coeffs), default=0)


def evaluate(f: BinaryForm, x: int, y: int) -> PrecReal:
    """Psi(x, y), exact (rational ground truth carried alongside the witness)."""
    acc = Fraction(0)
    for (a, b), c in f.poly().items():
        acc += c * x**a * y**b
    return PrecReal.from_rational(acc.numerator, acc.denominator,
                                  max(f.precision_bits, DEFAULT_PRECISION_BITS))


def _poly_difference(poly: PolyDict, axis: str, h: int) -> PolyDict:
    """p(.. + h ..) - p(..), expanded exactly."""
    out: PolyDict = {}
    for (a, b), c in poly.items():
        deg = a if axis == "x" else b
        for t in range(deg):  # the t == deg term cancels
            w = c * comb(deg, t) * h ** (deg - t)
            if not w:
                continue
            mono = (t, b) if axis == "x" else (a, t)
            out[mono] = out.get(mono, Fraction(0)) + w
            if not out[mono]:
                del out[mono]
    return out


def degree_in_axis(f: BinaryForm, axis: str) -> int:
    idx = 0 if axis == "x" else 1
    return max((mono[idx] for mono in f.poly()), default=0)


def weyl_difference(f: BinaryForm, axis: str, shifts: tuple[int, ...] | list[int]) -> DifferencedForm:
    """Iterated forward difference Delta_{h_j} ... Delta_{h_1} Psi along axis.

    Rejects axis not in {x, y}, an empty shift list, and more shifts than the
    form's degree in the chosen axis. Zero shifts are allowed (they zero the
    polynomial, which is still a valid expansion).
    """
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    shifts = tuple(int(h) for h in shifts)
    if len(shifts) < 1:
        raise ValueError("need at least one shift")
    deg = degree_in_axis(f, axis)
    if len(shifts) > deg:
        raise ValueError(f"{len(shifts)} shifts exceed degree {deg} in {axis}")
    poly = f.poly()
    for h in shifts:
        poly = _poly_difference(poly, axis, h)
    return DifferencedForm(base=f, axis=axis, shifts=shifts, coeffs=poly)


def telescoped_difference(f: BinaryForm, axis: str, shifts: tuple[int, ...],
                          x: int, y: int) -> Fraction:
    """Direct 2^j-term alternating evaluation of the iterated difference.

    Independent of the symbolic expansion; used as the equivalence oracle.
    """
    total = Fraction(0)
    j = len(shifts)
    for mask in range(1 << j):
        dx = dy = 0
        bits = 0
        for idx, h in enumerate(shifts):
            if mask >> idx & 1:
                bits += 1
                if axis == "x":
                    dx += h
                else:
                    dy += h
        sign = 1 if (j - bits) % 2 == 0 else -1
        acc = Fraction(0)
        for (a, b), c in f.poly().items():
            acc += c * (x + dx) ** a * (y + dy) ** b
        total += sign * acc
    return total


def change_of_variables(g: IntegerBinaryForm) -> tuple[IntegerBinaryForm, Substitution]:
    """Annihilate the x1^(k-1)*y1 coefficient of an integer form.

    Substituting x = x1 - c_{k-1} y1, y = k c_k y1 into phi gives an integer
    form phi' of the same degree with zero x1^(k-1) y1 coefficient, and
    phi(x, y) = phi'(x1, y1) identically.
    """
    k = g.k
    ck = g.coeff(k)
    if ck == 0:
        raise DegenerateFormError("top coefficient c_k must be nonzero")
    ck1 = g.coeff(k - 1)
    sub = Substitution(x_shift=-ck1, y_scale=k * ck, k=k, c_top=ck, c_next=ck1)
    # expand sum_i c_i (x1 - ck1*y1)^i (k*ck*y1)^(k-i)
    new = [0] * (k + 1)  # new[a] = coefficient of x1^a y1^(k-a)
    for i in range(k, -1, -1):
        ci = g.coeff(i)
        if ci == 0:
            continue
        scale = (k * ck) ** (k - i)
        for t in range(i + 1):
            new[t] += ci * scale * comb(i, t) * (-ck1) ** (i - t)
    if new[k - 1] != 0:
        raise AssertionError("substitution failed to annihilate c'_{k-1}")
    transformed = IntegerBinaryForm(k=k, coeffs=tuple(new[::-1]))
    return transformed, sub


# -- literals ---------------------------------------------------------------

_LIST_RE = re.compile(r"^\[(.*)\]$")


def _parse_list(text: str) -> list[str]:
    m = _LIST_RE.match(text.strip())
    if not m:
        raise ValueError(f"expected [a,b,...], got {text!r}")
    inner = m.group(1).strip()
    return [t.strip() for t in inner.split(",")] if inner else []


def parse_form_literal(text: str,
                       precision_bits: int = DEFAULT_PRECISION_BITS
                       ) -> BinaryForm | IntegerBinaryForm:
    """Parse a form literal.

    Real form:    "k=3 l=1 alpha_k=sqrt2 alphas=[pi,e]"
    Integer form: "coeffs=[1,3,0,0]" (descending c_k..c_0; k inferred)
    """
    fields: dict[str, str] = {}
    for tok in text.split():
        if "=" not in tok:
            raise ValueError(f"bad token {tok!r} in form literal")
        key, val = tok.split("=", 1)
        fields[key] = val
    if "coeffs" in fields:
        coeffs = tuple(int(t) for t in _parse_list(fields["coeffs"]))
        k = int(fields.get("k", len(coeffs) - 1))
        return IntegerBinaryForm(k=k, coeffs=coeffs)
    try:
        k = int(fields["k"])
        l = int(fields["l"])
        alpha_k = PrecReal.parse(fields["alpha_k"], precision_bits)
        alphas = tuple(PrecReal.parse(t, precision_bits)
                       for t in _parse_list(fields["alphas"]))
    except KeyError as err:
        raise ValueError(f"form literal missing field {err}") from err
    return BinaryForm(k=k, l=l, alpha_k=alpha_k, lower_coeffs=alphas)
