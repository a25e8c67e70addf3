"""Closed-form exponent calculators and the comparison table.

Everything rational is exact (`fractions.Fraction`); the k*log(k) family is
evaluated in 50-digit arithmetic so threshold comparisons against exact
integers are decided with margin to spare. The quality exponent sigma grades
how small min ||Psi(x, y)|| must get relative to the box size X: larger is
stronger. Baselines: 2^(1-k) (classical Weyl differencing) and 1/(k(k-1))
(mean-value-theorem route); the calculators here improve on both inside
their validity thresholds l0/l1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DomainError

#: decimal digits for log-comparisons; integers vs k*log(k) are never close
#: enough for 50 digits to be ambiguous at any feasible k.
_LOG_DPS = 50


def _check_kl(k: int, l: int) -> None:
    if k < 3:
        raise DomainError("k must be >= 3")
    if not 1 <= l <= k - 2:
        raise DomainError("l must satisfy 1 <= l <= k-2")


def rho(k: int, l: int) -> int:
    """Exact integer sum_{j=1}^{l} 2^(j+1) (k - j)."""
    _check_kl(k, l)
    return sum((1 << (j + 1)) * (k - j) for j in range(1, l + 1))


def sigma_theorem11(k: int, l: int) -> Fraction:
    """(l+2)/(l+1) * 2^(1-k), exactly."""
    _check_kl(k, l)
    return Fraction(l + 2, (l + 1) * (1 << (k - 1)))


def thresholds(k: int) -> tuple[int, int]:
    """(l0, l1): the largest l with 7*rho(k,l) <= k(k-1), resp. k*log(k).

    rho is strictly increasing in l, so an ascending scan stops at the first
    failure; 0 means even l = 1 fails.
    """
    if k < 3:
        raise DomainError("k must be >= 3")
    with mpmath.workdps(_LOG_DPS):
        log_cap = mpmath.mpf(k) * mpmath.log(k)
        l0 = l1 = 0
        for l in range(1, k - 1):
            r7 = 7 * rho(k, l)
            if r7 > k * (k - 1):
                break  # k log k <= k(k-1), so the l1 scan is finished too
            l0 = l
            if r7 <= log_cap:
                l1 = l
    return l0, l1


def sigma_theorem13(k: int, l: int) -> Fraction:
    """2 / (k(k-1) + rho(k, l)), exactly; requires l within l0(k)."""
    _check_kl(k, l)
    l0, _ = thresholds(k)
    if l > l0:
        raise DomainError(f"l={l} exceeds the validity threshold l0={l0}")
    return Fraction(2, k * (k - 1) + rho(k, l))


#: For l = 1 the simplified display 2/((k+2)(k-1)) circulates alongside the
#: general formula, which gives 2/(k(k-1) + 4(k-1)) = 2/((k+4)(k-1)). The
#: two disagree; the calculators implement the general formula and the table
#: reports both values with a mismatch flag instead of silently picking one.
def sigma_t13_l1_display(k: int) -> Fraction:
    """The circulated l = 1 simplification 2/((k+2)(k-1))."""
    if k < 3:
        raise DomainError("k must be >= 3")
    return Fraction(2, (k + 2) * (k - 1))


def sigma_theorem14(k: int, l: int, C: float = 1.0,
                    enforce_threshold: bool = False) -> float:
    """2 / (k log k + rho(k, l) + C k log log k).

    The stated validity range is 1 <= l <= l1(k), but l1(k) = 0 for every
    k below ~e^28, which would make the calculator uncallable at any
    feasible size; by default the value is computed regardless and the
    threshold is only enforced on request (ExponentTable records the flag).
    """
    _check_kl(k, l)
    if C <= 0:
        raise DomainError("C must be positive")
    if enforce_threshold:
        _, l1 = thresholds(k)
        if l > l1:
            raise DomainError(f"l={l} exceeds the validity threshold l1={l1}")
    return 2.0 / (k * math.log(k) + rho(k, l) + C * k * math.log(math.log(k)))


def default_lambda(k: int) -> float:
    """lambda(k) = 1 - log log k / log k, the stated order of magnitude."""
    if k < 3:
        raise DomainError("k must be >= 3")
    return 1.0 - math.log(math.log(k)) / math.log(k)


def sigma0_prop62(k: int, C: float = 1.0, lam: float | None = None) -> float:
    """sigma0 = sigma / (1 - lambda - sigma) with sigma = 1/(k log k + C k log log k)."""
    if k < 3:
        raise DomainError("k must be >= 3")
    if C <= 0:
        raise DomainError("C must be positive")
    if lam is None:
        lam = default_lambda(k)
    if not 0.0 <= lam < 1.0:
        raise DomainError("lambda must lie in [0, 1)")
    sigma = 1.0 / (k * math.log(k) + C * k * math.log(math.log(k)))
    denom = 1.0 - lam - sigma
    if denom <= 0.0:
        raise DomainError("1 - lambda - sigma must be positive")
    return sigma / denom


@dataclass(frozen=True)
class ExponentTable:
    """All exponents for one (k, l), with validity flags and baselines."""

    k: int
    l: int
    rho: int
    sigma_t11: Fraction
    sigma_t13: Fraction | None
    sigma_t14: float
    sigma_baker: Fraction
    sigma_danicic: Fraction
    l0: int
    l1: int
    C_t14: float
    lmbda: float
    sigma0: float | None
    t13_valid: bool
    t14_valid: bool
    t13_l1_display: Fraction | None
    t13_l1_display_mismatch: bool

    @classmethod
    def build(cls, k: int, l: int, C: float = 1.0,
              lam: float | None = None) -> "ExponentTable":
        _check_kl(k, l)
        if lam is None:
            lam = default_lambda(k)
        l0, l1 = thresholds(k)
        r = rho(k, l)
        t13 = Fraction(2, k * (k - 1) + r) if l <= l0 else None
        try:
            s0 = sigma0_prop62(k, C, lam)
        except DomainError:
            s0 = None
        display = sigma_t13_l1_display(k) if l == 1 else None
        general_l1 = Fraction(2, k * (k - 1) + rho(k, 1))
        return cls(
            k=k, l=l, rho=r,
            sigma_t11=sigma_theorem11(k, l),
            sigma_t13=t13,
            sigma_t14=sigma_theorem14(k, l, C),
            sigma_baker=Fraction(1, k * (k - 1)),
            sigma_danicic=Fraction(1, 1 << (k - 1)),
            l0=l0, l1=l1, C_t14=C, lmbda=lam, sigma0=s0,
            t13_valid=l <= l0, t14_valid=l <= l1,
            t13_l1_display=display,
            t13_l1_display_mismatch=(l == 1 and display != general_l1),
        )

    def to_dict(self) -> dict:
        def frac(x):
            if x is None:
                return None
            return f"{x.numerator}/{x.denominator}"

        return {
            "k": self.k, "l": self.l, "rho": self.rho,
            "l0": self.l0, "l1": self.l1,
            "sigma_t11": frac(self.sigma_t11),
            "sigma_t11_float": float(self.sigma_t11),
            "sigma_t13": frac(self.sigma_t13),
            "sigma_t13_float":
                None if self.sigma_t13 is None else float(self.sigma_t13),
            "sigma_t14": self.sigma_t14,
            "sigma_baker": frac(self.sigma_baker),
            "sigma_danicic": frac(self.sigma_danicic),
            "C_t14": self.C_t14, "lambda": self.lmbda, "sigma0": self.sigma0,
            "t13_valid": self.t13_valid, "t14_valid": self.t14_valid,
            "t13_l1_display": frac(self.t13_l1_display),
            "t13_l1_display_mismatch": self.t13_l1_display_mismatch,
        }

    def to_latex(self) -> str:
        def frac(x):
            if x is None:
                return "--"
            return f"$\\frac{{{x.numerator}}}{{{x.denominator}}}$"

        rows = [
            ("two-term window ($\\sigma_{1.1}$)", frac(self.sigma_t11)),
            ("mean-value route ($\\sigma_{1.3}$)", frac(self.sigma_t13)),
            ("$k\\log k$ route ($\\sigma_{1.4}$)", f"{self.sigma_t14:.3e}"),
            ("baseline $2^{1-k}$", frac(self.sigma_danicic)),
            ("baseline $1/(k(k-1))$", frac(self.sigma_baker)),
        ]
        body = " \\\\\n".join(f"{name} & {val}" for name, val in rows)
        return (
            "\\begin{tabular}{lr}\n"
            f"\\multicolumn{{2}}{{c}}{{$k={self.k},\\ l={self.l},"
            f"\\ \\rho={self.rho}$}} \\\\\n\\hline\n"
            f"{body} \\\\\n"
            "\\end{tabular}"
        )
