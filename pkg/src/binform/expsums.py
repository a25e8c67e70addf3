"""Exponential sums: T, S (smooth-restricted), single Weyl sums, Xi.

Every phase is reduced mod 1 in exact arithmetic before any float is formed.
Inner x-runs ride the fixed-point difference tables from `fixedpoint`: the
polynomial h*g(x, y) is fixed at wide precision per (h, y) row, marched in
uint64 by the active kernel backend with a certified per-value error below
2^-SUM_EPS_BITS, and only then converted to float phases for the trig pass.
Sums with a phase linear in x use the closed form |sin(pi*n*theta) /
sin(pi*theta)| instead of marching. The h-loop is data-parallel; partial
results are always combined in ascending h order, so worker count never
changes output bytes.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import fsum
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .config import check_budget
from .errors import DomainError
from .fixedpoint import (
    SUM_EPS_BITS,
    build_table,
    fix_coeffs,
    iter_segments,
    segment_length,
)
from .forms import BinaryForm
from .numerics import PrecReal, RealLike, _to_fraction, frac_part
from .rational import dirichlet_approx
from .smooth import enumerate_smooth

_TWO_PI = 2.0 * math.pi
_INV_2_64 = 2.0 ** -64


@dataclass(frozen=True)
class ExpSumValue:
    """Outer absolute-sum value plus the parameters that produced it."""

    value: float
    params: dict
    terms: tuple[float, ...] | None = None


def _row_phases(coeffs: Sequence[Fraction], n: int, x0: int = 1) -> np.ndarray:
    """Phases of p(x) mod 1 for x = x0..x0+n-1 as float64 in [0, 1).

    coeffs are exact rationals, ascending powers. Certified phase error is
    below 2^-SUM_EPS_BITS plus one float rounding.
    """
    d = len(coeffs) - 1
    wide = max(256, d * max(2, (abs(x0) + n).bit_length()) + 96)
    table = build_table(fix_coeffs(list(coeffs), wide), wide, x0)
    out = np.empty(n, dtype=np.uint64)
    seg = segment_length(max(1, d), SUM_EPS_BITS)
    for off, m, scratch in iter_segments(table, n, seg):
        kernels.march_values(scratch, out[off: off + m])
    return out.astype(np.float64) * _INV_2_64


def _row_complex_sum(coeffs: Sequence[Fraction], n: int) -> tuple[float, float]:
    ph = _TWO_PI * _row_phases(coeffs, n)
    return float(np.cos(ph).sum()), float(np.sin(ph).sum())


def weyl_sum(alpha: RealLike, k: int, X: int, h: int) -> float:
    """|sum_{x=1}^{X} e(h * alpha * x^k)|."""
    if X < 1 or h < 1 or k < 1:
        raise DomainError("weyl_sum needs X >= 1, h >= 1, k >= 1")
    a = h * _to_fraction(alpha)
    coeffs = [Fraction(0)] * k + [a]
    re, im = _row_complex_sum(coeffs, X)
    return math.hypot(re, im)


def _form_fractions(f: BinaryForm) -> tuple[Fraction, list[Fraction]]:
    top = f.alpha_k.as_fraction()
    lowers = [f.coeff(j).as_fraction() for j in range(f.l + 1)]
    return top, lowers  # lowers[j] multiplies x^j y^(k-j)


def _inner_xy_abs(f: BinaryForm, h: int, X: int, ys: Sequence[int]) -> float:
    """|sum_x sum_{y in ys} e(h g(x, y))| via per-y marched x-rows."""
    top, lowers = _form_fractions(f)
    k = f.k
    res: list[float] = []
    ims: list[float] = []
    for y in ys:
        coeffs = [Fraction(0)] * (k + 1)
        coeffs[k] = h * top
        yp = y ** (k - len(lowers) + 1)  # y^(k-l)
        for j in reversed(range(len(lowers))):
            coeffs[j] += h * lowers[j] * yp
            yp *= y
        re, im = _row_complex_sum(coeffs, X)
        res.append(re)
        ims.append(im)
    return math.hypot(fsum(res), fsum(ims))


def _outer_abs_sum(f: BinaryForm, H: int, X: int, ys: Sequence[int],
                   workers: int) -> tuple[float, tuple[float, ...]]:
    hs = range(1, H + 1)
    if workers > 1 and H > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            terms = list(pool.map(lambda h: _inner_xy_abs(f, h, X, ys), hs))
    else:
        terms = [_inner_xy_abs(f, h, X, ys) for h in hs]
    return fsum(terms), tuple(terms)


def sum_T(f: BinaryForm, H: int, X: int, Y: int, workers: int = 1,
          budget: int | None = None) -> ExpSumValue:
    """T = sum_{1<=h<=H} |sum_{1<=x<=X} sum_{1<=y<=Y} e(h g(x, y))|."""
    if H < 1 or X < 1 or Y < 1:
        raise DomainError("sum_T needs H, X, Y >= 1")
    check_budget(H * X * Y, budget)
    value, terms = _outer_abs_sum(f, H, X, range(1, Y + 1), workers)
    return ExpSumValue(value=value, terms=terms,
                       params={"kind": "T", "H": H, "X": X, "Y": Y,
                               "form": f.describe()})


def sum_S(f: BinaryForm, H: int, X: int, Y: int, R: int, workers: int = 1,
          budget: int | None = None) -> ExpSumValue:
    """T with y restricted to the R-smooth integers in [1, Y]."""
    if H < 1 or X < 1 or Y < 1 or R < 1:
        raise DomainError("sum_S needs H, X, Y, R >= 1")
    ys = enumerate_smooth(Y, R).members
    check_budget(H * X * len(ys), budget)
    value, terms = _outer_abs_sum(f, H, X, ys, workers)
    return ExpSumValue(value=value, terms=terms,
                       params={"kind": "S", "H": H, "X": X, "Y": Y, "R": R,
                               "smooth_count": len(ys), "form": f.describe()})


# ---------------------------------------------------------------------------
# Xi(beta): the doubly-differenced linear-phase grid sum


@dataclass(frozen=True)
class XiParams:
    """Ranges for Xi: 1 <= v_i <= V_i, U/2 < u_1, u_2 <= U, 1 <= x <= L.

    hypothesis_ok records whether (U, V_1..V_r, L) satisfy the three size
    constraints under which the Xi bound is stated:
      1 <= U <= (1/2) (L V_1^m ... V_r^m)^(1/(2m-1)),
      1 <= V_r < (1/2) L^(1/m) U^(-1/(2m)),
      1 <= V_i < (1/2) L^(1/m) V_{i+1}...V_r U^(-1)   (i < r),
    with m = k - l. Evaluation is always permitted; `xi_bound` refuses
    parameter sets whose flag is down.
    """

    V: tuple[float, ...]
    U: float
    L: float
    k: int
    l: int
    beta: PrecReal

    def __post_init__(self):
        object.__setattr__(self, "V", tuple(float(v) for v in self.V))
        if not self.V:
            raise DomainError("at least one V_1 is required")
        if self.k < 3 or not 1 <= self.l <= self.k // 2:
            raise DomainError("need k >= 3 and 1 <= l <= k/2")
        if self.U < 1 or self.L < 1 or any(v < 1 for v in self.V):
            raise DomainError("U, L and every V_i must be >= 1")

    @property
    def r(self) -> int:
        return len(self.V)

    @property
    def Q(self) -> float:
        m = self.k - self.l
        return math.prod(v ** m for v in self.V) * self.U ** m * self.L

    @property
    def hypothesis_ok(self) -> bool:
        m = self.k - self.l
        V, U, L = self.V, self.U, self.L
        if not U <= 0.5 * (L * math.prod(v ** m for v in V)) ** (1 / (2 * m - 1)):
            return False
        if not V[-1] < 0.5 * L ** (1 / m) * U ** (-1 / (2 * m)):
            return False
        for i in range(len(V) - 1):
            if not V[i] < 0.5 * L ** (1 / m) * math.prod(V[i + 1:]) / U:
                return False
        return True


def _sym_frac(t: Fraction) -> float:
    """frac(t) mapped into [-1/2, 1/2], where sin(pi*.) is well-conditioned."""
    s = frac_part(t)
    if 2 * s > 1:
        s -= 1
    return float(s)


def _linear_run_abs(theta: Fraction, n: int) -> float:
    """|sum_{x=1}^{n} e(theta x)| via the geometric-series closed form.

    Both sine arguments are reduced mod 1 exactly first, so the result's
    accuracy does not degrade with n.
    """
    t = frac_part(theta)
    if t == 0:
        return float(n)
    num = math.sin(math.pi * _sym_frac(n * t))
    den = math.sin(math.pi * _sym_frac(t))
    return abs(num / den)


def sum_Xi(p: XiParams, workers: int = 1, budget: int | None = None) -> float:
    """Xi(beta) by direct enumeration of the (v, u1, u2) grid.

    The inner x-run has a linear phase, so each grid cell costs O(1).
    """
    m = p.k - p.l
    n = math.floor(p.L)
    if n < 1:
        raise DomainError("L must admit at least one x term")
    v_ranges = [range(1, math.floor(v) + 1) for v in p.V]
    us = range(math.floor(p.U / 2) + 1, math.floor(p.U) + 1)
    if any(len(rg) == 0 for rg in v_ranges) or len(us) == 0:
        raise DomainError("empty v or u range")
    cells = math.prod(len(rg) for rg in v_ranges) * len(us) ** 2
    check_budget(cells, budget)
    beta = p.beta.as_fraction() if isinstance(p.beta, PrecReal) else _to_fraction(p.beta)
    u_pows = {u: u ** m for u in us}

    def v1_slice(v1: int) -> float:
        parts: list[float] = []
        for rest in itertools.product(*v_ranges[1:]):
            vm = (v1 * math.prod(rest)) ** m
            for u1 in us:
                for u2 in us:
                    theta = beta * (vm * (u_pows[u1] - u_pows[u2]))
                    parts.append(_linear_run_abs(theta, n))
        return fsum(parts)

    v1s = list(v_ranges[0])
    if workers > 1 and len(v1s) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(v1_slice, v1s))
    else:
        partials = [v1_slice(v1) for v1 in v1s]
    return fsum(partials)


def xi_bound(p: XiParams, N: float | None = None, eps: float = 0.1
             ) -> dict:
    """The stated Xi majorant, with (q, a) drawn from the beta approximation.

    N defaults to the geometric midpoint of its allowed window
    [U^(m/2), Q U^(-m/2)]. Refuses parameter sets with hypothesis_ok False.
    """
    if not p.hypothesis_ok:
        raise DomainError("XiParams violate the stated size hypotheses")
    m = p.k - p.l
    lo, hi = p.U ** (m / 2), p.Q * p.U ** (-m / 2)
    if N is None:
        N = math.sqrt(lo * hi)
    if not lo <= N <= hi:
        raise DomainError("N outside its allowed window")
    approx = dirichlet_approx(p.beta, max(1, math.floor(N)))
    q, a = approx.q, approx.a
    beta = p.beta.as_fraction()
    dist = abs(float(q * beta - a))
    v_prod = math.prod(p.V)
    bound = (v_prod * p.U ** 2 * p.L ** (1 + eps)
             / (q + p.Q * dist) ** (1 / m)
             + v_prod * p.L ** (1 + eps) * p.U ** 1.5)
    return {"bound": bound, "q": q, "a": a, "N": N, "eps": eps,
            "beta_err": dist}


# ---------------------------------------------------------------------------
# Small checks: the H-fold lower bound, the Appendix sums, the T majorant


class Lemma21Result(NamedTuple):
    holds_hypothesis: bool
    lhs: float
    rhs: float


def lemma21_check(values: Sequence[RealLike], H: int) -> Lemma21Result:
    """Check sum_{h<=H} |sum_n e(h x_n)| >= N/6 under ||x_n|| >= 1/H.

    The hypothesis is decided in exact arithmetic. The left-hand side uses
    64-bit fixed-point phase images (error below H * 2^-64 per phase), so a
    caller asserting lhs >= rhs should allow ~2^-30 slack.
    """
    if H < 1 or not values:
        raise DomainError("need H >= 1 and at least one value")
    fracs = [frac_part(v) for v in values]
    thresh = Fraction(1, H)
    holds = all(min(fp, 1 - fp) >= thresh for fp in fracs)
    base = np.array([(fp.numerator << 64) // fp.denominator for fp in fracs],
                    dtype=np.uint64)
    terms = []
    for h in range(1, H + 1):
        ph = (np.uint64(h) * base).astype(np.float64) * (_TWO_PI * _INV_2_64)
        terms.append(math.hypot(float(np.cos(ph).sum()),
                                float(np.sin(ph).sum())))
    return Lemma21Result(holds_hypothesis=holds, lhs=fsum(terms),
                         rhs=len(values) / 6.0)


class AppendixSum(NamedTuple):
    sum: float
    bound: float
    ratio: float


def appendix_sum(variant: int, alpha: float, N: int, k_minus_l: int
                 ) -> AppendixSum:
    """One of the three reciprocal-power sums and its stated majorant.

    variant 1: sum 1/(1+a n^m)        vs N/(1+N^m a)^(1/m)
    variant 2: sum 1/(1+a n^m)^(1/m)  vs N log N/(1+N^m a)^(1/m)
    variant 3: sum 1/(1+a n)^(2/m)    vs N log N/(1+N a)^(2/m)
    """
    m = k_minus_l
    if alpha <= 0 or N < 2 or m < 2:
        raise DomainError("need alpha > 0, N >= 2, k-l >= 2")
    if variant == 1:
        s = fsum(1.0 / (1.0 + alpha * n ** m) for n in range(1, N + 1))
        bound = N / (1.0 + N ** m * alpha) ** (1.0 / m)
    elif variant == 2:
        s = fsum((1.0 + alpha * n ** m) ** (-1.0 / m) for n in range(1, N + 1))
        bound = N * math.log(N) / (1.0 + N ** m * alpha) ** (1.0 / m)
    elif variant == 3:
        s = fsum((1.0 + alpha * n) ** (-2.0 / m) for n in range(1, N + 1))
        bound = N * math.log(N) / (1.0 + N * alpha) ** (2.0 / m)
    else:
        raise DomainError("variant must be 1, 2 or 3")
    return AppendixSum(sum=s, bound=bound, ratio=s / bound)


def lemma31_ratio(f: BinaryForm, H: int, X: int, Y: int, eps: float = 0.1,
                  workers: int = 1, budget: int | None = None) -> dict:
    """T(alpha) against its two-factor majorant; reports the ratio.

    q1 approximates the top coefficient (denominator cap X), q2 the leading
    lower coefficient (cap Y); both come from continued-fraction convergents
    and so satisfy |alpha - a/q| <= q^-2.
    """
    k, l = f.k, f.l
    r1 = dirichlet_approx(f.alpha_k, X)
    r2 = dirichlet_approx(f.coeff(l), Y)
    q1, q2 = r1.q, r2.q
    t = sum_T(f, H, X, Y, workers=workers, budget=budget)
    expo = 2.0 ** (1 - k)
    bound = (H * (X * Y) ** (1.0 + eps)
             * (1.0 / q1 + 1.0 / X + q1 / (H * X ** k)) ** expo
             * (1.0 / q2 + 1.0 / Y + q2 / (H * X ** l * Y ** (k - l))) ** expo)
    return {"T": t.value, "bound": bound, "ratio": t.value / bound,
            "q1": q1, "q2": q2, "eps": eps,
            "params": {"H": H, "X": X, "Y": Y}}
