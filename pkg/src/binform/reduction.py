"""Inductive diagonalization of a binary form, and the lift back.

Each step approximates the highest surviving lower coefficient theta_i by
a_i/q_i (Dirichlet, with the active mode's modulus window), substitutes
y -> q_i * y1, and absorbs the near-integer term: theta_i q^(k-l+i) =
a_i q^(k-l+i-1) + (q theta_i - a_i) q^(k-l+i-1), an integer plus a
controlled error. The surviving coefficients pick up integer factors
q^(k-j), the y-box shrinks along the mode's schedule, and after l steps
only the diagonal pair (alpha_k, alpha_0^(l)) remains.

Everything downstream needs is kept exact: coefficients ride as Fractions
(the dyadic witnesses of the inputs times integer powers), so replaying the
transform rule reproduces the chain bit for bit, and `lift` certifies

    ||Psi(x, q_0...q_{l-1} y0)|| <= ||alpha_k x^k + beta y0^k|| + sum |delta_i|

with delta_i = (q_i theta_i - a_i) q_i^(k-l+i-1) x^(l-i) y_(i+1)^(k-l+i):
the two sides differ by the integer terms dropped along the chain, so the
inequality is a triangle inequality over exact rationals, not a numerical
hope.

Window emptiness and per-step error-budget misses are recorded on the step,
never silently accepted; `find_small` falls back to exhaustive search (with
a provenance flag) when a window comes up empty at the given X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import DomainError, LiftRangeError
from .exponents import sigma_theorem13, sigma_theorem14
from .forms import BinaryForm
from .numerics import PrecReal
from .rational import dirichlet_approx
from .search import DiagonalForm, SearchBox, SearchResult, min_fracpart

MODES = ("t11", "t13", "t14")

#: ln of the largest Dirichlet window ever requested; beyond this every
#: coefficient in the chain (a dyadic rational) is matched exactly anyway.
_LN_WINDOW_CAP = 700.0


def _safe_float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def _dist(v: Fraction) -> Fraction:
    fp = v - (v.numerator // v.denominator)
    return min(fp, 1 - fp)


@dataclass(frozen=True)
class ReductionStep:
    """One substitution y -> q * y1 with its bookkeeping.

    coeffs_after lists the surviving lower coefficients alpha^(i+1) in
    descending monomial order (alpha_(l-i-1), ..., alpha_0), exactly.
    """

    step_index: int
    q: int
    a: int
    approx_error: float                  # ||q * theta_i||, rounded once
    Y: int                               # y-box on entry (Y_i)
    Y_next: int                          # y1-box after the step (Y_(i+1))
    coeffs_after: tuple[Fraction, ...]
    window: int                          # Dirichlet modulus bound, 0 = empty
    window_empty: bool
    error_budget: float                  # X^(l-i) Y_i^(k-l+i-1) Y_(i+1) ||q theta||
    budget_ok: bool

    def to_dict(self) -> dict:
        return {"step_index": self.step_index, "q": self.q, "a": self.a,
                "approx_error": self.approx_error, "Y": self.Y,
                "Y_next": self.Y_next,
                "coeffs_after": [_safe_float(c) for c in self.coeffs_after],
                "window": self.window, "window_empty": self.window_empty,
                "error_budget": self.error_budget,
                "budget_ok": self.budget_ok}


@dataclass(frozen=True)
class ReductionTrace:
    original: BinaryForm
    mode: str
    H: float
    steps: tuple[ReductionStep, ...]
    final_diagonal: DiagonalForm
    q_product: int
    X: int
    final_Y: int
    sigma: float
    eta: float
    delta: float
    eps: float
    lifted_point: tuple[int, int] | None = None

    @property
    def windows_ok(self) -> bool:
        return all(not s.window_empty for s in self.steps)

    @property
    def budgets_ok(self) -> bool:
        return all(s.budget_ok for s in self.steps)

    def to_dict(self) -> dict:
        return {"form": self.original.describe(), "k": self.original.k,
                "l": self.original.l, "mode": self.mode, "X": self.X,
                "H": self.H, "sigma": self.sigma, "eta": self.eta,
                "delta": self.delta, "eps": self.eps,
                "q_product": self.q_product, "final_Y": self.final_Y,
                "windows_ok": self.windows_ok, "budgets_ok": self.budgets_ok,
                "final_diagonal": {
                    "alpha": _safe_float(self.final_diagonal.alpha.as_fraction()),
                    "beta": _safe_float(self.final_diagonal.beta.as_fraction()),
                    "k": self.final_diagonal.k},
                "steps": [s.to_dict() for s in self.steps],
                "lifted_point": list(self.lifted_point)
                if self.lifted_point else None}


@dataclass(frozen=True)
class LiftCertificate:
    """Lifted point plus the evaluated inequality chain."""

    x: int
    y: int
    value: float             # ||Psi(x, y)|| at the lifted point
    diagonal_value: float    # ||alpha_k x^k + beta y0^k|| at the input point
    step_errors: tuple[float, ...]
    bound: float             # diagonal_value + sum step_errors
    holds: bool              # exact-arithmetic comparison value <= bound

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "value": self.value,
                "diagonal_value": self.diagonal_value,
                "step_errors": list(self.step_errors), "bound": self.bound,
                "holds": self.holds}


def _mode_sigma(mode: str, k: int, l: int, C: float) -> float:
    if mode == "t11":
        return float(Fraction(l + 2, (l + 1) * 2 ** (k - 1)))
    if k < 3:
        raise DomainError(f"mode {mode} needs k >= 3")
    if mode == "t13":
        if l == 0:
            return float(Fraction(2, k * (k - 1)))
        return float(sigma_theorem13(k, l))
    if mode == "t14":
        if l == 0:
            if C <= 0:
                raise DomainError("C must be positive")
            return 2.0 / (k * math.log(k) + C * k * math.log(math.log(k)))
        return sigma_theorem14(k, l, C=C, enforce_threshold=True)
    raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")


def _iroot(n: int, r: int) -> int:
    """Largest t >= 0 with t^r <= n."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0 or r == 1:
        return n
    t = max(1, int(round(n ** (1.0 / r))))
    while t > 0 and t ** r > n:
        t -= 1
    while (t + 1) ** r <= n:
        t += 1
    return t


def _y_schedule(mode: str, k: int, l: int, X: int, sigma: float) -> list[int]:
    """[Y_0, ..., Y_l]: the shrinking y-boxes of the active mode."""
    if mode == "t11":
        # Y_i = X^(1 - i/(l+1)), taken as an exact integer root
        return [_iroot(X ** (l + 1 - i), l + 1) for i in range(l + 1)]
    lnX = math.log(X)
    out = [X]
    shrink = 0
    for i in range(1, l + 1):
        m = i - 1
        shrink += 2 ** (l - m + 1) * (k - l + m)
        e = 1.0 - sigma * shrink
        out.append(0 if e <= 0 else int(math.floor(math.exp(e * lnX))))
    return out


def _window(mode: str, k: int, l: int, i: int, X: int, Y_i: int, H: float,
            sigma: float, delta: float, eta: float) -> int:
    """floor of the mode's Dirichlet modulus bound at step i (0 = empty)."""
    if Y_i < 1:
        return 0
    lnX, lnY = math.log(X), math.log(Y_i)
    if mode == "t11":
        ln_n = ((l - i + 1) * lnX + (k - l + i) * lnY
                + (1 - 2 ** (k - 1)) * math.log(H) - delta * lnX)
    else:
        ln_n = (math.log(H) + (k - l + i) * lnY
                + (l - i - 2 ** (l - i + 1) * (k - l + i) * sigma + eta) * lnX)
    if ln_n < 0:
        return 0
    return int(math.floor(math.exp(min(ln_n, _LN_WINDOW_CAP))))


def reduce(f: BinaryForm, X: int, mode: str = "t11", *, delta: float = 0.05,
           eta: float = 0.05, eps: float | None = None,
           H: float | None = None, C: float = 1.0) -> ReductionTrace:
    """Run the l-step diagonalization chain of the active mode.

    delta and eta are the run's concrete choices for the "any positive"
    constants; eps defaults to min(0.1, sigma/2) so that H = X^(sigma-eps)
    stays a positive power of X for every k.
    """
    if X < 2:
        raise DomainError("reduction needs X >= 2")
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")
    if delta <= 0 or eta <= 0:
        raise DomainError("delta and eta must be positive")
    k, l = f.k, f.l
    sigma = _mode_sigma(mode, k, l, C)
    if eps is None:
        eps = min(0.1, sigma / 2)
    if H is None:
        H = X ** (sigma - eps)
    if H < 1:
        raise DomainError("H must be >= 1")

    Ys = _y_schedule(mode, k, l, X, sigma)
    target = X ** (-eta) / H
    lnX = math.log(X)
    coeffs = [c.as_fraction() for c in f.lower_coeffs]  # level-i, descending
    steps: list[ReductionStep] = []
    q_product = 1
    for i in range(l):
        theta = coeffs[0]
        window = _window(mode, k, l, i, X, Ys[i], H, sigma, delta, eta)
        if window >= 1:
            approx = dirichlet_approx(theta, window)
            q, a = approx.q, approx.a
            empty = False
        else:  # empty window at this X: the identity substitution, flagged
            q = 1
            a = (2 * theta.numerator + theta.denominator) \
                // (2 * theta.denominator)
            empty = True
        err = abs(q * theta - a)
        err_f = float(err)
        if err_f == 0.0:
            budget = 0.0
        else:
            budget = math.exp((l - i) * lnX
                              + (k - l + i - 1) * math.log(max(Ys[i], 1))
                              + math.log(max(Ys[i + 1], 1))
                              + math.log(err_f))
        nxt = [coeffs[r] * q ** (k - (l - i - r)) for r in range(1, l - i + 1)]
        steps.append(ReductionStep(
            step_index=i, q=q, a=a, approx_error=err_f, Y=Ys[i],
            Y_next=Ys[i + 1], coeffs_after=tuple(nxt), window=window,
            window_empty=empty, error_budget=budget,
            budget_ok=budget <= target))
        coeffs = nxt
        q_product *= q

    beta = coeffs[0]
    diag = DiagonalForm(
        alpha=f.alpha_k,
        beta=PrecReal.from_rational(beta.numerator, beta.denominator,
                                    precision_bits=f.precision_bits),
        k=k)
    return ReductionTrace(original=f, mode=mode, H=H, steps=tuple(steps),
                          final_diagonal=diag, q_product=q_product, X=X,
                          final_Y=Ys[l], sigma=sigma, eta=eta, delta=delta,
                          eps=eps)


def lift(trace: ReductionTrace, diagonal_point: tuple[int, int]
         ) -> LiftCertificate:
    """Map a point of the final diagonal box back to original coordinates.

    The certificate inequality is exact by construction (the chain differs
    from the diagonal value by integers plus the delta_i terms); it is
    evaluated here in exact arithmetic and returned with float renditions.
    """
    x, y0 = diagonal_point
    f = trace.original
    k, l = f.k, f.l
    if not (0 <= x <= trace.X and 0 <= y0 <= trace.final_Y):
        raise LiftRangeError(
            f"point {diagonal_point} outside the final box "
            f"({trace.X}, {trace.final_Y})")
    y = trace.q_product * y0
    if y > trace.X:
        raise LiftRangeError(f"lifted y = {y} exceeds X = {trace.X}")

    # y-value seen at each level: y_levels[i] is the y of the level-i form
    y_levels = [y0] * (l + 1)
    for i in range(l - 1, -1, -1):
        y_levels[i] = trace.steps[i].q * y_levels[i + 1]

    level_coeffs = [c.as_fraction() for c in f.lower_coeffs]
    deltas: list[Fraction] = []
    for i, step in enumerate(trace.steps):
        theta = level_coeffs[0]
        deltas.append((step.q * theta - step.a) * step.q ** (k - l + i - 1)
                      * x ** (l - i) * y_levels[i + 1] ** (k - l + i))
        level_coeffs = list(step.coeffs_after)

    top = f.alpha_k.as_fraction()
    lowers = [c.as_fraction() for c in f.lower_coeffs]  # (alpha_l .. alpha_0)
    value = top * x ** k
    for r, c in enumerate(lowers):
        value += c * x ** (l - r) * y ** (k - l + r)
    lhs = _dist(value)

    beta = trace.final_diagonal.beta.as_fraction()
    diag_dist = _dist(top * x ** k + beta * y0 ** k)
    rhs = diag_dist + sum(abs(d) for d in deltas)
    return LiftCertificate(x=x, y=y, value=float(lhs),
                           diagonal_value=float(diag_dist),
                           step_errors=tuple(float(abs(d)) for d in deltas),
                           bound=_safe_float(rhs), holds=lhs <= rhs)


def find_small_with_trace(f: BinaryForm, X: int, mode: str = "t11", *,
                          workers: int = 1, budget: int | None = None,
                          delta: float = 0.05, eta: float = 0.05,
                          eps: float | None = None, H: float | None = None,
                          C: float = 1.0
                          ) -> tuple[SearchResult, ReductionTrace]:
    """reduce -> diagonal search -> lift, returning the trace as well."""
    trace = reduce(f, X, mode, delta=delta, eta=eta, eps=eps, H=H, C=C)
    if f.l == 0:
        res = min_fracpart(trace.final_diagonal.to_binary_form(),
                           SearchBox(x_max=X, y_max=X), workers=workers,
                           budget=budget)
        return res, replace(trace, lifted_point=(res.best_x, res.best_y))

    if not trace.windows_ok:
        res = min_fracpart(f, SearchBox(x_max=X, y_max=X), workers=workers,
                           budget=budget)
        res = replace(res, provenance=res.provenance + "+fallback-exhaustive")
        return res, trace

    y0_max = min(trace.final_Y, X // trace.q_product)
    dres = min_fracpart(trace.final_diagonal.to_binary_form(),
                        SearchBox(x_max=X, y_max=y0_max), workers=workers,
                        budget=budget)
    cert = lift(trace, (dres.best_x, dres.best_y))
    provenance = f"constructive-{mode}"
    if not trace.budgets_ok:
        provenance += "+budget-miss"
    res = SearchResult(best_x=cert.x, best_y=cert.y, min_value=cert.value,
                       box=SearchBox(x_max=X, y_max=X),
                       evaluations=dres.evaluations,
                       elapsed_ms=dres.elapsed_ms, provenance=provenance)
    return res, replace(trace, lifted_point=(cert.x, cert.y))


def find_small(f: BinaryForm, X: int, mode: str = "t11", *, workers: int = 1,
               budget: int | None = None, delta: float = 0.05,
               eta: float = 0.05, eps: float | None = None,
               H: float | None = None, C: float = 1.0) -> SearchResult:
    """Constructive small value of ||Psi|| on [0, X]^2 via the reduction."""
    res, _ = find_small_with_trace(f, X, mode, workers=workers, budget=budget,
                                   delta=delta, eta=eta, eps=eps, H=H, C=C)
    return res
