"""Experiment runner: sweeps, empirical exponent fits, JSONL persistence.

Coefficient seeding uses splitmix64 (Steele-Lea-Burton mixer: state walks by
0x9E3779B97F4A7C15; output is the state scrambled by two xor-shift-multiply
rounds with 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, final shift 31). It
is tiny, full-period, and specified exactly, so alternate implementations in
any language reproduce the coefficient streams bit for bit. Uniform draws
take the top 53 bits, giving exactly representable floats in [0, 1), which
are then carried as exact dyadic rationals.

Records are line-delimited JSON, one record per line, sorted keys, compact
separators, with a schema_version field, so files are append-friendly and
byte-stable: identical spec + seed + artifact version reproduce identical
lines regardless of worker count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .config import eval_budget
from .errors import BudgetExceededError, DomainError, InsufficientRowsError
from .expsums import (
    XiParams,
    appendix_sum,
    lemma21_check,
    lemma31_ratio,
    sum_Xi,
    xi_bound,
)
from .exponents import sigma_theorem11
from .forms import BinaryForm
from .numerics import PrecReal
from .search import DiagonalForm, SearchBox, min_fracpart, \
    min_fracpart_diagonal

SCHEMA_VERSION = 1
ARTIFACT_VERSION = "binform-0.1.0"

KINDS = ("theorem-bound", "diagonal-bound", "lemma21", "lemma31-trend",
         "appendixA", "xi-eval")

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 generator; see the module header for the constants."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Exactly representable draw from [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53


@dataclass(frozen=True)
class ExperimentSpec:
    id: str
    kind: str
    k: int
    l: int
    coefficient_source: str     # "named constants" or "seeded uniform"
    X_grid: tuple[int, ...]
    epsilon: float
    H_rule: str
    seed: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown kind {self.kind!r}; expected {KINDS}")
        if not self.X_grid or any(b <= a for a, b in
                                  zip(self.X_grid, self.X_grid[1:])):
            raise DomainError("X_grid must be nonempty, strictly increasing")
        if min(self.X_grid) < 1:
            raise DomainError("X_grid entries must be >= 1")
        if not 0 <= self.seed <= _MASK64:
            raise DomainError("seed must fit in 64 bits")
        if self.k < 2 or not 0 <= self.l <= self.k - 2:
            raise DomainError(f"bad degrees k={self.k}, l={self.l}")
        src = self.coefficient_source
        if not (src.startswith("named") or src.startswith("seeded")
                or src.startswith("rational:")):
            raise DomainError(
                "coefficient_source must be 'named constants', "
                "'seeded uniform', or 'rational:<alpha_k>,<alpha_l..0>'")
        if src.startswith("rational:"):
            n_toks = len(src[len("rational:"):].split(","))
            if n_toks != self.l + 2:
                raise DomainError(
                    f"rational source needs alpha_k plus {self.l + 1} lower "
                    f"coefficients, got {n_toks} values")
        object.__setattr__(self, "X_grid", tuple(self.X_grid))

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind, "k": self.k, "l": self.l,
                "coefficient_source": self.coefficient_source,
                "X_grid": list(self.X_grid), "epsilon": self.epsilon,
                "H_rule": self.H_rule, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        return cls(id=d["id"], kind=d["kind"], k=d["k"], l=d["l"],
                   coefficient_source=d["coefficient_source"],
                   X_grid=tuple(d["X_grid"]), epsilon=d["epsilon"],
                   H_rule=d["H_rule"], seed=d["seed"])


@dataclass(frozen=True)
class ExperimentRecord:
    spec: ExperimentSpec
    rows: tuple[dict, ...]
    fitted_slope: float | None
    artifact_version: str
    timestamp: str
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION,
                "artifact_version": self.artifact_version,
                "timestamp": self.timestamp, "spec": self.spec.to_dict(),
                "config": self.config, "rows": list(self.rows),
                "fitted_slope": self.fitted_slope}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True,
                          separators=(",", ":"))


_NAMED_CYCLE = ("sqrt3", "pi", "e", "golden")


def spec_coefficients(spec: ExperimentSpec) -> tuple[PrecReal, list[PrecReal]]:
    """(alpha_k, [alpha_l..alpha_0]): fully determined by the spec."""
    n_low = spec.l + 1
    src = spec.coefficient_source
    if src.startswith("named"):
        top = PrecReal.named("sqrt2")
        lows = [PrecReal.named(_NAMED_CYCLE[r % len(_NAMED_CYCLE)])
                for r in range(n_low)]
        return top, lows
    if src.startswith("rational:"):
        vals = [PrecReal.parse(tok.strip())
                for tok in src[len("rational:"):].split(",")]
        return vals[0], vals[1:]
    rng = SplitMix64(spec.seed)
    top = PrecReal.from_float(rng.uniform() + 0.5)  # keep away from 0
    lows = [PrecReal.from_float(rng.uniform()) for _ in range(n_low)]
    return top, lows


def spec_form(spec: ExperimentSpec) -> BinaryForm:
    top, lows = spec_coefficients(spec)
    return BinaryForm(k=spec.k, l=spec.l, alpha_k=top,
                      lower_coeffs=tuple(lows))


def _sigma_hat(min_value: float, X: int) -> float | None:
    if min_value is None or min_value <= 0 or X < 2:
        return None
    return -math.log(min_value) / math.log(X)


def _h_of(rule: str, X: int) -> int:
    """Evaluate an H_rule description: 'sqrt' (default), or 'X^<p>'."""
    if rule.startswith("X^"):
        return max(2, int(math.floor(X ** float(rule[2:]))))
    return max(2, int(math.isqrt(X)))


def _row_theorem_bound(spec: ExperimentSpec, X: int, workers: int,
                       budget: int | None) -> dict:
    f = spec_form(spec)
    res = min_fracpart(f, SearchBox(x_max=X, y_max=X), workers=workers,
                       budget=budget)
    if spec.l >= 1 and spec.k >= 3:
        sigma = float(sigma_theorem11(spec.k, spec.l))
    else:
        sigma = float(Fraction(spec.l + 2, (spec.l + 1) * 2 ** (spec.k - 1)))
    threshold = X ** (-sigma + spec.epsilon)
    zero = res.min_value == 0.0
    return {"X": X, "min_value": res.min_value,
            "sigma_hat": _sigma_hat(res.min_value, X),
            "theorem_sigma": sigma,
            "pass_trend": res.min_value <= threshold,
            "extra": {"best_x": res.best_x, "best_y": res.best_y,
                      "threshold": threshold, "zero_min": zero,
                      "provenance": res.provenance}}


def _row_diagonal_bound(spec: ExperimentSpec, X: int, workers: int,
                        budget: int | None) -> dict:
    top, lows = spec_coefficients(spec)
    d = DiagonalForm(alpha=top, beta=lows[-1], k=spec.k)
    res = min_fracpart_diagonal(d, X, X, workers=workers, budget=budget)
    sigma = 2.0 ** (1 - spec.k)
    threshold = X ** (-sigma + spec.epsilon)
    return {"X": X, "min_value": res.min_value,
            "sigma_hat": _sigma_hat(res.min_value, X),
            "theorem_sigma": sigma,
            "pass_trend": res.min_value <= threshold,
            "extra": {"best_x": res.best_x, "best_y": res.best_y,
                      "threshold": threshold,
                      "zero_min": res.min_value == 0.0,
                      "provenance": res.provenance}}


def _row_lemma21(spec: ExperimentSpec, X: int, workers: int,
                 budget: int | None) -> dict:
    # X plays the role of N: how many hypothesis-satisfying values to draw
    H = _h_of(spec.H_rule, X)
    rng = SplitMix64(spec.seed ^ X)
    lo = Fraction(1, H)
    values = []
    for _ in range(X):
        t = Fraction(rng.next_u64(), 1 << 64)  # uniform in [0, 1)
        values.append(lo + t * (1 - 2 * lo))   # inside [1/H, 1 - 1/H]
    chk = lemma21_check(values, H)
    assert chk.holds_hypothesis, "drawn values must satisfy ||x_n|| >= 1/H"
    passed = chk.lhs >= chk.rhs - 2.0 ** -30
    assert passed, "hypothesis-satisfying sets must pass the sum bound"
    return {"X": X, "min_value": chk.lhs, "sigma_hat": None,
            "theorem_sigma": None, "pass_trend": passed,
            "extra": {"H": H, "N": X, "lhs": chk.lhs, "target": chk.rhs}}


def _row_lemma31(spec: ExperimentSpec, X: int, workers: int,
                 budget: int | None) -> dict:
    f = spec_form(spec)
    H = _h_of(spec.H_rule, X)
    out = lemma31_ratio(f, H, X, X, eps=spec.epsilon, workers=workers,
                        budget=budget)
    return {"X": X, "min_value": out["ratio"], "sigma_hat": None,
            "theorem_sigma": None, "pass_trend": 0 < out["ratio"] <= 32,
            "extra": {"H": H, "T": out["T"], "bound": out["bound"],
                      "q1": out["q1"], "q2": out["q2"]}}


def _row_appendix(spec: ExperimentSpec, X: int, workers: int,
                  budget: int | None) -> dict:
    rng = SplitMix64(spec.seed ^ X)
    alpha = 2.0 ** (rng.uniform() * 40.0 - 20.0)
    m = max(2, spec.k - spec.l)
    ratios = {}
    ok = True
    for variant in (1, 2, 3):
        out = appendix_sum(variant, alpha, X, m)
        ratios[f"variant{variant}"] = out.ratio
        ok = ok and 0 < out.ratio <= 32
    worst = max(ratios.values())
    return {"X": X, "min_value": worst, "sigma_hat": None,
            "theorem_sigma": None, "pass_trend": ok,
            "extra": {"alpha": alpha, "m": m, **ratios}}


def _row_xi(spec: ExperimentSpec, X: int, workers: int,
            budget: int | None) -> dict:
    """Evaluate Xi with fixed small ranges V=(2,), U=2 and L=X.

    The size hypothesis behind the Xi bound requires L large relative to U
    and the V_i, so small-X rows may carry hypothesis_ok=False: the sum is
    still evaluated and recorded, but no bound applies and pass_trend is
    False with the reason noted.
    """
    rng = SplitMix64(spec.seed ^ X)
    beta = PrecReal.from_float(rng.uniform() + 0.5)
    p = XiParams(V=(2.0,), U=2.0, L=float(X), k=spec.k, l=spec.l, beta=beta)
    value = sum_Xi(p, workers=workers, budget=budget)
    if p.hypothesis_ok:
        bound = xi_bound(p, eps=spec.epsilon)["bound"]
        ratio = value / bound if bound > 0 else math.inf
        ok = 0 <= ratio <= 32
        extra = {"beta": float(beta), "bound": bound, "ratio": ratio,
                 "hypothesis_ok": True}
    else:
        ok = False
        extra = {"beta": float(beta), "bound": None, "ratio": None,
                 "hypothesis_ok": False, "reason": "size-hypothesis"}
    return {"X": X, "min_value": value, "sigma_hat": None,
            "theorem_sigma": None, "pass_trend": ok, "extra": extra}


_ROW_RUNNERS = {
    "theorem-bound": _row_theorem_bound,
    "diagonal-bound": _row_diagonal_bound,
    "lemma21": _row_lemma21,
    "lemma31-trend": _row_lemma31,
    "appendixA": _row_appendix,
    "xi-eval": _row_xi,
}


def run(spec: ExperimentSpec, workers: int = 1, budget: int | None = None,
        timestamp: str = "") -> ExperimentRecord:
    """Execute one experiment; deterministic given spec, seed, and version.

    The timestamp is caller-supplied metadata (empty by default) so that
    replaying a spec reproduces the record byte for byte.
    """
    runner = _ROW_RUNNERS[spec.kind]
    rows: list[dict] = []
    for X in spec.X_grid:
        try:
            rows.append(runner(spec, X, workers, budget))
        except BudgetExceededError as exc:
            rows.append({"X": X, "min_value": None, "sigma_hat": None,
                         "theorem_sigma": None, "pass_trend": False,
                         "extra": {"failed": "budget-exceeded",
                                   "needed": exc.needed,
                                   "budget": exc.budget}})
            break
    try:
        slope = fit_exponent(rows)
    except InsufficientRowsError:
        slope = None
    config = {"prng": "splitmix64", "backend": kernels.backend_name(),
              "budget": eval_budget(budget), "epsilon": spec.epsilon,
              "H_rule": spec.H_rule}
    return ExperimentRecord(
        spec=spec, rows=tuple(rows), fitted_slope=slope,
        artifact_version=f"{ARTIFACT_VERSION}+{kernels.backend_name()}",
        timestamp=timestamp, config=config)


def fit_exponent(rows: Sequence[dict]) -> float:
    """Least-squares slope of log min_value against log X."""
    pts = [(r["X"], r["min_value"]) for r in rows
           if r.get("min_value") and r["min_value"] > 0]
    if len(pts) < 3:
        raise InsufficientRowsError(
            f"need >= 3 rows with positive minima, have {len(pts)}")
    xs = np.log([float(x) for x, _ in pts])
    ys = np.log([m for _, m in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def write_records(records: Iterable[ExperimentRecord], path: str) -> int:
    """Append records to a JSONL file; returns the number written."""
    n = 0
    with open(path, "a", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")
            n += 1
    return n


def read_records(path: str) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def report(records: Sequence[dict], fmt: str = "csv") -> str:
    """Plot-ready table of all rows across records (csv or md)."""
    cols = ("id", "kind", "k", "l", "X", "min_value", "sigma_hat",
            "theorem_sigma", "pass_trend", "fitted_slope")
    lines = []
    grid = []
    for rec in records:
        spec = rec["spec"]
        for row in rec["rows"]:
            grid.append([spec["id"], spec["kind"], spec["k"], spec["l"],
                         row["X"], row["min_value"], row["sigma_hat"],
                         row["theorem_sigma"], row["pass_trend"],
                         rec["fitted_slope"]])
    if fmt == "csv":
        lines.append(",".join(cols))
        for g in grid:
            lines.append(",".join("" if v is None else str(v) for v in g))
    elif fmt == "md":
        lines.append("| " + " | ".join(cols) + " |")
        lines.append("|" + "---|" * len(cols))
        for g in grid:
            lines.append("| " + " | ".join(
                "" if v is None else str(v) for v in g) + " |")
    else:
        raise DomainError(f"unknown report format {fmt!r}")
    return "\n".join(lines) + "\n"
