"""Fractional parts of binary forms, computably.

The package makes three families of objects concrete:

* forms and their minima: `BinaryForm`, exhaustive `min_fracpart` searches
  over integer boxes (optionally with smooth y), and the admissible
  exponents guaranteeing small values exist;
* the analytic machinery those exponents come from: continued-fraction /
  Dirichlet approximation, Weyl differencing, exponential sums with their
  majorants, and smooth-number enumeration;
* the constructive route: `reduce` diagonalizes a form step by step with
  exact lift certificates, and `find_small` turns a diagonal minimum back
  into a small value of the original form.

`harness.run` sweeps any of these over an X grid into replayable JSONL
records; the `binform` CLI fronts everything.
"""

from .config import DEFAULT_EVAL_BUDGET, eval_budget
from .errors import (
    BinformError,
    BudgetExceededError,
    DegenerateFormError,
    DomainError,
    InsufficientRowsError,
    LiftRangeError,
    PrecisionExhaustedError,
)
from .expsums import (
    AppendixSum,
    Lemma21Result,
    XiParams,
    appendix_sum,
    lemma21_check,
    lemma31_ratio,
    sum_S,
    sum_T,
    sum_Xi,
    weyl_sum,
    xi_bound,
)
from .exponents import (
    ExponentTable,
    rho,
    sigma0_prop62,
    sigma_theorem11,
    sigma_theorem13,
    sigma_theorem14,
    thresholds,
)
from .forms import (
    BinaryForm,
    DifferencedForm,
    IntegerBinaryForm,
    Substitution,
    change_of_variables,
    parse_form_literal,
    weyl_difference,
)
from .harness import (
    ExperimentRecord,
    ExperimentSpec,
    SplitMix64,
    fit_exponent,
    read_records,
    report,
    run,
    write_records,
)
from .numerics import PrecReal, frac_norm, frac_part
from .rational import RationalApproximation, continued_fraction, dirichlet_approx
from .reduction import (
    LiftCertificate,
    ReductionStep,
    ReductionTrace,
    find_small,
    find_small_with_trace,
    lift,
    reduce,
)
from .search import (
    DiagonalForm,
    SearchBox,
    SearchResult,
    min_fracpart,
    min_fracpart_diagonal,
    min_fracpart_smooth_y,
)
from .smooth import SmoothSet, decompose, enumerate_smooth

__version__ = "0.1.0"

__all__ = [
    "AppendixSum",
    "BinaryForm",
    "BinformError",
    "BudgetExceededError",
    "DEFAULT_EVAL_BUDGET",
    "DegenerateFormError",
    "DiagonalForm",
    "DifferencedForm",
    "DomainError",
    "ExperimentRecord",
    "ExperimentSpec",
    "ExponentTable",
    "InsufficientRowsError",
    "IntegerBinaryForm",
    "Lemma21Result",
    "LiftCertificate",
    "LiftRangeError",
    "PrecReal",
    "PrecisionExhaustedError",
    "RationalApproximation",
    "ReductionStep",
    "ReductionTrace",
    "SearchBox",
    "SearchResult",
    "SmoothSet",
    "SplitMix64",
    "Substitution",
    "XiParams",
    "appendix_sum",
    "change_of_variables",
    "continued_fraction",
    "decompose",
    "dirichlet_approx",
    "enumerate_smooth",
    "eval_budget",
    "find_small",
    "find_small_with_trace",
    "fit_exponent",
    "frac_norm",
    "frac_part",
    "lemma21_check",
    "lemma31_ratio",
    "lift",
    "min_fracpart",
    "min_fracpart_diagonal",
    "min_fracpart_smooth_y",
    "parse_form_literal",
    "read_records",
    "reduce",
    "report",
    "rho",
    "run",
    "sigma0_prop62",
    "sigma_theorem11",
    "sigma_theorem13",
    "sigma_theorem14",
    "sum_S",
    "sum_T",
    "sum_Xi",
    "thresholds",
    "weyl_difference",
    "weyl_sum",
    "write_records",
    "xi_bound",
]
