"""Reduction-chain tests: transform replay, schedules, windows, budgets,
lift certificates, and the constructive search composition."""

import math
from fractions import Fraction

import pytest

from binform.errors import DomainError, LiftRangeError
from binform.exponents import rho, sigma_theorem13
from binform.forms import BinaryForm
from binform.numerics import PrecReal
from binform.reduction import (
    find_small,
    find_small_with_trace,
    lift,
    reduce,
)
from binform.search import DiagonalForm, SearchBox, min_fracpart, \
    min_fracpart_diagonal


def _pr(x):
    if isinstance(x, str):
        return PrecReal.named(x)
    if isinstance(x, Fraction):
        return PrecReal.from_rational(x.numerator, x.denominator)
    return PrecReal.from_rational(int(x), 1)


def _form(k, l, top, lowers):
    return BinaryForm(k=k, l=l, alpha_k=_pr(top),
                      lower_coeffs=tuple(_pr(c) for c in lowers))


def test_zero_step_trace():
    f = _form(3, 0, "sqrt2", ["pi"])
    tr = reduce(f, 1000, "t11")
    assert tr.steps == ()
    assert tr.q_product == 1
    assert tr.final_Y == 1000
    assert tr.final_diagonal.alpha.as_fraction() == f.alpha_k.as_fraction()
    assert tr.final_diagonal.beta.as_fraction() == f.coeff(0).as_fraction()
    assert tr.windows_ok and tr.budgets_ok


def test_rational_chain_exact():
    Q = 12
    f = _form(4, 2, "sqrt2",
              [Fraction(5, Q), Fraction(7, Q), Fraction(1, Q)])
    tr = reduce(f, 10**4, "t11")
    assert len(tr.steps) == 2
    for s in tr.steps:
        assert Q % s.q == 0
        assert s.approx_error == 0.0
        assert not s.window_empty
        assert s.budget_ok
    # alpha_0 gains q^k at every step
    want_beta = Fraction(1, Q) * (tr.steps[0].q * tr.steps[1].q) ** 4
    assert tr.final_diagonal.beta.as_fraction() == want_beta


def test_transform_replay_generic():
    f = _form(4, 2, "sqrt2", ["pi", "e", "golden"])
    tr = reduce(f, 10**4, "t11")
    k, l = 4, 2
    level = [c.as_fraction() for c in f.lower_coeffs]
    for i, s in enumerate(tr.steps):
        want = tuple(level[r] * s.q ** (k - (l - i - r))
                     for r in range(1, l - i + 1))
        assert s.coeffs_after == want
        level = list(s.coeffs_after)
    assert tr.final_diagonal.beta.as_fraction() == level[0]
    assert tr.q_product == tr.steps[0].q * tr.steps[1].q


def test_t11_y_schedule_exact_roots():
    f = _form(4, 2, "sqrt2", ["pi", "e", "golden"])
    tr = reduce(f, 10**4, "t11")
    assert [s.Y for s in tr.steps] == [10**4, 464]
    assert tr.final_Y == 21
    assert 464 ** 3 <= 10**8 < 465 ** 3
    assert 21 ** 3 <= 10**4 < 22 ** 3


def test_t13_schedule_hits_rho_exponent():
    f = _form(30, 1, "sqrt2", ["pi", "e"])
    X = 10**6
    tr = reduce(f, X, "t13")
    assert len(tr.steps) == 1
    assert tr.windows_ok and tr.budgets_ok
    want = 1 - float(rho(30, 1) * sigma_theorem13(30, 1))
    got = math.log(tr.final_Y) / math.log(X)
    assert abs(got - want) < 1e-3


def test_mode_hypotheses_enforced():
    f2 = _form(30, 2, "sqrt2", ["pi", "e", "golden"])
    with pytest.raises(DomainError):
        reduce(f2, 10**4, "t13")  # l0(30) = 1
    f1 = _form(30, 1, "sqrt2", ["pi", "e"])
    with pytest.raises(DomainError):
        reduce(f1, 10**4, "t14")  # l1(30) = 0
    with pytest.raises(DomainError):
        reduce(_form(2, 0, "sqrt2", ["pi"]), 100, "t13")  # k=2: t11 only
    with pytest.raises(DomainError):
        reduce(f1, 1, "t11")
    with pytest.raises(DomainError):
        reduce(f1, 100, "t99")


def test_t14_l0_runs():
    tr = reduce(_form(30, 0, "sqrt2", ["pi"]), 100, "t14")
    assert tr.steps == ()
    assert 0 < tr.sigma < 2 / (30 * math.log(30))


def test_empty_window_flagged():
    f = _form(3, 1, "sqrt2", ["pi", "e"])
    tr = reduce(f, 100, "t11", H=1e12)
    assert not tr.windows_ok
    s = tr.steps[0]
    assert s.window == 0 and s.window_empty and s.q == 1
    # the identity substitution still transforms coefficients consistently
    assert s.coeffs_after == (f.coeff(0).as_fraction(),)


def test_lift_zero_steps_identity():
    f = _form(3, 0, "sqrt2", ["pi"])
    tr = reduce(f, 1000, "t11")
    cert = lift(tr, (7, 5))
    assert (cert.x, cert.y) == (7, 5)
    assert cert.value == cert.diagonal_value == cert.bound
    assert cert.step_errors == ()
    assert cert.holds


def test_lift_q1_integer_coefficient():
    # theta = 3 is its own approximation: q=1, a=3, zero error, and the
    # dropped term 3*x*y^2 is an integer, so both sides agree exactly.
    f = _form(3, 1, "sqrt2", [3, "pi"])
    tr = reduce(f, 1000, "t11")
    s = tr.steps[0]
    assert (s.q, s.a, s.approx_error) == (1, 3, 0.0)
    cert = lift(tr, (9, 4))
    assert (cert.x, cert.y) == (9, 4)
    assert cert.step_errors == (0.0,)
    assert cert.value == cert.diagonal_value == cert.bound
    assert cert.holds


def test_lift_dithered_certificate():
    # 1/3 plus a 2^-200 dither: Dirichlet picks (1, 3), the step error is
    # exactly 135 * (3*theta - 1), and the certificate chain is exact.
    theta = Fraction(1, 3) + Fraction(1, 2**200)
    f = _form(3, 1, "sqrt2", [theta, "pi"])
    tr = reduce(f, 50, "t11")
    s = tr.steps[0]
    assert (s.q, s.a) == (3, 1)
    cert = lift(tr, (5, 3))
    assert (cert.x, cert.y) == (5, 9)
    want_err = abs(3 * theta - 1) * 3 * 5 * 9
    assert cert.step_errors == (float(want_err),)
    assert cert.holds
    assert cert.value <= cert.bound


def test_lift_range_errors():
    f = _form(3, 1, "sqrt2", [Fraction(1, 7), "pi"])
    tr = reduce(f, 20, "t11")
    assert tr.q_product == 7
    with pytest.raises(LiftRangeError):
        lift(tr, (5, tr.final_Y + 1))
    with pytest.raises(LiftRangeError):
        lift(tr, (25, 0))
    if tr.final_Y >= 3:
        with pytest.raises(LiftRangeError):
            lift(tr, (5, 3))  # lifted y = 21 > X = 20


def test_find_small_diagonal_path_identical():
    f = _form(3, 0, "sqrt2", ["golden"])
    d = DiagonalForm(alpha=PrecReal.named("sqrt2"),
                     beta=PrecReal.named("golden"), k=3)
    got, tr = find_small_with_trace(f, 60)
    want = min_fracpart_diagonal(d, 60, 60)
    assert (got.best_x, got.best_y, got.min_value, got.evaluations) == \
        (want.best_x, want.best_y, want.min_value, want.evaluations)
    assert tr.lifted_point == (got.best_x, got.best_y)


def test_find_small_never_beats_exhaustive():
    f = _form(3, 1, 1, ["pi", "e"])
    res, tr = find_small_with_trace(f, 500, "t11")
    assert res.provenance.startswith("constructive-t11")
    assert tr.lifted_point == (res.best_x, res.best_y)
    assert res.best_y % tr.q_product == 0  # lifted y is q_product * y0
    assert res.best_y <= 500 and res.best_x <= 500
    exhaustive = min_fracpart(f, SearchBox(x_max=500, y_max=500))
    assert res.min_value >= exhaustive.min_value


def test_find_small_rational_hits_zero():
    f = _form(3, 1, Fraction(1, 2), [Fraction(1, 3), Fraction(1, 5)])
    res = find_small(f, 30)
    assert res.min_value == 0.0


def test_find_small_fallback_on_empty_window():
    f = _form(3, 1, "sqrt2", ["pi", "e"])
    res, tr = find_small_with_trace(f, 100, "t11", H=1e12)
    assert not tr.windows_ok
    assert res.provenance.endswith("+fallback-exhaustive")
    want = min_fracpart(f, SearchBox(x_max=100, y_max=100))
    assert (res.best_x, res.best_y, res.min_value) == \
        (want.best_x, want.best_y, want.min_value)


def test_trace_serialization_roundtrip_shape():
    f = _form(4, 2, "sqrt2", ["pi", Fraction(5, 12), "golden"])
    res, tr = find_small_with_trace(f, 200)
    d = tr.to_dict()
    assert d["mode"] == "t11" and d["k"] == 4 and d["l"] == 2
    assert len(d["steps"]) == 2
    assert d["q_product"] == tr.q_product
    assert d["lifted_point"] == list(tr.lifted_point)
    for s in d["steps"]:
        assert set(s) >= {"step_index", "q", "a", "approx_error", "Y",
                          "coeffs_after", "window_empty", "error_budget",
                          "budget_ok"}


def test_budget_consistency_when_windows_honored():
    # when a window is honored the Dirichlet error 1/N cancels the box
    # growth by design; the stored budgets must come in under X^-eta / H
    cases = [
        _form(3, 1, "sqrt2", ["pi", "e"]),
        _form(4, 2, "golden", ["pi", "e", "sqrt2"]),
        _form(5, 2, "pi", ["e", "golden", "sqrt2"]),
        _form(6, 3, "e", ["pi", "golden", "sqrt2", Fraction(3, 7)]),
    ]
    for f in cases:
        for X in (10**3, 10**4):
            tr = reduce(f, X, "t11")
            assert tr.windows_ok
            assert tr.budgets_ok, (f.k, f.l, X)
