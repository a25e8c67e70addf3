"""Exponent calculators: exact values, thresholds, superiority sweeps."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from binform.errors import DomainError
from binform.exponents import (
    ExponentTable,
    default_lambda,
    rho,
    sigma0_prop62,
    sigma_t13_l1_display,
    sigma_theorem11,
    sigma_theorem13,
    sigma_theorem14,
    thresholds,
)


def test_rho_values():
    assert rho(10, 1) == 36
    assert rho(10, 2) == 100
    assert rho(20, 3) == 4 * 19 + 8 * 18 + 16 * 17
    assert rho(30, 1) == 116
    assert rho(30, 2) == 340
    # direct-summation oracle on a sweep
    for k in range(3, 40):
        for l in range(1, k - 1):
            assert rho(k, l) == sum(2 ** (j + 1) * (k - j)
                                    for j in range(1, l + 1))


def test_rho_increment_identity():
    for k in range(4, 60, 7):
        for l in range(1, k - 2):
            assert rho(k, l + 1) - rho(k, l) == 2 ** (l + 2) * (k - l - 1)


def test_rho_domain():
    with pytest.raises(DomainError):
        rho(3, 2)
    with pytest.raises(DomainError):
        rho(10, 0)
    with pytest.raises(DomainError):
        rho(2, 1)


def test_sigma_t11_values():
    assert sigma_theorem11(3, 1) == Fraction(3, 8)
    assert sigma_theorem11(5, 3) == Fraction(5, 64)
    for k in range(3, 30):
        assert sigma_theorem11(k, 1) == Fraction(3, 2) * Fraction(1, 2 ** (k - 1))


def test_sigma_t11_beats_baseline():
    for k in range(3, 200):
        for l in (1, min(2, k - 2), k - 2):
            assert sigma_theorem11(k, l) > Fraction(1, 2 ** (k - 1))


def test_thresholds_values():
    assert thresholds(3) == (0, 0)
    assert thresholds(30)[0] == 1
    assert thresholds(30)[1] <= 1
    l0, l1 = thresholds(1000)
    assert l1 <= l0
    # the defining property: last success and first failure bracket the max
    for k in (28, 30, 100, 1000):
        l0, l1 = thresholds(k)
        if l0 >= 1:
            assert 7 * rho(k, l0) <= k * (k - 1)
        assert 7 * rho(k, l0 + 1) > k * (k - 1)
        if l1 >= 1:
            assert 7 * rho(k, l1) <= k * math.log(k)
        assert 7 * rho(k, l1 + 1) > k * math.log(k)


def test_thresholds_l1_at_most_l0():
    for k in range(3, 400, 13):
        l0, l1 = thresholds(k)
        assert 0 <= l1 <= l0


def test_sigma_t13_values_and_domain():
    assert sigma_theorem13(30, 1) == Fraction(2, 30 * 29 + 4 * 29)
    # the general formula at l=1 simplifies to 2/((k+4)(k-1))
    assert sigma_theorem13(30, 1) == Fraction(2, 34 * 29)
    with pytest.raises(DomainError):
        sigma_theorem13(30, 2)  # above l0(30) = 1
    with pytest.raises(DomainError):
        sigma_theorem13(3, 1)  # l0(3) = 0


def test_sigma_t13_l1_display_mismatch():
    # the circulated l=1 form uses (k+2), the general formula (k+4)
    assert sigma_t13_l1_display(30) == Fraction(2, 32 * 29)
    assert sigma_t13_l1_display(30) != sigma_theorem13(30, 1)


def test_sigma_t13_beats_baseline_sweep():
    for k in range(3, 1001):
        l0, _ = thresholds(k)
        for l in range(1, l0 + 1):
            assert sigma_theorem13(k, l) > Fraction(1, k * (k - 1))


def test_sigma_t14():
    got = sigma_theorem14(100, 1, C=1.0)
    want = 2.0 / (100 * math.log(100) + 396 + 100 * math.log(math.log(100)))
    assert got == pytest.approx(want, rel=1e-14)
    # C -> 0 limit approaches 2/(k log k + rho)
    tiny = sigma_theorem14(100, 1, C=1e-12)
    assert tiny == pytest.approx(2.0 / (100 * math.log(100) + 396), rel=1e-9)
    # strictly decreasing in C
    assert sigma_theorem14(50, 2, C=0.5) > sigma_theorem14(50, 2, C=1.0) \
        > sigma_theorem14(50, 2, C=2.0)
    with pytest.raises(DomainError):
        sigma_theorem14(100, 1, C=-1.0)
    with pytest.raises(DomainError):
        sigma_theorem14(100, 1, enforce_threshold=True)  # l1(100) = 0


def test_sigma0():
    s = 1.0 / (100 * math.log(100) + 100 * math.log(math.log(100)))
    got = sigma0_prop62(100, C=1.0, lam=0.8)
    assert got == pytest.approx(s / (1.0 - 0.8 - s), rel=1e-14)
    assert got > s  # denominator < 1
    # lambda = 0, small sigma: sigma0 is close to sigma
    near = sigma0_prop62(10**6, C=1.0, lam=0.0)
    s6 = 1.0 / (10**6 * math.log(10**6) + 10**6 * math.log(math.log(10**6)))
    assert near == pytest.approx(s6, rel=1e-4)
    with pytest.raises(DomainError):
        sigma0_prop62(3, C=1.0)  # 1 - lambda - sigma < 0 at default lambda
    with pytest.raises(DomainError):
        sigma0_prop62(100, C=1.0, lam=1.5)


def test_default_lambda_order():
    for k in (10, 100, 1000):
        assert default_lambda(k) == pytest.approx(
            1.0 - math.log(math.log(k)) / math.log(k))
        assert 0.0 < default_lambda(k) < 1.0


def test_exponent_table():
    t = ExponentTable.build(30, 1)
    assert t.rho == 116
    assert t.sigma_t13 == Fraction(2, 986)
    assert t.t13_valid and not t.t14_valid
    assert t.t13_l1_display_mismatch
    assert t.sigma_danicic == Fraction(1, 2**29)
    assert t.sigma_baker == Fraction(1, 870)
    d = t.to_dict()
    assert d["sigma_t13"] == "1/493"
    assert d["sigma_t11"] == "3/1073741824"
    assert d["t13_l1_display"] == "1/464"
    assert isinstance(t.to_latex(), str) and "tabular" in t.to_latex()

    t2 = ExponentTable.build(10, 2)
    assert t2.sigma_t13 is None and not t2.t13_valid
    assert not t2.t13_l1_display_mismatch
    assert t2.to_dict()["sigma_t13"] is None
