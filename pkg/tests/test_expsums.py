from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from psgap.expsums import (
    HypothesisViolation,
    PhaseFamily,
    bilinear_sum,
    expsum_csv,
    family_phase_check,
    heath_brown_check,
    heath_brown_decomposition,
    lambda_exp_sum,
    lambda_exp_sum_exact_phase,
    quadratic_calibration,
    random_theta2_inputs,
    theta2_lower_check,
    vdc_check,
)
from psgap.primes import mangoldt_array


def test_zero_phase_is_chebyshev():
    r = lambda_exp_sum(10**5, PhaseFamily.for_exponent("11/10", j=0))
    assert r.value.imag == 0 and r.value.real == pytest.approx(r.trivial, rel=1e-15)
    assert r.ratio == pytest.approx(1.0, rel=1e-15)
    lam = mangoldt_array(2 * 10**5)
    assert r.trivial == pytest.approx(math.fsum(lam[10**5 :].tolist()), rel=1e-12)


def test_half_linear_phase_sees_odd_support():
    # Lambda lives (apart from powers of 2) on odd n, where e(n/2) = -1
    r = lambda_exp_sum(10**5, PhaseFamily.for_exponent("11/10", j=0, C1=0.5))
    assert r.value.real == pytest.approx(-r.trivial, rel=1e-3)
    assert r.ratio > 0.99


def test_half_linear_phase_cancels_on_integers():
    # on the plain sum over n the alternation cancels completely
    ph, err = PhaseFamily.for_exponent("11/10", j=0, C1=0.5).reduced(np.arange(10**4, 2 * 10**4 + 1))
    assert err == 0 and set(ph.tolist()) == {0.0, 0.5}
    assert abs(np.exp(2j * np.pi * ph).sum()) == pytest.approx(1.0)


def test_power_phase_cancellation():
    r = lambda_exp_sum(10**5, PhaseFamily.for_exponent("11/10"))
    assert r.ratio <= 0.1
    assert abs(r.value) <= r.trivial


def test_reduced_phase_against_exact_enclosures():
    ph = PhaseFamily.for_exponent("11/10")
    a = lambda_exp_sum(10**4, ph)
    b = lambda_exp_sum_exact_phase(10**4, ph)
    assert abs(a.value - b.value) < 1e-8 * a.trivial
    ns = np.arange(10**8 - 100, 10**8 + 1, dtype=np.int64)
    _, err = ph.reduced(ns)
    assert err < 1e-9


def test_threads_do_not_change_sum():
    ph = PhaseFamily.for_exponent("11/10", j=3, C1=0.25, C2=0.5)
    assert lambda_exp_sum(2 * 10**5, ph, threads=1) == lambda_exp_sum(2 * 10**5, ph, threads=8)


def test_expsum_csv_header():
    ph = PhaseFamily.for_exponent("11/10")
    r = lambda_exp_sum(10**4, ph)
    lines = expsum_csv([(ph, 10**4, r)]).splitlines()
    assert lines[0] == "phase_j,C1,C2,X,value_re,value_im,trivial,ratio" and len(lines) == 2


def test_heath_brown():
    dec = heath_brown_decomposition(10**4, 2)
    assert abs(dec[1]) < 1e-12
    assert dec[8] == pytest.approx(math.log(2), abs=1e-12)
    assert heath_brown_check(10**4, 2) <= 1e-9
    assert heath_brown_check(3 * 10**4, 3) <= 1e-9


def test_vdc_calibration_and_family():
    assert quadratic_calibration().K <= 1
    rng = np.random.default_rng(11)
    for theta3 in rng.uniform(1, 1000, 20):
        assert family_phase_check("11/10", float(theta3), 10**5, 10**4).K <= 10


def test_vdc_trivial_and_rejection():
    r = vdc_check(lambda x: x**2 / 2e4, lambda x: np.full(np.shape(x), 1e-4), 10, 1, 1e-4)
    assert abs(r.value) == pytest.approx(1.0) and r.K <= 1
    with pytest.raises(HypothesisViolation):
        vdc_check(lambda x: x**2, lambda x: np.full(np.shape(x), 2.0), 0, 100, 1e-3)


def test_bilinear_counting():
    r = bilinear_sum(30, 3000, "one", "one", None)
    count = sum(1 for m in range(30, 61) for n in range(1, 201) if 3000 <= m * n <= 6000)
    assert r.value == complex(count, 0) and r.terms == count
    mu = bilinear_sum(int(10**5**0.6), 10**5, "mu", "one", PhaseFamily.for_exponent("11/10"))
    assert abs(mu.value) <= mu.trivial


def test_theta2_examples():
    res = theta2_lower_check(2, [1], [3], [1, 1])
    assert res.theta2 == Fraction(5, 6) and res.norm == Fraction(1, 6) and res.passed
    assert theta2_lower_check(1, [1], [5], [0, 2]).theta2 == Fraction(2, 5)
    with pytest.raises(ValueError):
        theta2_lower_check(2, [1], [3], [0, 0])
    with pytest.raises(ValueError):
        theta2_lower_check(2, [2], [1], [1, 1])


def test_theta2_random_inputs():
    for W, d, e, r in random_theta2_inputs(2000, seed=5):
        assert theta2_lower_check(W, d, e, r).passed
