from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from psgap.primes import (
    SieveRangeError,
    is_prime,
    is_prime_trial,
    lambda_vm,
    log_lcm,
    mangoldt_array,
    mobius,
    mobius_array,
    prime_mask,
    progression_weight_sum,
    sieve_segment,
    varpi,
)


def trial(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def test_small_segment():
    assert sieve_segment(2, 30).primes().tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    with pytest.raises(SieveRangeError):
        sieve_segment(10, 10)


def test_segment_against_trial_division():
    seg = sieve_segment(10**6, 10**6 + 101)
    assert [n for n in range(10**6, 10**6 + 101) if seg.is_prime(n)] == [n for n in range(10**6, 10**6 + 101) if trial(n)]


def test_mask_segmentation_invariant():
    a = prime_mask(300000)
    b = prime_mask(300000, segment_size=7919)
    assert np.array_equal(a, b)
    assert int(a.sum()) == 25997


@given(st.integers(0, 10**7))
def test_miller_rabin_vs_trial(n):
    assert is_prime(n) == is_prime_trial(n) == trial(n)


def test_weights():
    assert varpi(7) == math.log(7) and varpi(8) == 0 and varpi(1) == 0
    assert lambda_vm(8) == pytest.approx(math.log(2))
    assert lambda_vm(12) == 0 and lambda_vm(13) == pytest.approx(math.log(13))
    for n in range(1, 3000):
        if varpi(n) != lambda_vm(n):
            # only proper prime powers carry a von Mangoldt weight without being prime
            assert not trial(n) and lambda_vm(n) > 0


def test_chebyshev_equals_log_lcm():
    N = 10**4
    lam = mangoldt_array(N)
    assert math.fsum(lam[1:].tolist()) == pytest.approx(log_lcm(N), rel=1e-12)


def test_mobius():
    mu = mobius_array(1000)
    assert [mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
    assert all(mu[n] == mobius(n) for n in range(1, 1001))
    # sum_{d | n} mu(d) = [n = 1]
    for n in range(1, 200):
        assert sum(int(mu[d]) for d in range(1, n + 1) if n % d == 0) == (1 if n == 1 else 0)


def test_progression_weight_sum():
    assert progression_weight_sum(10**5, 1, 0) == pytest.approx(10**5, rel=0.03)
    assert progression_weight_sum(10**5, 3, 1) == pytest.approx(10**5 / 2, rel=0.05)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert progression_weight_sum(10**3, 2, 0) == 0
