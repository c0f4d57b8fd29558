from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from psgap.variational import (
    basis_exponents,
    build_forms,
    check_export,
    export_f,
    mk_report,
    growth_lower_bound,
    power_sum_moment,
    random_rayleigh_trials,
    rayleigh,
    simplex_moment,
    solve_ratio,
)


def simplex_points(k, n, rng):
    """Uniform points on the k-simplex {t >= 0, sum t <= 1} (Dirichlet(1,..,1) with slack)."""
    x = rng.exponential(size=(n, k + 1))
    return x[:, :k] / x.sum(axis=1, keepdims=True)


def test_moment_examples():
    assert simplex_moment(2, (0, 0)) == Fraction(1, 2)
    assert simplex_moment(2, (1, 1)) == Fraction(1, 24)
    assert simplex_moment(1, (3,)) == Fraction(1, 4)
    with pytest.raises(ValueError):
        simplex_moment(2, (1,))


def test_moments_monte_carlo():
    rng = np.random.default_rng(7)
    n = 400000
    for _ in range(50):
        k = int(rng.integers(1, 7))
        a = tuple(int(x) for x in rng.integers(0, 4, size=k))
        b = int(rng.integers(0, 3))
        t = simplex_points(k, n, rng)
        vals = (1 - t.sum(axis=1)) ** b * np.prod(t**np.array(a), axis=1) / math.factorial(k)
        est, sd = vals.mean(), vals.std() / math.sqrt(n)
        assert abs(est - float(simplex_moment(k, a, b))) <= 3 * sd + 1e-15


@given(st.integers(1, 5), st.integers(0, 3), st.integers(0, 3))
def test_power_sum_moment_monte_carlo_free_check(k, B, J):
    # cross-check the partition expansion by direct polynomial expansion for small k
    import itertools

    if k > 3:
        return
    total = Fraction(0)
    # P2^J = sum over multi-indices of multinomial * prod t_i^(2 m_i)
    for m in itertools.product(range(J + 1), repeat=k):
        if sum(m) != J:
            continue
        coef = math.factorial(J)
        for x in m:
            coef //= math.factorial(x)
        total += coef * simplex_moment(k, [2 * x for x in m], B)
    assert power_sum_moment(k, B, J) == total


def test_permutation_symmetry():
    a = (3, 0, 2, 1)
    m = simplex_moment(4, a, 2)
    for p in ((1, 0, 3, 2), (2, 3, 1, 0), (3, 2, 1, 0)):
        assert simplex_moment(4, [a[i] for i in p], 2) == m


def test_basis_size():
    assert basis_exponents(0) == [(0, 0)]
    assert len(basis_exponents(4)) == 9


@pytest.mark.parametrize("degree", range(5))
def test_k_one_is_one(degree):
    assert abs(solve_ratio(1, degree).ratio - 1.0) < 1e-10


def test_monotone_in_degree_and_k():
    table = {(k, d): solve_ratio(k, d).ratio for k in range(1, 7) for d in range(5)}
    for k in range(1, 7):
        for d in range(4):
            assert table[(k, d + 1)] >= table[(k, d)] - 1e-12
    for d in range(5):
        for k in range(1, 6):
            assert table[(k + 1, d)] >= table[(k, d)] - 1e-12
    # k = 2, degree 0: F = 1 gives 2 * (1/6) / (1/2) = 4/3
    assert table[(2, 0)] == pytest.approx(4 / 3, rel=1e-13)
    assert all(solve_ratio(k, 4).residual <= 1e-8 for k in range(1, 7))


def test_rayleigh_optimum_dominates_random_trials():
    forms = build_forms(4, 3)
    best = solve_ratio(4, 3).ratio
    assert random_rayleigh_trials(forms, 2000) <= best + 1e-9
    assert rayleigh(forms, [1] + [0] * (len(forms.basis) - 1)) <= best + 1e-12


@pytest.mark.parametrize("k0", [50, 100])
def test_large_k_bound(k0):
    rep = mk_report(k0, 3)
    assert rep["bound"] == pytest.approx(growth_lower_bound(k0))
    assert rep["pass"] and rep["ratio"] >= rep["bound"]
    assert rep["residual"] <= 1e-8


def test_bound_thresholds():
    assert growth_lower_bound(100) == pytest.approx(1.0661749, abs=1e-6)
    assert growth_lower_bound(50) == pytest.approx(0.6381, abs=1e-4)


def test_export_constant_one_dimensional():
    import sympy

    t0 = sympy.symbols("t0", real=True)
    poly = export_f(None, 1, F_expr=sympy.Integer(1))
    assert sympy.simplify(poly.expr - (1 - t0)) == 0


@pytest.mark.parametrize("k,d", [(2, 2), (3, 2)])
def test_export_mixed_partial(k, d):
    sol = solve_ratio(k, d)
    poly = export_f(sol, k)
    assert check_export(poly, sol.F, points=50) < 1e-8
