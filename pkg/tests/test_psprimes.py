from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from psgap.config import derive_config, parse_exponent
from psgap.powerfloor import pow_floor_value
from psgap.psprimes import (
    density_csv,
    density_report,
    enumerate_ps,
    is_member_by_difference,
    is_member_by_preimage,
    is_ps_member,
    member_mask_difference,
    member_mask_image,
    ps_count_below,
    ps_primes,
    ps_values,
    shift_map,
    shift_map_array,
    verify_lemma_nchi,
    verify_lemma_shnchi,
    window_certificate,
)

C = parse_exponent("11/10")


def image_set(x, c=C):
    """Oracle: the image {[n^c] : n >= 1} up to x by direct enumeration."""
    out, n = set(), 1
    while True:
        v = pow_floor_value(n, c)
        if v > x:
            return out
        out.add(v)
        n += 1


def test_membership_examples():
    assert is_ps_member(1, C) and is_ps_member(2048, C)
    assert not is_ps_member(6, C)
    # [5^1.1] = 5, [6^1.1] = 7
    assert pow_floor_value(5, C) == 5 and pow_floor_value(6, C) == 7


def test_membership_routes_agree_and_match_image():
    img = image_set(20000)
    a = member_mask_difference(1, 20000, C)
    b = member_mask_image(1, 20000, C)
    assert np.array_equal(a, b)
    assert set((np.flatnonzero(a) + 1).tolist()) == img


@given(st.integers(1, 10**12), st.sampled_from(["11/10", "9/8", "21/20", "3/2"]))
def test_membership_routes_agree_random(m, c):
    c = parse_exponent(c)
    assert is_member_by_difference(m, c) == is_member_by_preimage(m, c)


def test_enumerate_examples():
    assert [e.m for e in enumerate_ps(1, 5, C)] == [1, 2, 3, 4, 5]
    assert [e.n for e in enumerate_ps(1, 5, C)] == [1, 2, 3, 4, 5]
    els = list(enumerate_ps(2048, 2048, C))
    assert [(e.m, e.n) for e in els] == [(2048, 1024)]
    assert els[0].frac_n_gamma == (0, 0)


@given(st.integers(1, 10**7))
def test_count_below(x):
    # count = max{n : n^c < x + 1}
    n = pow_floor_value(x + 1, C.gamma)
    if n**C.p >= (x + 1) ** C.q:
        n -= 1
    assert ps_count_below(x, C) == n


def test_ps_values_match_enumerate():
    vals, ns = ps_values(10**5, 10**5 + 5000, C)
    ref = [(e.m, e.n) for e in enumerate_ps(10**5, 10**5 + 5000, C, with_enclosure=False)]
    assert list(zip(vals.tolist(), ns.tolist())) == ref


def test_shift_map_examples():
    # 2048^(10/11) = 1024 exactly, so s_0(2048) = [1025^1.1] = 2050
    assert shift_map(2048, 0, C) == 2050 == pow_floor_value(1025, C)
    assert shift_map(1, 0, C) == 2
    # for a non-power m = [n^c], s_h(m) = [(n + h)^c]
    n = 35111
    assert all(shift_map(pow_floor_value(n, C), h, C) == pow_floor_value(n + h, C) for h in range(11))


@given(st.integers(100, 10**9), st.integers(-3, 12))
def test_shift_map_array_matches_scalar(n, h):
    assert shift_map_array(np.array([n], dtype=np.int64), h, C)[0] == shift_map(n, h, C)


def test_window_certificate_rejects_exact_power():
    # {2048^gamma} = 0 lies outside the window just below 1
    assert window_certificate(2048, derive_config(C, 5, X=1000)).frac_n_gamma_in_range is False


@pytest.mark.parametrize("X,k0", [(10**5, 5), (10**5, 3), (10**6, 5)])
def test_identity_verifiers(X, k0):
    cfg = derive_config(C, k0, X=X)
    a = verify_lemma_nchi(cfg, threads=2)
    b = verify_lemma_shnchi(cfg, threads=2)
    assert a.counterexamples == 0 and a.unresolved == 0
    assert b.counterexamples == 0 and b.unresolved == 0
    assert a.split_disagree == 0
    if X == 10**6:
        assert a.checked > 0 and b.checked > 0
        assert b.max_frac_deviation_ratio <= 10


def test_boundary_exponent_reports_only():
    cfg = derive_config("9/8", 3, X=10**4, membership_only=True)
    rep = verify_lemma_nchi(cfg)
    assert rep.unresolved == 0


def test_density():
    r = density_report(10**6, C)
    assert 0.8 <= r.ratio <= 1.25
    assert r.count == ps_primes(10**6, C).size
    with pytest.raises(ValueError):
        density_report(9999, C)
    text = density_csv([r, density_report(10**4, C)])
    assert text.splitlines()[0] == "x,c_num,c_den,count,main_term,ratio"
    assert len(text.splitlines()) == 3


def test_ps_primes_are_prime_members():
    from psgap.primes import is_prime

    ps = ps_primes(10**5, C)
    assert all(is_prime(int(p)) and is_ps_member(int(p), C) for p in ps[:: max(1, len(ps) // 500)])
