from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from psgap.cluster import (
    brute_force_windows,
    clusters_csv,
    gap_stats,
    rigorous_floor,
    scan_clusters,
    shift_consistency,
    theorem_witness,
)
from psgap.config import derive_config, parse_exponent
from psgap.primes import is_prime
from psgap.psprimes import density_report, ps_primes

C = parse_exponent("11/10")


def test_records_exist_and_are_prime():
    recs = scan_clusters(C, 10, 10**5, 2 * 10**5, 2)
    assert recs
    for r in recs[:200]:
        assert all(is_prime(v) for v in r.values)
        assert r.prime_count >= 2 and len(r.values) == r.prime_count


def test_never_misses_brute_force_windows():
    lo, hi = 10**5, 10**5 + 10**4
    raw = scan_clusters(C, 10, lo, hi, 2, dedup=False)
    assert [r.n for r in raw] == brute_force_windows(C, 10, lo, hi, 2)
    kept = scan_clusters(C, 10, lo, hi, 2)
    # dedup keeps one window per smallest prime value, and loses no cluster
    assert len({r.min_value for r in kept}) == len(kept)
    assert {r.min_value for r in kept} == {r.min_value for r in raw}


def test_k0_zero_gives_ps_primes():
    recs = scan_clusters(C, 0, 1, 20000, 1, dedup=False)
    assert [r.values[0] for r in recs] == ps_primes(recs[-1].values[0], C).tolist()


def test_min_primes_one_density():
    x = 10**6
    n_hi = int(x ** (10 / 11))
    recs = scan_clusters(C, 0, 1, n_hi, 1, dedup=False)
    assert len(recs) == pytest.approx(density_report(x, C).count, abs=2)


def test_csv_format():
    recs = scan_clusters(C, 10, 100, 400, 3)
    lines = clusters_csv(recs).splitlines()
    assert lines[0] == "n,c_num,c_den,k0,prime_count,offsets,min_value,normalized_span,in_progression"
    assert len(lines) == len(recs) + 1


def test_threads_identical():
    a = scan_clusters(C, 10, 10**5, 10**5 + 600000, 3, threads=1)
    b = scan_clusters(C, 10, 10**5, 10**5 + 600000, 3, threads=8)
    assert a == b


def test_gap_stats_small_and_monotone():
    assert gap_stats(C, 2).pairs == 0
    a = gap_stats(C, 10**5)
    b = gap_stats(C, 2 * 10**5)
    assert b.below_tau >= a.below_tau
    assert gap_stats(C, 10**5, tau=3.0).below_tau >= a.below_tau
    assert a.rigorous_floor_violations == 0


@given(st.integers(10, 10**6))
def test_rigorous_floor_is_a_lower_bound(n):
    from psgap.powerfloor import pow_floor_value

    p, q = pow_floor_value(n, C), pow_floor_value(n + 1, C)
    assert (q - p) / p ** (1 - 10 / 11) > rigorous_floor(np.array([p]), C)[0]


def test_witness():
    cfg = derive_config(C, 10, X=10**5)
    w = theorem_witness(cfg, 1)
    assert w.found and w.record.n <= 10**6 and w.record.prime_count >= 2
    assert w.shift_map_consistent
    assert json.loads(w.to_json())["found"] is True
    assert shift_consistency(w.record)


def test_witness_budget_message():
    cfg = derive_config("21/20", 30, X=10**5, membership_only=True)
    w = theorem_witness(cfg, 12, n_max=60000)
    assert not w.found and "no witness" in w.message


def test_witness_m_zero():
    cfg = derive_config(C, 2, X=10**5)
    w = theorem_witness(cfg, 0)
    assert w.found and w.record.prime_count >= 1
