"""Acceptance gate: fourteen criteria, one PASS/FAIL line each.

Run with pytest (the lines are repeated in the terminal summary) or directly
with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from psgap.cluster import gap_stats, rigorous_floor, scan_clusters, theorem_witness
from psgap.config import derive_config, parse_exponent
from psgap.expsums import (
    PhaseFamily,
    family_phase_check,
    heath_brown_check,
    lambda_exp_sum,
    quadratic_calibration,
    random_theta2_inputs,
    theta2_lower_check,
)
from psgap.maynard import (
    WeightGenerator,
    lemma_maynard_bruteforce,
    power_sieve_function,
    random_tuple_pairs,
    xq_partition,
    xq_vectorized,
)
from psgap.powerfloor import pow_floor, pow_floor_array, pow_floor_value
from psgap.psprimes import (
    density_report,
    enumerate_ps,
    is_member_by_difference,
    is_member_by_preimage,
    member_mask_difference,
    member_mask_image,
    verify_lemma_nchi,
    verify_lemma_shnchi,
)
from psgap.smoothing import (
    bump_fourier,
    coefficient_bound_holds,
    decay_report,
    grid_for,
    paper_bumps,
    sawtooth_expand,
    truncation_constant,
    truncation_grid,
)
from psgap.variational import mk_report, growth_lower_bound, solve_ratio

C = parse_exponent("11/10")
RESULTS: dict[int, str] = {}


def record(num: int, title: str, ok: bool, detail: str, elapsed: float, limit: float | None) -> None:
    timing_ok = limit is None or elapsed <= limit
    verdict = "PASS" if ok and timing_ok else "FAIL"
    lim = f" (limit {limit:.0f}s)" if limit is not None else ""
    line = f"criterion {num:2d} {verdict}: {title}; {detail}; {elapsed:.1f}s{lim}"
    RESULTS[num] = line
    print(line)
    assert ok and timing_ok, line


def naive_root(a: int, k: int, hi: int) -> int:
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**k <= a:
            lo = mid
        else:
            hi = mid
    return lo


def test_criterion_01_floor_power_exactness():
    t0 = time.perf_counter()
    bad = 0
    for e in (Fraction(11, 10), Fraction(9, 8), Fraction(21, 20)):
        arr = pow_floor_array(np.arange(1, 10**5 + 1, dtype=np.int64), e).tolist()
        for n in range(1, 10**5 + 1):
            ref = naive_root(n**e.numerator, e.denominator, n * n + 1)
            if pow_floor(n, e).value != ref or arr[n - 1] != ref:
                bad += 1
    record(1, "pow_floor vs bisection oracle, 3 exponents, n <= 1e5", bad == 0, f"disagreements={bad}", time.perf_counter() - t0, 60)


def test_criterion_02_membership_routes():
    t0 = time.perf_counter()
    N = 10**6
    disagree = sum(1 for m in range(1, N + 1) if is_member_by_difference(m, C) != is_member_by_preimage(m, C))
    a = member_mask_difference(1, N, C)
    b = member_mask_image(1, N, C)
    image, n = set(), 1
    while (v := pow_floor_value(n, C)) <= N:
        image.add(v)
        n += 1
    enum = {e.m for e in enumerate_ps(1, N, C, with_enclosure=False)}
    vec_ok = bool(np.array_equal(a, b)) and set((np.flatnonzero(a) + 1).tolist()) == image
    ok = disagree == 0 and vec_ok and enum == image
    record(2, "membership routes agree on m <= 1e6; enumerate_ps equals image", ok, f"scalar disagreements={disagree}, vector ok={vec_ok}, |image|={len(image)}", time.perf_counter() - t0, 120)


def test_criterion_03_identity_verification():
    t0 = time.perf_counter()
    parts = []
    ok = True
    for X in (10**5, 10**6):
        cfg = derive_config(C, 5, X=X)
        a = verify_lemma_nchi(cfg)
        b = verify_lemma_shnchi(cfg)
        ok &= a.counterexamples == 0 and b.counterexamples == 0 and a.unresolved == 0 and b.unresolved == 0
        parts.append(f"X={X}: checked {a.checked}/{b.checked}, counterexamples {a.counterexamples}/{b.counterexamples}, unresolved {a.unresolved}/{b.unresolved}")
    record(3, "progression identity and positivity consequences", ok, "; ".join(parts), time.perf_counter() - t0, 300)


def test_criterion_04_density():
    t0 = time.perf_counter()
    lo = density_report(10**5, C)
    hi = density_report(10**7, C)
    ok = 0.8 <= hi.ratio <= 1.25 and abs(hi.ratio - 1) < abs(lo.ratio - 1)
    record(4, "PS prime density against x^gamma/log x", ok, f"ratio(1e5)={lo.ratio:.4f}, ratio(1e7)={hi.ratio:.4f}", time.perf_counter() - t0, 300)


def test_criterion_05_bumps():
    t0 = time.perf_counter()
    cfg = derive_config(C, 5, X=10**6)
    grid = np.arange(1 << 20, dtype=float) / (1 << 20)
    worst_a0, worst_K, geom_bad = 0.0, 0.0, 0
    for r in (1, 2, 3, 4):
        for b in paper_bumps(cfg, r_max=r).as_tuple():
            s = b.spec
            v = b(grid)
            y = (grid - s.shift) % 1.0
            plateau = (y >= s.alpha + s.Delta) & (y <= s.beta - s.Delta)
            outside = (y <= s.alpha) | (y >= s.beta)
            geom_bad += int(np.sum(v[plateau] != 1.0)) + int(np.sum(v[outside] != 0.0)) + int(np.sum((v < 0) | (v > 1)))
            bf = bump_fourier(b, 10**4, grid_for(s, 10**4))
            rep = decay_report(bf, closed_form_upto=50)
            worst_a0 = max(worst_a0, rep.a0_error)
            worst_K = max(worst_K, rep.K)
    ok = geom_bad == 0 and worst_a0 <= 1e-10 and worst_K <= 100
    record(5, "sieve bumps: exact plateau/support, a0, Fourier decay at r <= 4", ok, f"grid violations={geom_bad}, max a0 error={worst_a0:.2e}, max K={worst_K:.3f}", time.perf_counter() - t0, 60)


def test_criterion_06_sawtooth():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    thetas = rng.uniform(-20, 20, 1000)
    fails = sum(1 for th in thetas if not coefficient_bound_holds(float(th))[0])
    H = 100
    xs = truncation_grid(H)
    K = max(truncation_constant(sawtooth_expand(float(th), H), xs) for th in rng.uniform(0.01, 0.99, 25))
    ok = fails == 0 and K <= 10
    record(6, "sawtooth coefficient bound and truncation envelope", ok, f"bound failures={fails}, max truncation constant={K:.4f} (<= 10)", time.perf_counter() - t0, 60)


def test_criterion_07_quadratic_form_bruteforce():
    t0 = time.perf_counter()
    ok = True
    parts = []
    for k0 in (0, 1):
        f = power_sieve_function(k0)
        rows = {R: lemma_maynard_bruteforce(WeightGenerator(f, float(R), k0), 2) for R in (100, 300, 1000)}
        r = {R: rows[R].ratio for R in rows}
        this = 0.6 <= r[300] <= 1.5 and abs(r[1000] - 1) < abs(r[100] - 1)
        ok &= this
        parts.append(f"k0={k0}: ratio R=100/300/1000 = {r[100]:.5f}/{r[300]:.5f}/{r[1000]:.5f}")
    record(7, "quadratic form brute force, W=2, f=(1-sum t)^(k0+2)", ok, "; ".join(parts), time.perf_counter() - t0, 600)


def test_criterion_08_shared_modulus_partition():
    t0 = time.perf_counter()
    D, E = random_tuple_pairs(200, 2, 2, 10**6, seed=8)
    rep = xq_vectorized(D, E, 2, 200)
    sub = xq_partition(zip(map(tuple, D[:20000].tolist()), map(tuple, E[:20000].tolist())), 2)
    theta_fail = sum(1 for W, d, e, r in random_theta2_inputs(10**4, seed=8) if not theta2_lower_check(W, d, e, r).passed)
    ok = rep["q_mismatch"] == 0 and rep["violations"] == 0 and sub.partition_ok and sub.q_mismatch == 0 and theta_fail == 0
    record(8, "unique q and coprimality certificate; exact theta2 bound", ok, f"pairs={rep['pairs']}, q mismatches={rep['q_mismatch']}, certificate violations={rep['violations']}, theta2 failures={theta_fail}/10000", time.perf_counter() - t0, 120)


def test_criterion_09_variational():
    t0 = time.perf_counter()
    table = {(k, d): solve_ratio(k, d) for k in range(1, 7) for d in range(5)}
    one = max(abs(table[(1, d)].ratio - 1) for d in range(5))
    mono_d = all(table[(k, d + 1)].ratio >= table[(k, d)].ratio - 1e-12 for k in range(1, 7) for d in range(4))
    mono_k = all(table[(k + 1, d)].ratio >= table[(k, d)].ratio - 1e-12 for k in range(1, 6) for d in range(5))
    res = max(s.residual for s in table.values())
    big = {k0: mk_report(k0, 3) for k0 in (50, 100)}
    res = max(res, *(b["residual"] for b in big.values()))
    big_ok = all(b["ratio"] >= growth_lower_bound(k0) for k0, b in big.items())
    ok = one <= 1e-10 and mono_d and mono_k and res <= 1e-8 and big_ok
    detail = (
        f"|ratio(k=1)-1|={one:.1e}, monotone degree/k={mono_d}/{mono_k}, max residual={res:.1e}, "
        + ", ".join(f"k0={k0}: {b['ratio']:.4f} >= {b['bound']:.4f}" for k0, b in big.items())
    )
    record(9, "variational ratio", ok, detail, time.perf_counter() - t0, 120)


def test_criterion_10_heath_brown():
    t0 = time.perf_counter()
    err = heath_brown_check(10**5, 2)
    record(10, "Heath-Brown identity recovers Lambda(n), n <= 1e5, J=2", err <= 1e-9, f"max error={err:.2e}", time.perf_counter() - t0, 60)


def test_criterion_11_van_der_corput():
    t0 = time.perf_counter()
    cal = quadratic_calibration(10**4)
    rng = np.random.default_rng(11)
    Ks = [family_phase_check(C, float(th), 10**5, 10**4).K for th in rng.uniform(1, 1000, 100)]
    ok = cal.K <= 1 and max(Ks) <= 10
    record(11, "second-derivative test", ok, f"calibration K={cal.K:.4f}, family max K={max(Ks):.4f} over 100 phases", time.perf_counter() - t0, 120)


def test_criterion_12_cancellation():
    t0 = time.perf_counter()
    r = lambda_exp_sum(10**5, PhaseFamily.for_exponent(C))
    z = lambda_exp_sum(10**5, PhaseFamily.for_exponent(C, j=0))
    ok = r.ratio <= 0.1 and abs(z.ratio - 1) <= 1e-9
    record(12, "exponential sum cancellation smoke test", ok, f"ratio e(n^gamma)={r.ratio:.5f}, zero-phase ratio-1={z.ratio - 1:.1e}", time.perf_counter() - t0, 60)


def test_criterion_13_witness_and_gaps():
    t0 = time.perf_counter()
    w = theorem_witness(derive_config(C, 10, X=10**6), 1)
    g = gap_stats(C, 10**7)
    found = w.found and w.record.n <= 10**6 and w.record.prime_count >= 2
    ok = found and g.below_tau >= 100 and g.stated_floor_violations == 0
    detail = (
        f"witness n={w.record.n if w.record else None} primes={w.record.values if w.record else None}; "
        f"pairs with gap <= 2c: {g.below_tau}; below c(1-10p^-gamma): {g.stated_floor_violations}/{g.pairs}"
        f" (worst p={g.worst_stated[0] if g.worst_stated else None}, gap {g.min_normalized_gap:.4f});"
        f" below c-p^-(1-gamma): {g.rigorous_floor_violations}"
    )
    record(13, "cluster witness, gap statistics and gap floor", ok, detail, time.perf_counter() - t0, 600)


def test_criterion_14_determinism(tmp_path):
    from psgap.cli import main

    t0 = time.perf_counter()
    same = []
    for X in (10**5, 10**6):
        cfg = derive_config(C, 5, X=X)
        same.append(verify_lemma_nchi(cfg, threads=1) == verify_lemma_nchi(cfg, threads=8))
        same.append(verify_lemma_shnchi(cfg, threads=1) == verify_lemma_shnchi(cfg, threads=8))
    cfg = derive_config(C, 10, X=10**6)
    same.append(theorem_witness(cfg, 1, threads=1).to_json() == theorem_witness(cfg, 1, threads=8).to_json())
    same.append(scan_clusters(C, 10, 10**5, 10**6, 3, threads=1) == scan_clusters(C, 10, 10**5, 10**6, 3, threads=8))
    ph = PhaseFamily.for_exponent(C)
    same.append(lambda_exp_sum(10**5, ph, threads=1) == lambda_exp_sum(10**5, ph, threads=8))
    gen = WeightGenerator(power_sieve_function(1), 300.0, 1)
    same.append(lemma_maynard_bruteforce(gen, 2, threads=1) == lemma_maynard_bruteforce(gen, 2, threads=8))
    for argv in (
        ["verify-identities", "--c", "11/10", "--X", "100000", "--k0", "5"],
        ["sieve-check", "--c", "11/10", "--k0", "2", "--X", "100000"],
        ["cluster", "--c", "11/10", "--k0", "10", "--range", "100000:400000", "--min-primes", "3"],
        ["expsum", "--c", "11/10", "--X", "100000"],
    ):
        outs = []
        for th in ("1", "8"):
            p = tmp_path / f"{argv[0]}-{th}.out"
            assert main(argv + ["--threads", th, "--out", str(p)]) == 0
            outs.append(p.read_bytes())
        same.append(outs[0] == outs[1])
    ok = all(same)
    record(14, "identical output at 1 and 8 threads", ok, f"{sum(same)}/{len(same)} comparisons identical", time.perf_counter() - t0, None)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                pass
