"""Multidimensional sieve weights and their sums at desk scale.

lambda(d_0..d_k0) = f(log d_0/log R, ..., log d_k0/log R) * prod mu(d_i), which
vanishes once prod d_i > R because f lives on the unit simplex.  This module
brute-forces the quadratic form of the weights, partitions tuple pairs by the
shared-prime modulus q, and evaluates the two weighted sums over the
Piatetski-Shapiro sequence whose comparison drives the cluster argument.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from . import primes as _primes
from ._parallel import chunks, run_ordered
from .config import SieveConfig, euler_phi
from .psprimes import ps_values, shift_map_array
from .powerfloor import frac_array, pow_floor_array
from .smoothing import paper_bumps
from .variational import SimplexPoly, export_f, power_sum_moment, simplex_moment


class BudgetExceeded(RuntimeError):
    pass


class CoprimalityViolation(AssertionError):
    pass


@lru_cache(maxsize=16)
def _mu_table(limit: int) -> np.ndarray:
    return _primes.mobius_array(max(limit, 2))


# -- sieve functions ---------------------------------------------------------------


def simplex_integral(expr, symbols) -> Fraction:
    """Exact integral of a polynomial over the unit simplex in len(symbols) variables."""
    import sympy

    k = len(symbols)
    if k == 0:
        return Fraction(sympy.Rational(expr).p, sympy.Rational(expr).q)
    poly = sympy.Poly(sympy.expand(expr), *symbols)
    out = Fraction(0)
    for mono, coef in poly.terms():
        c = sympy.Rational(coef)
        out += Fraction(int(c.p), int(c.q)) * simplex_moment(k, mono)
    return out


@dataclass(frozen=True)
class SieveFunction:
    """f on the (k0+1)-simplex with the two integrals the sieve sums need.

    ``I`` is the integral of (d^(k0+1) f / dt_0..dt_k0)^2 and ``J`` that of
    (d^k0 f(0, t_1..) / dt_1..dt_k0)^2.
    """

    k0: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    I: Fraction
    J: Fraction
    label: str = ""
    poly: SimplexPoly | None = None


def power_sieve_function(k0: int, exponent: int | None = None) -> SieveFunction:
    """f = (1 - t_0 - ... - t_k0)^e, default e = k0 + 2 (so F is linear).

    Closed forms: d^(k0+1) f = +-e!/(e-k-0-1)! (1 - P1)^(e-k0-1), and the
    k0-fold partial at t_0 = 0 is +-e!/(e-k0)! (1 - P1')^(e-k0).
    """
    e = k0 + 2 if exponent is None else exponent
    k = k0 + 1
    if e < k:
        raise ValueError("exponent must be >= k0 + 1")
    cI = Fraction(math.factorial(e), math.factorial(e - k))
    cJ = Fraction(math.factorial(e), math.factorial(e - k0))
    I = cI**2 * power_sum_moment(k, 2 * (e - k), 0)
    J = cJ**2 * power_sum_moment(k0, 2 * (e - k0), 0)

    def evaluate(t):
        t = np.atleast_2d(np.asarray(t, dtype=float))
        s = 1.0 - t.sum(axis=1)
        return np.where((s > 0) & (t.min(axis=1) >= 0), np.maximum(s, 0.0) ** e, 0.0)

    return SieveFunction(k0, evaluate, I, J, label=f"(1-sum t)^{e}")


def sieve_function_from_poly(poly: SimplexPoly) -> SieveFunction:
    """Wrap an exported polynomial f, computing I and J exactly."""
    import sympy

    k = poly.k
    F = poly.mixed_partial()
    I = simplex_integral(F**2, poly.symbols)
    g = poly.expr
    for s in poly.symbols[1:]:
        g = sympy.diff(g, s)
    g = sympy.expand(g.subs(poly.symbols[0], 0))
    J = simplex_integral(g**2, poly.symbols[1:])
    return SieveFunction(k - 1, poly.evaluator(), I, J, label="poly", poly=poly)


@dataclass(frozen=True)
class WeightGenerator:
    f: SieveFunction
    R: float
    k0: int

    @property
    def logR(self) -> float:
        return math.log(self.R)

    def weights(self, tuples: np.ndarray) -> np.ndarray:
        """lambda for an (N, k0+1) integer array; zero off the support."""
        T = np.atleast_2d(np.asarray(tuples, dtype=np.int64))
        if T.shape[1] != self.k0 + 1:
            raise ValueError(f"tuples must have {self.k0 + 1} entries")
        out = np.zeros(len(T))
        if len(T) == 0:
            return out
        prod = np.prod(T.astype(float), axis=1)
        inside = (prod <= self.R * (1 + 1e-12)) & (T.min(axis=1) >= 1)
        if not inside.any():
            return out
        Ti = T[inside]
        mu_tab = _mu_table(int(math.floor(self.R * (1 + 1e-12))))
        mu = np.ones(len(Ti))
        for i in range(Ti.shape[1]):
            mu *= mu_tab[Ti[:, i]]
        vals = np.zeros(len(Ti))
        ok = mu != 0
        if ok.any():
            t = np.log(Ti[ok].astype(float)) / self.logR
            vals[ok] = self.f.evaluate(t) * mu[ok]
        out[inside] = vals
        return out


def lambda_weight(gen: WeightGenerator, d: Sequence[int]) -> float:
    if any(x < 1 for x in d):
        raise ValueError("tuple entries must be positive")
    if math.prod(d) > gen.R:
        return 0.0
    mu = 1
    for x in d:
        mu *= _primes.mobius(x)
    if mu == 0:
        return 0.0
    t = np.array([[math.log(x) / gen.logR for x in d]])
    return float(gen.f.evaluate(t)[0]) * mu


# -- tuple enumeration ------------------------------------------------------------------


@dataclass(frozen=True)
class TupleFamily:
    """Squarefree (k0+1)-tuples coprime to W with product <= R."""

    R: float
    W: int
    k0: int

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        Rint = int(math.floor(self.R + 1e-9))
        mu = _primes.mobius_array(max(Rint, 2))
        good = [d for d in range(1, Rint + 1) if mu[d] != 0 and math.gcd(d, self.W) == 1]

        def rec(prefix, budget):
            if len(prefix) == self.k0 + 1:
                yield tuple(prefix)
                return
            for d in good:
                if d > budget:
                    break
                yield from rec(prefix + [d], budget // d)

        yield from rec([], Rint)

    def array(self) -> np.ndarray:
        return np.array(list(self), dtype=np.int64).reshape(-1, self.k0 + 1)

    def brute_force(self) -> list[tuple[int, ...]]:
        """Direct nested loops over all (k0+1)-tuples in [1, R] (oracle; small R only)."""
        import itertools

        Rint = int(math.floor(self.R + 1e-9))
        out = []
        for t in itertools.product(range(1, Rint + 1), repeat=self.k0 + 1):
            if math.prod(t) <= Rint and all(_primes.mobius(x) != 0 and math.gcd(x, self.W) == 1 for x in t):
                out.append(t)
        return sorted(out)


# -- quadratic form brute force ---------------------------------------------------------------


def _pairwise_coprime_mask(L: np.ndarray) -> np.ndarray:
    """Rows of L (N, k) whose entries are pairwise coprime."""
    ok = np.ones(len(L), dtype=bool)
    k = L.shape[1]
    for a in range(k):
        for b in range(a + 1, k):
            ok &= np.gcd(L[:, a], L[:, b]) == 1
    return ok


@dataclass(frozen=True)
class LemmaRow:
    R: float
    W: int
    k0: int
    lhs: float
    rhs: float
    ratio: float
    tuples: int
    pairs: int

    def csv_row(self) -> list:
        return [f"{self.R:.17g}", self.W, self.k0, f"{self.lhs:.17g}", f"{self.rhs:.17g}", f"{self.ratio:.17g}"]


LEMMA_COLUMNS = ["R", "W", "k0", "lhs", "rhs", "ratio"]


def lemma_rhs(gen: WeightGenerator, W: int) -> float:
    k = gen.k0 + 1
    return (W / euler_phi(W)) ** k / gen.logR**k * float(gen.f.I)


def lemma_maynard_bruteforce(
    gen: WeightGenerator,
    W: int,
    *,
    coprime_filter: bool = True,
    budget: int = 10**8,
    threads: int = 1,
) -> LemmaRow:
    """sum over tuple pairs with W, [d_0,e_0], ..., [d_k0,e_k0] pairwise coprime
    of lambda_d lambda_e / prod [d_i, e_i], against the main term.

    ``coprime_filter=False`` drops the pairwise coprimality of the lcms (the
    tuples themselves stay coprime to W); used as a sanity contrast.
    """
    T = TupleFamily(gen.R, W, gen.k0).array()
    lam = gen.weights(T)
    nz = lam != 0
    T, lam = T[nz], lam[nz]
    N = len(T)
    if N * N > budget:
        raise BudgetExceeded(f"{N * N} tuple pairs exceed the budget {budget}")

    def rows(a, b):
        out = []
        for i in range(a, b + 1):
            L = np.lcm(T[i], T)
            den = np.prod(L.astype(float), axis=1)
            terms = lam[i] * lam / den
            if coprime_filter:
                terms = terms[_pairwise_coprime_mask(L)]
            out.append(math.fsum(terms.tolist()))
        return out

    parts = run_ordered(rows, chunks(0, N - 1, 256), threads) if N else []
    lhs = math.fsum(x for p in parts for x in p)
    rhs = lemma_rhs(gen, W)
    return LemmaRow(gen.R, W, gen.k0, lhs, rhs, lhs / rhs, N, N * N)


def lemma_csv(rows: list[LemmaRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LEMMA_COLUMNS)
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()


# -- the shared-prime modulus q -----------------------------------------------------


def shared_modulus(L: Sequence[int]) -> int:
    """q = product of primes dividing at least two of the (squarefree) L_i."""
    q = 1
    for a in range(len(L)):
        for b in range(a + 1, len(L)):
            g = math.gcd(L[a], L[b])
            q = q * g // math.gcd(q, g)
    return q


def shared_modulus_by_primes(L: Sequence[int]) -> int:
    """Same q, prime by prime (independent route)."""
    q = 1
    top = max(L)
    for p in _primes.primes_upto(max(top, 2)).tolist():
        if sum(1 for x in L if x % p == 0) >= 2:
            q *= p
    return q


@dataclass
class XqReport:
    pairs: int = 0
    q_mismatch: int = 0
    coprimality_violations: int = 0
    classes: dict = field(default_factory=dict)
    mass: dict = field(default_factory=dict)

    @property
    def partition_ok(self) -> bool:
        return sum(self.classes.values()) == self.pairs


def xq_certificate(W: int, q: int, L: Sequence[int]) -> bool:
    """W, q and L_j / gcd(q, L_j) pairwise coprime."""
    items = [W, q] + [x // math.gcd(q, x) for x in L]
    return all(math.gcd(items[a], items[b]) == 1 for a in range(len(items)) for b in range(a + 1, len(items)))


def xq_partition(pairs, W: int, weights: Callable | None = None) -> XqReport:
    """Assign each tuple pair (d, e) its modulus q and tally per-q classes and mass.

    ``pairs`` yields (d, e) tuples (or (d, e, lam_d, lam_e) when weights are
    attached).  Raises CoprimalityViolation if a certificate fails.
    """
    rep = XqReport()
    for item in pairs:
        d, e = item[0], item[1]
        L = [x * y // math.gcd(x, y) for x, y in zip(d, e)]
        q = shared_modulus(L)
        if q != shared_modulus_by_primes(L):
            rep.q_mismatch += 1
        if not xq_certificate(W, q, L):
            rep.coprimality_violations += 1
            raise CoprimalityViolation(f"pair {d}, {e} with q={q}")
        rep.pairs += 1
        rep.classes[q] = rep.classes.get(q, 0) + 1
        if len(item) >= 4:
            den = q * q * math.prod(x // math.gcd(q, x) for x in L)
            rep.mass[q] = rep.mass.get(q, 0.0) + abs(item[2] * item[3]) / den
    return rep


def xq_vectorized(D: np.ndarray, E: np.ndarray, W: int, prime_bound: int) -> dict:
    """Vectorised q assignment for arrays of tuples (N, k) with both routes.

    Returns counts of q mismatches and certificate violations.
    """
    L = np.lcm(D, E)
    N, k = L.shape
    q1 = np.ones(N, dtype=np.int64)
    for a in range(k):
        for b in range(a + 1, k):
            q1 = np.lcm(q1, np.gcd(L[:, a], L[:, b]))
    q2 = np.ones(N, dtype=np.int64)
    for p in _primes.primes_upto(max(prime_bound, 2)).tolist():
        cnt = (L % p == 0).sum(axis=1)
        q2 = np.where(cnt >= 2, q2 * p, q2)
    items = [np.full(N, W, dtype=np.int64), q1] + [L[:, j] // np.gcd(q1, L[:, j]) for j in range(k)]
    ok = np.ones(N, dtype=bool)
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            ok &= np.gcd(items[a], items[b]) == 1
    return {
        "pairs": N,
        "q_mismatch": int((q1 != q2).sum()),
        "violations": int((~ok).sum()),
        "distinct_q": int(len(np.unique(q1))),
    }


def random_tuple_pairs(R: float, W: int, k0: int, n: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """n random pairs of tuples from the family (sampled with replacement)."""
    T = TupleFamily(R, W, k0).array()
    rng = np.random.default_rng(seed)
    i = rng.integers(0, len(T), n)
    j = rng.integers(0, len(T), n)
    return T[i], T[j]


# -- sieve sums over the sequence -----------------------------------------------------


def desk_R(cfg: SieveConfig, target: float = 100.0) -> tuple[float, float]:
    """(R, scale) for desk runs: the configured scale, or one giving R = target."""
    if cfg.scale is not None:
        return cfg.R, cfg.scale
    scale = math.log(target) / (cfg.sigma0 * math.log(cfg.X))
    return target, scale


def _squarefree_divisors_upto(v: int, bound: int, small_primes: list[int]) -> list[int]:
    fac = [p for p in small_primes if v % p == 0]
    out = [1]
    for p in fac:
        out += [d * p for d in out if d * p <= bound]
    return sorted(out)


def divisor_lambda_sum(gen: WeightGenerator, values: Sequence[int], small_primes: list[int] | None = None) -> float:
    """sum of lambda_d over d_i | values[i] (i = 0..k0)."""
    Rint = int(math.floor(gen.R + 1e-9))
    if small_primes is None:
        small_primes = _primes.primes_upto(max(Rint, 2)).tolist()
    divs = [_squarefree_divisors_upto(int(v), Rint, small_primes) for v in values]
    tuples = []

    def rec(i, prefix, budget):
        if i == len(divs):
            tuples.append(prefix)
            return
        for d in divs[i]:
            if d > budget:
                break
            rec(i + 1, prefix + [d], budget // d)

    rec(0, [], Rint)
    lam = gen.weights(np.array(tuples, dtype=np.int64))
    return math.fsum(lam.tolist())


@dataclass
class SieveSumReport:
    name: str
    value: float
    main_term: float
    ratio: float
    n_terms: int
    R: float
    scale: float
    W: int
    b: int
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {
            "name": self.name,
            "value": self.value,
            "main_term": self.main_term,
            "ratio": self.ratio,
            "n_terms": self.n_terms,
            "R": self.R,
            "scale": self.scale,
            "W": self.W,
            "b": self.b,
        }
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, default=float)


@dataclass
class _Scan:
    """Per-n data over N^c cap [lo, hi] restricted to the congruence class."""

    n: np.ndarray
    shifts: np.ndarray  # (N, k0+1): s_0(n) .. s_k0(n)


def _scan(cfg: SieveConfig, lo: int, hi: int) -> _Scan:
    vals, _ = ps_values(lo, hi, cfg.c)
    S = np.stack([shift_map_array(vals, h, cfg.c) for h in range(cfg.k0 + 1)], axis=1) if vals.size else np.zeros((0, cfg.k0 + 1), dtype=np.int64)
    if cfg.W > 1:
        keep = np.all(S % cfg.W == cfg.b % cfg.W, axis=1)
        vals, S = vals[keep], S[keep]
    return _Scan(vals, S)


def _bump_products(cfg: SieveConfig, ms: np.ndarray, which: str) -> np.ndarray:
    bumps = paper_bumps(cfg)
    if ms.size == 0:
        return np.zeros(0)
    _, fg = pow_floor_array(ms, cfg.gamma, return_frac=True)
    fc = frac_array(ms, 1 - cfg.gamma, scale=cfg.c.value)
    if which == "main":
        return bumps.chi(fg) * bumps.psi(fc)
    return bumps.chi_star(fg) * bumps.psi_star(fc)


def _prop_chunk(cfg: SieveConfig, gen: WeightGenerator, lo: int, hi: int, m: int, log3X: float):
    sc = _scan(cfg, lo, hi)
    k = cfg.k0 + 1
    if sc.n.size == 0:
        return [], [], [], 0
    small = _primes.primes_upto(max(int(gen.R), 2)).tolist()
    top = int(sc.shifts.max())
    pm = _primes.prime_mask(top)
    bump_h = np.stack([_bump_products(cfg, sc.shifts[:, h], "main") for h in range(k)], axis=1)
    varpi = np.where(pm[sc.shifts], np.log(sc.shifts.astype(float)), 0.0)
    main_h = varpi * bump_h  # (N, k)
    star = _bump_products(cfg, sc.n, "star")
    relevant = np.flatnonzero((main_h.sum(axis=1) > 0) | (star > 0))
    per_h = [[] for _ in range(k)]
    star_terms, combined = [], []
    for i in relevant.tolist():
        w = divisor_lambda_sum(gen, sc.shifts[i].tolist(), small) ** 2
        for h in range(k):
            if main_h[i, h] > 0:
                per_h[h].append(w * main_h[i, h])
        if star[i] > 0:
            star_terms.append(w * star[i])
        combined.append((int(sc.n[i]), w * (main_h[i].sum() - m * star[i] * log3X), float(main_h[i].sum()), float(star[i])))
    return per_h, star_terms, combined, int(sc.n.size)


def _prop_scan(cfg: SieveConfig, gen: WeightGenerator, threads: int, m: int):
    log3X = math.log(3 * cfg.X)
    parts = run_ordered(lambda a, b: _prop_chunk(cfg, gen, a, b, m, log3X), chunks(cfg.X, 2 * cfg.X, 1 << 17), threads)
    k = cfg.k0 + 1
    per_h = [[] for _ in range(k)]
    star, combined, count = [], [], 0
    for ph, st, cb, cnt in parts:
        for h in range(k):
            per_h[h].extend(ph[h] if ph else [])
        star.extend(st)
        combined.extend(cb)
        count += cnt
    return per_h, star, combined, count


def _weight_gen(cfg: SieveConfig, f: SieveFunction | None) -> tuple[WeightGenerator, float]:
    R, scale = desk_R(cfg)
    f = power_sieve_function(cfg.k0) if f is None else f
    if f.k0 != cfg.k0:
        raise ValueError("sieve function dimension does not match k0")
    return WeightGenerator(f, R, cfg.k0), scale


def prop21_main_term(cfg: SieveConfig, gen: WeightGenerator) -> float:
    k0, W = cfg.k0, cfg.W
    return (
        gen.logR ** (-k0)
        * W ** (k0 - 1)
        / euler_phi(W) ** (k0 + 1)
        * 9
        * float(cfg.delta0)
        * float(cfg.eta0)
        * (k0 + 1)
        * cfg.X ** float(cfg.gamma)
        / 16
        * float(gen.f.J)
    )


def prop31_main_term(cfg: SieveConfig, gen: WeightGenerator) -> float:
    k0, W = cfg.k0, cfg.W
    return (
        gen.logR ** (-(k0 + 1))
        * W ** (k0 - 1)
        / euler_phi(W) ** (k0 + 1)
        * 9
        * float(cfg.delta0)
        * float(cfg.eta0)
        * cfg.X ** float(cfg.gamma)
        / 2
        * float(gen.f.I)
    )


def prop21_sum(cfg: SieveConfig, f: SieveFunction | None = None, h: int | None = None, threads: int = 1) -> SieveSumReport:
    """Weighted prime sum over the window values s_h(n); all h when ``h`` is None.

    The main term is the full (all-h) constant; for a single h it is divided by
    k0 + 1.
    """
    gen, scale = _weight_gen(cfg, f)
    per_h, _, _, count = _prop_scan(cfg, gen, threads, cfg.m)
    main = prop21_main_term(cfg, gen)
    if h is None:
        value = math.fsum(x for terms in per_h for x in terms)
        name = "prop21"
    else:
        if not 0 <= h <= cfg.k0:
            raise ValueError("h must be in [0, k0]")
        value = math.fsum(per_h[h])
        main /= cfg.k0 + 1
        name = f"prop21[h={h}]"
    per = [math.fsum(t) for t in per_h]
    return SieveSumReport(name, value, main, value / main if main else float("nan"), count, gen.R, scale, cfg.W, cfg.b, {"per_h": per})


def prop31_sum(cfg: SieveConfig, f: SieveFunction | None = None, threads: int = 1) -> SieveSumReport:
    """Weighted count with the majorant bumps chi*, psi* (an upper-bound sum)."""
    gen, scale = _weight_gen(cfg, f)
    _, star, _, count = _prop_scan(cfg, gen, threads, cfg.m)
    value = math.fsum(star)
    main = prop31_main_term(cfg, gen)
    return SieveSumReport("prop31", value, main, value / main if main else float("nan"), count, gen.R, scale, cfg.W, cfg.b)


def combined_sum(cfg: SieveConfig, f: SieveFunction | None = None, threads: int = 1) -> SieveSumReport:
    """sum_n w_n (sum_h varpi chi psi - m chi* psi* log 3X); sign reported, not asserted."""
    gen, scale = _weight_gen(cfg, f)
    per_h, star, combined, count = _prop_scan(cfg, gen, threads, cfg.m)
    value = math.fsum(x[1] for x in combined)
    positive = [x for x in combined if x[2] - cfg.m * x[3] * math.log(3 * cfg.X) > 0]
    s2 = math.fsum(x for t in per_h for x in t)
    s1 = math.fsum(star)
    return SieveSumReport(
        "combined",
        value,
        float("nan"),
        float("nan"),
        count,
        gen.R,
        scale,
        cfg.W,
        cfg.b,
        {
            "sign": int(np.sign(value)),
            "prime_sum": s2,
            "majorant_sum": s1,
            "m": cfg.m,
            "positive_n": [x[0] for x in positive[:20]],
            "positive_count": len(positive),
        },
    )
