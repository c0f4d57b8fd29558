"""Piatetski-Shapiro sequences: membership, enumeration, the shift map and the
floor identities that turn a window of the sequence into an arithmetic
progression."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import primes as _primes
from ._parallel import chunks, run_ordered
from .config import Exponent, SieveConfig, parse_exponent
from .powerfloor import (
    PrecisionUnresolved,
    floor_c_n_pow,
    frac_array,
    pow_floor,
    pow_floor_array,
    pow_floor_value,
    power_enclosure,
    rational_power_floor,
)

# float classification tolerance; anything closer than this to a window edge
# is decided by the exact path
_FLOAT_TOL = 1e-7


class MembershipDisagreement(AssertionError):
    """The two membership tests disagreed (internal invariant failure)."""


@dataclass(frozen=True)
class PSElement:
    m: int
    n: int
    frac_n_gamma: tuple[Fraction, Fraction]


# -- membership ---------------------------------------------------------------


def _ceil_pow(m: int, e: Fraction) -> int:
    r = pow_floor(m, e, bits=8)
    return r.value if r.exact_integer_hit else r.value + 1


def is_member_by_difference(m: int, c: Exponent) -> bool:
    """Count integers in [m^gamma, (m+1)^gamma): ceil((m+1)^g) - ceil(m^g) >= 1."""
    g = c.gamma
    return _ceil_pow(m + 1, g) - _ceil_pow(m, g) >= 1


def is_member_by_preimage(m: int, c: Exponent) -> bool:
    """Smallest n with n^c >= m, certified by integer comparison; then [n^c] == m."""
    p, q = c.p, c.q
    mq = m**q
    n0 = max(1, iroot_floor_gamma(m, c))
    while n0**p < mq:
        n0 += 1
    while n0 > 1 and (n0 - 1) ** p >= mq:
        n0 -= 1
    return pow_floor_value(n0, c) == m


def iroot_floor_gamma(m: int, c: Exponent) -> int:
    return pow_floor_value(m, c.gamma)


def is_ps_member(m: int, c: Exponent | str) -> bool:
    """True iff m = [n^c] for some n >= 1; both tests must agree."""
    c = parse_exponent(c)
    if m < 1:
        raise ValueError("m must be >= 1")
    a = is_member_by_difference(m, c)
    b = is_member_by_preimage(m, c)
    if a != b:
        raise MembershipDisagreement(f"membership tests disagree at m={m}, c={c}: {a} vs {b}")
    return a


def member_mask_difference(lo: int, hi: int, c: Exponent) -> np.ndarray:
    """Vectorised difference test for m in [lo, hi]."""
    g = c.gamma
    ms = np.arange(lo, hi + 2, dtype=np.int64)
    fl = pow_floor_array(ms, g)
    # exact hits: fl**p == m**q; only perfect powers can hit, recheck candidates exactly
    ceil = fl + 1
    x = np.power(ms.astype(np.float64), float(g))
    near = np.abs(x - np.rint(x)) < 1e-6 * np.maximum(x, 1.0)
    for i in np.flatnonzero(near):
        if pow_floor(int(ms[i]), g, bits=8).exact_integer_hit:
            ceil[i] = fl[i]
    return (ceil[1:] - ceil[:-1]) >= 1


def member_mask_image(lo: int, hi: int, c: Exponent) -> np.ndarray:
    """Vectorised preimage route: mark the image {[n^c]} inside [lo, hi]."""
    mask = np.zeros(hi - lo + 1, dtype=bool)
    vals, _ = ps_values(lo, hi, c)
    mask[vals - lo] = True
    return mask


def ps_values(lo: int, hi: int, c: Exponent) -> tuple[np.ndarray, np.ndarray]:
    """(values [n^c] in [lo, hi], their preimages n), increasing."""
    c = parse_exponent(c)
    if hi < lo:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    n_lo = max(1, pow_floor_value(max(lo, 1), c.gamma) - 1)
    n_hi = pow_floor_value(hi + 1, c.gamma) + 1
    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    vals = pow_floor_array(ns, c)
    keep = (vals >= lo) & (vals <= hi)
    return vals[keep], ns[keep]


def enumerate_ps(X1: int, X2: int, c: Exponent | str, with_enclosure: bool = True) -> Iterator[PSElement]:
    """Members of N^c in [X1, X2] in increasing order with minimal preimage."""
    c = parse_exponent(c)
    if X1 > X2:
        raise ValueError("need X1 <= X2")
    vals, ns = ps_values(X1, X2, c)
    for m, n in zip(vals.tolist(), ns.tolist()):
        if with_enclosure:
            r = pow_floor(m, c.gamma)
            enc = (r.frac_lo, r.frac_hi)
        else:
            enc = (Fraction(0), Fraction(1))
        yield PSElement(m, n, enc)


def ps_count_below(x: int, c: Exponent) -> int:
    """#{n >= 1 : n^c < x + 1} = #(N^c cap [1, x])."""
    p, q = c.p, c.q
    n = pow_floor_value(x + 1, c.gamma)
    if n**p == (x + 1) ** q:
        n -= 1
    return n


# -- shift map ----------------------------------------------------------------


def shift_map(n: int, h: int, c: Exponent | str) -> int:
    """s_h(n) = [([n^gamma] + h + 1)^c]."""
    c = parse_exponent(c)
    base = pow_floor_value(n, c.gamma) + h + 1
    if base < 1:
        raise ValueError(f"[n^gamma]+h+1 = {base} < 1 for n={n}, h={h}")
    return pow_floor_value(base, c)


def shift_map_array(ns: np.ndarray, h: int, c: Exponent) -> np.ndarray:
    base = pow_floor_array(ns, c.gamma) + h + 1
    return pow_floor_array(base, c)


# -- certified window predicates ------------------------------------------------


@dataclass(frozen=True)
class Thresholds:
    """Exact constants of one configuration."""

    c: Exponent
    X: int
    delta0: Fraction
    eta0: Fraction
    max_bits: int

    @classmethod
    def from_config(cls, cfg: SieveConfig) -> "Thresholds":
        return cls(cfg.c, cfg.X, cfg.delta0, cfg.eta0, cfg.max_precision_bits)

    def xg1(self, bits: int) -> tuple[Fraction, Fraction]:
        """Enclosure of X^(gamma-1)."""
        return power_enclosure(self.X, self.c.gamma - 1, bits)

    def one_minus(self, k: Fraction, bits: int) -> tuple[Fraction, Fraction]:
        """Enclosure of 1 - k*delta0*X^(gamma-1)."""
        lo, hi = self.xg1(bits)
        return 1 - k * self.delta0 * hi, 1 - k * self.delta0 * lo

    def floats(self) -> dict[str, float]:
        xg = float(self.xg1(64)[0])
        d = float(self.delta0)
        return {"xg1": xg, "delta0": d, "eta0": float(self.eta0)}


def _frac_gamma_enc(n: int, c: Exponent, bits: int) -> tuple[Fraction, Fraction]:
    r = pow_floor(n, c.gamma, bits)
    return r.frac_lo, r.frac_hi


def _frac_cn_enc(n: int, c: Exponent, bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of {c * n^(1-gamma)}."""
    cf = c.value
    lo, hi = power_enclosure(n, 1 - c.gamma, bits)
    L, U = cf * lo, cf * hi
    v = math.floor(L)
    # may exceed 1 when the enclosure straddles an integer; callers escalate
    return L - v, U - v


def _strictly_between(val, lo_thr, hi_thr) -> bool | None:
    """Decide lo_thr < val < hi_thr from enclosures; None if undecided."""
    v_lo, v_hi = val
    if v_hi <= lo_thr[0] or v_lo >= hi_thr[1]:
        # definitely outside (touching the threshold counts as outside only if exact)
        if v_hi < lo_thr[0] or v_lo > hi_thr[1]:
            return False
        if v_lo == v_hi and (lo_thr[0] == lo_thr[1] or hi_thr[0] == hi_thr[1]):
            return False
        return None
    if v_lo > lo_thr[1] and v_hi < hi_thr[0]:
        return True
    return None


def certify(decide, max_bits: int, start_bits: int = 64, n: int = -1, what: str = "window"):
    """Run ``decide(bits)`` with doubling precision until it returns a bool."""
    bits = start_bits
    while bits <= max_bits:
        out = decide(bits)
        if out is not None:
            return out
        bits *= 2
    raise PrecisionUnresolved(what, n, max_bits)


def frac_gamma_in(n: int, th: Thresholds, k_lo: Fraction, k_hi: Fraction) -> bool:
    """1 - k_lo*d*X^(g-1) < {n^g} < 1 - k_hi*d*X^(g-1), certified (k_lo > k_hi)."""

    def decide(bits):
        return _strictly_between(_frac_gamma_enc(n, th.c, bits), th.one_minus(k_lo, bits), th.one_minus(k_hi, bits))

    return certify(decide, th.max_bits, n=n, what="{n^gamma} window")


def frac_gamma_at_least(n: int, th: Thresholds, k: Fraction) -> bool:
    """{n^g} >= 1 - k*d*X^(g-1), certified."""

    def decide(bits):
        v_lo, v_hi = _frac_gamma_enc(n, th.c, bits)
        t_lo, t_hi = th.one_minus(k, bits)
        if v_lo >= t_hi:
            return True
        if v_hi < t_lo:
            return False
        return None

    return certify(decide, th.max_bits, n=n, what="{n^gamma} lower bound")


def frac_cn_in(n: int, c: Exponent, lo: Fraction, hi: Fraction, max_bits: int) -> bool:
    """lo < {c n^(1-g)} < hi with rational lo < hi in (0, 1), certified."""
    cf = c.value
    p, q = c.p, c.q
    a = n ** (p - q)
    r = _exact_root(a, p)
    if r is not None:
        val = cf * r
        f = val - math.floor(val)
        return lo < f < hi

    def decide(bits):
        enc = _frac_cn_enc(n, c, bits)
        if enc[1] - enc[0] > Fraction(1, 2) or enc[1] > 1:
            return None
        return _strictly_between(enc, (lo, lo), (hi, hi))

    return certify(decide, max_bits, n=n, what="{c n^(1-gamma)} window")


def _exact_root(a: int, k: int) -> int | None:
    from .powerfloor import iroot

    r = iroot(a, k)
    return r if r**k == a else None


@dataclass(frozen=True)
class WindowCertificate:
    n: int
    frac_n_gamma_in_range: bool
    frac_c_window: bool

    @property
    def both(self) -> bool:
        return self.frac_n_gamma_in_range and self.frac_c_window


def window_certificate(n: int, cfg: SieveConfig) -> WindowCertificate:
    """Certified hypotheses of the progression identity at n.

    Raises PrecisionUnresolved when an enclosure cannot be separated from a
    window edge within ``cfg.max_precision_bits``.
    """
    th = Thresholds.from_config(cfg)
    a = frac_gamma_in(n, th, Fraction(4), Fraction(1, 4))
    b = frac_cn_in(n, cfg.c, cfg.eta0, 2 * cfg.eta0, cfg.max_precision_bits)
    return WindowCertificate(n, a, b)


def _window_candidates(ns: np.ndarray, cfg: SieveConfig) -> np.ndarray:
    """Float prefilter: drop n that are clearly outside either window."""
    c = cfg.c
    g = c.gamma
    f = th_floats = Thresholds.from_config(cfg).floats()
    _, fg = pow_floor_array(ns, g, return_frac=True)
    lo1 = 1 - 4 * f["delta0"] * th_floats["xg1"]
    hi1 = 1 - 0.25 * f["delta0"] * th_floats["xg1"]
    keep = (fg > lo1 - _FLOAT_TOL) & (fg < hi1 + _FLOAT_TOL)
    ns = ns[keep]
    fc = frac_array(ns, 1 - g, scale=c.value)
    e = f["eta0"]
    keep = ((fc > e - _FLOAT_TOL) & (fc < 2 * e + _FLOAT_TOL)) | (fc < _FLOAT_TOL) | (fc > 1 - _FLOAT_TOL)
    return ns[keep]


# -- identity verification ------------------------------------------------------


@dataclass
class IdentityReport:
    lo: int
    hi: int
    checked: int = 0
    counterexamples: int = 0
    unresolved: int = 0
    examples: list = field(default_factory=list)
    split_agree: int = 0
    split_disagree: int = 0
    split_unresolved: int = 0
    max_frac_deviation_ratio: float = 0.0
    lower_bound_failures: int = 0
    deviation_failures: int = 0

    def merge(self, other: "IdentityReport") -> "IdentityReport":
        out = IdentityReport(min(self.lo, other.lo), max(self.hi, other.hi))
        for k in (
            "checked",
            "counterexamples",
            "unresolved",
            "split_agree",
            "split_disagree",
            "split_unresolved",
            "lower_bound_failures",
            "deviation_failures",
        ):
            setattr(out, k, getattr(self, k) + getattr(other, k))
        out.examples = (self.examples + other.examples)[:20]
        out.max_frac_deviation_ratio = max(self.max_frac_deviation_ratio, other.max_frac_deviation_ratio)
        return out


def _floor_shifted_power(n: int, h: int, c: Exponent, max_bits: int) -> int:
    """[(n^gamma + h)^c], certified via an enclosure of n^gamma."""
    if h == 0:
        # (n^gamma)^c = n exactly; an enclosure would straddle the integer forever
        return n

    def decide(bits):
        lo, hi = power_enclosure(n, c.gamma, bits)
        a = rational_power_floor(lo + h, c)
        b = rational_power_floor(hi + h, c)
        return a if a == b else None

    return certify(decide, max_bits, n=n, what="[(n^gamma+h)^c]")


def _verify_nchi_chunk(lo: int, hi: int, cfg: SieveConfig) -> IdentityReport:
    rep = IdentityReport(lo, hi)
    ns = _window_candidates(np.arange(lo, hi + 1, dtype=np.int64), cfg)
    for n in ns.tolist():
        try:
            cert = window_certificate(n, cfg)
            if not cert.both:
                continue
            step = floor_c_n_pow(n, cfg.c, cfg.max_precision_bits).value
        except PrecisionUnresolved:
            rep.unresolved += 1
            continue
        rep.checked += 1
        for h in range(-cfg.k0, cfg.k0 + 1):
            s = shift_map(n, h, cfg.c)
            if s != n + h * step:
                rep.counterexamples += 1
                if len(rep.examples) < 20:
                    rep.examples.append((n, h, s, n + h * step))
            try:
                alt = _floor_shifted_power(n, h, cfg.c, cfg.max_precision_bits) + (1 if h < 0 else 0)
            except PrecisionUnresolved:
                rep.split_unresolved += 1
                continue
            if alt == s:
                rep.split_agree += 1
            else:
                rep.split_disagree += 1
    return rep


def verify_lemma_nchi(cfg: SieveConfig, lo: int | None = None, hi: int | None = None, threads: int = 1) -> IdentityReport:
    """Check s_h(n) = n + h*[c n^(1-g)] for every window-certified n in [lo, hi].

    Defaults to the full range [X, 2X].  Also tallies the split form
    [(n^g + h)^c] (+1 for negative h) against s_h(n).
    """
    lo = cfg.X if lo is None else lo
    hi = 2 * cfg.X if hi is None else hi
    if lo < cfg.X or hi > 2 * cfg.X:
        raise ValueError("range must lie within [X, 2X]")
    parts = run_ordered(lambda a, b: _verify_nchi_chunk(a, b, cfg), chunks(lo, hi), threads)
    rep = IdentityReport(lo, hi)
    for p in parts:
        rep = rep.merge(p)
    rep.lo, rep.hi = lo, hi
    return rep


def _positivity_candidates(ms: np.ndarray, cfg: SieveConfig) -> np.ndarray:
    """Float prefilter for chi(m^g) > 0 and psi(c m^(1-g)) > 0."""
    c = cfg.c
    f = Thresholds.from_config(cfg).floats()
    _, fg = pow_floor_array(ms, c.gamma, return_frac=True)
    a = 1 - 2 * f["delta0"] * f["xg1"]
    b = 1 - f["delta0"] * f["xg1"]
    k1 = (fg > a - _FLOAT_TOL) & (fg < b + _FLOAT_TOL)
    fc = frac_array(ms, 1 - c.gamma, scale=c.value)
    e = f["eta0"]
    k2 = (fc > e - _FLOAT_TOL) & (fc < 2 * e + _FLOAT_TOL)
    return k1 & k2


def bump_positive_chi(m: int, th: Thresholds) -> bool:
    """chi(m^g) > 0, i.e. {m^g} in (1 - 2 d X^(g-1), 1 - d X^(g-1))."""
    return frac_gamma_in(m, th, Fraction(2), Fraction(1))


def bump_positive_psi(m: int, cfg: SieveConfig) -> bool:
    """psi(c m^(1-g)) > 0, i.e. {c m^(1-g)} in (eta0, 2 eta0)."""
    return frac_cn_in(m, cfg.c, cfg.eta0, 2 * cfg.eta0, cfg.max_precision_bits)


def _circ_dist(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def _verify_shnchi_chunk(lo: int, hi: int, cfg: SieveConfig) -> IdentityReport:
    rep = IdentityReport(lo, hi)
    c = cfg.c
    th = Thresholds.from_config(cfg)
    vals, _ = ps_values(lo, hi, c)
    if vals.size == 0:
        return rep
    scale_dev = float(cfg.X) ** (1 - 2 * float(c.gamma))
    for h in range(1, cfg.k0 + 1):
        ms = shift_map_array(vals, h, c)
        cand = _positivity_candidates(ms, cfg)
        for n, m in zip(vals[cand].tolist(), ms[cand].tolist()):
            try:
                if not (bump_positive_chi(m, th) and bump_positive_psi(m, cfg)):
                    continue
                at_least = frac_gamma_at_least(n, th, Fraction(2))
            except PrecisionUnresolved:
                rep.unresolved += 1
                continue
            rep.checked += 1
            for hs in range(1, cfg.k0 + 1):
                a = shift_map(n, hs, c)
                b = shift_map(m, hs - h, c)
                if a != b:
                    rep.counterexamples += 1
                    if len(rep.examples) < 20:
                        rep.examples.append((n, h, hs, a, b))
            if not at_least:
                rep.lower_bound_failures += 1
                if len(rep.examples) < 20:
                    rep.examples.append((n, h, "frac lower bound"))
            fn = float(sum(_frac_cn_enc(n, c, 96)) / 2)
            fm = float(sum(_frac_cn_enc(m, c, 96)) / 2)
            ratio = _circ_dist(fn, fm) / scale_dev
            rep.max_frac_deviation_ratio = max(rep.max_frac_deviation_ratio, ratio)
            if ratio > 10.0:
                rep.deviation_failures += 1
    return rep


def verify_lemma_shnchi(cfg: SieveConfig, lo: int | None = None, hi: int | None = None, threads: int = 1) -> IdentityReport:
    """Composition identity s_{h*}(n) = s_{h*-h}(s_h(n)) under bump positivity.

    For n in N^c cap [lo, hi] and 1 <= h, h* <= k0 with chi(s_h(n)^g) > 0 and
    psi(c s_h(n)^(1-g)) > 0, also checks {n^g} >= 1 - 2 d X^(g-1) and that
    {c n^(1-g)} and {c s_h(n)^(1-g)} differ by at most 10 X^(1-2g).
    """
    lo = cfg.X if lo is None else lo
    hi = 2 * cfg.X if hi is None else hi
    if lo < cfg.X or hi > 2 * cfg.X:
        raise ValueError("range must lie within [X, 2X]")
    parts = run_ordered(lambda a, b: _verify_shnchi_chunk(a, b, cfg), chunks(lo, hi), threads)
    rep = IdentityReport(lo, hi)
    for p in parts:
        rep = rep.merge(p)
    rep.lo, rep.hi = lo, hi
    return rep


# -- density -----------------------------------------------------------------


@dataclass(frozen=True)
class DensityRow:
    x: int
    c: Exponent
    count: int
    main_term: float
    ratio: float

    def csv_row(self) -> list:
        return [self.x, self.c.p, self.c.q, self.count, f"{self.main_term:.17g}", f"{self.ratio:.17g}"]


DENSITY_COLUMNS = ["x", "c_num", "c_den", "count", "main_term", "ratio"]


def ps_primes(x: int, c: Exponent, lo: int = 2) -> np.ndarray:
    """Primes in N^c cap [lo, x], increasing."""
    vals, _ = ps_values(lo, x, c)
    mask = _primes.prime_mask(x)
    return vals[mask[vals]]


def density_report(x: int, c: Exponent | str) -> DensityRow:
    """Count of PS primes up to x against x^gamma / log x."""
    c = parse_exponent(c)
    if x < 10**4:
        raise ValueError("x must be >= 10^4")
    count = int(ps_primes(x, c).size)
    main = x ** float(c.gamma) / math.log(x)
    return DensityRow(x, c, count, main, count / main)


def density_csv(rows: list[DensityRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DENSITY_COLUMNS)
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()
