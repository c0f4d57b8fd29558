"""Certified floors and fractional parts of rational powers.

All results are decided by integer comparisons.  A floating estimate is used
only as a seed (scalar path) or as a classifier with an explicit error margin
(array path); anything inside the margin is recomputed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .config import DEFAULT_MAX_PRECISION_BITS, Exponent

ExponentLike = Union[Exponent, Fraction, int]

_LD = np.longdouble
_LD_EPS = float(np.finfo(_LD).eps)


class PrecisionUnresolved(ArithmeticError):
    """An enclosure could not be narrowed enough within the bit cap."""

    def __init__(self, what: str, n: int, bits: int):
        super().__init__(f"{what}: unresolved at n={n} after {bits} bits")
        self.what = what
        self.n = n
        self.bits = bits


def _frac(e: ExponentLike) -> Fraction:
    if isinstance(e, Exponent):
        return e.value
    return Fraction(e)


def iroot(a: int, k: int) -> int:
    """Largest integer v with v**k <= a."""
    if k < 1:
        raise ValueError("root index must be >= 1")
    if a < 0:
        raise ValueError("iroot of a negative number")
    if a < 2 or k == 1:
        return a
    bl = a.bit_length()
    if bl <= k:
        return 1
    if bl < 1000:
        x = int(float(a) ** (1.0 / k))
    else:
        shift = (bl - 900) // k
        x = int(float(a >> (shift * k)) ** (1.0 / k)) << shift
    # seed must be >= the true root for the descent below
    x += (x >> 40) + 2
    km1 = k - 1
    while True:
        y = (km1 * x + a // x**km1) // k
        if y >= x:
            break
        x = y
    while x**k > a:
        x -= 1
    while (x + 1) ** k <= a:
        x += 1
    return x


def iroot_bisect(a: int, k: int) -> int:
    """Naive bisection for floor(a**(1/k)); slow, used as an oracle."""
    lo, hi = 0, 1
    while hi**k <= a:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**k <= a:
            lo = mid
        else:
            hi = mid
    return lo


def power_enclosure(x: Fraction | int, e: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rational interval [lo, hi] containing x**e with hi - lo <= 2**-bits.

    Returns ``lo == hi`` when x**e is itself a dyadic rational found exactly.
    """
    x = Fraction(x)
    if x <= 0:
        raise ValueError("base must be positive")
    s, t = e.numerator, e.denominator
    xs = x**s
    num, den = xs.numerator, xs.denominator
    scaled_num = num << (t * bits)
    y = iroot(scaled_num // den, t)
    scale = 1 << bits
    if y**t * den == scaled_num:
        v = Fraction(y, scale)
        return v, v
    return Fraction(y, scale), Fraction(y + 1, scale)


@dataclass(frozen=True)
class FloorResult:
    """Certified floor of a real quantity and an enclosure of its fractional part."""

    value: int
    exact_integer_hit: bool
    frac_lo: Fraction
    frac_hi: Fraction

    @property
    def frac_mid(self) -> float:
        return float((self.frac_lo + self.frac_hi) / 2)

    @property
    def frac_width(self) -> Fraction:
        return self.frac_hi - self.frac_lo


def pow_floor(n: int, e: ExponentLike, bits: int = 64) -> FloorResult:
    """[n^e] for rational e = p/q, with a ``bits``-wide fractional enclosure.

    The floor v satisfies v**q <= n**p < (v+1)**q as integers.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ef = _frac(e)
    p, q = ef.numerator, ef.denominator
    if p <= 0:
        raise ValueError("exponent must be positive")
    a = n**p
    v = iroot(a, q)
    if v**q == a:
        return FloorResult(v, True, Fraction(0), Fraction(0))
    lo, hi = power_enclosure(n, ef, bits)
    return FloorResult(v, False, lo - v, hi - v)


def pow_floor_value(n: int, e: ExponentLike) -> int:
    """Just the integer [n^e]; skips the fractional enclosure."""
    ef = _frac(e)
    return iroot(n**ef.numerator, ef.denominator)


def frac_pow(n: int, e: ExponentLike, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Certified enclosure of {n^e}; (0, 0) when n^e is an integer."""
    r = pow_floor(n, e, bits)
    return r.frac_lo, r.frac_hi


def floor_c_n_pow(
    n: int,
    c: Exponent | Fraction,
    max_bits: int = DEFAULT_MAX_PRECISION_BITS,
    start_bits: int = 128,
) -> FloorResult:
    """[c * n^(1 - 1/c)] with adaptive precision.

    Raises PrecisionUnresolved if the enclosure still straddles an integer at
    ``max_bits``.
    """
    cf = _frac(c)
    p, q = cf.numerator, cf.denominator
    e = Fraction(p - q, p)
    a = n ** (p - q)
    r = iroot(a, p)
    if r**p == a:
        val = cf * r
        v = math.floor(val)
        f = val - v
        return FloorResult(v, f == 0, f, f)
    bits = start_bits
    while bits <= max_bits:
        lo, hi = power_enclosure(n, e, bits)
        L, U = cf * lo, cf * hi
        v = math.floor(L)
        if v + 1 >= U:
            return FloorResult(v, False, L - v, U - v)
        bits *= 2
    raise PrecisionUnresolved("floor_c_n_pow", n, max_bits)


def rational_power_floor(x: Fraction, e: ExponentLike) -> int:
    """floor(x^e) for positive rational x and rational e > 0."""
    ef = _frac(e)
    p, q = ef.numerator, ef.denominator
    xp = Fraction(x) ** p
    return iroot(xp.numerator // xp.denominator, q)


# -- array fast path ----------------------------------------------------------


def _ld_power(ns: np.ndarray, e: Fraction) -> np.ndarray:
    x = np.asarray(ns).astype(_LD)
    ex = _LD(e.numerator) / _LD(e.denominator)
    return np.exp(ex * np.log(x))


_F64_EPS = float(np.finfo(np.float64).eps)


def _margin(x: np.ndarray, eps: float = _F64_EPS) -> np.ndarray:
    # generous bound on the error of a floating n**e (the log-size factor is
    # capped at 48 > log(2**63) + 2)
    x = np.asarray(x, dtype=np.float64)
    return (384.0 * eps) * np.maximum(x, 1.0)


def pow_floor_array(ns: np.ndarray, e: ExponentLike, return_frac: bool = False):
    """Vectorised [n^e] for an int array; exact.

    Elements whose float64 fractional part lies within the error margin of an
    integer are recomputed with :func:`pow_floor_value`.  With
    ``return_frac`` also returns {n^e} as float64, accurate to about
    1e-15 * n^e.
    """
    ns = np.asarray(ns, dtype=np.int64)
    ef = _frac(e)
    if ns.size == 0:
        out = np.zeros(0, dtype=np.int64)
        return (out, np.zeros(0)) if return_frac else out
    if ns.min() < 1:
        raise ValueError("n must be >= 1")
    x = np.power(ns.astype(np.float64), ef.numerator / ef.denominator)
    fl = np.floor(x)
    fr = x - fl
    mg = _margin(x)
    bad = (fr < mg) | (fr > 1 - mg)
    vals = fl.astype(np.int64)
    if bad.any():
        for i in np.flatnonzero(bad):
            vals[i] = pow_floor_value(int(ns[i]), ef)
        fr = np.maximum(x - vals, 0.0)
    if return_frac:
        return vals, fr
    return vals


def frac_array(ns: np.ndarray, e: ExponentLike, scale: Fraction | int = 1) -> np.ndarray:
    """{scale * n^e} as float64, via long double (used for classification with margins)."""
    ef = _frac(e)
    x = _ld_power(np.asarray(ns, dtype=np.int64), ef) * (_LD(Fraction(scale).numerator) / _LD(Fraction(scale).denominator))
    return np.asarray(x - np.floor(x), dtype=np.float64)


def value_array(ns: np.ndarray, e: ExponentLike, scale: Fraction | int = 1) -> np.ndarray:
    """scale * n^e in long double."""
    ef = _frac(e)
    s = Fraction(scale)
    return _ld_power(np.asarray(ns, dtype=np.int64), ef) * (_LD(s.numerator) / _LD(s.denominator))


def array_error_bound(x: np.ndarray, long_double: bool = False) -> np.ndarray:
    """Error bound for floating n**e values ``x`` (float64 or long-double path)."""
    return _margin(x, _LD_EPS if long_double else _F64_EPS)
