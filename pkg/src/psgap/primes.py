"""Segmented prime sieving, von Mangoldt / prime-log weights and AP sums."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_SEGMENT_SIZE = 1 << 22
MAX_SIEVE_HI = 2**63 - 1


class SieveRangeError(ValueError):
    pass


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    """All primes <= limit by a plain sieve (limit is at most ~sqrt of the range)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


@dataclass(frozen=True)
class PrimeSegment:
    lo: int
    hi: int
    mask: np.ndarray  # mask[i] <=> lo + i is prime

    def primes(self) -> np.ndarray:
        return self.lo + np.flatnonzero(self.mask)

    def is_prime(self, n: int) -> bool:
        if not self.lo <= n < self.hi:
            raise IndexError(f"{n} outside [{self.lo}, {self.hi})")
        return bool(self.mask[n - self.lo])


def sieve_segment(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> PrimeSegment:
    """Exact primality for [lo, hi) with an odd-only sieve."""
    if not (0 <= lo < hi <= MAX_SIEVE_HI):
        raise SieveRangeError(f"need 0 <= lo < hi <= 2^63-1, got [{lo}, {hi})")
    if hi - lo > segment_size:
        raise SieveRangeError(f"range width {hi - lo} exceeds segment size {segment_size}")
    mask = np.zeros(hi - lo, dtype=bool)
    # odd numbers in [lo, hi): first = lo | 1
    first = lo | 1
    if first < hi:
        n_odd = (hi - first + 1) // 2
        odd = np.ones(n_odd, dtype=bool)
        for p in _base_primes(math.isqrt(hi - 1))[1:]:
            p = int(p)
            start = max(p * p, (first + p - 1) // p * p)
            if start % 2 == 0:
                start += p
            if start >= hi:
                continue
            odd[(start - first) // 2 :: p] = False
        mask[first - lo :: 2] = odd
    # 0, 1 are not prime; 2 is
    for small in (0, 1):
        if lo <= small < hi:
            mask[small - lo] = False
    if lo <= 2 < hi:
        mask[2 - lo] = True
    return PrimeSegment(lo, hi, mask)


def prime_mask(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> np.ndarray:
    """Boolean array ``is_prime[0..limit]`` assembled from sieve segments."""
    out = np.zeros(limit + 1, dtype=bool)
    lo = 0
    while lo <= limit:
        hi = min(lo + segment_size, limit + 1)
        out[lo:hi] = sieve_segment(lo, hi, segment_size).mask
        lo = hi
    return out


def primes_upto(limit: int) -> np.ndarray:
    return np.flatnonzero(prime_mask(limit)).astype(np.int64)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def prime_power_base(n: int) -> int:
    """p if n = p^k (k >= 1), else 0."""
    if n < 2:
        return 0
    for k in range(max(1, n.bit_length()), 0, -1):
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 2 and cand**k == n and is_prime(cand):
                return cand
    return 0


def varpi(n: int) -> float:
    """log n for prime n, else 0."""
    return math.log(n) if is_prime(n) else 0.0


def lambda_vm(n: int) -> float:
    """von Mangoldt: log p if n = p^k, else 0."""
    p = prime_power_base(n)
    return math.log(p) if p else 0.0


def mangoldt_array(N: int) -> np.ndarray:
    """Lambda(n) for 0 <= n <= N (index 0 is 0)."""
    out = np.zeros(N + 1)
    for p in primes_upto(N):
        p = int(p)
        lp = math.log(p)
        q = p
        while q <= N:
            out[q] = lp
            q *= p
    return out


def mobius_array(N: int) -> np.ndarray:
    """mu(n) for 0 <= n <= N as int8 (index 0 is 0)."""
    mu = np.ones(N + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_upto(N):
        p = int(p)
        mu[p::p] *= -1
        pp = p * p
        if pp <= N:
            mu[pp::pp] = 0
    return mu


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def progression_weight_sum(X: int, W: int, b: int) -> float:
    """sum of varpi(n) over X <= n <= 2X with n = b (mod W)."""
    if X < 1000:
        raise ValueError("X must be >= 1000")
    if math.gcd(b, W) > 1:
        warnings.warn(f"gcd(b={b}, W={W}) > 1: progression contains at most one prime", stacklevel=2)
    seg = sieve_segment(X, 2 * X + 1, segment_size=max(DEFAULT_SEGMENT_SIZE, X + 1))
    ps = seg.primes()
    ps = ps[(ps - b) % W == 0]
    return math.fsum(np.log(ps.astype(np.float64)))


def log_lcm(N: int) -> float:
    """log lcm(1..N) from the exact big-integer lcm."""
    v = 1
    for k in range(2, N + 1):
        v = v * k // math.gcd(v, k)
    # log of a huge int without overflow
    bl = v.bit_length()
    shift = max(0, bl - 60)
    return math.log(v >> shift) + shift * math.log(2)


def squarefree_divisors_upto(n: int, bound: float, small_primes: np.ndarray) -> list[int]:
    """Squarefree divisors d <= bound of n built from primes in ``small_primes``."""
    fac = [int(p) for p in small_primes if p <= bound and n % p == 0]
    out = [1]
    for p in fac:
        out += [d * p for d in out if d * p <= bound]
    return out
