"""Exponential sums over primes and the tools used to bound them.

Phases are reduced mod 1 before exponentiation.  Power terms are evaluated in
long double (about 1e-12 absolute phase error at n = 10^8) and a certified
enclosure path is kept as an oracle; linear terms with rational slope are
reduced exactly in integers.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import primes as _primes
from ._parallel import chunks, run_ordered
from .config import Exponent, parse_exponent
from .powerfloor import array_error_bound, frac_pow, value_array


class PrecisionDegraded(ArithmeticError):
    pass


# per-term phase error above which a sum is flagged
PHASE_ERROR_LIMIT = 1e-6


@dataclass(frozen=True)
class PhaseFamily:
    """f(x) = j x^gamma + C1 x + C2 x^(1 - gamma)."""

    j: float
    C1: float
    C2: float
    gamma: Fraction

    @classmethod
    def for_exponent(cls, c: Exponent | str, j: float = 1.0, C1: float = 0.0, C2: float = 0.0) -> "PhaseFamily":
        return cls(j, C1, C2, parse_exponent(c).gamma)

    def c2_admissible(self, X: float) -> bool:
        """|C2| <= X^(2 gamma - 1) / log X (the run-scale reading of |C2| = o(X^(2 gamma - 1)))."""
        return abs(self.C2) <= X ** (2 * float(self.gamma) - 1) / math.log(X)

    def reduced(self, ns: np.ndarray) -> tuple[np.ndarray, float]:
        """Phase mod 1 at integer points and a bound on its absolute error."""
        ns = np.asarray(ns, dtype=np.int64)
        g = self.gamma
        out = np.zeros(len(ns))
        err = 0.0
        if self.j != 0:
            # long-double power, reduced mod 1; error ~ |j| n^g * 1e-19 * margin
            x = value_array(ns, g, scale=Fraction(self.j))
            out += np.asarray(x - np.floor(x), dtype=float)
            err += float(array_error_bound(np.array([abs(self.j) * float(np.max(ns)) ** float(g)]), long_double=True)[0])
        if self.C1 != 0:
            c1 = Fraction(self.C1)
            # exact reduction of C1 * n mod 1 through rationals
            num, den = c1.numerator, c1.denominator
            r = (ns % den) * (num % den) % den if den < 2**31 else None
            if r is not None:
                out += r / den
            else:
                v = self.C1 * ns.astype(float)
                out += v - np.floor(v)
                err += 4.5e-16 * abs(self.C1) * float(np.max(ns))
        if self.C2 != 0:
            v = value_array(ns, 1 - g, scale=Fraction(self.C2))
            out += np.asarray(v - np.floor(v), dtype=float)
            err += float(array_error_bound(np.array([abs(self.C2) * float(np.max(ns)) ** (1 - float(g))]), long_double=True)[0])
        return out - np.floor(out), err

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        g = float(self.gamma)
        return self.j * x**g + self.C1 * x + self.C2 * x ** (1 - g)


@dataclass(frozen=True)
class ExpSumResult:
    value: complex
    trivial: float
    terms: int
    phase_error: float = 0.0

    @property
    def ratio(self) -> float:
        return abs(self.value) / self.trivial if self.trivial else float("nan")


def _csum(weights: np.ndarray, phases: np.ndarray) -> complex:
    re = math.fsum((weights * np.cos(2 * np.pi * phases)).tolist())
    im = math.fsum((weights * np.sin(2 * np.pi * phases)).tolist())
    return complex(re, im)


def lambda_exp_sum(X: int, phase: PhaseFamily, weight: str = "mangoldt", threads: int = 1) -> ExpSumResult:
    """sum over X <= n <= 2X of Lambda(n) e(f(n)) (``weight='varpi'`` for primes only)."""
    if X > 10**8:
        raise ValueError("X must be <= 10^8")
    if weight not in ("mangoldt", "varpi"):
        raise ValueError("weight is 'mangoldt' or 'varpi'")
    seg = _primes.sieve_segment(X, 2 * X + 1, segment_size=max(_primes.DEFAULT_SEGMENT_SIZE, X + 1))
    ps = seg.primes()
    if weight == "mangoldt":
        # prime powers p^k (k >= 2) in range, weight log p
        extra_n, extra_w = [], []
        for p in _primes.primes_upto(math.isqrt(2 * X)).tolist():
            q = p * p
            while q <= 2 * X:
                if q >= X:
                    extra_n.append(q)
                    extra_w.append(math.log(p))
                q *= p
        ns = np.concatenate([ps, np.array(extra_n, dtype=np.int64)])
        ws = np.concatenate([np.log(ps.astype(float)), np.array(extra_w)])
    else:
        ns, ws = ps, np.log(ps.astype(float))

    def part(a, b):
        ph, err = phase.reduced(ns[a : b + 1])
        w = ws[a : b + 1]
        re = (w * np.cos(2 * np.pi * ph)).tolist()
        im = (w * np.sin(2 * np.pi * ph)).tolist()
        return re, im, w.tolist(), err

    pieces = chunks(0, len(ns) - 1, 1 << 16) if len(ns) else []
    parts = run_ordered(part, pieces, threads)
    re = math.fsum(x for p in parts for x in p[0])
    im = math.fsum(x for p in parts for x in p[1])
    trivial = math.fsum(x for p in parts for x in p[2])
    err = max((p[3] for p in parts), default=0.0)
    if err > PHASE_ERROR_LIMIT:
        raise PrecisionDegraded(f"per-term phase error {err:.3g} exceeds {PHASE_ERROR_LIMIT}")
    return ExpSumResult(complex(re, im), trivial, len(ns), err)


def lambda_exp_sum_exact_phase(X: int, phase: PhaseFamily, bits: int = 64) -> ExpSumResult:
    """Same sum with j * {n^gamma} taken from certified enclosures (slow oracle, integer j)."""
    if not float(phase.j).is_integer():
        raise ValueError("exact phase path needs integer j")
    seg = _primes.sieve_segment(X, 2 * X + 1, segment_size=max(_primes.DEFAULT_SEGMENT_SIZE, X + 1))
    ps = seg.primes().tolist()
    ns, ws = list(ps), [math.log(p) for p in ps]
    for p in _primes.primes_upto(math.isqrt(2 * X)).tolist():
        q = p * p
        while q <= 2 * X:
            if q >= X:
                ns.append(q)
                ws.append(math.log(p))
            q *= p
    ph = []
    for n in ns:
        lo, hi = frac_pow(n, phase.gamma, bits)
        ph.append(float(phase.j * (lo + hi) / 2))
    ph = np.array(ph)
    rest = PhaseFamily(0.0, phase.C1, phase.C2, phase.gamma).reduced(np.array(ns, dtype=np.int64))[0]
    ph = ph + rest
    return ExpSumResult(_csum(np.array(ws), ph - np.floor(ph)), math.fsum(ws), len(ns))


EXPSUM_COLUMNS = ["phase_j", "C1", "C2", "X", "value_re", "value_im", "trivial", "ratio"]


def expsum_csv(rows: list[tuple[PhaseFamily, int, ExpSumResult]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EXPSUM_COLUMNS)
    for ph, X, r in rows:
        w.writerow(
            [
                f"{ph.j:.17g}",
                f"{ph.C1:.17g}",
                f"{ph.C2:.17g}",
                X,
                f"{r.value.real:.17g}",
                f"{r.value.imag:.17g}",
                f"{r.trivial:.17g}",
                f"{r.ratio:.17g}",
            ]
        )
    return buf.getvalue()


# -- van der Corput ------------------------------------------------------------------


class HypothesisViolation(ValueError):
    """The second-derivative window Delta <= |f''| <= 4 Delta does not hold."""


@dataclass(frozen=True)
class VdcResult:
    value: complex
    bound: float
    K: float

    @property
    def passed(self) -> bool:
        return self.K <= 10.0


def vdc_check(
    f: Callable[[np.ndarray], np.ndarray],
    f2: Callable[[np.ndarray], np.ndarray],
    X: int,
    Y: int,
    Delta: float,
    samples: int = 1000,
    phase_mod1: Callable[[np.ndarray], np.ndarray] | None = None,
) -> VdcResult:
    """sum_{X < n <= X + Y} e(f(n)) against Y Delta^(1/2) + Delta^(-1/2).

    ``f2`` is the second derivative; it is sampled at ``samples`` points and the
    run is rejected when |f''| leaves [Delta/4, 4 Delta] (the caller's claim is
    Delta <= |f''| <= 4 Delta; the wider rejection window leaves margin for the
    sampling).  ``phase_mod1`` may supply an argument-reduced phase.
    """
    if Y < 1:
        raise ValueError("Y must be >= 1")
    xs = np.linspace(X + 1, X + Y, min(samples, Y) if Y > 1 else 1)
    d2 = np.abs(f2(xs))
    if np.any(d2 < Delta / 4) or np.any(d2 > 4 * Delta):
        raise HypothesisViolation(f"|f''| in [{d2.min():.3g}, {d2.max():.3g}] outside [{Delta / 4:.3g}, {4 * Delta:.3g}]")
    ns = np.arange(X + 1, X + Y + 1, dtype=np.int64)
    ph = phase_mod1(ns) if phase_mod1 is not None else np.mod(f(ns.astype(float)), 1.0)
    val = _csum(np.ones(len(ns)), ph)
    bound = Y * math.sqrt(Delta) + 1 / math.sqrt(Delta)
    return VdcResult(val, bound, abs(val) / bound)


def quadratic_calibration(N: int = 10**4) -> VdcResult:
    """f(x) = x^2/(2N) on (0, N]: f'' = 1/N."""
    Delta = 1.0 / N

    def mod1(ns):
        # x^2/(2N) mod 1 exactly in integers
        r = (ns * ns) % (2 * N)
        return r / (2 * N)

    return vdc_check(lambda x: x * x / (2 * N), lambda x: np.full_like(x, 1.0 / N), 0, N, Delta, phase_mod1=mod1)


def family_phase_check(c: Exponent | str, theta3: float, X: int, Y: int) -> VdcResult:
    """f(x) = theta3 * c * x^(1-gamma); Delta = |f''| at the right end of [X, X+Y]."""
    c = parse_exponent(c)
    g = float(c.gamma)
    cf = float(c)
    A = theta3 * cf

    def f(x):
        return A * np.asarray(x, dtype=float) ** (1 - g)

    def f2(x):
        return A * (1 - g) * (-g) * np.asarray(x, dtype=float) ** (-1 - g)

    Delta = abs(float(f2(np.array([X + Y]))[0]))
    return vdc_check(f, f2, X, Y, Delta)


# -- Heath-Brown identity ------------------------------------------------------------


def _dirichlet(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dirichlet convolution of arrays indexed 0..N (index 0 ignored)."""
    N = len(a) - 1
    out = np.zeros(N + 1)
    for d in np.flatnonzero(a[1:]) + 1:
        ad = a[d]
        out[d::d] += ad * b[1 : N // d + 1]
    return out


def heath_brown_decomposition(n_max: int, J: int = 2) -> np.ndarray:
    """Lambda(n) for n <= n_max assembled from the identity

    Lambda = sum_{j=1}^J (-1)^(j-1) C(J, j) mu_z^{*j} * 1^{*(j-1)} * log,

    where mu_z is mu truncated to n <= z = floor(n_max^(1/J)).  Exact for
    n <= n_max (the discarded term involves (mu - mu_z)^{*J}, supported on
    n > z^J).  Note z^J <= n_max; the identity needs n < (z+1)^J, which holds.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    from .powerfloor import iroot

    z = iroot(n_max, J)
    mu = _primes.mobius_array(n_max).astype(float)
    mu_z = np.zeros(n_max + 1)
    mu_z[1 : z + 1] = mu[1 : z + 1]
    one = np.zeros(n_max + 1)
    one[1:] = 1.0
    log = np.zeros(n_max + 1)
    log[1:] = np.log(np.arange(1, n_max + 1, dtype=float))
    total = np.zeros(n_max + 1)
    mu_pow = mu_z.copy()  # mu_z^{*j}
    one_pow = np.zeros(n_max + 1)
    one_pow[1] = 1.0  # 1^{*0} = delta
    for j in range(1, J + 1):
        if j > 1:
            mu_pow = _dirichlet(mu_pow, mu_z)
            one_pow = _dirichlet(one_pow, one)
        term = _dirichlet(_dirichlet(mu_pow, one_pow), log)
        total += (-1) ** (j - 1) * math.comb(J, j) * term
    return total


def heath_brown_check(n_max: int, J: int = 2) -> float:
    """max |decomposition - Lambda| over n <= n_max."""
    if J not in (1, 2, 3, 4):
        raise ValueError("J in 1..4")
    dec = heath_brown_decomposition(n_max, J)
    lam = _primes.mangoldt_array(n_max)
    return float(np.max(np.abs(dec[1:] - lam[1:])))


# -- bilinear sums ----------------------------------------------------------------------


def _coef(kind: str, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi + 1)
    if kind == "one":
        return np.ones(len(idx))
    if kind == "log":
        return np.log(idx.astype(float))
    if kind == "mu":
        return _primes.mobius_array(hi)[lo:].astype(float)
    raise ValueError(f"coefficient kind {kind!r} not in one/log/mu")


def bilinear_sum(M: int, X: int, a_kind: str, b_kind: str, phase: PhaseFamily | None) -> ExpSumResult:
    """sum over m ~ M, mn ~ X of a_m b_n e(f(mn)).

    a_kind in {mu, one}; b_kind in {one, log, mu}.  ``phase=None`` means f = 0.
    """
    if M > X:
        raise ValueError("need M <= X")
    if a_kind not in ("mu", "one"):
        raise ValueError("a_m is mu or one")
    a = _coef(a_kind, M, 2 * M)
    n_hi = 2 * X // M
    b_all = _coef(b_kind, 1, max(n_hi, 1))
    re, im, triv = [], [], []
    count = 0
    for i, m in enumerate(range(M, 2 * M + 1)):
        if a[i] == 0:
            continue
        n_lo = -(-X // m)
        n_top = (2 * X) // m
        if n_top < n_lo:
            continue
        ns = np.arange(n_lo, n_top + 1, dtype=np.int64)
        bn = b_all[n_lo - 1 : n_top]
        w = a[i] * bn
        if phase is None:
            ph = np.zeros(len(ns))
        else:
            ph, _ = phase.reduced(ns * m)
        re.extend((w * np.cos(2 * np.pi * ph)).tolist())
        im.extend((w * np.sin(2 * np.pi * ph)).tolist())
        triv.extend(np.abs(w).tolist())
        count += len(ns)
    return ExpSumResult(complex(math.fsum(re), math.fsum(im)), math.fsum(triv), count)


# -- the theta_2 denominator bound ---------------------------------------------------------


@dataclass(frozen=True)
class Theta2Result:
    theta2: Fraction
    norm: Fraction
    bound: Fraction
    passed: bool


def _frac_norm(x: Fraction) -> Fraction:
    f = x - math.floor(x)
    return min(f, 1 - f)


def theta2_lower_check(W: int, d: Sequence[int], e: Sequence[int], r: Sequence[int]) -> Theta2Result:
    """theta2 = r_0/W + sum_{i=1}^{k0} r_i * i / [d_i, e_i], exactly.

    ``d``, ``e`` hold the tuples for i = 1..k0 and ``r`` = (r_0, ..., r_k0).
    Preconditions: W and the [d_i, e_i] pairwise coprime, not all r zero,
    and gcd(i, [d_i, e_i]) = 1 whenever r_i != 0 (so a nonzero residue really
    contributes).  Returns ||theta2|| against 1 / (W prod [d_i, e_i]).
    """
    k0 = len(d)
    if len(e) != k0 or len(r) != k0 + 1:
        raise ValueError("need len(d) == len(e) == len(r) - 1")
    L = [x * y // math.gcd(x, y) for x, y in zip(d, e)]
    mods = [W] + L
    for a in range(len(mods)):
        for b in range(a + 1, len(mods)):
            if math.gcd(mods[a], mods[b]) != 1:
                raise ValueError(f"moduli {mods[a]} and {mods[b]} are not coprime")
    if all(x % m == 0 for x, m in zip(r, mods)):
        raise ValueError("all residues are zero")
    for i in range(1, k0 + 1):
        if r[i] % L[i - 1] and math.gcd(i, L[i - 1]) > 1:
            raise ValueError(f"gcd({i}, {L[i - 1]}) > 1")
    theta = Fraction(r[0], W) + sum((Fraction(r[i] * i, L[i - 1]) for i in range(1, k0 + 1)), Fraction(0))
    nrm = _frac_norm(theta)
    bound = Fraction(1, W * math.prod(L))
    return Theta2Result(theta, nrm, bound, nrm >= bound)


def random_theta2_inputs(n: int, k0_max: int = 3, seed: int = 0, R: int = 200):
    """Random valid inputs for theta2_lower_check (squarefree, coprime moduli)."""
    import random

    rng = random.Random(seed)
    Ws = [1, 2, 6, 30]
    mu = _primes.mobius_array(R)
    out = []
    while len(out) < n:
        W = rng.choice(Ws)
        k0 = rng.randint(1, k0_max)
        used = W
        d, e = [], []
        ok = True
        for i in range(1, k0 + 1):
            for _ in range(50):
                x, y = rng.randint(1, R), rng.randint(1, R)
                if mu[x] and mu[y]:
                    L = x * y // math.gcd(x, y)
                    if math.gcd(L, used) == 1 and math.gcd(L, i) == 1:
                        break
            else:
                ok = False
                break
            d.append(x)
            e.append(y)
            used *= L
        if not ok:
            continue
        mods = [W] + [a * b // math.gcd(a, b) for a, b in zip(d, e)]
        r = [rng.randrange(m) if m > 1 else 0 for m in mods]
        if all(x == 0 for x in r):
            continue
        out.append((W, tuple(d), tuple(e), tuple(r)))
    return out
