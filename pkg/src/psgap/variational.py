"""The sieve variational problem over symmetric polynomials on the simplex.

We optimise over F (the mixed partial derivative of the sieve function f):

    ratio(F) = k * J(F) / I(F),   I = int_{S_k} F^2,
    J = int_{S_{k-1}} ( int_0^{1 - t_1 - ... - t_{k-1}} F dt_0 )^2,

with S_k the unit simplex in k variables.  The basis is
(1 - P1)^b * P2^j with b + 2j <= degree, where P1, P2 are the first two power
sums.  Every entry of the I and J matrices is an exact rational; only the final
generalised eigenproblem is floating point, and it comes with a residual.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg


# -- exact simplex integrals ----------------------------------------------------


def simplex_moment(k: int, exponents, b: int = 0) -> Fraction:
    """int over S_k of (1 - sum t)^b * prod t_i^a_i  =  b! prod a_i! / (k + b + sum a)!."""
    a = list(exponents)
    if len(a) != k:
        raise ValueError(f"need {k} exponents, got {len(a)}")
    if any(x < 0 for x in a) or b < 0:
        raise ValueError("exponents must be >= 0")
    num = math.factorial(b)
    for x in a:
        num *= math.factorial(x)
    return Fraction(num, math.factorial(k + b + sum(a)))


def _partitions(n: int, max_part: int | None = None, max_len: int | None = None):
    """Integer partitions of n as non-increasing tuples."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first, None if max_len is None else max_len - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def power_sum_moment(k: int, B: int, J: int) -> Fraction:
    """int over S_k of (1 - P1)^B * P2^J, exactly.

    P2^J expands into monomials prod t_i^(2 lam_i); a partition lam of J with
    l parts and multiplicities m_r occurs at k!/((k-l)! prod m_r!) placements,
    each with multinomial weight J!/prod lam_i!.
    """
    if k == 0:
        return Fraction(1) if J == 0 else Fraction(0)
    total = Fraction(0)
    denom = math.factorial(k + B + 2 * J)
    for lam in _partitions(J, max_len=k):
        l = len(lam)
        mult = {}
        for x in lam:
            mult[x] = mult.get(x, 0) + 1
        place = math.factorial(k) // math.factorial(k - l)
        for m in mult.values():
            place //= math.factorial(m)
        multinom = math.factorial(J)
        for x in lam:
            multinom //= math.factorial(x)
        mono = math.factorial(B)
        for x in lam:
            mono *= math.factorial(2 * x)
        total += Fraction(place * multinom * mono, denom)
    return total


def basis_exponents(degree: int) -> list[tuple[int, int]]:
    """(b, j) pairs for (1 - P1)^b P2^j, b + 2j <= degree, in a fixed nested order."""
    out = []
    for d in range(degree + 1):
        for j in range(d // 2 + 1):
            out.append((d - 2 * j, j))
    return out


def inner_integral(b: int, j: int) -> list[tuple[Fraction, int, int]]:
    """int_0^{1-P1'} (1-P1)^b P2^j dt_0 as sum of coef * (1-P1')^B * P2'^J."""
    out = []
    for l in range(j + 1):
        coef = Fraction(math.comb(j, l) * math.factorial(b) * math.factorial(2 * l), math.factorial(b + 2 * l + 1))
        out.append((coef, b + 2 * l + 1, j - l))
    return out


@dataclass(frozen=True)
class Forms:
    k: int
    degree: int
    basis: tuple[tuple[int, int], ...]
    I: tuple[tuple[Fraction, ...], ...]
    J: tuple[tuple[Fraction, ...], ...]
    pruned: tuple[tuple[int, int], ...] = ()

    def as_float(self, scale: Fraction | None = None) -> tuple[np.ndarray, np.ndarray]:
        s = Fraction(math.factorial(self.k)) if scale is None else scale
        I = np.array([[float(x * s) for x in row] for row in self.I])
        J = np.array([[float(x * s) for x in row] for row in self.J])
        return I, J


def _raw_forms(k: int, basis: list[tuple[int, int]]):
    n = len(basis)
    I = [[Fraction(0)] * n for _ in range(n)]
    J = [[Fraction(0)] * n for _ in range(n)]
    inner = [inner_integral(b, j) for b, j in basis]
    for a in range(n):
        for c in range(a, n):
            b1, j1 = basis[a]
            b2, j2 = basis[c]
            I[a][c] = I[c][a] = power_sum_moment(k, b1 + b2, j1 + j2)
            s = Fraction(0)
            for c1, B1, J1 in inner[a]:
                for c2, B2, J2 in inner[c]:
                    s += c1 * c2 * power_sum_moment(k - 1, B1 + B2, J1 + J2)
            J[a][c] = J[c][a] = s
    return I, J


def _independent_subset(G: list[list[Fraction]]) -> list[int]:
    """Indices of a maximal independent prefix-greedy subset, via exact Gram elimination."""
    n = len(G)
    keep: list[int] = []
    for i in range(n):
        idx = keep + [i]
        M = [[G[a][b] for b in idx] for a in idx]
        if _det_positive(M):
            keep.append(i)
    return keep


def _det_positive(M: list[list[Fraction]]) -> bool:
    """True iff the symmetric PSD rational matrix M is nonsingular (exact LDL)."""
    n = len(M)
    A = [row[:] for row in M]
    for p in range(n):
        if A[p][p] == 0:
            return False
        for r in range(p + 1, n):
            f = A[r][p] / A[p][p]
            if f:
                for c in range(p, n):
                    A[r][c] -= f * A[p][c]
    return True


def build_forms(k: int, degree: int) -> Forms:
    """Exact I and J matrices over the pruned symmetric basis."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if degree < 0:
        raise ValueError("degree must be >= 0")
    basis = basis_exponents(degree)
    I, J = _raw_forms(k, basis)
    keep = _independent_subset(I)
    pruned = tuple(basis[i] for i in range(len(basis)) if i not in keep)
    I = tuple(tuple(I[a][b] for b in keep) for a in keep)
    J = tuple(tuple(J[a][b] for b in keep) for a in keep)
    return Forms(k, degree, tuple(basis[i] for i in keep), I, J, pruned)


# -- eigen solve -------------------------------------------------------------------


@dataclass(frozen=True)
class RatioSolution:
    k: int
    degree: int
    ratio: float
    coeffs: tuple[float, ...]
    residual: float
    basis: tuple[tuple[int, int], ...]

    def F(self, t: np.ndarray) -> np.ndarray:
        """Evaluate F on points t of shape (npts, k)."""
        t = np.atleast_2d(np.asarray(t, dtype=float))
        p1 = t.sum(axis=1)
        p2 = (t * t).sum(axis=1)
        out = np.zeros(len(t))
        for c, (b, j) in zip(self.coeffs, self.basis):
            out += c * (1 - p1) ** b * p2**j
        return out


def rayleigh(forms: Forms, v) -> float:
    """k * v^T J v / v^T I v in exact arithmetic for rational v."""
    v = [Fraction(x) for x in v]
    n = len(v)
    num = sum(v[a] * forms.J[a][b] * v[b] for a in range(n) for b in range(n))
    den = sum(v[a] * forms.I[a][b] * v[b] for a in range(n) for b in range(n))
    return float(forms.k * num / den)


def solve_forms(forms: Forms) -> RatioSolution:
    I, J = forms.as_float()
    d = 1.0 / np.sqrt(np.diag(I))
    Is = I * np.outer(d, d)
    Js = J * np.outer(d, d)
    w, V = scipy.linalg.eigh(Js, Is)
    mu = float(w[-1])
    v = V[:, -1]
    res = np.linalg.norm(Js @ v - mu * (Is @ v)) / max(np.linalg.norm(Js, 2) * np.linalg.norm(v), 1e-300)
    coeffs = v * d
    # normalise sign and scale so that int F^2 = 1
    if coeffs[0] < 0:
        coeffs = -coeffs
    norm2 = float(coeffs @ I @ coeffs) / math.factorial(forms.k)
    coeffs = coeffs / math.sqrt(norm2)
    return RatioSolution(forms.k, forms.degree, forms.k * mu, tuple(float(x) for x in coeffs), float(res), forms.basis)


def solve_ratio(k: int, degree: int) -> RatioSolution:
    """Largest k * J/I over the degree-``degree`` symmetric basis."""
    forms = build_forms(k, degree)
    if len(forms.basis) > 1000:
        raise ValueError("basis too large")
    return solve_forms(forms)


def growth_lower_bound(k0: int) -> float:
    """(1/2) log k0 + (1/2) log log k0 - 2."""
    return 0.5 * math.log(k0) + 0.5 * math.log(math.log(k0)) - 2.0


def mk_report(k0: int, degree: int) -> dict:
    sol = solve_ratio(k0 + 1, degree)
    bound = growth_lower_bound(k0) if k0 >= 3 else float("nan")
    return {
        "k0": k0,
        "degree": degree,
        "ratio": sol.ratio,
        "bound": bound,
        "pass": bool(sol.ratio >= bound) if not math.isnan(bound) else None,
        "residual": sol.residual,
    }


def random_rayleigh_trials(forms: Forms, trials: int = 1000, seed: int = 0) -> float:
    """Largest Rayleigh quotient over random coefficient vectors (should not exceed the optimum)."""
    I, J = forms.as_float()
    rng = np.random.default_rng(seed)
    best = -math.inf
    for _ in range(trials):
        v = rng.standard_normal(len(forms.basis))
        best = max(best, forms.k * float(v @ J @ v) / float(v @ I @ v))
    return best


# -- recovering f from F --------------------------------------------------------------


@dataclass(frozen=True)
class SimplexPoly:
    """A polynomial on the simplex in k variables, kept as a sympy expression."""

    k: int
    expr: object
    symbols: tuple

    @property
    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        import sympy

        poly = sympy.Poly(sympy.expand(self.expr), *self.symbols)
        return [(m, Fraction(int(c.p), int(c.q))) for m, c in poly.terms()]

    def __call__(self, t) -> float:
        t = [float(x) for x in t]
        if sum(t) >= 1 or min(t) < 0:
            return 0.0
        return float(self.expr.subs(dict(zip(self.symbols, t))))

    def evaluator(self):
        """Vectorised evaluator on arrays of shape (npts, k); zero off the simplex."""
        import sympy

        fn = sympy.lambdify(self.symbols, self.expr, "numpy")

        def f(t):
            t = np.atleast_2d(np.asarray(t, dtype=float))
            vals = np.asarray(fn(*t.T), dtype=float) * np.ones(len(t))
            inside = (t.sum(axis=1) < 1) & (t.min(axis=1) >= 0)
            return np.where(inside, vals, 0.0)

        return f

    def mixed_partial(self):
        import sympy

        e = self.expr
        for s in self.symbols:
            e = sympy.diff(e, s)
        return sympy.expand(e)


def _F_expr(coeffs, basis, symbols, exact: bool):
    import sympy

    p1 = sum(symbols)
    p2 = sum(s**2 for s in symbols)
    out = 0
    for c, (b, j) in zip(coeffs, basis):
        cc = sympy.Rational(Fraction(c).limit_denominator(10**15)) if not exact else sympy.Rational(c)
        out += cc * (1 - p1) ** b * p2**j
    return out


def export_f(sol: RatioSolution | None, k: int, F_expr=None) -> SimplexPoly:
    """f(t) = int over {s >= t, sum s <= 1} of F(s) ds.

    The mixed partial of f in all k variables is (-1)^k F.  Pass ``F_expr`` (a
    sympy expression in t0..t_{k-1}) to export a hand-chosen F instead of a
    solver result.
    """
    import sympy

    ts = sympy.symbols(f"t0:{k}", real=True)
    ss = sympy.symbols(f"s0:{k}", real=True)
    if F_expr is None:
        if sol is None or sol.k != k:
            raise ValueError("solution does not match k")
        F = _F_expr(sol.coeffs, sol.basis, ss, exact=False)
    else:
        F = F_expr.subs(dict(zip(ts, ss)))
    # integrate s_0 first, then s_1, ...; the upper limit for s_i is
    # 1 - (t_0 + ... + t_{i-1}) - (s_{i+1} + ... + s_{k-1})
    g = F
    for i in range(k):
        upper = 1 - sum(ts[:i]) - sum(ss[i + 1 :])
        g = sympy.integrate(g, (ss[i], ts[i], upper))
    return SimplexPoly(k, sympy.expand(g), ts)


def check_export(poly: SimplexPoly, F_fn, points: int = 100, seed: int = 0) -> float:
    """max |(-1)^k d^k f - F| over random simplex points."""
    import sympy

    mp = sympy.lambdify(poly.symbols, poly.mixed_partial(), "numpy")
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(points):
        x = [rng.expovariate(1.0) for _ in range(poly.k + 1)]
        s = sum(x)
        t = [v / s for v in x[: poly.k]]
        worst = max(worst, abs((-1) ** poly.k * float(mp(*t)) - float(F_fn(np.array([t]))[0])))
    return worst
