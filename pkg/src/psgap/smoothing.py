"""Period-1 smooth bumps and the truncated sawtooth expansion.

A bump with parameters (alpha, beta, Delta, r) is the indicator of
[alpha + Delta/2, beta - Delta/2] convolved with r normalised boxes of width
Delta/r.  It equals 1 on [alpha + Delta, beta - Delta], vanishes outside
(alpha, beta), is C^(r-1), and its mean is beta - alpha - Delta.  Its Fourier
coefficients are known in closed form (interval transform times a sinc power),
which gives an independent check on the FFT quadrature.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy.interpolate import BSpline

from .config import SieveConfig


class BumpError(ValueError):
    pass


@dataclass(frozen=True)
class BumpSpec:
    """Bump parameters; ``shift`` translates the whole bump (x -> x - shift)."""

    alpha: float
    beta: float
    Delta: float
    r: int
    shift: float = 0.0
    name: str = ""

    def __post_init__(self):
        if not (0.0 <= self.alpha < self.beta <= 1.0):
            raise BumpError(f"need 0 <= alpha < beta <= 1, got {self.alpha}, {self.beta}")
        if not (self.Delta > 0 and 2 * self.Delta < self.beta - self.alpha):
            raise BumpError(f"need 0 < 2*Delta < beta - alpha, got Delta={self.Delta}")
        if self.r < 1:
            raise BumpError("r must be >= 1")

    @property
    def mean(self) -> float:
        return self.beta - self.alpha - self.Delta


@lru_cache(maxsize=64)
def _irwin_hall_spline(r: int) -> BSpline:
    # CDF of a sum of r uniforms on [0, 1] is sum_{i>=0} N_{r+1}(u - i), with
    # N_{r+1} the degree-r cardinal B-spline on [0, r+1].
    knots = np.arange(-r, 2 * r + 2, dtype=float)
    coef = np.zeros(len(knots) - r - 1)
    coef[r:] = 1.0
    return BSpline(knots, coef, r, extrapolate=False)


def irwin_hall_cdf(u: np.ndarray, r: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = np.where(u >= r, 1.0, 0.0)
    mid = (u > 0) & (u < r)
    if mid.any():
        out[mid] = np.clip(_irwin_hall_spline(r)(u[mid]), 0.0, 1.0)
    return out


def irwin_hall_cdf_exact(u: float, r: int) -> float:
    """Alternating-sum formula in exact rationals (oracle for small r)."""
    from fractions import Fraction

    if u <= 0:
        return 0.0
    if u >= r:
        return 1.0
    uf = Fraction(u)
    s = sum((-1) ** k * math.comb(r, k) * (uf - k) ** r for k in range(int(math.floor(u)) + 1))
    return float(s / math.factorial(r))


@dataclass(frozen=True)
class BumpFunction:
    spec: BumpSpec
    fourier: np.ndarray | None = field(default=None, compare=False, repr=False)
    fourier_N: int = 0

    def _base(self, y: np.ndarray) -> np.ndarray:
        """Unshifted bump on y in [0, 1)."""
        s = self.spec
        a, b, D, r = s.alpha, s.beta, s.Delta, s.r
        out = np.zeros_like(y)
        plateau = (y >= a + D) & (y <= b - D)
        left = (y > a) & (y < a + D)
        right = (y > b - D) & (y < b)
        out[plateau] = 1.0
        if left.any():
            out[left] = irwin_hall_cdf((y[left] - a) * (r / D), r)
        if right.any():
            out[right] = 1.0 - irwin_hall_cdf((y[right] - (b - D)) * (r / D), r)
        return out

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = x - self.spec.shift
        y = y - np.floor(y)
        out = self._base(y)
        return float(out[0]) if scalar else out

    value = __call__

    def positive(self, x) -> bool:
        return bool(self(x) > 0)

    def plateau_interval(self) -> tuple[float, float]:
        s = self.spec
        return s.alpha + s.Delta + s.shift, s.beta - s.Delta + s.shift

    def support_interval(self) -> tuple[float, float]:
        s = self.spec
        return s.alpha + s.shift, s.beta + s.shift

    @property
    def a0(self) -> float:
        if self.fourier is None:
            raise BumpError("Fourier coefficients not computed")
        return float(self.fourier[0].real)

    def coefficient(self, j: int) -> complex:
        if self.fourier is None:
            raise BumpError("Fourier coefficients not computed")
        return complex(self.fourier[j])


def bump_build(spec: BumpSpec) -> BumpFunction:
    return BumpFunction(spec)


def grid_size(Jmax: int) -> int:
    n = max(1 << 16, 64 * Jmax)
    return 1 << (n - 1).bit_length()


def grid_for(spec: BumpSpec, Jmax: int, limit: int = 1 << 24) -> int:
    """Smallest admissible power-of-two grid for ``spec`` and ``Jmax``."""
    need = max(grid_size(Jmax), math.ceil(4.0 * spec.r / spec.Delta))
    N = 1 << (need - 1).bit_length()
    if N > limit:
        raise BumpError(f"bump needs a {N}-point grid (limit {limit})")
    return N


def bump_fourier(b: BumpFunction, Jmax: int, N: int | None = None) -> BumpFunction:
    """Coefficients a_j, |j| <= Jmax, by FFT on N equispaced points.

    The returned array is indexed like numpy FFT output truncated to
    j = -Jmax..Jmax (negative j via wrap-around).
    """
    if Jmax < 1:
        raise BumpError("Jmax must be >= 1")
    N = grid_size(Jmax) if N is None else N
    if N < 64 * Jmax or N < (1 << 16):
        raise BumpError(f"grid of {N} points too coarse for Jmax={Jmax} (aliasing)")
    s = b.spec
    if s.Delta / s.r < 4.0 / N:
        raise BumpError(
            f"transition width Delta/r={s.Delta / s.r:.3g} below grid resolution {1 / N:.3g}; raise the grid size"
        )
    x = np.arange(N, dtype=float) / N
    vals = b(x)
    coeffs = np.fft.fft(vals) / N
    keep = np.concatenate([coeffs[: Jmax + 1], coeffs[N - Jmax :]])
    return BumpFunction(s, keep, N)


def _index(b: BumpFunction, j: int) -> int:
    J = (len(b.fourier) - 1) // 2
    if abs(j) > J:
        raise IndexError(j)
    return j if j >= 0 else len(b.fourier) + j


def coeff(b: BumpFunction, j: int) -> complex:
    return complex(b.fourier[_index(b, j)])


def closed_form_coefficient(spec: BumpSpec, j: int) -> complex:
    """Interval transform times sinc^r (independent of the sampled values)."""
    a = spec.alpha + spec.Delta / 2 + spec.shift
    bb = spec.beta - spec.Delta / 2 + spec.shift
    if j == 0:
        return complex(bb - a)
    e = lambda t: cmath.exp(-2j * math.pi * j * t)
    interval = (e(a) - e(bb)) / (2j * math.pi * j)
    w = spec.Delta / spec.r
    z = math.pi * j * w
    sinc = math.sin(z) / z
    return interval * sinc**spec.r


def decay_bound(spec: BumpSpec, j: int) -> float:
    """min{1/|j|, beta - alpha - Delta, Delta^-r |j|^-(r+1)}."""
    j = abs(j)
    m = spec.mean
    if j == 0:
        return m
    return min(1.0 / j, m, spec.Delta ** (-spec.r) * float(j) ** (-spec.r - 1))


@dataclass(frozen=True)
class DecayReport:
    K: float
    worst_j: int
    a0_error: float
    max_closed_form_error: float
    parseval_lhs: float
    integral_sq: float
    # K restricted to j whose bound exceeds the double-precision noise floor
    K_resolved: float = 0.0


def decay_report(b: BumpFunction, closed_form_upto: int = 200, noise_floor: float = 1e-13) -> DecayReport:
    """Empirical K_r = max |a_j| / bound_j and consistency checks."""
    s = b.spec
    J = (len(b.fourier) - 1) // 2
    js = np.arange(1, J + 1)
    a = np.abs(b.fourier[1 : J + 1])
    m = s.mean
    bound = np.minimum(np.minimum(1.0 / js, m), s.Delta ** (-s.r) * js.astype(float) ** (-s.r - 1))
    ratios = a / bound
    k = int(np.argmax(ratios))
    resolved = bound >= noise_floor * max(m, 1e-300)
    k_res = float(np.max(ratios[resolved])) if resolved.any() else 0.0
    cf_err = max(abs(coeff(b, j) - closed_form_coefficient(s, j)) for j in range(-closed_form_upto, closed_form_upto + 1))
    x = np.arange(b.fourier_N, dtype=float) / b.fourier_N
    integral_sq = float(np.mean(b(x) ** 2))
    parseval = float(np.sum(np.abs(b.fourier) ** 2))
    return DecayReport(
        K=float(ratios[k]),
        worst_j=int(js[k]),
        a0_error=abs(b.a0 - m),
        max_closed_form_error=float(cf_err),
        parseval_lhs=parseval,
        integral_sq=integral_sq,
        K_resolved=k_res,
    )


def tail_mass_bound(spec: BumpSpec, J: int, K: float = 1.0) -> float:
    """Bound on sum_{|j|>J} |a_j| from K * Delta^-r |j|^-(r+1)."""
    return 2.0 * K * spec.Delta ** (-spec.r) * J ** (-spec.r) / spec.r


COEFF_COLUMNS = ["j", "re", "im", "bound", "ratio"]


def coefficients_csv(b: BumpFunction, Jmax: int | None = None) -> str:
    J = (len(b.fourier) - 1) // 2 if Jmax is None else Jmax
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COEFF_COLUMNS)
    for j in range(-J, J + 1):
        a = coeff(b, j)
        bd = decay_bound(b.spec, j)
        w.writerow([j, f"{a.real:.17g}", f"{a.imag:.17g}", f"{bd:.17g}", f"{abs(a) / bd:.17g}"])
    return buf.getvalue()


# -- the four bumps of the sieve argument --------------------------------------


@dataclass(frozen=True)
class SieveBumps:
    chi: BumpFunction
    psi: BumpFunction
    chi_star: BumpFunction
    psi_star: BumpFunction
    r_requested: dict
    r_used: int

    def as_tuple(self):
        return self.chi, self.psi, self.chi_star, self.psi_star


def paper_bumps(cfg: SieveConfig, r_max: int | None = None) -> SieveBumps:
    """chi, psi (the window bumps) and chi*, psi* (their wider majorant partners).

    chi:  alpha = 1 - 2 d X', beta = 1 - d X', Delta = (beta - alpha)/4
    psi:  alpha = eta0, beta = 2 eta0, Delta = eta0/4
    chi*: chi0 shifted right by d X', with chi0 on [1 - 4 d X', 1], Delta = d X'
    psi*: alpha = eta0/2, beta = 5 eta0/2, Delta = eta0/2
    where d = delta0 and X' = X^(gamma - 1).  Smoothness orders are capped.
    """
    r_max = cfg.r_max if r_max is None else r_max
    dx = float(cfg.delta0) * cfg.x_gamma_minus_1
    eta = float(cfg.eta0)
    r_chi = int(100 / cfg.epsilon0)
    r_psi = int(100 / cfg.sigma0) if cfg.sigma0 > 0 else r_max
    r = min(r_max, r_chi, r_psi)
    if r < 1:
        raise BumpError("r_max must be >= 1")
    chi = BumpSpec(1 - 2 * dx, 1 - dx, dx / 4, r, name="chi")
    psi = BumpSpec(eta, 2 * eta, eta / 4, r, name="psi")
    chi_star = BumpSpec(1 - 4 * dx, 1.0, dx, r, shift=dx, name="chi_star")
    psi_star = BumpSpec(eta / 2, 5 * eta / 2, eta / 2, r, name="psi_star")
    return SieveBumps(
        bump_build(chi),
        bump_build(psi),
        bump_build(chi_star),
        bump_build(psi_star),
        {"chi": r_chi, "psi": r_psi, "chi_star": r_chi, "psi_star": r_psi},
        r,
    )


# -- sawtooth ------------------------------------------------------------------


def norm(x: float) -> float:
    """Distance to the nearest integer."""
    return abs(x - round(x))


def sawtooth_coefficient(theta: float) -> complex:
    """c(theta) = (1 - e(-theta)) / (2 pi i)."""
    return (1 - cmath.exp(-2j * math.pi * theta)) / (2j * math.pi)


def coefficient_bound_holds(theta: float, dps: int = 50) -> tuple[bool, float]:
    """|c(theta)| <= ||theta|| in high precision; returns (holds, slack).

    With t the reduction of theta mod 1, |c(theta)| = |sin(pi t)| / pi
    = |t| |sinc(pi t)|, which avoids the cancellation in 1 - e(-t) for tiny t.
    """
    with mpmath.workdps(dps):
        t = mpmath.mpf(theta)
        t = t - mpmath.nint(t)
        s = abs(mpmath.sincpi(t))
        slack = abs(t) * (1 - s)
        return bool(s <= 1), float(slack)


@dataclass(frozen=True)
class SawtoothExpansion:
    theta: float
    H: int
    c_theta: complex

    def terms(self) -> np.ndarray:
        hs = np.arange(-self.H, self.H + 1)
        return self.c_theta / (hs + self.theta)

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        hs = np.arange(-self.H, self.H + 1)
        ph = np.exp(2j * np.pi * np.outer(x, hs))
        return ph @ self.terms()

    def target(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-2j * np.pi * self.theta * (x - np.floor(x)))


def sawtooth_expand(theta: float, H: int) -> SawtoothExpansion:
    if float(theta).is_integer():
        raise ValueError("theta must not be an integer")
    if H < 2:
        raise ValueError("H must be >= 2")
    return SawtoothExpansion(float(theta), int(H), sawtooth_coefficient(theta))


def phi_envelope(x, H: int):
    x = np.asarray(x, dtype=float)
    d = np.abs(x - np.rint(x))
    return 1.0 / (1.0 + H * d)


def truncation_constant(exp: SawtoothExpansion, xs: np.ndarray) -> float:
    """max |e(-theta{x}) - S_H(x)| / (Phi(x; H) log H) over xs."""
    err = np.abs(exp.target(xs) - exp(xs))
    return float(np.max(err / (phi_envelope(xs, exp.H) * math.log(exp.H))))


def truncation_grid(H: int, n: int = 4096) -> np.ndarray:
    """Grid in (0, 1) avoiding ||x|| < 1/H."""
    xs = (np.arange(n) + 0.5) / n
    d = np.abs(xs - np.rint(xs))
    return xs[d >= 1.0 / H]
