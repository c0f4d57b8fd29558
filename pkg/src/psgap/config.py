"""Exponent validation and the numeric parameter system of the sieve argument.

Everything here is a pure function of ``(c, k0, m, X)`` plus explicit
overrides, so two calls with the same inputs give bit-identical configs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

DEFAULT_EPSILON0 = 1e-3
DEFAULT_MAX_PRECISION_BITS = 8192
DEFAULT_R_MAX = 16


class ConfigError(ValueError):
    """Invalid exponent or parameter combination."""


@dataclass(frozen=True)
class Exponent:
    """A rational exponent c = p/q in lowest terms.

    ``theorem_mode`` is true exactly when 1 < c < 9/8, the range in which the
    cluster theorem is claimed.  Floor and membership arithmetic accept any
    p > q >= 1.
    """

    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.q, self.p)

    @property
    def theorem_mode(self) -> bool:
        return self.q < self.p and 8 * self.p < 9 * self.q

    def __float__(self) -> float:
        return self.p / self.q

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


def validate_exponent(p: int, q: int = 1) -> Exponent:
    if p <= 0 or q <= 0:
        raise ConfigError(f"exponent parts must be positive, got {p}/{q}")
    g = math.gcd(p, q)
    p, q = p // g, q // g
    if p <= q:
        raise ConfigError(f"need c > 1, got {p}/{q}")
    return Exponent(p, q)


def parse_exponent(text: str | Exponent | Fraction) -> Exponent:
    """Parse ``"11/10"`` (or pass through an Exponent / Fraction)."""
    if isinstance(text, Exponent):
        return text
    if isinstance(text, Fraction):
        return validate_exponent(text.numerator, text.denominator)
    s = str(text).strip()
    if "/" in s:
        a, b = s.split("/", 1)
        return validate_exponent(int(a), int(b))
    try:
        return validate_exponent(int(s), 1)
    except ValueError:
        raise ConfigError(f"exponent must be rational p/q, got {text!r}") from None


def primorial(w0: int) -> int:
    """Product of the primes <= w0 (1 for w0 < 2)."""
    out = 1
    for p in range(2, w0 + 1):
        if all(p % d for d in range(2, math.isqrt(p) + 1)):
            out *= p
    return out


def euler_phi(n: int) -> int:
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


def default_w0(X: int) -> int:
    """The prime cutoff floor(log log log X); zero when the triple log is undefined."""
    l1 = math.log(X)
    if l1 <= 1:
        return 0
    l2 = math.log(l1)
    if l2 <= 1:
        return 0
    return math.floor(math.log(l2))


@dataclass(frozen=True)
class SieveConfig:
    c: Exponent
    k0: int
    m: int
    X: int
    sigma0: float
    delta0: Fraction
    eta0: Fraction
    epsilon0: float
    R: float
    W: int
    H: float
    w0: int
    scale: float | None = None
    b: int = 1
    r_max: int = DEFAULT_R_MAX
    max_precision_bits: int = DEFAULT_MAX_PRECISION_BITS
    extra: Mapping[str, Any] = field(default_factory=dict)

    @property
    def gamma(self) -> Fraction:
        return self.c.gamma

    @property
    def sigma0_exact(self) -> Fraction:
        c = self.c.value
        return min(c - 1, 9 - 8 * c) / 200

    @property
    def phi_W(self) -> int:
        return euler_phi(self.W)

    @property
    def x_gamma_minus_1(self) -> float:
        """X^(gamma-1) as a float (for reporting; certified paths recompute)."""
        return self.X ** (float(self.gamma) - 1.0)

    def as_dict(self) -> dict[str, Any]:
        return {
            "c": str(self.c),
            "k0": self.k0,
            "m": self.m,
            "X": self.X,
            "sigma0": self.sigma0,
            "delta0": str(self.delta0),
            "eta0": str(self.eta0),
            "epsilon0": self.epsilon0,
            "R": self.R,
            "W": self.W,
            "H": self.H,
            "w0": self.w0,
            "scale": self.scale,
            "b": self.b,
            "r_max": self.r_max,
            "max_precision_bits": self.max_precision_bits,
        }


def derive_config(
    c: Exponent | str,
    k0: int,
    m: int = 1,
    X: int = 10**6,
    overrides: Mapping[str, Any] | None = None,
    *,
    membership_only: bool = False,
) -> SieveConfig:
    """Derive sigma0, delta0, eta0, R, W, H from (c, k0, m, X).

    Recognised overrides: ``w0``, ``epsilon0``, ``scale`` (R = X^(sigma0*scale)),
    ``b`` (residue class mod W), ``r_max``, ``max_precision_bits``.  They are
    applied after the default derivation.
    """
    c = parse_exponent(c)
    overrides = dict(overrides or {})
    if X < 10**3:
        raise ConfigError(f"X must be >= 1000, got {X}")
    if k0 < 1:
        raise ConfigError(f"k0 must be >= 1, got {k0}")
    if m < 0:
        raise ConfigError(f"m must be >= 0, got {m}")
    if not c.theorem_mode and not membership_only:
        raise ConfigError(f"c = {c} outside (1, 9/8); pass membership_only=True for arithmetic runs")

    cv = c.value
    sigma0_q = min(cv - 1, 9 - 8 * cv) / 200
    delta0 = cv / 9
    eta0 = cv * delta0 / (16 * k0)
    # 2(k0+1)eta0 < c*delta0/2 < 1/4
    if not (2 * (k0 + 1) * eta0 < cv * delta0 / 2 < Fraction(1, 4)):
        raise ConfigError(f"window inequality 2(k0+1)eta0 < c*delta0/2 < 1/4 fails for k0={k0}, c={c}")

    sigma0 = float(sigma0_q)
    w0 = int(overrides.pop("w0", default_w0(X)))
    epsilon0 = float(overrides.pop("epsilon0", DEFAULT_EPSILON0))
    scale = overrides.pop("scale", None)
    scale = None if scale is None else float(scale)
    b = int(overrides.pop("b", 1))
    r_max = int(overrides.pop("r_max", DEFAULT_R_MAX))
    max_bits = int(overrides.pop("max_precision_bits", DEFAULT_MAX_PRECISION_BITS))

    R = float(X) ** (sigma0 * (1.0 if scale is None else scale)) if sigma0 > 0 else 1.0
    H = float(X) ** (2 * sigma0) if sigma0 > 0 else 1.0
    return SieveConfig(
        c=c,
        k0=k0,
        m=m,
        X=X,
        sigma0=sigma0,
        delta0=delta0,
        eta0=eta0,
        epsilon0=epsilon0,
        R=R,
        W=primorial(w0),
        H=H,
        w0=w0,
        scale=scale,
        b=b,
        r_max=r_max,
        max_precision_bits=max_bits,
        extra=overrides,
    )


def with_overrides(cfg: SieveConfig, **kw: Any) -> SieveConfig:
    """Re-derive ``cfg`` with some fields changed."""
    base = {
        "w0": cfg.w0,
        "epsilon0": cfg.epsilon0,
        "scale": cfg.scale,
        "b": cfg.b,
        "r_max": cfg.r_max,
        "max_precision_bits": cfg.max_precision_bits,
    }
    c = kw.pop("c", cfg.c)
    k0 = kw.pop("k0", cfg.k0)
    m = kw.pop("m", cfg.m)
    X = kw.pop("X", cfg.X)
    base.update(kw)
    if "w0" not in kw and X != cfg.X and cfg.w0 == default_w0(cfg.X):
        base["w0"] = default_w0(X)
    return derive_config(c, k0, m, X, base, membership_only=not parse_exponent(c).theorem_mode)


# -- key=value config files ---------------------------------------------------

_INT_KEYS = {"k0", "m", "X", "w0", "b", "r_max", "max_precision_bits", "degree", "threads"}
_FLOAT_KEYS = {"epsilon0", "scale"}


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse flat ``key=value`` lines; ``#`` starts a comment."""
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in _INT_KEYS:
            out[key] = int(float(val)) if "e" in val.lower() else int(val)
        elif key in _FLOAT_KEYS:
            out[key] = float(val)
        else:
            out[key] = val
    return out


def load_config_file(path: str | os.PathLike[str]) -> dict[str, Any]:
    with open(path) as fh:
        return parse_config_text(fh.read())


__all__ = [
    "ConfigError",
    "Exponent",
    "SieveConfig",
    "derive_config",
    "euler_phi",
    "load_config_file",
    "parse_config_text",
    "parse_exponent",
    "default_w0",
    "primorial",
    "validate_exponent",
    "with_overrides",
]
