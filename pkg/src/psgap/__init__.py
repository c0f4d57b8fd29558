"""Numerical companion for bounded gaps between Piatetski-Shapiro primes.

Exact floor arithmetic for rational powers, PS-sequence enumeration and
identity checks, smoothing bumps, the sieve variational problem, sieve-weight
brute force, exponential-sum diagnostics and desk-scale cluster search.
"""

from .config import ConfigError, Exponent, SieveConfig, derive_config, parse_exponent
from .powerfloor import PrecisionUnresolved, frac_pow, iroot, pow_floor

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "Exponent",
    "PrecisionUnresolved",
    "SieveConfig",
    "derive_config",
    "frac_pow",
    "iroot",
    "parse_exponent",
    "pow_floor",
]
