"""
Exact floors of rational powers
===============================

[n^c] for c = p/q is the largest v with v^q <= n^p, so it can be decided with
integers alone.  This script compares the exact floor with a naive float,
then looks at which integers are hit by the sequence.
"""

from fractions import Fraction

import numpy as np

from psgap.powerfloor import frac_pow, pow_floor, pow_floor_array
from psgap.psprimes import is_ps_member, ps_values

c = Fraction(11, 10)

# a few floors with their certified fractional parts
for n in (1, 17, 1024, 10**6):
    r = pow_floor(n, c)
    print(f"[{n}^1.1] = {r.value}  exact power: {r.exact_integer_hit}  frac in [{float(r.frac_lo):.12f}, {float(r.frac_hi):.12f}]")

# floats go wrong once n^c passes 2^53; integers do not
n = 10**15 + 37
exact = pow_floor(n, c).value
naive = int(float(n) ** 1.1)
print(f"\nn = {n}: exact {exact}, float {naive}, off by {naive - exact}")

# the vectorised path classifies in float64 and recomputes anything near an integer
ns = np.arange(10**6, 10**6 + 10, dtype=np.int64)
print("\narray floors:", pow_floor_array(ns, c).tolist())

# {2^(10/11)} is irrational; its enclosure narrows with the bit budget
for bits in (16, 64, 256):
    lo, hi = frac_pow(2, Fraction(10, 11), bits)
    print(f"{bits:4d} bits: width {float(hi - lo):.3e}")

# membership: m is a value of [n^c] iff [m^g, (m+1)^g) contains an integer
vals, pre = ps_values(1, 40, c)
print("\nvalues up to 40:", vals.tolist())
print("missing:", [m for m in range(1, 41) if not is_ps_member(m, c)])
