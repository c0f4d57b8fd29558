"""
How many Piatetski-Shapiro primes, and how far apart
=====================================================

Primes of the form [n^c] up to x number about x^g / log x (g = 1/c).  Their
gaps live on the scale p^(1-g), and consecutive values of the sequence
already differ by about c p^(1-g), so normalised gaps cannot drop much below c.
"""

import numpy as np

from psgap.cluster import gap_stats, rigorous_floor
from psgap.config import parse_exponent
from psgap.psprimes import density_report, ps_primes

c = parse_exponent("11/10")

for x in (10**4, 10**5, 10**6, 10**7):
    r = density_report(x, c)
    print(f"x = {x:>9}: count {r.count:>7}  x^g/log x {r.main_term:10.1f}  ratio {r.ratio:.4f}")

# normalised gaps up to 10^7
g = gap_stats(c, 10**7)
print(f"\n{g.pairs} consecutive pairs, {g.below_tau} with normalised gap <= 2c = {g.tau}")
print(f"smallest normalised gap {g.min_normalized_gap:.4f}")

# the floor: consecutive sequence values differ by more than c n^(c-1) - 1,
# which gives gap / p^(1-g) > c - p^-(1-g); compare with c (1 - 10 p^-g)
ps = ps_primes(10**5, c)
p = ps[:-1]
norm = (ps[1:] - p) / p ** (1 - float(c.gamma))
tight = np.argsort(norm - rigorous_floor(p, c))[:5]
for i in tight:
    print(f"p = {p[i]:>6}  gap {norm[i]:.4f}  floor c - p^-(1-g) = {rigorous_floor(p[i:i+1], c)[0]:.4f}")
print(f"pairs below c (1 - 10 p^-g) up to 1e7: {g.stated_floor_violations}; below c - p^-(1-g): {g.rigorous_floor_violations}")
