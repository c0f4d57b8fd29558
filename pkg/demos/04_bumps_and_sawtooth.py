"""
Smooth cutoffs and their Fourier coefficients
=============================================

A bump that equals 1 on [a + D, b - D] and 0 off (a, b) is built by convolving
the interval indicator with r boxes of width D/r.  Its Fourier coefficients
decay like D^-r |j|^-(r+1).  The sawtooth e(-t{x}) is expanded the same way.
"""

import numpy as np

from psgap.config import derive_config
from psgap.smoothing import (
    BumpSpec,
    bump_build,
    bump_fourier,
    closed_form_coefficient,
    coeff,
    decay_report,
    grid_for,
    paper_bumps,
    sawtooth_expand,
    truncation_constant,
    truncation_grid,
)

s = BumpSpec(0.3, 0.6, 0.05, 3)
b = bump_fourier(bump_build(s), 256, grid_for(s, 256))
print("a0 =", b.a0, " expected", s.mean)
for j in (1, 5, 25, 125):
    print(f"j = {j:3d}: |a_j| = {abs(coeff(b, j)):.3e}  closed form {abs(closed_form_coefficient(s, j)):.3e}")

# the four bumps used for the sieve windows at X = 10^6
cfg = derive_config("11/10", 5, X=10**6)
for bump in paper_bumps(cfg, r_max=4).as_tuple():
    bf = bump_fourier(bump, 10**4, grid_for(bump.spec, 10**4))
    rep = decay_report(bf)
    lo, hi = bump.support_interval()
    print(f"{bump.spec.name:9s} support ({lo:.5f}, {hi:.5f})  K = {rep.K:.3f}")

# sawtooth with H = 100 terms on each side
H = 100
xs = truncation_grid(H)
for theta in (0.1, 0.5, 0.9):
    print(f"theta = {theta}: truncation constant {truncation_constant(sawtooth_expand(theta, H), xs):.4f}")
