"""
The variational ratio on the simplex
====================================

For symmetric polynomials F in k variables we maximise k J(F) / I(F), where
I is the integral of F^2 and J that of (integral of F in one variable)^2.  All
integrals are exact rationals; only the final eigenproblem is floating point.
"""

import math

from psgap.variational import export_f, mk_report, solve_ratio

for k in (2, 3, 4, 6):
    row = [solve_ratio(k, d).ratio for d in range(5)]
    print(f"k = {k}: " + "  ".join(f"{r:.4f}" for r in row))

for k0 in (10, 50, 100):
    rep = mk_report(k0, 3)
    print(f"k0 = {k0:3d}: ratio {rep['ratio']:.4f}, (1/2) log k0 + (1/2) log log k0 - 2 = {rep['bound']:.4f}")

# recover f with (-1)^k d^k f = F for a small case
sol = solve_ratio(2, 1)
poly = export_f(sol, 2)
print("\nf(t0, t1) for k = 2, degree 1:")
print(poly.expr)
