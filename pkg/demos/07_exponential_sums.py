"""
Exponential sums over primes
============================

Sums of Lambda(n) e(j n^g) over n in [X, 2X] cancel; a zero phase does not,
and neither does e(n/2), because Lambda lives on odd n.  The Heath-Brown
identity rebuilds Lambda from Dirichlet convolutions of truncated mu.
"""

import numpy as np

from psgap.expsums import (
    PhaseFamily,
    family_phase_check,
    heath_brown_check,
    lambda_exp_sum,
    quadratic_calibration,
)

X = 10**5
for j, C1 in ((0, 0.0), (0, 0.5), (1, 0.0), (5, 0.0), (1, 0.25)):
    r = lambda_exp_sum(X, PhaseFamily.for_exponent("11/10", j=j, C1=C1))
    print(f"j = {j}, C1 = {C1}: |sum| / trivial = {r.ratio:.5f}")

print("\nHeath-Brown, J = 2:", heath_brown_check(10**5, 2))
print("Heath-Brown, J = 3:", heath_brown_check(10**5, 3))

print("\nsecond-derivative test, quadratic phase:", quadratic_calibration().K)
rng = np.random.default_rng(0)
Ks = [family_phase_check("11/10", float(t), X, 10**4).K for t in rng.uniform(1, 1000, 20)]
print("family phases, max K:", max(Ks))
