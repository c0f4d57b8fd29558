"""
Sieve weights and their quadratic form
======================================

lambda_d = mu(d_0) ... mu(d_k0) f(log d_0 / log R, ...) on squarefree tuples
with product at most R.  The quadratic form in lambda should approach its
main term (W/phi(W))^(k0+1) I / (log R)^(k0+1) as R grows.
"""

from psgap.config import derive_config
from psgap.maynard import (
    WeightGenerator,
    combined_sum,
    lemma_maynard_bruteforce,
    power_sieve_function,
    prop21_sum,
    prop31_sum,
    random_tuple_pairs,
    xq_vectorized,
)

for k0 in (0, 1):
    f = power_sieve_function(k0)
    for R in (100, 300, 1000):
        row = lemma_maynard_bruteforce(WeightGenerator(f, float(R), k0), 2)
        print(f"k0 = {k0}, R = {R:4d}: lhs {row.lhs:.6f}  main {row.rhs:.6f}  ratio {row.ratio:.5f}")

# the modulus shared by the lcms of a tuple pair
D, E = random_tuple_pairs(200, 2, 2, 100000, seed=1)
print("\nshared-modulus check:", xq_vectorized(D, E, 2, 200))

# weighted sums along the sequence at desk scale (R pulled up to 100)
cfg = derive_config("11/10", 2, X=10**6)
for rep in (prop21_sum(cfg), prop31_sum(cfg)):
    print(f"{rep.name}: value {rep.value:.3f}, main term {rep.main_term:.3f}, ratio {rep.ratio:.3f}, R = {rep.R}")
comb = combined_sum(cfg)
print(f"combined sum {comb.value:.3f}, sign {comb.extra['sign']}, {comb.extra['positive_count']} n with positive inner sum")
