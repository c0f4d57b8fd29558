"""
When consecutive values form an arithmetic progression
=======================================================

The successor map s_h(n) = [([n^g] + h + 1)^c] walks along the sequence.  If
{n^g} sits just below 1 and {c n^(1-g)} sits in a small window above 0, the
first few successors are n, n + a, n + 2a, ... with a = [c n^(1-g)].
"""

from psgap.config import derive_config
from psgap.powerfloor import floor_c_n_pow
from psgap.psprimes import shift_map, verify_lemma_nchi, verify_lemma_shnchi, window_certificate

cfg = derive_config("11/10", 5, X=10**6)
print("delta0 =", cfg.delta0, " eta0 =", cfg.eta0, " X^(g-1) =", round(cfg.x_gamma_minus_1, 5))

# find a few certified n and show the progression
shown = 0
for n in range(cfg.X, 2 * cfg.X):
    cert = window_certificate(n, cfg)
    if cert.both:
        a = floor_c_n_pow(n, cfg.c).value
        walk = [shift_map(n, h, cfg.c) for h in range(cfg.k0 + 1)]
        print(f"n = {n}: step {a}, successors {walk}")
        shown += 1
        if shown == 3:
            break

# exhaustive check over [X, 2X]
a = verify_lemma_nchi(cfg)
b = verify_lemma_shnchi(cfg)
print(f"\nprogression identity: {a.checked} certified n, {a.counterexamples} counterexamples, {a.unresolved} unresolved")
print(f"positivity consequences: {b.checked} n, {b.counterexamples} counterexamples, largest deviation constant {b.max_frac_deviation_ratio:.3f}")
