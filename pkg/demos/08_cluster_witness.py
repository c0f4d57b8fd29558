"""
Windows of consecutive values holding several primes
====================================================

Among [n^c], [(n+1)^c], ..., [(n+k0)^c] we look for windows with m + 1
primes, starting at the scale X.  For n with [n^c] not an exact power these
are exactly the successors s_0, ..., s_k0 of [n^c].
"""

from psgap.cluster import clusters_csv, scan_clusters, theorem_witness
from psgap.config import derive_config

for X, m, k0 in ((10**5, 1, 10), (10**6, 1, 10), (10**5, 2, 10), (10**5, 3, 30)):
    cfg = derive_config("11/10", k0, X=X)
    w = theorem_witness(cfg, m)
    print(f"X = {X}, k0 = {k0}, m = {m}: {w.message}; values {w.record.values if w.record else None}")

recs = scan_clusters("11/10", 10, 10**5, 2 * 10**5, 4)
print(f"\n{len(recs)} windows with >= 4 primes for n in [1e5, 2e5]")
print(clusters_csv(recs[:5]))
