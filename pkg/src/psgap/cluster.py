"""Desk-scale search for prime clusters in [n^c], [(n+1)^c], ..., [(n+k0)^c]
and normalised gap statistics of consecutive Piatetski-Shapiro primes."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import primes as _primes
from ._parallel import chunks, run_ordered
from .config import Exponent, SieveConfig, parse_exponent
from .powerfloor import PrecisionUnresolved, pow_floor, pow_floor_array, pow_floor_value
from .psprimes import ps_primes, shift_map, window_certificate


@dataclass(frozen=True)
class ClusterRecord:
    n: int
    c: Exponent
    k0: int
    prime_offsets: tuple[int, ...]
    values: tuple[int, ...]
    in_progression: bool
    normalized_span: float

    @property
    def prime_count(self) -> int:
        return len(self.prime_offsets)

    @property
    def min_value(self) -> int:
        return min(self.values)

    def csv_row(self) -> list:
        return [
            self.n,
            self.c.p,
            self.c.q,
            self.k0,
            self.prime_count,
            " ".join(map(str, self.prime_offsets)),
            self.min_value,
            f"{self.normalized_span:.17g}",
            int(self.in_progression),
        ]

    def as_dict(self) -> dict:
        d = asdict(self)
        d["c"] = str(self.c)
        d["prime_offsets"] = list(self.prime_offsets)
        d["values"] = list(self.values)
        return d


CLUSTER_COLUMNS = ["n", "c_num", "c_den", "k0", "prime_count", "offsets", "min_value", "normalized_span", "in_progression"]


def clusters_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CLUSTER_COLUMNS)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _scan_chunk(c: Exponent, k0: int, lo: int, hi: int, min_primes: int) -> list[tuple[int, tuple, tuple, tuple]]:
    """Raw hits (n, offsets, prime values, window values) for n in [lo, hi]."""
    vals = pow_floor_array(np.arange(lo, hi + k0 + 1, dtype=np.int64), c)
    top = int(vals[-1])
    seg_lo = int(vals[0])
    seg = _primes.sieve_segment(seg_lo, top + 1, segment_size=max(_primes.DEFAULT_SEGMENT_SIZE, top + 1 - seg_lo))
    isp = seg.mask[vals - seg_lo].astype(np.int64)
    cs = np.concatenate([[0], np.cumsum(isp)])
    counts = cs[k0 + 1 :] - cs[: len(cs) - k0 - 1]
    counts = counts[: hi - lo + 1]
    out = []
    for i in np.flatnonzero(counts >= min_primes).tolist():
        window = vals[i : i + k0 + 1]
        offs = tuple(int(j) for j in np.flatnonzero(isp[i : i + k0 + 1]))
        out.append((lo + i, offs, tuple(int(window[j]) for j in offs), tuple(int(x) for x in window)))
    return out


def _record(c: Exponent, k0: int, n: int, offs, pvals, window) -> ClusterRecord:
    for v in pvals:
        if not _primes.is_prime(v):
            raise AssertionError(f"sieve reported composite {v} as prime")
    diffs = {window[i + 1] - window[i] for i in range(len(window) - 1)}
    span = (max(pvals) - min(pvals)) / min(pvals) ** (1 - float(c.gamma))
    return ClusterRecord(n, c, k0, tuple(offs), tuple(pvals), len(diffs) <= 1, span)


def scan_clusters(
    c: Exponent | str,
    k0: int,
    n_lo: int,
    n_hi: int,
    min_primes: int,
    threads: int = 1,
    dedup: bool = True,
) -> list[ClusterRecord]:
    """Windows with at least ``min_primes`` primes, in increasing n.

    With ``dedup``, windows are keyed by their smallest prime value and only
    the one holding the most primes (then the smallest n) is kept, so a
    cluster seen from several starting points is reported once.
    """
    c = parse_exponent(c)
    if k0 < 0 or n_lo < 1 or n_hi < n_lo:
        raise ValueError("need k0 >= 0 and 1 <= n_lo <= n_hi")
    if min_primes < 1:
        raise ValueError("min_primes must be >= 1")
    if (n_hi - n_lo + 1) * (k0 + 1) > 10**8:
        raise ValueError("scan exceeds the 10^8 work budget")
    parts = run_ordered(lambda a, b: _scan_chunk(c, k0, a, b, min_primes), chunks(n_lo, n_hi, 1 << 18), threads)
    hits = [h for part in parts for h in part]
    if dedup:
        best: dict[int, tuple] = {}
        for h in hits:
            key = min(h[2])
            cur = best.get(key)
            if cur is None or len(h[1]) > len(cur[1]):
                best[key] = h
        hits = sorted(best.values(), key=lambda h: h[0])
    return [_record(c, k0, *h) for h in hits]


def brute_force_windows(c: Exponent | str, k0: int, n_lo: int, n_hi: int, min_primes: int) -> list[int]:
    """Oracle: scalar floors and Miller-Rabin, no dedup."""
    c = parse_exponent(c)
    out = []
    for n in range(n_lo, n_hi + 1):
        cnt = sum(1 for i in range(k0 + 1) if _primes.is_prime(pow_floor_value(n + i, c)))
        if cnt >= min_primes:
            out.append(n)
    return out


# -- gaps ------------------------------------------------------------------------------------


@dataclass(frozen=True)
class GapRecord:
    p: int
    p_next: int
    normalized_gap: float


@dataclass
class GapStats:
    c: Exponent
    x_max: int
    tau: float
    pairs: int
    below_tau: int
    min_normalized_gap: float
    histogram: list[tuple[float, int]]
    stated_floor_violations: int
    rigorous_floor_violations: int
    worst_stated: tuple | None = None
    records: list[GapRecord] = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "c": str(self.c),
            "x_max": self.x_max,
            "tau": self.tau,
            "pairs": self.pairs,
            "below_tau": self.below_tau,
            "min_normalized_gap": self.min_normalized_gap,
            "histogram": self.histogram,
            "stated_floor_violations": self.stated_floor_violations,
            "rigorous_floor_violations": self.rigorous_floor_violations,
            "worst_stated": self.worst_stated,
        }


def stated_floor(p: np.ndarray, c: Exponent) -> np.ndarray:
    """c (1 - 10 p^-gamma): the finite-scale slack written for the asymptotic floor."""
    return float(c) * (1 - 10 * np.asarray(p, dtype=float) ** (-float(c.gamma)))


def rigorous_floor(p: np.ndarray, c: Exponent) -> np.ndarray:
    """c - p^-(1-gamma).

    Consecutive elements [n^c] < [(n+1)^c] differ by more than c n^(c-1) - 1,
    and p = [n^c] <= n^c gives p^(1-gamma) <= n^(c-1), so every normalised gap
    between consecutive PS primes exceeds c - p^-(1-gamma).
    """
    return float(c) - np.asarray(p, dtype=float) ** (-(1 - float(c.gamma)))


def gap_stats(c: Exponent | str, x_max: int, tau: float | None = None, bins: int = 20, keep_records: bool = False) -> GapStats:
    c = parse_exponent(c)
    if x_max > 10**8:
        raise ValueError("x_max must be <= 10^8")
    tau = 2 * float(c) if tau is None else float(tau)
    ps = ps_primes(x_max, c) if x_max >= 2 else np.zeros(0, dtype=np.int64)
    if ps.size < 2:
        return GapStats(c, x_max, tau, 0, 0, float("nan"), [], 0, 0)
    p, q = ps[:-1], ps[1:]
    norm = (q - p) / p.astype(float) ** (1 - float(c.gamma))
    st = norm < stated_floor(p, c)
    rg = norm < rigorous_floor(p, c)
    worst = None
    if st.any():
        i = int(np.argmin(norm - stated_floor(p, c)))
        worst = (int(p[i]), int(q[i]), float(norm[i]), float(stated_floor(p[i : i + 1], c)[0]))
    edges = np.linspace(0, max(4 * float(c), float(norm.max())), bins + 1)
    h, _ = np.histogram(norm, bins=edges)
    recs = [GapRecord(int(a), int(b), float(g)) for a, b, g in zip(p, q, norm)] if keep_records else []
    return GapStats(
        c,
        x_max,
        tau,
        int(len(norm)),
        int((norm <= tau).sum()),
        float(norm.min()),
        [(float(e), int(k)) for e, k in zip(edges[:-1], h)],
        int(st.sum()),
        int(rg.sum()),
        worst,
        recs,
    )


# -- witnesses ------------------------------------------------------------------------------


@dataclass
class Witness:
    found: bool
    record: ClusterRecord | None
    searched_up_to: int
    shift_map_consistent: bool | None = None
    window_certified: bool | None = None
    certified_progression: bool | None = None
    message: str = ""

    def to_json(self) -> str:
        d = {
            "found": self.found,
            "record": self.record.as_dict() if self.record else None,
            "searched_up_to": self.searched_up_to,
            "shift_map_consistent": self.shift_map_consistent,
            "window_certified": self.window_certified,
            "certified_progression": self.certified_progression,
            "message": self.message,
        }
        return json.dumps(d, indent=2, sort_keys=True)


def shift_consistency(rec: ClusterRecord) -> bool:
    """[(n+i)^c] == s_i([n^c]) for the window, when [n^c] is not an exact power.

    For v = [n^c] not equal to n^c, [v^gamma] = n - 1, so s_i(v) = [(n+i)^c].
    """
    c = rec.c
    v0 = pow_floor_value(rec.n, c)
    if pow_floor(rec.n, c, bits=8).exact_integer_hit:
        return True
    return all(shift_map(v0, i, c) == pow_floor_value(rec.n + i, c) for i in range(rec.k0 + 1))


def theorem_witness(cfg: SieveConfig, m: int | None = None, n_max: int = 10**6, threads: int = 1) -> Witness:
    """First window at or above [X^gamma] holding m + 1 primes, by doubling ranges.

    When the window start lies in [X, 2X] its window certificate is checked and,
    if it holds, the progression structure of the window is compared with
    the identity it predicts.
    """
    m = cfg.m if m is None else m
    c, k0 = cfg.c, cfg.k0
    lo = max(1, pow_floor_value(cfg.X, c.gamma))
    width = 1 << 12
    while lo <= n_max:
        hi = min(n_max, lo + width - 1)
        recs = scan_clusters(c, k0, lo, hi, m + 1, threads=threads)
        if recs:
            rec = recs[0]
            w = Witness(True, rec, hi, shift_map_consistent=shift_consistency(rec))
            v0 = pow_floor_value(rec.n, c)
            if cfg.X <= v0 <= 2 * cfg.X:
                try:
                    cert = window_certificate(v0, cfg)
                    w.window_certified = cert.both
                    if cert.both:
                        w.certified_progression = rec.in_progression
                except PrecisionUnresolved:
                    w.window_certified = None
            w.message = f"window with {rec.prime_count} primes at n={rec.n}"
            return w
        lo = hi + 1
        width *= 2
    return Witness(False, None, n_max, message="no witness found at this scale")
