"""Deterministic range partitioning.

Chunk boundaries depend only on the range and the chunk size, never on the
number of workers, and results come back in range order.  Anything that is
summed afterwards uses ``math.fsum`` (correctly rounded, hence independent of
summation order).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")

DEFAULT_CHUNK = 1 << 16


def chunks(lo: int, hi: int, size: int = DEFAULT_CHUNK) -> list[tuple[int, int]]:
    """Split the inclusive range [lo, hi] into inclusive pieces of ``size``."""
    if size < 1:
        raise ValueError("chunk size must be >= 1")
    out = []
    a = lo
    while a <= hi:
        b = min(hi, a + size - 1)
        out.append((a, b))
        a = b + 1
    return out


def run_ordered(fn: Callable[..., T], pieces: Iterable[tuple], threads: int = 1) -> list[T]:
    pieces = list(pieces)
    if threads <= 1 or len(pieces) <= 1:
        return [fn(*p) for p in pieces]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: fn(*p), pieces))
