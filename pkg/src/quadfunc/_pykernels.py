"""Pure-Python/numpy implementations of the hot loops (fallback backend)."""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

_MASK = (1 << 64) - 1


def representation_counts(k: int, nmax: int) -> np.ndarray:
    """Number of (u, v), u, v >= 1, with u^2 + k v^2 = n, for 0 <= n <= nmax."""
    out = np.zeros(nmax + 1, dtype=np.int32)
    v = 1
    while k * v * v + 1 <= nmax:
        kv2 = k * v * v
        umax = int(np.sqrt(nmax - kv2))
        while umax * umax > nmax - kv2:
            umax -= 1
        while (umax + 1) ** 2 <= nmax - kv2:
            umax += 1
        if umax >= 1:
            u = np.arange(1, umax + 1, dtype=np.int64)
            out[kv2 + u * u] += 1  # distinct indices within one v
        v += 1
    return out


def first_grid_failure(num: np.ndarray, denom: int, k: int, umax: int) -> Optional[Tuple[int, int]]:
    """First (u, v) in lexicographic order violating the scaled equation."""
    num = np.asarray(num, dtype=np.int64)
    v = np.arange(1, umax + 1, dtype=np.int64)
    fv2 = num[1 : umax + 1] * num[1 : umax + 1]
    kv2 = k * v * v
    for u in range(1, umax + 1):
        lhs = num[u * u + kv2] * denom
        rhs = num[u] * num[u] + k * fv2
        bad = np.flatnonzero(lhs != rhs)
        if bad.size:
            return (u, int(bad[0]) + 1)
    return None


def splitmix_signs(seed: int, nmax: int) -> np.ndarray:
    """+1/-1 per n in [0, nmax] from a splitmix64 hash of (seed, n)."""
    n = np.arange(nmax + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK) + n * np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return np.where((z >> np.uint64(63)) == 0, 1, -1).astype(np.int8)
