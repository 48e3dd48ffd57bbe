"""Representations n = u^2 + k v^2 with u, v >= 1, collisions, and the abcd identity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, NamedTuple, Tuple

import numpy as np

from quadfunc import kernels


class SideConditionError(ValueError):
    """A positivity side condition of an identity instance fails."""


def check_k(k: int, *, allow_one: bool = True) -> int:
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise TypeError("k must be an integer")
    k = int(k)
    if k < (1 if allow_one else 2):
        raise ValueError(f"k must be >= {1 if allow_one else 2}, got {k}")
    return k


class Representation(NamedTuple):
    u: int
    v: int
    n: int


@dataclass(frozen=True)
class AbcdQuad:
    a: int
    b: int
    c: int
    d: int
    k: int

    def check(self) -> None:
        if min(self.a, self.b, self.c, self.d) < 1:
            raise SideConditionError(f"entries must be positive: {self}")
        if self.a * self.b - self.k * self.c * self.d <= 0:
            raise SideConditionError(
                f"ab - kcd = {self.a * self.b - self.k * self.c * self.d} <= 0"
            )
        if self.a * self.d - self.b * self.c <= 0:
            raise SideConditionError(f"ad - bc = {self.a * self.d - self.b * self.c} <= 0")


def representations(k: int, n: int) -> List[Representation]:
    """All (u, v) with u, v >= 1 and u^2 + k v^2 = n, sorted by u."""
    k = check_k(k)
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    v = 1
    while k * v * v < n:
        r = n - k * v * v
        u = math.isqrt(r)
        if u * u == r:
            out.append(Representation(u, v, n))
        v += 1
    out.sort()
    return out


def is_representable(k: int, n: int) -> bool:
    return bool(representations(k, n))


@lru_cache(maxsize=64)
def _counts(k: int, nmax: int) -> np.ndarray:
    arr = kernels.representation_counts(k, nmax)
    arr.flags.writeable = False
    return arr


def representation_counts(k: int, nmax: int) -> np.ndarray:
    """Read-only array ``c`` with ``c[n]`` = number of representations of n."""
    k = check_k(k)
    return _counts(k, max(int(nmax), 0))


def representable_mask(k: int, nmax: int) -> np.ndarray:
    return representation_counts(k, nmax) > 0


def collisions(k: int, nmax: int, nmin: int = 1) -> List[Tuple[int, List[Representation]]]:
    """Every n in [nmin, nmax] with at least two representations, ascending."""
    k = check_k(k)
    if nmax < 1:
        raise ValueError("nmax must be positive")
    counts = representation_counts(k, nmax)
    hits = np.flatnonzero(counts[max(nmin, 0) :] >= 2) + max(nmin, 0)
    return [(int(n), representations(k, int(n))) for n in hits]


def abcd_instance(q: AbcdQuad) -> Tuple[Representation, Representation]:
    """Both sides of (ab+kcd)^2 + k(ad-bc)^2 = (ab-kcd)^2 + k(ad+bc)^2.

    Returns the pairs ``(ab+kcd, ad-bc)`` and ``(ab-kcd, ad+bc)`` as
    representations of their common value.
    """
    q.check()
    a, b, c, d, k = q.a, q.b, q.c, q.d, q.k
    u1, v1 = a * b + k * c * d, a * d - b * c
    u2, v2 = a * b - k * c * d, a * d + b * c
    n1 = u1 * u1 + k * v1 * v1
    n2 = u2 * u2 + k * v2 * v2
    if n1 != n2:  # pragma: no cover - algebraic identity
        raise ArithmeticError(f"identity failed for {q}: {n1} != {n2}")
    return Representation(u1, v1, n1), Representation(u2, v2, n2)
