"""The three solution families and an exhaustive checker of the functional equation.

A family is fixed by its kind (zero, linear, reciprocal), k, and a sign policy
that chooses +/- at integers with no representation u^2 + k v^2.  At
representable n the sign is forced.  ``overrides`` replaces single values and
exists so tests can show that the checker catches a wrong value.
"""

from __future__ import annotations

import enum
import json
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from quadfunc import kernels
from quadfunc.quadform import check_k, is_representable, representable_mask

_MASK64 = (1 << 64) - 1


class FamilyKind(str, enum.Enum):
    ZERO = "zero"
    LINEAR = "linear"
    RECIPROCAL = "reciprocal"


@dataclass(frozen=True)
class SignPolicy:
    """``kind`` is one of all_plus, all_minus, seeded, explicit."""

    kind: str = "all_plus"
    seed: int = 0
    explicit: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def all_plus(cls) -> "SignPolicy":
        return cls("all_plus")

    @classmethod
    def all_minus(cls) -> "SignPolicy":
        return cls("all_minus")

    @classmethod
    def seeded(cls, seed: int) -> "SignPolicy":
        return cls("seeded", seed=int(seed))

    @classmethod
    def from_map(cls, signs: Mapping[int, int]) -> "SignPolicy":
        if any(s not in (1, -1) for s in signs.values()):
            raise ValueError("explicit signs must be +1 or -1")
        return cls("explicit", explicit=tuple(sorted(signs.items())))

    def describe(self) -> str:
        if self.kind == "seeded":
            return f"seeded({self.seed})"
        if self.kind == "explicit":
            return f"explicit({len(self.explicit)} entries)"
        return self.kind

    def signs(self, nmax: int) -> np.ndarray:
        """Sign array over 0..nmax (int8)."""
        if self.kind == "all_plus":
            return np.ones(nmax + 1, dtype=np.int8)
        if self.kind == "all_minus":
            return -np.ones(nmax + 1, dtype=np.int8)
        if self.kind == "seeded":
            return np.asarray(kernels.splitmix_signs(self.seed & _MASK64, nmax))
        if self.kind == "explicit":
            out = np.ones(nmax + 1, dtype=np.int8)
            for n, s in self.explicit:
                if n <= nmax:
                    out[n] = s
            return out
        raise ValueError(f"unknown sign policy {self.kind!r}")

    def sign(self, n: int) -> int:
        if self.kind == "all_plus":
            return 1
        if self.kind == "all_minus":
            return -1
        if self.kind == "seeded":
            return _splitmix_sign(self.seed, n)
        if self.kind == "explicit":
            return dict(self.explicit).get(n, 1)
        raise ValueError(f"unknown sign policy {self.kind!r}")


def _splitmix_sign(seed: int, n: int) -> int:
    # scalar twin of kernels.splitmix_signs
    z = (seed + n * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return 1 if z >> 63 == 0 else -1


_representable = lru_cache(maxsize=1 << 20)(is_representable)


@dataclass(frozen=True)
class Family:
    kind: FamilyKind
    k: int
    sign_policy: SignPolicy = field(default_factory=SignPolicy)
    overrides: Tuple[Tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        check_k(self.k)

    def with_overrides(self, values: Mapping[int, Fraction]) -> "Family":
        merged = dict(self.overrides)
        merged.update({int(n): Fraction(v) for n, v in values.items()})
        return Family(self.kind, self.k, self.sign_policy, tuple(sorted(merged.items())))

    @property
    def magnitude(self) -> Optional[Fraction]:
        """Constant |f(n)| for zero/reciprocal; None for linear."""
        if self.kind is FamilyKind.ZERO:
            return Fraction(0)
        if self.kind is FamilyKind.RECIPROCAL:
            return Fraction(1, self.k + 1)
        return None

    def describe(self) -> str:
        s = f"{self.kind.value}(k={self.k}, signs={self.sign_policy.describe()})"
        if self.overrides:
            s += " mutated " + ",".join(f"{n}={v}" for n, v in self.overrides)
        return s


def family_value(f: Family, n: int) -> Fraction:
    """Exact f(n)."""
    if n < 1:
        raise ValueError("n must be positive")
    ov = dict(f.overrides)
    if n in ov:
        return ov[n]
    base = Fraction(n) if f.kind is FamilyKind.LINEAR else f.magnitude
    if base == 0:
        return base
    if _representable(f.k, n):
        return base
    return base * f.sign_policy.sign(n)


def value_array(f: Family, nmax: int) -> Tuple[np.ndarray, int]:
    """Values on 0..nmax as ``(numerators, common denominator)``.

    Index 0 is unused (0).  Raises OverflowError when the numerators do not
    fit the int64 kernels.
    """
    denom = 1 if f.kind is not FamilyKind.RECIPROCAL else f.k + 1
    for _, v in f.overrides:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    rep = representable_mask(f.k, nmax)
    signs = f.sign_policy.signs(nmax).astype(np.int64)
    signs[rep] = 1
    if f.kind is FamilyKind.ZERO:
        num = np.zeros(nmax + 1, dtype=np.int64)
    elif f.kind is FamilyKind.LINEAR:
        num = np.arange(nmax + 1, dtype=np.int64) * denom * signs
    else:
        num = signs * (denom // (f.k + 1))
    num[0] = 0
    for n, v in f.overrides:
        if n <= nmax:
            scaled = v * denom
            if abs(scaled.numerator) >= kernels.INT64_SAFE:
                raise OverflowError("override too large for int64 kernel")
            num[n] = int(scaled)
    return num, denom


@dataclass
class VerificationResult:
    family: str
    k: int
    umax: int
    passed: bool
    pairs_checked: int
    first_failure: Optional[Dict[str, str]] = None
    backend: str = ""
    wall_time_s: float = 0.0

    def to_dict(self, include_timing: bool = True) -> dict:
        d = {
            "family": self.family,
            "k": self.k,
            "umax": self.umax,
            "grid_size": self.umax * self.umax,
            "passed": self.passed,
            "pairs_checked": self.pairs_checked,
            "first_failure": self.first_failure,
        }
        if include_timing:
            d["backend"] = self.backend
            d["wall_time_s"] = round(self.wall_time_s, 6)
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)


def _failure_record(f: Family, u: int, v: int) -> Dict[str, str]:
    n = u * u + f.k * v * v
    lhs = family_value(f, n)
    rhs = family_value(f, u) ** 2 + f.k * family_value(f, v) ** 2
    return {"u": str(u), "v": str(v), "n": str(n), "lhs": str(lhs), "rhs": str(rhs)}


def _scan_exact(f: Family, umax: int) -> Optional[Tuple[int, int]]:
    k = f.k
    vals = [Fraction(0)] + [family_value(f, m) for m in range(1, umax + 1)]
    sq = [x * x for x in vals]
    for u in range(1, umax + 1):
        for v in range(1, umax + 1):
            if family_value(f, u * u + k * v * v) != sq[u] + k * sq[v]:
                return (u, v)
    return None


def verify_family(f: Family, umax: int, *, exact: bool = False) -> VerificationResult:
    """Check f(u^2 + k v^2) = f(u)^2 + k f(v)^2 exactly on all of [1, umax]^2.

    The failure reported is the lexicographically smallest (u, v).
    """
    if umax < 1:
        raise ValueError("umax must be >= 1")
    t0 = time.perf_counter()
    k = f.k
    nmax = umax * umax * (1 + k)
    hit: Optional[Tuple[int, int]]
    backend = kernels.BACKEND
    try:
        if exact:
            raise OverflowError
        num, denom = value_array(f, nmax)
        peak = int(np.abs(num).max(initial=0))
        if peak * peak * (k + 1) >= kernels.INT64_SAFE or peak * denom >= kernels.INT64_SAFE:
            raise OverflowError
        hit = kernels.first_grid_failure(num, denom, k, umax)
    except OverflowError:
        backend = "exact"
        hit = _scan_exact(f, umax)
    elapsed = time.perf_counter() - t0
    if hit is None:
        return VerificationResult(f.describe(), k, umax, True, umax * umax, None, backend, elapsed)
    u, v = hit
    return VerificationResult(
        f.describe(), k, umax, False, (u - 1) * umax + v, _failure_record(f, u, v), backend, elapsed
    )


def classify_base(values_squared: Mapping[int, Fraction], k: int) -> Optional[FamilyKind]:
    """Which family the squares F(n), 1 <= n <= A, match exactly, if any."""
    from quadfunc.induction import threshold_A

    A = threshold_A(k)
    if sorted(values_squared) != list(range(1, A + 1)):
        raise ValueError(f"values must cover exactly 1..{A}")
    F = {n: Fraction(x) for n, x in values_squared.items()}
    c = Fraction(1, (k + 1) ** 2)
    if all(F[n] == 0 for n in F):
        return FamilyKind.ZERO
    if all(F[n] == n * n for n in F):
        return FamilyKind.LINEAR
    if all(F[n] == c for n in F):
        return FamilyKind.RECIPROCAL
    return None


def standard_families(k: int, seed: int = 0):
    """All three kinds under all_plus, all_minus and seeded(seed)."""
    policies = (SignPolicy.all_plus(), SignPolicy.all_minus(), SignPolicy.seeded(seed))
    return [Family(kind, k, p) for kind in FamilyKind for p in policies]
