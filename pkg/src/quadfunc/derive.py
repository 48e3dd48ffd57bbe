"""Closure engine: exact expressions F(n) = f(n)^2 in alpha = f(1)^2, beta = f(2)^2.

Two kinds of relation feed an incremental linear system over the unknowns F(n):

* collisions -- n = u1^2 + k v1^2 = u2^2 + k v2^2 gives
  F(u1) + k F(v1) = F(u2) + k F(v2);
* definitions -- n = u^2 + k v^2 gives f(n) = F(u) + k F(v), hence
  F(n) = (F(u) + k F(v))^2.

Collisions are linear and preferred.  A definition is applied only when some
unknown is still undetermined after the collision window reached the scan
budget.  Whenever the same F(n) can be obtained two ways, the difference is
kept as a :class:`Constraint` on (alpha, beta).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from quadfunc.exactmath import ALPHA, BETA, Poly2
from quadfunc.quadform import check_k, collisions, representations

SCHEMA_VERSION = 1


class BudgetExhausted(Exception):
    """Some requested F(n) received no expression within the budget."""

    def __init__(self, missing: Sequence[int], table: Optional["ExprTable"] = None):
        self.missing = list(missing)
        self.table = table
        head = ", ".join(map(str, self.missing[:10]))
        more = "" if len(self.missing) <= 10 else f", ... ({len(self.missing)} total)"
        super().__init__(f"no expression within budget for n = {head}{more}")


@dataclass(frozen=True)
class DerivationBudget:
    scan: int = 2000
    degree_cap: int = 8
    initial_window: int = 64

    def __post_init__(self):
        if self.scan < 1 or self.degree_cap < 1 or self.initial_window < 1:
            raise ValueError("budget bounds must be positive")


@dataclass(frozen=True)
class Relation:
    kind: str  # "seed" | "collision" | "definition"
    n: int
    reps: Tuple[Tuple[int, int], ...] = ()

    def describe(self, k: int) -> str:
        if self.kind == "seed":
            return "f(1) = a" if self.n == 1 else "f(2) = b"
        if self.kind == "definition":
            (u, v), = self.reps
            return f"{self.n} = {u}^2 + {k}*{v}^2"
        (u1, v1), (u2, v2) = self.reps
        return f"{self.n} = {u1}^2 + {k}*{v1}^2 = {u2}^2 + {k}*{v2}^2"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "reps": [list(r) for r in self.reps]}


@dataclass(frozen=True)
class Constraint:
    """``poly`` must vanish.  ``raw`` keeps the unnormalised difference."""

    poly: Poly2
    raw: Poly2
    n: int
    kind: str  # "definition" | "inconsistency"
    rep: Tuple[int, int] = (0, 0)
    origin: str = ""

    @property
    def key(self) -> Tuple[int, int, int]:
        return (self.n, self.rep[0], self.rep[1])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "rep": list(self.rep),
            "poly": str(self.poly),
            "raw": str(self.raw),
            "origin": self.origin,
        }


@dataclass(frozen=True)
class Violation:
    point: Tuple[Fraction, Fraction]
    n: int
    relation: str
    lhs: Fraction
    rhs: Fraction


@dataclass
class ExprTable:
    k: int
    target: int
    exprs: Dict[int, Poly2]
    provenance: Dict[int, Tuple[Relation, ...]]
    constraints: List[Constraint] = field(default_factory=list)
    missing: List[int] = field(default_factory=list)
    window: int = 0
    support: Dict[int, Poly2] = field(default_factory=dict)

    def value(self, n: int) -> Optional[Poly2]:
        return self.exprs.get(n, self.support.get(n))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "k": self.k,
            "target": self.target,
            "window": self.window,
            "expressions": [
                {
                    "n": n,
                    "poly": str(self.exprs[n]),
                    "provenance": [r.to_dict() for r in self.provenance.get(n, ())],
                }
                for n in sorted(self.exprs)
            ],
            "constraints": [c.to_dict() for c in self.constraints],
            "missing": list(self.missing),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_markdown(self) -> str:
        lines = [
            f"### F(n) = f(n)^2 for k = {self.k}, alpha = f(1)^2, beta = f(2)^2",
            "",
            "| n | F(n) | derived from |",
            "|---|------|--------------|",
        ]
        for n in sorted(self.exprs):
            prov = self.provenance.get(n, ())
            used = [r.describe(self.k) for r in prov if r.kind != "seed"]
            src = "; ".join(used[:4]) + (f"; ... (+{len(used) - 4})" if len(used) > 4 else "")
            lines.append(f"| {n} | {self.exprs[n]} | {src or 'seed'} |")
        if self.constraints:
            lines += ["", "Constraints (must vanish):", ""]
            for c in self.constraints:
                lines.append(f"- n = {c.n} ({c.origin}): {c.poly} = 0")
        if self.missing:
            lines += ["", f"Missing (budget exhausted): {', '.join(map(str, self.missing))}"]
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- #
# incremental exact elimination
# --------------------------------------------------------------------------- #


class _Row:
    __slots__ = ("coeffs", "rhs", "origin")

    def __init__(self, coeffs: Dict[int, Fraction], rhs: Poly2, origin: FrozenSet[int]):
        self.coeffs = coeffs
        self.rhs = rhs
        self.origin = origin


class LinearSystem:
    """Reduced row echelon form over unknowns F(n), kept up to date per row.

    A pivot row reads ``F(p) + sum(c_w F(w)) = rhs`` where every w is free,
    so F(p) is determined exactly when its row has no free entries.
    """

    def __init__(self):
        self.pivots: Dict[int, _Row] = {}
        self._occ: Dict[int, set] = {}
        self.inconsistencies: List[Tuple[Poly2, FrozenSet[int]]] = []
        self.variables: set = set()

    def add(self, coeffs: Dict[int, Fraction], rhs: Poly2, origin: FrozenSet[int]) -> None:
        c = {v: Fraction(x) for v, x in coeffs.items() if x}
        self.variables.update(c)
        for v in [v for v in c if v in self.pivots]:
            m = c.pop(v)
            row = self.pivots[v]
            for w, cw in row.coeffs.items():
                s = c.get(w, 0) - m * cw
                if s:
                    c[w] = s
                else:
                    c.pop(w, None)
            rhs = rhs - row.rhs.scale(m)
            origin = origin | row.origin
        if not c:
            if not rhs.is_zero():
                self.inconsistencies.append((rhs, origin))
            return
        p = max(c)
        inv = 1 / c.pop(p)
        c = {w: x * inv for w, x in c.items()}
        new = _Row(c, rhs.scale(inv), origin)
        # back-substitute the new pivot out of existing rows
        for q in list(self._occ.pop(p, ())):
            row = self.pivots[q]
            m = row.coeffs.pop(p)
            for w, cw in new.coeffs.items():
                s = row.coeffs.get(w, 0) - m * cw
                if s:
                    row.coeffs[w] = s
                else:
                    row.coeffs.pop(w, None)
                    self._occ.get(w, set()).discard(q)
                    continue
                self._occ.setdefault(w, set()).add(q)
            row.rhs = row.rhs - new.rhs.scale(m)
            row.origin = row.origin | new.origin
        self.pivots[p] = new
        for w in new.coeffs:
            self._occ.setdefault(w, set()).add(p)

    def determined(self, n: int) -> bool:
        row = self.pivots.get(n)
        return row is not None and not row.coeffs

    def value(self, n: int) -> Optional[Poly2]:
        row = self.pivots.get(n)
        if row is None or row.coeffs:
            return None
        return row.rhs

    def origin(self, n: int) -> FrozenSet[int]:
        return self.pivots[n].origin


class Closure:
    """Mutable derivation state for one k; :func:`derive_expressions` wraps it."""

    def __init__(self, k: int, budget: Optional[DerivationBudget] = None):
        self.k = check_k(k)
        self.budget = budget or DerivationBudget()
        self.relations: List[Relation] = []
        self.system = LinearSystem()
        self.window = 0
        self.definitions: Dict[int, int] = {}
        self._add(Relation("seed", 1), {1: 1}, ALPHA)
        self._add(Relation("seed", 2), {2: 1}, BETA)

    # ------------------------------------------------------------------ #
    def _add(self, rel: Relation, coeffs: Dict[int, int], rhs: Poly2) -> None:
        idx = len(self.relations)
        self.relations.append(rel)
        self.system.add(coeffs, rhs, frozenset((idx,)))

    def grow_window(self, nmax: int) -> None:
        """Feed every collision n in (window, nmax] into the system."""
        if nmax <= self.window:
            return
        k = self.k
        for n, reps in collisions(k, nmax, nmin=self.window + 1):
            first = reps[0]
            for other in reps[1:]:
                coeffs: Dict[int, int] = {}
                for u, v, s in ((first.u, first.v, 1), (other.u, other.v, -1)):
                    coeffs[u] = coeffs.get(u, 0) + s
                    coeffs[v] = coeffs.get(v, 0) + s * k
                rel = Relation("collision", n, ((first.u, first.v), (other.u, other.v)))
                self._add(rel, coeffs, Poly2.zero())
        self.window = nmax

    def value(self, n: int) -> Optional[Poly2]:
        return self.system.value(n)

    def determined(self, n: int) -> bool:
        return self.system.determined(n)

    def square_of(self, u: int, v: int) -> Optional[Poly2]:
        fu, fv = self.value(u), self.value(v)
        if fu is None or fv is None:
            return None
        lin = fu + fv.scale(self.k)
        return lin * lin

    def _try_definition(self, limit: int) -> bool:
        for n in range(3, limit + 1):
            if self.determined(n):
                continue
            for u, v, _ in representations(self.k, n):
                sq = self.square_of(u, v)
                if sq is None or sq.degree() > self.budget.degree_cap:
                    continue
                self.definitions[n] = len(self.relations)
                self._add(Relation("definition", n, ((u, v),)), {n: 1}, sq)
                return True
        return False

    def extend(self, target: int) -> List[int]:
        """Derive F(n) for all n <= target; returns the n left undetermined."""
        if target < 2:
            raise ValueError("target must be >= 2")
        b = self.budget
        if self.window == 0:
            self.grow_window(min(b.initial_window, b.scan))
        while True:
            missing = [n for n in range(3, target + 1) if not self.determined(n)]
            if not missing:
                return []
            if self.window < b.scan:
                self.grow_window(min(2 * self.window, b.scan))
                continue
            limit = max(target, max(self.system.variables, default=0))
            if not self._try_definition(limit):
                return missing

    # ------------------------------------------------------------------ #
    def provenance(self, n: int) -> Tuple[Relation, ...]:
        return tuple(self.relations[i] for i in sorted(self.system.origin(n)))

    def determined_values(self) -> Dict[int, Poly2]:
        return {n: r.rhs for n, r in self.system.pivots.items() if not r.coeffs}

    def constraints(self, upto: Optional[int] = None) -> List[Constraint]:
        """All clashes between two derivations of the same F(n), ascending n."""
        vals = self.determined_values()
        top = max(vals) if upto is None else upto
        out: List[Constraint] = []
        seen = set()
        for n in range(3, top + 1):
            fn = vals.get(n)
            if fn is None:
                continue
            for u, v, _ in representations(self.k, n):
                sq = self.square_of(u, v)
                if sq is None:
                    continue
                raw = sq - fn
                if raw.is_zero():
                    continue
                prim = raw.primitive()
                if prim in seen:
                    continue
                seen.add(prim)
                out.append(
                    Constraint(
                        prim, raw, n, "definition", (u, v),
                        f"f({n}) = F({u}) + {self.k}*F({v}) squared vs. derived F({n})",
                    )
                )
        for rhs, origin in self.system.inconsistencies:
            rels = [self.relations[i] for i in sorted(origin)]
            n = max(r.n for r in rels)
            if upto is not None and n > upto:
                continue
            prim = rhs.primitive()
            if prim in seen:
                continue
            seen.add(prim)
            out.append(
                Constraint(prim, rhs, n, "inconsistency", (0, 0),
                           "linear relations disagree: " + "; ".join(r.describe(self.k) for r in rels[-3:]))
            )
        out.sort(key=lambda c: (c.n, c.kind != "definition", c.rep))
        return out

    def table(self, target: int, missing: Sequence[int] = ()) -> ExprTable:
        vals = self.determined_values()
        exprs = {n: p for n, p in vals.items() if n <= target}
        prov = {n: self.provenance(n) for n in exprs}
        support = {}
        for rels in prov.values():
            for r in rels:
                for u, v in r.reps:
                    for m in (u, v):
                        if m > target and m in vals:
                            support[m] = vals[m]
        return ExprTable(
            k=self.k,
            target=target,
            exprs=exprs,
            provenance=prov,
            constraints=self.constraints(upto=target),
            missing=list(missing),
            window=self.window,
            support=support,
        )


def derive_expressions(k: int, target: int, budget: Optional[DerivationBudget] = None) -> Tuple[ExprTable, List[Constraint]]:
    """Expressions F(n) for 1 <= n <= target and the constraints they imply.

    Raises :class:`BudgetExhausted` (carrying the partial table) when some
    n <= target stays undetermined.
    """
    k = check_k(k)
    closure = Closure(k, budget)
    missing = closure.extend(target)
    table = closure.table(target, missing)
    if missing:
        raise BudgetExhausted(missing, table)
    return table, table.constraints


# --------------------------------------------------------------------------- #
# audit
# --------------------------------------------------------------------------- #


def _relation_identity(t: ExprTable, rel: Relation, a: Fraction, b: Fraction) -> Optional[Tuple[Fraction, Fraction]]:
    def F(m: int) -> Optional[Fraction]:
        p = t.value(m)
        return None if p is None else p.eval(a, b)

    k = t.k
    if rel.kind == "seed":
        lhs = F(rel.n)
        return (lhs, a if rel.n == 1 else b) if lhs is not None else None
    if rel.kind == "definition":
        (u, v), = rel.reps
        fn, fu, fv = F(rel.n), F(u), F(v)
        if None in (fn, fu, fv):
            return None
        return fn, (fu + k * fv) ** 2
    (u1, v1), (u2, v2) = rel.reps
    vals = [F(m) for m in (u1, v1, u2, v2)]
    if None in vals:
        return None
    return vals[0] + k * vals[1], vals[2] + k * vals[3]


def audit_table(t: ExprTable, solutions: Iterable[Tuple[Fraction, Fraction]]) -> List[Violation]:
    """Evaluate every recorded relation and every definition identity at each point."""
    out: List[Violation] = []
    rels: Dict[Relation, None] = {}
    for prov in t.provenance.values():
        for r in prov:
            rels.setdefault(r, None)
    for n in sorted(t.exprs):
        for u, v, _ in representations(t.k, n) if n >= 1 + t.k else ():
            if u in t.exprs and v in t.exprs:
                rels.setdefault(Relation("definition", n, ((u, v),)), None)
    for a, b in solutions:
        a, b = Fraction(a), Fraction(b)
        for r in rels:
            sides = _relation_identity(t, r, a, b)
            if sides is not None and sides[0] != sides[1]:
                out.append(Violation((a, b), r.n, r.describe(t.k), sides[0], sides[1]))
    return out
