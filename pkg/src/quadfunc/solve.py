"""Admissible values of f(1): eliminate beta, extract rational roots, reject spurious pairs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from quadfunc.derive import Closure, Constraint, DerivationBudget, SCHEMA_VERSION
from quadfunc.exactmath import (
    Poly1,
    Poly2,
    poly_gcd,
    rational_roots,
    solve_linear_in_beta,
    substitute_beta,
)
from quadfunc.induction import threshold_A
from quadfunc.quadform import check_k


class InsufficientConstraints(Exception):
    """Fewer than two usable constraints were derived."""


# Classic hand-picked elimination pairs for k = 2..5, as (n, u, v) keys of the
# definitions f(n) = F(u) + k F(v).  The automatic choice differs for k = 3, 4;
# both reach the same admissible set but reject different spurious pairs.
CLASSIC_ROUTES: Dict[int, Tuple[Tuple[int, int, int], Tuple[int, int, int]]] = {
    2: ((6, 2, 1), (9, 1, 2)),
    3: ((4, 1, 1), (16, 2, 2)),
    4: ((5, 1, 1), (20, 2, 2)),
    5: ((6, 1, 1), (9, 2, 1)),
}


@dataclass(frozen=True)
class SolveBudget:
    derivation: DerivationBudget = field(default_factory=DerivationBudget)
    reject_scan: int = 2000
    block: int = 200


class Candidate(NamedTuple):
    alpha: Fraction
    beta: Fraction

    def to_list(self) -> List[str]:
        return [str(self.alpha), str(self.beta)]


@dataclass(frozen=True)
class Witness:
    constraint: Constraint
    value: Fraction

    def to_dict(self) -> dict:
        c = self.constraint
        return {"n": c.n, "rep": list(c.rep), "expr": str(c.raw), "value": str(self.value), "origin": c.origin}


@dataclass
class SolutionReport:
    k: int
    route: List[str]
    beta_expr: Optional[Tuple[Poly1, Poly1]]
    eliminant: Optional[Poly1]
    roots: List[Tuple[Fraction, int]]
    admissible: List[Candidate]
    f1_values: List[str]
    rejected: List[Tuple[Candidate, Witness]]
    unresolved: List[str]
    excluded_alphas_checked: List[Fraction]
    table_target: int = 0
    window: int = 0
    factor_refutations: List[dict] = field(default_factory=list)

    @property
    def resolved(self) -> bool:
        return not self.unresolved

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "k": self.k,
            "route": list(self.route),
            "beta_expr": None
            if self.beta_expr is None
            else {"numerator": str(self.beta_expr[0]), "denominator": str(self.beta_expr[1])},
            "eliminant": None if self.eliminant is None else str(self.eliminant),
            "roots": [{"alpha": str(r), "multiplicity": m} for r, m in self.roots],
            "admissible": [c.to_list() for c in self.admissible],
            "f1_values": list(self.f1_values),
            "rejected": [{"candidate": c.to_list(), "witness": w.to_dict()} for c, w in self.rejected],
            "unresolved": list(self.unresolved),
            "excluded_alphas_checked": [str(a) for a in self.excluded_alphas_checked],
            "status": "resolved" if self.resolved else "unresolved",
            "table_target": self.table_target,
            "window": self.window,
            "factor_refutations": list(self.factor_refutations),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_markdown(self) -> str:
        k = self.k
        lines = [f"### Admissible f(1) for k = {k}", ""]
        if self.route:
            lines.append("Elimination pair: " + "; ".join(self.route))
        if self.beta_expr is not None:
            num, den = self.beta_expr
            lines.append(f"beta = ({num}) / ({den})")
        if self.eliminant is not None:
            lines.append(f"eliminant: {self.eliminant} = 0")
            lines.append("factored: " + factored_text(self.roots, self.eliminant))
        lines += ["", "f(1) in {" + ", ".join(self.f1_values) + "}", ""]
        for c in self.admissible:
            lines.append(f"- admissible (a^2, b^2) = ({c.alpha}, {c.beta})")
        for c, w in self.rejected:
            lines.append(
                f"- rejected (a^2, b^2) = ({c.alpha}, {c.beta}): {w.constraint.raw} = {w.value} != 0"
                f" [from n = {w.constraint.n}]"
            )
        for r in self.factor_refutations:
            lines.append(
                f"- factor {r['factor']} reduced to {r['remaining']} by gcd with n = {r['n']}: {r['expr']} = 0"
            )
        for u in self.unresolved:
            lines.append(f"- UNRESOLVED: {u}")
        return "\n".join(lines) + "\n"


def factored_text(roots: Sequence[Tuple[Fraction, int]], residual: Poly1) -> str:
    parts = []
    for r, m in roots:
        if r == 0:
            f = "alpha"
        else:
            p, q = r.numerator, r.denominator
            f = f"({'' if q == 1 else f'{q}*'}alpha {'-' if p > 0 else '+'} {abs(p)})"
        parts.append(f if m == 1 else f"{f}^{m}")
    _, rest = _residual_of(roots, residual)
    if not rest.is_constant():
        parts.append(f"({rest})")
    return "*".join(parts) or str(residual)


def _residual_of(roots, p: Poly1):
    from quadfunc.exactmath import poly_from_roots

    q, r = p.divmod(poly_from_roots(roots))
    return r, q.primitive()


def _sqrt_rat(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    p, q = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if p * p == x.numerator and q * q == x.denominator:
        return Fraction(p, q)
    return None


def f1_descriptor(alpha: Fraction) -> str:
    """Render the f(1) values with f(1)^2 = alpha, exactly."""
    if alpha == 0:
        return "0"
    r = _sqrt_rat(abs(alpha))
    if r is not None:
        return f"±{r}" if alpha > 0 else f"±{r}i"
    return f"±sqrt({alpha})"


# --------------------------------------------------------------------------- #


def _definition_constraint(closure: Closure, key: Tuple[int, int, int]) -> Optional[Constraint]:
    n, u, v = key
    if min(u, v) < 1 or u * u + closure.k * v * v != n:
        raise ValueError(f"({u}, {v}) is not a representation of {n} for k = {closure.k}")
    fn = closure.value(n)
    sq = closure.square_of(u, v)
    if fn is None or sq is None:
        return None
    raw = sq - fn
    if raw.is_zero():
        return None
    return Constraint(raw.primitive(), raw, n, "definition", (u, v), f"chosen pair f({n}) = F({u}) + {closure.k}*F({v}) squared")


def _beta_linear(p1: Poly2, p2: Poly2) -> Optional[Poly2]:
    """Cancel the beta^2 terms of two beta-quadratic constraints, if possible."""
    if p1.degree_beta() != 2 or p2.degree_beta() != 2:
        return None
    c1, c2 = p1.coeff_beta(2), p2.coeff_beta(2)
    if not (c1.is_constant() and c2.is_constant()):
        return None
    lin = p1.scale(c2.coeff(0)) - p2.scale(c1.coeff(0))
    return lin if lin.degree_beta() == 1 else None


def _pick_route(cons: Sequence[Constraint], route: Optional[Tuple]) -> Optional[Tuple[Poly2, Poly2, List[Constraint]]]:
    """Return (beta-linear polynomial, substitution target, constraints used)."""
    if route is not None:
        c1, c2 = route
        if c1.raw.degree_beta() == 1:
            return c1.raw, c2.raw, [c1, c2]
        lin = _beta_linear(c1.raw, c2.raw)
        if lin is None:
            return None
        return lin, c1.raw, [c1, c2]
    for i, c1 in enumerate(cons):
        if c1.raw.degree_beta() != 1:
            continue
        for c2 in cons[i + 1 :]:
            if c2.raw.degree_beta() < 1:
                continue
            (num, den), _ = solve_linear_in_beta(c1.raw)
            if not substitute_beta(c2.raw, (num, den)).is_zero():
                return c1.raw, c2.raw, [c1, c2]
    for i, c1 in enumerate(cons):
        for c2 in cons[i + 1 :]:
            lin = _beta_linear(c1.raw, c2.raw)
            if lin is not None:
                return lin, c1.raw, [c1, c2]
    return None


def reject_candidate(
    c: Candidate, k: int, closure: Closure, budget: Optional[SolveBudget] = None
) -> Optional[Witness]:
    """First derivable constraint that does not vanish at c, or None within budget."""
    budget = budget or SolveBudget()
    for con in closure.constraints():
        val = con.raw.eval(c.alpha, c.beta)
        if val:
            return Witness(con, val)
    A = threshold_A(k) if k >= 2 else 2
    closure.extend(max(A + 2, 3))
    while closure.window < budget.reject_scan:
        closure.grow_window(min(closure.window + budget.block, budget.reject_scan))
        for con in closure.constraints():
            val = con.raw.eval(c.alpha, c.beta)
            if val:
                return Witness(con, val)
    return None


def elimination_target(k: int) -> int:
    # covers the four seed definitions n = k+1, k+4, 4k+1, 4k+4
    return 4 * (k + 1)


def _refute_factor(
    factor: Poly1, beta_expr: Tuple[Poly1, Poly1], closure: Closure, budget: SolveBudget
) -> Tuple[Poly1, List[dict]]:
    """Shrink an irreducible-over-Q leftover by gcds with further eliminants.

    Each derivable constraint, with beta replaced by num/den, gives another
    polynomial in alpha that every genuine solution must annihilate.  When the
    gcd with the leftover factor drops to a constant, no root of that factor
    survives.
    """
    num, den = beta_expr
    if not poly_gcd(factor, den).is_constant():
        return factor, []
    steps: List[dict] = []
    seen = set()

    def sweep() -> bool:
        nonlocal factor
        for con in closure.constraints():
            if con.key in seen:
                continue
            seen.add(con.key)
            p = substitute_beta(con.raw, (num, den))
            if p.is_zero():
                continue
            g = poly_gcd(factor, p)
            if g.degree() < factor.degree():
                steps.append({
                    "factor": str(factor), "n": con.n, "rep": list(con.rep),
                    "expr": str(con.raw), "remaining": str(g.primitive()),
                })
                factor = g.primitive()
                if factor.is_constant():
                    return True
        return False

    if sweep():
        return factor, steps
    while closure.window < budget.reject_scan:
        closure.grow_window(min(closure.window + budget.block, budget.reject_scan))
        if sweep():
            break
    return factor, steps


def solve_base(k: int, budget: Optional[SolveBudget] = None, route: str = "classic") -> SolutionReport:
    """Admissible (f(1)^2, f(2)^2) pairs for the given k.

    ``route`` picks the elimination pair: ``"auto"`` (first beta-linear
    constraint against the next usable one), ``"classic"`` (the hand-picked pair,
    k = 2..5 only, else auto), or an explicit pair of (n, u, v) keys.
    """
    k = check_k(k, allow_one=False)
    budget = budget or SolveBudget()
    closure = Closure(k, budget.derivation)
    target = elimination_target(k)
    missing = closure.extend(target)
    cons = closure.constraints(upto=target)
    if len(cons) < 2:
        raise InsufficientConstraints(f"k={k}: {len(cons)} constraint(s) up to n={target}")

    keys = None
    if route == "classic":
        keys = CLASSIC_ROUTES.get(k)
    elif isinstance(route, (tuple, list)):
        keys = tuple(tuple(x) for x in route)
    elif route != "auto":
        raise ValueError(f"unknown route {route!r}")
    picked_pair = None
    if keys is not None:
        picked_pair = tuple(_definition_constraint(closure, key) for key in keys)
        if None in picked_pair:
            raise InsufficientConstraints(f"route {keys} not derivable for k={k}")
    picked = _pick_route(cons, picked_pair)

    report = SolutionReport(
        k=k, route=[], beta_expr=None, eliminant=None, roots=[], admissible=[], f1_values=[],
        rejected=[], unresolved=[], excluded_alphas_checked=[], table_target=target,
    )
    if missing:
        report.unresolved.append(f"no expression for n = {missing} within the scan budget")
    if picked is None:
        report.unresolved.append("no constraint pair eliminates beta")
        report.window = closure.window
        return report
    lin, sub, used = picked
    report.route = [f"n={c.n} ({c.rep[0]},{c.rep[1]}): {c.raw} = 0" for c in used]
    (num, den), excluded = solve_linear_in_beta(lin)
    report.beta_expr = (num, den)
    elim = substitute_beta(sub, (num, den))
    if elim.is_zero():
        report.unresolved.append("eliminant vanishes identically")
        report.window = closure.window
        return report
    report.eliminant = elim.primitive()
    roots, residual = rational_roots(elim)
    report.roots = roots
    if not residual.is_constant():
        residual, report.factor_refutations = _refute_factor(residual, (num, den), closure, budget)
    if not residual.is_constant():
        report.unresolved.append(f"irrational factor: {residual} = 0")

    cands: List[Candidate] = []
    for a0, _ in roots:
        if a0 in excluded:
            continue
        cands.append(Candidate(a0, num.eval(a0) / den.eval(a0)))
    for a0 in excluded:
        report.excluded_alphas_checked.append(a0)
        cands.extend(_excluded_branch(a0, lin, sub, cons, report))

    for c in sorted(set(cands)):
        w = reject_candidate(c, k, closure, budget)
        if w is None:
            report.admissible.append(c)
        else:
            report.rejected.append((c, w))
    report.f1_values = sorted({f1_descriptor(c.alpha) for c in report.admissible}, key=_f1_sort)
    report.window = closure.window
    return report


def _f1_sort(s: str):
    if s == "0":
        return (0, Fraction(0))
    body = s.lstrip("±").rstrip("i")
    try:
        return (1, -Fraction(body))
    except ValueError:
        return (2, Fraction(0))


def _excluded_branch(a0: Fraction, lin: Poly2, sub: Poly2, cons, report: SolutionReport) -> List[Candidate]:
    """alpha fixed at a root of the beta denominator: solve the beta system directly."""
    if not lin.at_alpha(a0).is_zero():
        return []  # the beta coefficient vanishes here, leaving a nonzero constant
    g = Poly1(var="beta")
    for p in [sub] + [c.raw for c in cons]:
        g = poly_gcd(g, p.at_alpha(a0))
    if g.is_zero():
        report.unresolved.append(f"alpha = {a0}: every constraint vanishes; beta undetermined")
        return []
    if g.is_constant():
        return []
    roots, residual = rational_roots(g)
    if not residual.is_constant():
        report.unresolved.append(f"alpha = {a0}: irrational beta factor {residual} = 0")
    return [Candidate(a0, b0) for b0, _ in roots]
