"""Induction beyond the base range: threshold, parity recurrences, audits and certificates.

Every n above the threshold A(k) satisfies an integer identity

    n^2 = a1^2 + k a2^2 - k a3^2

with 1 <= a_i < n, built from the four-parameter collision identity.  Because
(a1, a3) and (n, a2) are both representations of one integer, any solution
obeys F(n) = F(a1) + k F(a2) - k F(a3).  So a base classification on
[1, A] propagates to all n.  This module writes the four recurrences as
polynomials in l, proves each identity symbolically, turns the side
conditions into a finite check at the minimal l, and bundles the result with
a base classification into a ``Certificate``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Dict, List, Mapping, Optional, Tuple

from quadfunc.exactmath import Poly1
from quadfunc.quadform import AbcdQuad, SideConditionError, check_k

if TYPE_CHECKING:  # pragma: no cover
    from quadfunc.derive import ExprTable
    from quadfunc.solve import SolutionReport

SCHEMA_VERSION = 1

L = Poly1.x("l")


class DomainError(ValueError):
    """k outside the range the induction covers (k = 1)."""


class AuditFailure(AssertionError):
    def __init__(self, case: "RecurrenceCase", residual: Poly1, detail: str = ""):
        self.case = case
        self.residual = residual
        msg = f"{case.value}: residual {residual}"
        super().__init__(msg + (f" ({detail})" if detail else ""))


def threshold_A(k: int) -> int:
    """Base range bound: 6 for k = 2, 7 for k = 3, 2k from k = 4 on."""
    k = check_k(k)
    if k == 1:
        raise DomainError("the induction needs k >= 2")
    return {2: 6, 3: 7}.get(k, 2 * k)


class RecurrenceCase(str, enum.Enum):
    ODDK_ODDN = "OddK_OddN"
    ODDK_EVENN = "OddK_EvenN"
    EVENK_ODDN = "EvenK_OddN"
    EVENK_EVENN = "EvenK_EvenN"

    @property
    def odd_k(self) -> bool:
        return self in (RecurrenceCase.ODDK_ODDN, RecurrenceCase.ODDK_EVENN)

    @property
    def odd_n(self) -> bool:
        return self in (RecurrenceCase.ODDK_ODDN, RecurrenceCase.EVENK_ODDN)

    def applies_to(self, k: int) -> bool:
        return self.odd_k == bool(k % 2)

    @classmethod
    def select(cls, k: int, n: int) -> "RecurrenceCase":
        if k % 2:
            return cls.ODDK_ODDN if n % 2 else cls.ODDK_EVENN
        return cls.EVENK_ODDN if n % 2 else cls.EVENK_EVENN


Template = Tuple[Poly1, Tuple[Poly1, Poly1, Poly1]]


def case_template(case: RecurrenceCase, k: int) -> Template:
    """``(n(l), (a1(l), a2(l), a3(l)))`` for the case.

    The formulas are meaningful for any k; only the matching parity is used
    for induction, but the identity itself is checked for all four.
    """
    kk = Fraction(k)
    n = 2 * L + 1 if case.odd_n else 2 * L
    a1 = 2 * L - 2 * kk + (1 if case.odd_n else 0)
    if case is RecurrenceCase.ODDK_ODDN:
        m = L - (kk - 1) / 2
        rest = (m + 2, m - 2)
    elif case is RecurrenceCase.ODDK_EVENN:
        rest = (2 * L - kk + 1, 2 * L - kk - 1)
    elif case is RecurrenceCase.EVENK_ODDN:
        rest = (2 * L - kk + 2, 2 * L - kk)
    else:
        m = L - kk / 2
        rest = (m + 2, m - 2)
    return n, (a1, rest[0], rest[1])


def residual(k: int, template: Template) -> Poly1:
    n, (a1, a2, a3) = template
    return n * n - (a1 * a1 + k * a2 * a2 - k * a3 * a3)


def stated_min_l(case: RecurrenceCase, k: int) -> int:
    """Lower bound on l as stated in the hand proof for n > A."""
    if case is RecurrenceCase.ODDK_ODDN:
        return 4 if k == 3 else k
    if case is RecurrenceCase.ODDK_EVENN:
        return k + 1
    if case is RecurrenceCase.EVENK_ODDN:
        return 3 if k == 2 else k
    return 4 if k == 2 else k + 1


def min_l(case: RecurrenceCase, k: int) -> int:
    """Smallest l whose n(l) exceeds A(k)."""
    A = threshold_A(k)
    return (A + 1) // 2 if case.odd_n else A // 2 + 1


def _as_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise SideConditionError(f"non-integer argument {x}")
    return x.numerator


def abcd_for(case: RecurrenceCase, k: int, l: int) -> AbcdQuad:
    """A quadruple whose collision identity is the recurrence at this l.

    With (a, b, c, d) the identity reads (ab+kcd)^2 + k(ad-bc)^2 =
    (ab-kcd)^2 + k(ad+bc)^2, and the recurrence is that collision with
    n = ab+kcd, a3 = ad-bc, a1 = ab-kcd, a2 = ad+bc.
    """
    if case is RecurrenceCase.ODDK_ODDN:
        return AbcdQuad(l - (k - 1) // 2, 2, 1, 1, k)
    if case is RecurrenceCase.ODDK_EVENN:
        return AbcdQuad(2 * l - k, 1, 1, 1, k)
    if case is RecurrenceCase.EVENK_ODDN:
        return AbcdQuad(2 * l - k + 1, 1, 1, 1, k)
    return AbcdQuad(l - k // 2, 2, 1, 1, k)


@dataclass(frozen=True)
class RecurrenceInstance:
    case: RecurrenceCase
    k: int
    n: int
    l: int
    args: Tuple[int, int, int]

    @property
    def coeffs(self) -> Tuple[int, int, int]:
        return (1, self.k, -self.k)

    def identity_holds(self) -> bool:
        a1, a2, a3 = self.args
        return self.n**2 == a1 * a1 + self.k * a2 * a2 - self.k * a3 * a3

    def abcd(self) -> AbcdQuad:
        return abcd_for(self.case, self.k, self.l)

    def apply(self, F: Callable[[int], Fraction]) -> Fraction:
        """F(a1) + k F(a2) - k F(a3) for a table of known squares."""
        a1, a2, a3 = self.args
        return F(a1) + self.k * F(a2) - self.k * F(a3)

    def to_dict(self) -> dict:
        return {"case": self.case.value, "k": self.k, "n": self.n, "l": self.l, "args": list(self.args)}


def recurrence_for(k: int, n: int) -> RecurrenceInstance:
    """The recurrence expressing F(n) through three smaller arguments."""
    A = threshold_A(k)
    if n <= A:
        raise SideConditionError(f"n = {n} is not above A({k}) = {A}")
    case = RecurrenceCase.select(k, n)
    l = n // 2
    _, templ = case_template(case, k)
    args = tuple(_as_int(p(l)) for p in templ)
    for a in args:
        if not 1 <= a < n:
            raise SideConditionError(f"{case.value}, k={k}, n={n}: argument {a} outside [1, {n})")
    if case is RecurrenceCase.ODDK_ODDN and l - (k - 1) // 2 < 3:
        raise SideConditionError(f"l - (k-1)/2 = {l - (k - 1) // 2} < 3")
    inst = RecurrenceInstance(case, k, n, l, args)  # type: ignore[arg-type]
    if not inst.identity_holds():  # pragma: no cover - excluded by the symbolic audit
        raise SideConditionError(f"integer identity fails for {inst}")
    return inst


# --------------------------------------------------------------------------- #
# audits
# --------------------------------------------------------------------------- #


@dataclass
class CaseAudit:
    case: RecurrenceCase
    applicable: bool
    n_poly: str
    args: List[str]
    residual: str
    residual_zero: bool
    min_l: Optional[int] = None
    stated_min_l: Optional[int] = None
    side_conditions: Dict[str, bool] = field(default_factory=dict)
    spot_checked: int = 0
    spot_failures: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.residual_zero
            and all(self.side_conditions.values())
            and not self.spot_failures
        )

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "applicable": self.applicable,
            "n": self.n_poly,
            "args": self.args,
            "residual": self.residual,
            "residual_zero": self.residual_zero,
            "min_l": self.min_l,
            "stated_min_l": self.stated_min_l,
            "side_conditions": dict(sorted(self.side_conditions.items())),
            "spot_checked": self.spot_checked,
            "spot_failures": list(self.spot_failures),
            "passed": self.passed,
        }


@dataclass
class RecurrenceAudit:
    k: int
    A: int
    cases: List[CaseAudit]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self) -> List[CaseAudit]:
        return [c for c in self.cases if not c.passed]

    def to_dict(self) -> dict:
        return {"k": self.k, "A": self.A, "passed": self.passed, "cases": [c.to_dict() for c in self.cases]}


def _side_conditions(case: RecurrenceCase, k: int, templ: Template, l0: int) -> Dict[str, bool]:
    """Linear bounds a_i >= 1 and a_i <= n-1, checked at l0 plus nonnegative slope."""
    n, args = templ
    out: Dict[str, bool] = {}
    for i, a in enumerate(args, 1):
        for name, slack in ((f"a{i} >= 1", a - 1), (f"a{i} <= n - 1", n - 1 - a)):
            linear = slack.degree() <= 1
            out[name] = linear and slack.coeff(1) >= 0 and slack(l0) >= 0
    out["l_min matches stated bound"] = l0 == stated_min_l(case, k)
    if case is RecurrenceCase.ODDK_ODDN:
        m = L - Fraction(k - 1, 2)
        out["l - (k-1)/2 integral"] = all(c.denominator == 1 for c in m.coeffs.values())
        out["l - (k-1)/2 >= 3"] = m.coeff(1) > 0 and m(l0) >= 3
    return out


def audit_recurrences(
    k: int,
    spot: int = 200,
    *,
    overrides: Optional[Mapping[RecurrenceCase, Tuple[Poly1, Poly1, Poly1]]] = None,
    strict: bool = True,
) -> RecurrenceAudit:
    """Symbolic identity for all four cases, side conditions and spot checks for k's parity.

    ``overrides`` swaps in other argument polynomials for a case, which is how
    tests feed a deliberately broken recurrence.  With ``strict`` the first
    failing case raises ``AuditFailure``.
    """
    A = threshold_A(k)
    overrides = overrides or {}
    cases = []
    for case in RecurrenceCase:
        n_poly, templ_args = case_template(case, k)
        if case in overrides:
            templ_args = tuple(overrides[case])
        templ = (n_poly, templ_args)
        res = residual(k, templ)
        entry = CaseAudit(
            case=case,
            applicable=case.applies_to(k),
            n_poly=str(n_poly),
            args=[str(a) for a in templ_args],
            residual=str(res),
            residual_zero=res.is_zero(),
        )
        if entry.applicable:
            l0 = min_l(case, k)
            entry.min_l = l0
            entry.stated_min_l = stated_min_l(case, k)
            entry.side_conditions = _side_conditions(case, k, templ, l0)
            for n in range(A + 1, A + spot + 1):
                if RecurrenceCase.select(k, n) is not case:
                    continue
                entry.spot_checked += 1
                vals = [p(n // 2) for p in templ_args]
                a1, a2, a3 = vals
                ok = all(v.denominator == 1 and 1 <= v < n for v in vals)
                if not ok or n * n != a1 * a1 + k * a2 * a2 - k * a3 * a3:
                    entry.spot_failures.append(n)
        cases.append(entry)
        if strict and not entry.passed:
            detail = "" if entry.residual_zero else "identity"
            if entry.residual_zero:
                bad = [name for name, ok in entry.side_conditions.items() if not ok]
                detail = f"side conditions {bad}, spot failures {entry.spot_failures[:5]}"
            raise AuditFailure(case, res, detail)
    return RecurrenceAudit(k, A, cases)


# --------------------------------------------------------------------------- #
# family closure
# --------------------------------------------------------------------------- #


def family_square(kind: str, k: int) -> Callable[[Poly1], Poly1]:
    """F as a map on argument polynomials: 0, x^2 or 1/(k+1)^2."""
    if kind == "zero":
        return lambda p: Poly1(var="l")
    if kind == "linear":
        return lambda p: p * p
    if kind == "reciprocal":
        c = Fraction(1, (k + 1) ** 2)
        return lambda p: Poly1.const(c, "l")
    raise ValueError(f"unknown family {kind!r}")


FAMILY_KINDS = ("zero", "linear", "reciprocal")


def family_closure(k: int) -> List[dict]:
    """F(n) - [F(a1) + k F(a2) - k F(a3)] per applicable case and family."""
    out = []
    for case in RecurrenceCase:
        if not case.applies_to(k):
            continue
        n, (a1, a2, a3) = case_template(case, k)
        for kind in FAMILY_KINDS:
            F = family_square(kind, k)
            res = F(n) - (F(a1) + k * F(a2) - k * F(a3))
            out.append(
                {"case": case.value, "family": kind, "residual": str(res), "passed": res.is_zero()}
            )
    return out


# --------------------------------------------------------------------------- #
# certificate
# --------------------------------------------------------------------------- #

NOTES = (
    "Family labels: (1) zero, (2) +-n, (3) +-1/(k+1), as in the statement of the "
    "induction result. In the classic written argument the subcases headed (2) and (3) "
    "each derive the other family; this certificate follows the statement and leaves "
    "that labelling as found.",
    "Classification is made on the squares F(n) for 1 <= n <= A; signs at "
    "non-representable n stay free inside each family.",
)


@dataclass
class Certificate:
    k: int
    A: int
    base_classification: List[dict]
    recurrence_audit: dict
    family_closure_audit: List[dict]
    solution_status: str
    verdict: str
    reasons: List[str]
    notes: Tuple[str, ...] = NOTES

    @property
    def certified(self) -> bool:
        return self.verdict == "Certified"

    def families(self) -> set:
        return {b["family"] for b in self.base_classification}

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "k": self.k,
            "A": self.A,
            "base_classification": self.base_classification,
            "recurrence_audit": self.recurrence_audit,
            "family_closure_audit": self.family_closure_audit,
            "solution_status": self.solution_status,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_markdown(self) -> str:
        lines = [f"### Certificate for k = {self.k} (A = {self.A}): {self.verdict}", ""]
        for r in self.reasons:
            lines.append(f"- reason: {r}")
        lines += ["", "| alpha | beta | f(1) | family |", "|---|---|---|---|"]
        for b in self.base_classification:
            lines.append(f"| {b['alpha']} | {b['beta']} | {b['f1']} | {b['family'] or 'none'} |")
        lines += ["", "| case | residual | side conditions | spot checks |", "|---|---|---|---|"]
        for c in self.recurrence_audit["cases"]:
            if c["applicable"]:
                sides = "ok" if all(c["side_conditions"].values()) else "FAILED"
                lines.append(f"| {c['case']} | {c['residual']} | {sides} | {c['spot_checked']} |")
        closure_ok = all(e["passed"] for e in self.family_closure_audit)
        lines += ["", f"Family closure identities: {'all zero' if closure_ok else 'FAILED'}", ""]
        lines += [f"> {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def certify(k: int, sol: "SolutionReport", table: "ExprTable", spot: int = 200) -> Certificate:
    """Combine the base classification with the induction audits into a verdict."""
    from quadfunc.families import classify_base
    from quadfunc.solve import f1_descriptor

    A = threshold_A(k)
    reasons: List[str] = []
    if sol.k != k or table.k != k:
        reasons.append(f"inputs are for k = {sol.k} / {table.k}, not {k}")
    if not sol.resolved:
        reasons.extend(f"unresolved: {u}" for u in sol.unresolved)
    if not sol.admissible:
        reasons.append("no admissible base candidate")

    base = []
    for c in sol.admissible:
        values: Dict[int, Fraction] = {}
        for n in range(1, A + 1):
            p = table.value(n)
            if p is None:
                break
            values[n] = p.eval(c.alpha, c.beta)
        entry = {"alpha": str(c.alpha), "beta": str(c.beta), "f1": f1_descriptor(c.alpha), "family": None}
        if len(values) < A:
            reasons.append(f"table lacks F(n) for some n <= {A}")
        else:
            kind = classify_base(values, k)
            entry["family"] = kind.value if kind is not None else None
            entry["squares"] = [str(values[n]) for n in range(1, A + 1)]
            if kind is None:
                reasons.append(f"candidate ({c.alpha}, {c.beta}) matches no family on 1..{A}")
        base.append(entry)

    audit = audit_recurrences(k, spot, strict=False)
    for bad in audit.failures():
        reasons.append(f"recurrence audit failed for {bad.case.value}")
    closure = family_closure(k)
    for e in closure:
        if not e["passed"]:
            reasons.append(f"family closure failed: {e['family']} in {e['case']}")

    return Certificate(
        k=k,
        A=A,
        base_classification=base,
        recurrence_audit=audit.to_dict(),
        family_closure_audit=closure,
        solution_status="resolved" if sol.resolved else "unresolved",
        verdict="Certified" if not reasons else "Failed",
        reasons=reasons,
    )
