from fractions import Fraction

import pytest

from quadfunc.derive import derive_expressions
from quadfunc.induction import (
    L,
    AuditFailure,
    DomainError,
    RecurrenceCase,
    audit_recurrences,
    case_template,
    certify,
    family_closure,
    recurrence_for,
    residual,
    threshold_A,
)
from quadfunc.quadform import SideConditionError, abcd_instance, representations
from quadfunc.solve import solve_base


def test_threshold():
    assert [threshold_A(k) for k in (2, 3, 4, 9)] == [6, 7, 8, 18]
    with pytest.raises(DomainError):
        threshold_A(1)


def test_worked_instances():
    r = recurrence_for(3, 9)
    assert (r.case, r.l, r.args) == (RecurrenceCase.ODDK_ODDN, 4, (3, 5, 1))
    assert 81 == 9 + 3 * 25 - 3 * 1
    r = recurrence_for(2, 8)
    assert (r.case, r.args) == (RecurrenceCase.EVENK_EVENN, (4, 5, 1))
    assert r.coeffs == (1, 2, -2)
    with pytest.raises(SideConditionError):
        recurrence_for(2, 6)


@pytest.mark.parametrize("k", range(2, 21))
def test_recurrences_are_collisions(k):
    """Each instance is the collision (n, a3) ~ (a1, a2) from its abcd quadruple."""
    A = threshold_A(k)
    for n in range(A + 1, A + 120):
        r = recurrence_for(k, n)
        assert r.identity_holds()
        assert all(1 <= a < n for a in r.args)
        p, q = abcd_instance(r.abcd())
        a1, a2, a3 = r.args
        assert (p.u, p.v, q.u, q.v) == (n, a3, a1, a2)
        assert p in representations(k, p.n) and q in representations(k, q.n)


def test_recurrence_propagates_known_solutions():
    k = 5
    sq = {n: Fraction(n * n) for n in range(1, 200)}
    for n in range(threshold_A(k) + 1, 200):
        assert recurrence_for(k, n).apply(sq.__getitem__) == n * n


@pytest.mark.parametrize("k", [2, 3, 8, 11, 50])
def test_all_residuals_vanish(k):
    for case in RecurrenceCase:
        assert residual(k, case_template(case, k)).is_zero()


def test_audit_side_conditions_use_stated_bounds():
    audit = audit_recurrences(2)
    ee = next(c for c in audit.cases if c.case is RecurrenceCase.EVENK_EVENN)
    assert ee.min_l == ee.stated_min_l == 4
    assert all(ee.side_conditions.values())
    oo = next(c for c in audit_recurrences(3).cases if c.case is RecurrenceCase.ODDK_ODDN)
    assert oo.min_l == 4 and oo.side_conditions["l - (k-1)/2 integral"]
    assert not any(c.applicable for c in audit.cases if c.case.odd_k)


def test_broken_arguments_are_reported():
    broken = (2 * L - 6, L, L - 1)
    with pytest.raises(AuditFailure) as info:
        audit_recurrences(3, overrides={RecurrenceCase.ODDK_EVENN: broken})
    assert not info.value.residual.is_zero()
    soft = audit_recurrences(3, overrides={RecurrenceCase.ODDK_EVENN: broken}, strict=False)
    assert not soft.passed
    assert [c.case for c in soft.failures()] == [RecurrenceCase.ODDK_EVENN]


def test_identity_true_but_bounds_false_is_caught():
    # negating a3 keeps n^2 = a1^2 + k a2^2 - k a3^2 but breaks a3 >= 1
    _, (a1, a2, a3) = case_template(RecurrenceCase.EVENK_EVENN, 2)
    soft = audit_recurrences(2, overrides={RecurrenceCase.EVENK_EVENN: (a1, a2, -a3)}, strict=False)
    entry = next(c for c in soft.cases if c.case is RecurrenceCase.EVENK_EVENN)
    assert entry.residual_zero
    assert not entry.side_conditions["a3 >= 1"]
    assert entry.spot_failures and not soft.passed


def test_family_closure():
    for k in (2, 3, 10, 17):
        entries = family_closure(k)
        assert len(entries) == 6 and all(e["passed"] for e in entries)


@pytest.mark.parametrize("k", [2, 5])
def test_certify(k):
    sol = solve_base(k)
    table, _ = derive_expressions(k, threshold_A(k))
    cert = certify(k, sol, table)
    assert cert.certified
    assert cert.families() == {"zero", "linear", "reciprocal"}
    d = cert.to_dict()
    assert d["schema_version"] == 1 and len(d["notes"]) == 2


def test_certify_rejects_short_table():
    sol = solve_base(4)
    table, _ = derive_expressions(4, 5)
    cert = certify(4, sol, table)
    assert cert.verdict == "Failed"
    assert any("table lacks" in r for r in cert.reasons)
