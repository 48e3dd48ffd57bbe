"""Acceptance suite: one test per criterion, each with its own time budget.

Every test prints a PASS/FAIL line when run with ``-s``; the terminal
summary repeats them (see ``conftest.py``).
"""

import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction as Fr

import pytest

from quadfunc.cli import main
from quadfunc.derive import derive_expressions
from quadfunc.exactmath import ALPHA, BETA, Poly1, Poly2
from quadfunc.families import SignPolicy, Family, FamilyKind, family_value, verify_family
from quadfunc.induction import audit_recurrences, recurrence_for, threshold_A
from quadfunc.quadform import AbcdQuad, abcd_instance, representations
from quadfunc.solve import elimination_target, solve_base

A_, B_ = ALPHA, BETA


@contextmanager
def criterion(number, title, budget_s=None):
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        if budget_s is not None:
            assert elapsed < budget_s, f"took {elapsed:.2f} s, budget {budget_s} s"
    except BaseException:
        print(f"\ncriterion {number} FAIL  {title}")
        raise
    print(f"\ncriterion {number} PASS  {title} ({time.perf_counter() - t0:.2f} s)")


def cli_json(capsys, *argv):
    code = main([*argv, "--format", "json", "--no-cache"])
    return code, json.loads(capsys.readouterr().out)


def F(payload):
    return {e["n"]: Poly2.parse(e["poly"]) for e in payload["expressions"]}


# --------------------------------------------------------------------------- #

K2 = {
    3: 9 * A_**2,
    4: (27 * A_**2 - 3 * A_ + 2 * B_) / 2,
    5: 27 * A_**2 - 2 * A_,
    6: 36 * A_**2 - 4 * A_ + B_,
}


@pytest.mark.criterion(1, "formula reproduction k=2")
def test_c1_formulas_k2(capsys):
    with criterion(1, "formula reproduction k=2", budget_s=1.0):
        code, payload = cli_json(capsys, "derive", "--k", "2", "--target", "6")
        assert code == 0
        got = F(payload)
        for n, want in K2.items():
            assert got[n] == want, (n, str(got[n]), str(want))


def _lin(b, a, d=1):
    return (b * B_ - a * A_) / d


SHARED = {3: _lin(8, 5, 3), 4: _lin(5, 4), 5: _lin(8, 7), 6: _lin(35, 32, 3), 7: _lin(16, 15)}
EXTRA = {
    3: {},
    4: {8: _lin(21, 20)},
    5: {8: _lin(21, 20), 9: _lin(80, 77, 3), 10: _lin(33, 32)},
}
TARGET = {3: 7, 4: 8, 5: 10}


@pytest.mark.criterion(2, "formula reproduction k=3,4,5 and cross-k agreement")
def test_c2_formulas_k345(capsys):
    with criterion(2, "formula reproduction k=3,4,5 and cross-k agreement", budget_s=5.0):
        tables = {}
        for k in (3, 4, 5):
            code, payload = cli_json(capsys, "derive", "--k", str(k), "--target", str(TARGET[k]))
            assert code == 0
            tables[k] = F(payload)
            for n, want in {**SHARED, **EXTRA[k]}.items():
                assert tables[k][n] == want, (k, n, str(tables[k][n]))
        for n in SHARED:
            assert tables[3][n] == tables[4][n] == tables[5][n]
        assert tables[4][8] == tables[5][8]


ELIMINANTS = {
    2: Poly1.x() * (Poly1.x() - 1) * (9 * Poly1.x() - 1) * (15 * Poly1.x() - 4),
    3: Poly1.x() * (Poly1.x() - 1) * (16 * Poly1.x() - 1) * (16 * Poly1.x() + 25),
    4: Poly1.x() * (Poly1.x() - 1) * (25 * Poly1.x() - 1) * (5 * Poly1.x() + 8),
    5: Poly1.x() * (Poly1.x() - 1) * (36 * Poly1.x() - 1) * (36 * Poly1.x() + 175),
}
SPURIOUS = {
    2: ["4/15", "-17/15"],
    3: ["-25/16", "105/16"],
    4: ["-8/5", "33/5"],
    5: ["-175/36", "2465/36"],
}


@pytest.mark.criterion(3, "base solving k=2..5")
@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_c3_solve_base(capsys, k):
    with criterion(3, f"base solving k={k}", budget_s=10.0):
        code, rep = cli_json(capsys, "solve-base", "--k", str(k))
        assert code == 0 and rep["status"] == "resolved"
        assert rep["f1_values"] == ["0", "±1", f"±1/{k + 1}"]
        assert [r["candidate"] for r in rep["rejected"]] == [SPURIOUS[k]]
        w = rep["rejected"][0]["witness"]
        assert Fr(w["value"]) != 0
        a, b = (Fr(x) for x in SPURIOUS[k])
        assert Poly2.parse(w["expr"]).eval(a, b) == Fr(w["value"])
        # the report's eliminant must equal the known factorization up to a scalar
        assert solve_base(k).eliminant.primitive() == ELIMINANTS[k].primitive()


@pytest.mark.criterion(4, "family verification k=1..10, umax=300, three sign policies, mutations")
def test_c4_families():
    with criterion(4, "family verification and mutation detection", budget_s=30.0):
        runs = mutations = 0
        for k in range(1, 11):
            for kind in FamilyKind:
                for policy in (SignPolicy.all_plus(), SignPolicy.all_minus(), SignPolicy.seeded(2024)):
                    fam = Family(kind, k, policy)
                    res = verify_family(fam, 300)
                    assert res.passed and res.pairs_checked == 90_000, res.to_dict()
                    runs += 1
                    for n in (1, 2, k + 1, 7, 299):
                        bad = fam.with_overrides({n: abs(family_value(fam, n)) + 1})
                        r = verify_family(bad, 300)
                        assert not r.passed and r.first_failure is not None, (k, kind, n)
                        ff = r.first_failure
                        u, v = int(ff["u"]), int(ff["v"])
                        lhs = family_value(bad, u * u + k * v * v)
                        assert lhs != family_value(bad, u) ** 2 + k * family_value(bad, v) ** 2
                        mutations += 1
        assert runs == 90 and mutations == 450


@pytest.mark.criterion(5, "induction audit k=2..50, spot checks k=2..20")
def test_c5_induction_audit():
    with criterion(5, "induction audit", budget_s=10.0):
        for k in range(2, 51):
            audit = audit_recurrences(k, spot=500 if k <= 20 else 0)
            assert audit.passed
            assert all(c.residual_zero and c.residual == "0" for c in audit.cases)
        for k in range(2, 21):
            A = threshold_A(k)
            for n in range(A + 1, A + 501):
                assert recurrence_for(k, n).identity_holds()


@pytest.mark.criterion(6, "certification k=2..5; k=6,7 complete")
def test_c6_certify(capsys):
    with criterion(6, "certification"):
        for k in (2, 3, 4, 5):
            code, cert = cli_json(capsys, "certify", "--k", str(k))
            assert code == 0 and cert["verdict"] == "Certified", cert["reasons"]
            assert sorted(b["family"] for b in cert["base_classification"]) == ["linear", "reciprocal", "zero"]
        outcomes = {}
        for k in (6, 7):
            code, cert = cli_json(capsys, "certify", "--k", str(k))
            assert code in (0, 2)
            if code == 0:
                assert cert["verdict"] == "Certified"
            else:
                assert cert["verdict"] == "Failed" and cert["reasons"]
                assert cert.get("unresolved_report") or cert["solution_status"] == "unresolved"
            outcomes[k] = cert["verdict"]
        with capsys.disabled():
            print("\n  k=6,7 outcomes (recorded, not asserted):", outcomes)


@pytest.mark.criterion(7, "abcd identity on 10,000 quadruples; enumeration vs double loop")
def test_c7_identity_and_enumeration():
    with criterion(7, "abcd identity and enumeration oracle"):
        rng = random.Random(20240607)
        seen = 0
        while seen < 10_000:
            a, b, c, d = (rng.randint(1, 50) for _ in range(4))
            k = rng.randint(1, 12)
            q = AbcdQuad(a, b, c, d, k)
            if not (a * b - k * c * d > 0 and a * d - b * c > 0):
                continue
            left, right = abcd_instance(q)
            assert (a * b + k * c * d) ** 2 + k * (a * d - b * c) ** 2 == (a * b - k * c * d) ** 2 + k * (a * d + b * c) ** 2
            assert left.n == right.n
            seen += 1
        N = 10_000
        for k in range(2, 10):
            brute = {}
            for u in range(1, 101):
                for v in range(1, 101):
                    n = u * u + k * v * v
                    if n <= N:
                        brute.setdefault(n, []).append((u, v))
            for n in range(1, N + 1):
                assert [(r.u, r.v) for r in representations(k, n)] == sorted(brute.get(n, [])), (k, n)


@pytest.mark.criterion(8, "cross-evaluation at the three genuine points")
@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_c8_cross_evaluation(k):
    with criterion(8, f"cross-evaluation k={k}"):
        table, _ = derive_expressions(k, elimination_target(k))
        c = Fr(1, (k + 1) ** 2)
        values = {**table.support, **table.exprs}
        assert len(values) >= elimination_target(k)
        for n, p in values.items():
            assert p.eval(1, 4) == n * n
            assert p.eval(c, c) == c
            assert p.eval(0, 0) == 0
