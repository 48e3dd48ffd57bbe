import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadfunc.quadform import (
    AbcdQuad,
    Representation,
    SideConditionError,
    abcd_instance,
    check_k,
    collisions,
    is_representable,
    representable_mask,
    representation_counts,
    representations,
)


def brute(k, n):
    r = math.isqrt(n) + 1
    return [(u, v) for u in range(1, r) for v in range(1, r) if u * u + k * v * v == n]


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_representations_match_double_loop_small(k):
    for n in range(1, 400):
        assert [(r.u, r.v) for r in representations(k, n)] == brute(k, n)


def test_representations_known_values():
    assert representations(4, 100) == [Representation(6, 4, 100), Representation(8, 3, 100)]
    assert [(r.u, r.v) for r in representations(3, 112)] == [(2, 6), (8, 4), (10, 2)]
    assert representations(2, 5) == []
    assert is_representable(2, 3) and not is_representable(2, 5)


def test_counts_agree_with_enumeration():
    for k in (1, 2, 7):
        counts = representation_counts(k, 3000)
        assert all(counts[n] == len(representations(k, n)) for n in range(1, 3001))
        assert counts[0] == 0


def test_counts_are_read_only():
    c = representation_counts(2, 50)
    with pytest.raises(ValueError):
        c[3] = 9


def test_mask():
    m = representable_mask(2, 20)
    assert [n for n in range(21) if m[n]] == [3, 6, 9, 11, 12, 17, 18, 19]


def test_collisions_k4_and_k2():
    ns = [n for n, _ in collisions(4, 300)]
    assert {100, 104, 125, 200, 265} <= set(ns)
    assert collisions(2, 10) == []
    n, reps = collisions(3, 112, nmin=112)[0]
    assert n == 112 and len(reps) == 3


def test_check_k():
    assert check_k(3) == 3
    with pytest.raises(ValueError):
        check_k(0)
    with pytest.raises(ValueError):
        check_k(1, allow_one=False)
    with pytest.raises(TypeError):
        check_k(2.0)
    with pytest.raises(TypeError):
        check_k(True)


def test_abcd_side_conditions():
    with pytest.raises(SideConditionError):
        AbcdQuad(1, 1, 1, 1, 2).check()  # ab - kcd < 0
    with pytest.raises(SideConditionError):
        AbcdQuad(3, 2, 2, 1, 1).check()  # ad - bc < 0
    with pytest.raises(SideConditionError):
        AbcdQuad(0, 2, 1, 1, 1).check()


def test_abcd_worked_example():
    # (a, b, c, d) = (3, 2, 1, 1), k=2: 66 = 8^2 + 2*1^2 = 4^2 + 2*5^2
    left, right = abcd_instance(AbcdQuad(3, 2, 1, 1, 2))
    assert left == Representation(8, 1, 66)
    assert right == Representation(4, 5, 66)


quads = st.builds(
    AbcdQuad,
    st.integers(1, 50),
    st.integers(1, 50),
    st.integers(1, 50),
    st.integers(1, 50),
    st.integers(1, 12),
).filter(lambda q: q.a * q.b > q.k * q.c * q.d and q.a * q.d > q.b * q.c)


@settings(max_examples=300, deadline=None)
@given(quads)
def test_abcd_identity_property(q):
    left, right = abcd_instance(q)
    assert left.n == right.n
    assert left in representations(q.k, left.n)
    assert right in representations(q.k, right.n)
