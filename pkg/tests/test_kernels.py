import numpy as np
import pytest

from quadfunc import _pykernels
from quadfunc.families import Family, SignPolicy, value_array, verify_family


def test_representation_counts(backend):
    ref = _pykernels.representation_counts(3, 5000)
    got = np.asarray(backend.representation_counts(3, 5000))
    assert np.array_equal(got, ref)
    assert got[112] == 3 and got[4] == 1 and got[5] == 0


def test_counts_tiny_ranges(backend):
    assert list(backend.representation_counts(2, 0)) == [0]
    assert list(backend.representation_counts(2, 3)) == [0, 0, 0, 1]


def test_grid_failure_none_for_linear(backend):
    k, umax = 5, 40
    num = np.arange(umax * umax * (k + 1) + 1, dtype=np.int64)
    assert backend.first_grid_failure(num, 1, k, umax) is None


def test_grid_failure_is_lexicographically_first(backend):
    k, umax = 2, 30
    num = np.arange(umax * umax * (k + 1) + 1, dtype=np.int64)
    num[11] += 1  # 11 = 3^2 + 2*1^2
    expected = None
    for u in range(1, umax + 1):
        for v in range(1, umax + 1):
            if num[u * u + k * v * v] != num[u] ** 2 + k * num[v] ** 2:
                expected = (u, v)
                break
        if expected:
            break
    assert expected is not None
    assert backend.first_grid_failure(num, 1, k, umax) == expected


def test_grid_failure_with_denominator(backend):
    k, umax = 4, 25
    num = np.ones(umax * umax * (k + 1) + 1, dtype=np.int64)  # f = 1/5 everywhere
    assert backend.first_grid_failure(num, 5, k, umax) is None
    num[1] = -1
    assert backend.first_grid_failure(num, 5, k, umax) is None  # only squares of f(1) enter
    num[5] = -1
    assert backend.first_grid_failure(num, 5, k, umax) == (1, 1)


def test_splitmix_signs_agree(backend):
    ref = _pykernels.splitmix_signs(2024, 10000)
    got = np.asarray(backend.splitmix_signs(2024, 10000))
    assert np.array_equal(got, ref)
    assert set(np.unique(got)) == {-1, 1}
    # roughly balanced
    assert abs(int(got.sum())) < 600


def test_pure_python_switch(pure_python):
    assert pure_python.BACKEND == "python"
    fam = Family("reciprocal", 3, SignPolicy.seeded(4))
    res = verify_family(fam, 60)
    assert res.passed and res.backend == "python"
    broken = verify_family(fam.with_overrides({2: 1}), 60)
    assert not broken.passed


def test_value_array_overflow_guard():
    fam = Family("linear", 2).with_overrides({3: 2**62})
    with pytest.raises(OverflowError):
        value_array(fam, 30)
