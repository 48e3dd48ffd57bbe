# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: representation sieve and the functional-equation grid scan.

Mirrors :mod:`quadfunc._pykernels` exactly; the selector in
:mod:`quadfunc.kernels` picks this module when it was built.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def representation_counts(long long k, long long nmax):
    """Number of (u, v), u, v >= 1, with u^2 + k v^2 = n, for 0 <= n <= nmax."""
    cdef cnp.ndarray[cnp.int32_t, ndim=1] out = np.zeros(nmax + 1, dtype=np.int32)
    cdef cnp.int32_t[:] c = out
    cdef long long u, v, kv2, n
    v = 1
    while k * v * v + 1 <= nmax:
        kv2 = k * v * v
        u = 1
        n = kv2 + 1
        while n <= nmax:
            c[n] += 1
            u += 1
            n = kv2 + u * u
        v += 1
    return out


def first_grid_failure(const cnp.int64_t[:] num, long long denom, long long k, long long umax):
    """First (u, v) in lexicographic order with num[u^2+kv^2]*denom != num[u]^2 + k*num[v]^2.

    Values are ``num[n] / denom``; the caller guarantees no int64 overflow.
    Returns ``None`` when every pair in ``[1, umax]^2`` satisfies the equation.
    """
    cdef long long u, v, n, lhs, rhs, fu2
    for u in range(1, umax + 1):
        fu2 = num[u] * num[u]
        for v in range(1, umax + 1):
            n = u * u + k * v * v
            lhs = num[n] * denom
            rhs = fu2 + k * num[v] * num[v]
            if lhs != rhs:
                return (u, v)
    return None


def splitmix_signs(unsigned long long seed, long long nmax):
    """+1/-1 per n in [0, nmax] from a splitmix64 hash of (seed, n)."""
    cdef cnp.ndarray[cnp.int8_t, ndim=1] out = np.empty(nmax + 1, dtype=np.int8)
    cdef cnp.int8_t[:] o = out
    cdef unsigned long long z
    cdef long long n
    for n in range(nmax + 1):
        z = seed + <unsigned long long>n * 0x9E3779B97F4A7C15ULL
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
        z = z ^ (z >> 31)
        o[n] = 1 if (z >> 63) == 0 else -1
    return out
