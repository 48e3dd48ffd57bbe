"""Exact rational scalars and sparse polynomials in alpha = f(1)^2, beta = f(2)^2.

Scalars are :class:`fractions.Fraction`.  Two polynomial carriers are provided:

* :class:`Poly2` -- sparse polynomial in ``alpha`` and ``beta``.
* :class:`Poly1` -- sparse univariate polynomial (``alpha`` by default; the
  induction module reuses it with the variable ``l``).

Both are immutable, hashable and canonicalised on construction (no stored
zero coefficients), so ``==`` is exact polynomial equality.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

BigRat = Fraction
Scalar = Union[int, Fraction]

__all__ = [
    "BigRat",
    "Poly1",
    "Poly2",
    "DegreeError",
    "ZeroPolynomialError",
    "solve_linear_in_beta",
    "substitute_beta",
    "rational_roots",
    "integer_divisors",
    "poly_gcd",
    "poly_from_roots",
]


class DegreeError(ValueError):
    """Polynomial does not have the degree an operation requires."""


class ZeroPolynomialError(ValueError):
    """Operation is undefined on the zero polynomial."""


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"exact rational expected, got {type(c).__name__}")


def _fmt_coeff_term(c: Fraction, mono: str, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    a = -c if c < 0 else c
    if mono:
        body = mono if a == 1 else f"{a}*{mono}"
    else:
        body = str(a)
    if first:
        return ("-" + body) if sign == "-" else body
    return f" {sign} {body}"


def _rat_content(values: Iterable[Fraction]) -> Fraction:
    g = 0
    lcm = 1
    for v in values:
        g = math.gcd(g, v.numerator)
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    return Fraction(g, lcm)


def _fmt_power(var: str, e: int) -> str:
    if e == 0:
        return ""
    return var if e == 1 else f"{var}^{e}"


# --------------------------------------------------------------------------- #
# Poly1
# --------------------------------------------------------------------------- #


class Poly1:
    """Sparse univariate polynomial with exact rational coefficients."""

    __slots__ = ("_c", "var", "_hash")

    def __init__(self, coeffs: Optional[Mapping[int, Scalar]] = None, var: str = "alpha"):
        c: Dict[int, Fraction] = {}
        if coeffs:
            for e, v in coeffs.items():
                if e < 0:
                    raise ValueError("negative exponent")
                v = _frac(v)
                if v:
                    c[int(e)] = v
        self._c = c
        self.var = var
        self._hash = None

    # construction -------------------------------------------------------- #
    @classmethod
    def const(cls, c: Scalar, var: str = "alpha") -> "Poly1":
        return cls({0: c}, var)

    @classmethod
    def x(cls, var: str = "alpha") -> "Poly1":
        return cls({1: 1}, var)

    @classmethod
    def from_list(cls, coeffs: Iterable[Scalar], var: str = "alpha") -> "Poly1":
        """Build from ascending coefficient list ``[c0, c1, ...]``."""
        return cls(dict(enumerate(coeffs)), var)

    @classmethod
    def _raw(cls, c: Dict[int, Fraction], var: str) -> "Poly1":
        p = cls.__new__(cls)
        p._c = c
        p.var = var
        p._hash = None
        return p

    # inspection ---------------------------------------------------------- #
    @property
    def coeffs(self) -> Dict[int, Fraction]:
        return dict(self._c)

    def coeff(self, e: int) -> Fraction:
        return self._c.get(e, Fraction(0))

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int:
        """Degree; the zero polynomial reports -1."""
        return max(self._c) if self._c else -1

    def leading(self) -> Fraction:
        if not self._c:
            return Fraction(0)
        return self._c[max(self._c)]

    def low_order(self) -> int:
        return min(self._c) if self._c else 0

    def is_constant(self) -> bool:
        return not self._c or set(self._c) == {0}

    # arithmetic ---------------------------------------------------------- #
    def _coerce(self, other) -> "Poly1":
        if isinstance(other, Poly1):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly1.const(other, self.var)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for e, v in other._c.items():
            s = c.get(e, 0) + v
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return Poly1._raw(c, self.var)

    __radd__ = __add__

    def __neg__(self):
        return Poly1._raw({e: -v for e, v in self._c.items()}, self.var)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly1._raw({}, self.var)
            return Poly1._raw({e: v * other for e, v in self._c.items()}, self.var)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c: Dict[int, Fraction] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                c[e1 + e2] = c.get(e1 + e2, 0) + v1 * v2
        return Poly1(c, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of polynomial by zero")
            return self * (Fraction(1) / other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Poly1.const(1, self.var)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, x: Scalar) -> Fraction:
        return self.eval(x)

    def eval(self, x: Scalar) -> Fraction:
        x = _frac(x)
        if not self._c:
            return Fraction(0)
        acc = Fraction(0)
        for e in range(self.degree(), -1, -1):
            acc = acc * x + self._c.get(e, 0)
        return acc

    def divmod(self, other: "Poly1") -> Tuple["Poly1", "Poly1"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = dict(self._c)
        q: Dict[int, Fraction] = {}
        dd = other.degree()
        lc = other.leading()
        while r and max(r) >= dd:
            e = max(r)
            t = r[e] / lc
            q[e - dd] = t
            for e2, v2 in other._c.items():
                s = r.get(e - dd + e2, 0) - t * v2
                if s:
                    r[e - dd + e2] = s
                else:
                    r.pop(e - dd + e2, None)
        return Poly1(q, self.var), Poly1(r, self.var)

    def shift_scale(self, a: Scalar, b: Scalar) -> "Poly1":
        """Compose with ``a*x + b``."""
        lin = Poly1({1: a, 0: b}, self.var)
        acc = Poly1({}, self.var)
        for e in range(self.degree(), -1, -1):
            acc = acc * lin + self._c.get(e, 0)
        return acc

    # normalisation ------------------------------------------------------- #
    def content(self) -> Fraction:
        """Positive rational content: gcd of numerators over lcm of denominators."""
        return _rat_content(self._c.values())

    def primitive(self) -> "Poly1":
        """Integer coefficients with gcd 1 and positive leading coefficient."""
        if not self._c:
            return self
        c = self.content()
        if self.leading() < 0:
            c = -c
        return self / c

    def integer_coeffs(self) -> List[int]:
        """Ascending integer coefficients of the primitive form."""
        p = self.primitive()
        return [int(p.coeff(e)) for e in range(p.degree() + 1)]

    # dunder -------------------------------------------------------------- #
    def __eq__(self, other):
        if isinstance(other, Poly1):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("Poly1", frozenset(self._c.items())))
        return self._hash

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for i, e in enumerate(sorted(self._c, reverse=True)):
            parts.append(_fmt_coeff_term(self._c[e], _fmt_power(self.var, e), i == 0))
        return "".join(parts)

    def __repr__(self):
        return f"Poly1({self})"

    def to_poly2(self) -> "Poly2":
        if self.var == "beta":
            return Poly2({(0, e): v for e, v in self._c.items()})
        return Poly2({(e, 0): v for e, v in self._c.items()})


# --------------------------------------------------------------------------- #
# Poly2
# --------------------------------------------------------------------------- #

Mono = Tuple[int, int]


def _mono_key(m: Mono) -> Tuple[int, int]:
    # graded lexicographic with alpha > beta
    return (m[0] + m[1], m[0])


class Poly2:
    """Sparse polynomial in ``alpha`` and ``beta`` over the rationals.

    Terms map ``(i, j)`` -> coefficient of ``alpha^i * beta^j``.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Optional[Mapping[Mono, Scalar]] = None):
        t: Dict[Mono, Fraction] = {}
        if terms:
            for (i, j), v in terms.items():
                if i < 0 or j < 0:
                    raise ValueError("negative exponent")
                v = _frac(v)
                if v:
                    key = (int(i), int(j))
                    s = t.get(key, 0) + v
                    if s:
                        t[key] = s
                    else:
                        t.pop(key, None)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t: Dict[Mono, Fraction]) -> "Poly2":
        p = cls.__new__(cls)
        p._t = t
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Scalar) -> "Poly2":
        return cls({(0, 0): c})

    @classmethod
    def zero(cls) -> "Poly2":
        return cls._raw({})

    @classmethod
    def alpha(cls) -> "Poly2":
        return cls({(1, 0): 1})

    @classmethod
    def beta(cls) -> "Poly2":
        return cls({(0, 1): 1})

    # inspection ---------------------------------------------------------- #
    @property
    def terms(self) -> Dict[Mono, Fraction]:
        return dict(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def degree(self) -> int:
        """Total degree (zero polynomial: -1)."""
        return max((i + j for i, j in self._t), default=-1)

    def degree_alpha(self) -> int:
        return max((i for i, _ in self._t), default=-1)

    def degree_beta(self) -> int:
        return max((j for _, j in self._t), default=-1)

    def coeff_beta(self, j: int) -> Poly1:
        """Coefficient of ``beta^j`` as a polynomial in alpha."""
        return Poly1({i: v for (i, jj), v in self._t.items() if jj == j})

    def leading_term(self) -> Tuple[Mono, Fraction]:
        if not self._t:
            raise ZeroPolynomialError("zero polynomial has no leading term")
        m = max(self._t, key=_mono_key)
        return m, self._t[m]

    # arithmetic ---------------------------------------------------------- #
    @staticmethod
    def _coerce(other) -> "Poly2":
        if isinstance(other, Poly2):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly2.const(other)
        if isinstance(other, Poly1):
            return other.to_poly2()
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        for m, v in other._t.items():
            s = t.get(m, 0) + v
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return Poly2._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return Poly2._raw({m: -v for m, v in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        for m, v in other._t.items():
            s = t.get(m, 0) - v
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return Poly2._raw(t)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "Poly2":
        if not c:
            return Poly2._raw({})
        return Poly2._raw({m: v * c for m, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: Dict[Mono, Fraction] = {}
        for (i1, j1), v1 in self._t.items():
            for (i2, j2), v2 in other._t.items():
                m = (i1 + i2, j1 + j2)
                t[m] = t.get(m, 0) + v1 * v2
        return Poly2(t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of polynomial by zero")
            return self.scale(Fraction(1) / other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Poly2.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def eval(self, alpha: Scalar, beta: Scalar) -> Fraction:
        a = _frac(alpha)
        b = _frac(beta)
        acc = Fraction(0)
        for (i, j), v in self._t.items():
            acc += v * a**i * b**j
        return acc

    def at_alpha(self, alpha: Scalar) -> Poly1:
        """Fix alpha; the result is a polynomial in beta."""
        a = _frac(alpha)
        c: Dict[int, Fraction] = {}
        for (i, j), v in self._t.items():
            c[j] = c.get(j, 0) + v * a**i
        return Poly1(c, "beta")

    # normalisation ------------------------------------------------------- #
    def content(self) -> Fraction:
        return _rat_content(self._t.values())

    def primitive(self) -> "Poly2":
        """Integer content 1, positive coefficient on the grlex-leading term."""
        if not self._t:
            return self
        c = self.content()
        if self.leading_term()[1] < 0:
            c = -c
        return self.scale(1 / c)

    # dunder -------------------------------------------------------------- #
    def __eq__(self, other):
        if isinstance(other, Poly2):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == ({(0, 0): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("Poly2", frozenset(self._t.items())))
        return self._hash

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for idx, m in enumerate(sorted(self._t, key=_mono_key, reverse=True)):
            mono = "*".join(x for x in (_fmt_power("alpha", m[0]), _fmt_power("beta", m[1])) if x)
            parts.append(_fmt_coeff_term(self._t[m], mono, idx == 0))
        return "".join(parts)

    def __repr__(self):
        return f"Poly2({self})"

    @classmethod
    def parse(cls, text: str) -> "Poly2":
        """Inverse of ``str``: parse a canonical rendering back into a Poly2."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls.zero()
        if s[0] not in "+-":
            s = "+" + s
        terms: Dict[Mono, Fraction] = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", s):
            coeff = Fraction(1)
            i = j = 0
            for factor in body.split("*"):
                m = re.fullmatch(r"(alpha|beta)(?:\^(\d+))?", factor)
                if m:
                    e = int(m.group(2) or 1)
                    if m.group(1) == "alpha":
                        i += e
                    else:
                        j += e
                else:
                    coeff *= Fraction(factor)
            if sign == "-":
                coeff = -coeff
            terms[(i, j)] = terms.get((i, j), 0) + coeff
        return cls(terms)


ALPHA = Poly2.alpha()
BETA = Poly2.beta()


# --------------------------------------------------------------------------- #
# elimination
# --------------------------------------------------------------------------- #


def solve_linear_in_beta(p: Poly2) -> Tuple[Tuple[Poly1, Poly1], List[Fraction]]:
    """Solve ``p = 0`` for beta when p is linear in beta.

    Returns ``((N, D), excluded)`` with ``beta = N(alpha) / D(alpha)`` wherever
    ``D != 0``.  ``excluded`` lists the rational roots of D; callers branch on
    those separately.  A constant D is divided out (D becomes 1).
    """
    if p.degree_beta() != 1:
        raise DegreeError(f"expected degree 1 in beta, got {p.degree_beta()}")
    den = p.coeff_beta(1)
    num = -p.coeff_beta(0)
    if den.is_constant():
        return (num / den.coeff(0), Poly1.const(1)), []
    # joint primitive scaling, positive leading coefficient on D
    g = _rat_content(list(num.coeffs.values()) + list(den.coeffs.values()))
    if den.leading() < 0:
        g = -g
    num, den = num / g, den / g
    roots, _ = rational_roots(den)
    return (num, den), [r for r, _ in roots]


def substitute_beta(p: Poly2, beta_expr: Tuple[Poly1, Poly1]) -> Poly1:
    """Substitute ``beta = N/D`` into p and clear denominators.

    Returns ``sum_j c_j(alpha) * N^j * D^(d - j)`` with d the beta-degree of p.
    """
    num, den = beta_expr
    if den.is_zero():
        raise ZeroDivisionError("beta denominator is identically zero")
    d = max(p.degree_beta(), 0)
    out = Poly1()
    for j in range(d + 1):
        cj = p.coeff_beta(j)
        if cj.is_zero():
            continue
        out = out + cj * num**j * den ** (d - j)
    return out


# --------------------------------------------------------------------------- #
# rational roots
# --------------------------------------------------------------------------- #

_TRIAL_LIMIT = 1_000_000


def _factorint(n: int) -> Dict[int, int]:
    n = abs(n)
    f: Dict[int, int] = {}
    if n < 2:
        return f
    for p in (2, 3):
        while n % p == 0:
            f[p] = f.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n and p <= _TRIAL_LIMIT:
        for q in (p, p + 2):
            while n % q == 0:
                f[q] = f.get(q, 0) + 1
                n //= q
        p += 6
    if n > 1:
        if n < _TRIAL_LIMIT**2:
            f[n] = f.get(n, 0) + 1
        else:  # large cofactor; rare for the eliminants this package builds
            from sympy import factorint

            for q, e in factorint(n).items():
                f[q] = f.get(q, 0) + e
    return f


def integer_divisors(n: int) -> List[int]:
    """Positive divisors of ``|n|`` in ascending order (``n != 0``)."""
    if n == 0:
        raise ValueError("0 has infinitely many divisors")
    divs = [1]
    for p, e in _factorint(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _deflate(coeffs: List[int], r: Fraction) -> List[int]:
    """Divide an integer polynomial (ascending) by ``(q x - p)`` exactly."""
    p, q = r.numerator, r.denominator
    # synthetic division from the top
    n = len(coeffs) - 1
    out = [0] * n
    carry = 0
    for e in range(n, 0, -1):
        c = coeffs[e] + carry
        if c % q:
            raise ArithmeticError("inexact deflation")
        out[e - 1] = c // q
        carry = out[e - 1] * p
    if coeffs[0] + carry != 0:
        raise ArithmeticError("not a root")
    return out


def rational_roots(p: Poly1) -> Tuple[List[Tuple[Fraction, int]], Poly1]:
    """All rational roots of p with multiplicities, plus the root-free residual.

    Uses the rational root theorem on the primitive integer form.  The product
    of ``(x - r)^m`` over the roots times the residual equals p up to a
    nonzero rational scalar; the residual is returned primitive.
    """
    if p.is_zero():
        raise ZeroPolynomialError("rational_roots of the zero polynomial")
    var = p.var
    coeffs = p.integer_coeffs()
    roots: List[Tuple[Fraction, int]] = []
    zero_mult = 0
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
        zero_mult += 1
    if zero_mult:
        roots.append((Fraction(0), zero_mult))
    if len(coeffs) > 1:
        a0, an = coeffs[0], coeffs[-1]
        f1 = sum(coeffs)
        fm1 = sum(c if e % 2 == 0 else -c for e, c in enumerate(coeffs))
        cands = set()
        for num in integer_divisors(a0):
            for den in integer_divisors(an):
                if math.gcd(num, den) != 1:
                    continue
                for s in (num, -num):
                    # (den - s) | f(1) and (den + s) | f(-1) for any root s/den
                    if den - s and f1 % (den - s):
                        continue
                    if den + s and fm1 % (den + s):
                        continue
                    cands.add(Fraction(s, den))
        for r in sorted(cands):
            m = 0
            while len(coeffs) > 1 and Poly1.from_list(coeffs).eval(r) == 0:
                coeffs = _deflate(coeffs, r)
                m += 1
            if m:
                roots.append((r, m))
    residual = Poly1.from_list(coeffs, var).primitive()
    roots.sort(key=lambda t: t[0])
    return roots, residual


def poly_gcd(p: Poly1, q: Poly1) -> Poly1:
    """Monic-free gcd over the rationals (primitive form; gcd(0, 0) = 0)."""
    while not q.is_zero():
        p, q = q, p.divmod(q)[1]
    return p.primitive()


def poly_from_roots(roots: Iterable[Tuple[Fraction, int]], var: str = "alpha") -> Poly1:
    out = Poly1.const(1, var)
    for r, m in roots:
        lin = Poly1({1: r.denominator, 0: -r.numerator}, var)
        out = out * lin**m
    return out
