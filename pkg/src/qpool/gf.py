"""Arithmetic in the finite field F_q, q = p**e.

An element is an integer ``rep`` in ``[0, q)`` standing for the polynomial
sum(c_j x**j) over F_p with ``rep = sum(c_j p**j)``.  Extension fields reduce
products modulo a fixed monic irreducible polynomial, chosen as the
lexicographically smallest candidate (coefficient tuples compared from the
constant term upward), so every run builds the same field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import FieldDivisionByZero, NonPrimePower

# Above this order the element tables would be too large; ops fall back to
# polynomial arithmetic.
TABLE_LIMIT = 1 << 10


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``, or raise NonPrimePower."""
    if not isinstance(q, int) or q < 2:
        raise NonPrimePower(q)
    p = next(f for f in itertools.count(2) if q % f == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise NonPrimePower(q)
    return p, e


def is_prime_power(q) -> bool:
    try:
        prime_power(q)
    except NonPrimePower:
        return False
    return True


# -- polynomials over F_p, coefficient lists with constant term first --------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = _trim(list(a))
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        f = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for t, c in enumerate(m):
            a[shift + t] = (a[shift + t] - f * c) % p
        _trim(a)
    return a


def _is_irreducible(poly, p):
    deg = len(poly) - 1
    for dd in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=dd):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def _smallest_irreducible(p, e):
    # product() yields in lex order with slot 0 (the constant term) most significant
    for low in itertools.product(range(p), repeat=e):
        cand = low + (1,)
        if cand[0] != 0 and _is_irreducible(list(cand), p):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {e} over F_{p}")


@dataclass(frozen=True)
class FieldSpec:
    q: int
    p: int
    e: int
    modulus: tuple[int, ...] = field(compare=True)

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return out

    def from_digits(self, ds) -> int:
        rep = 0
        for c in reversed(ds):
            rep = rep * self.p + c
        return rep

    def _add(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        return self.from_digits([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def _mul(self, a, b):
        if self.e == 1:
            return a * b % self.p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.e - 1)
        for s, x in enumerate(da):
            if x:
                for t, y in enumerate(db):
                    prod[s + t] = (prod[s + t] + x * y) % self.p
        r = _poly_mod(prod, list(self.modulus), self.p)
        return self.from_digits(r + [0] * (self.e - len(r)))

    @cached_property
    def tables(self):
        """Python-list tables ``(add, mul, neg, inv)``; inv[0] is 0."""
        q = self.q
        add = [[self._add(a, b) for b in range(q)] for a in range(q)]
        mul = [[self._mul(a, b) for b in range(q)] for a in range(q)]
        neg = [row.index(0) for row in add]
        inv = [0] + [mul[a].index(1) for a in range(1, q)]
        return add, mul, neg, inv

    @cached_property
    def add_array(self) -> np.ndarray:
        return np.array(self.tables[0], dtype=np.int64)

    @cached_property
    def mul_array(self) -> np.ndarray:
        return np.array(self.tables[1], dtype=np.int64)

    @property
    def tabulated(self) -> bool:
        return self.q <= TABLE_LIMIT


@lru_cache(maxsize=None)
def field_make(q: int) -> FieldSpec:
    p, e = prime_power(q)
    if e == 1:
        return FieldSpec(q, p, 1, (0, 1))
    return FieldSpec(q, p, e, _smallest_irreducible(p, e))


def _check(spec, *xs):
    for x in xs:
        if not 0 <= x < spec.q:
            raise ValueError(f"{x} is not an element of F_{spec.q}")


def add(spec: FieldSpec, a: int, b: int) -> int:
    _check(spec, a, b)
    return spec.tables[0][a][b] if spec.tabulated else spec._add(a, b)


def mul(spec: FieldSpec, a: int, b: int) -> int:
    _check(spec, a, b)
    return spec.tables[1][a][b] if spec.tabulated else spec._mul(a, b)


def neg(spec: FieldSpec, a: int) -> int:
    _check(spec, a)
    if spec.tabulated:
        return spec.tables[2][a]
    return spec.from_digits([(-c) % spec.p for c in spec.digits(a)])


def sub(spec: FieldSpec, a: int, b: int) -> int:
    return add(spec, a, neg(spec, b))


def inv(spec: FieldSpec, a: int) -> int:
    _check(spec, a)
    if a == 0:
        raise FieldDivisionByZero(f"0 has no inverse in F_{spec.q}")
    if spec.tabulated:
        return spec.tables[3][a]
    # a**(q-2) by square-and-multiply
    result, base, k = 1, a, spec.q - 2
    while k:
        if k & 1:
            result = spec._mul(result, base)
        base = spec._mul(base, base)
        k >>= 1
    return result


def elements(spec: FieldSpec) -> range:
    return range(spec.q)
