"""Subspaces of F_q^n in canonical reduced row echelon form.

Ordering ("rref-rank-v1"): pivot sets in lexicographic order of their sorted
0-based index tuples; inside one pivot set (a Schubert cell) the free entries,
scanned row-major, are read as a base-q number with the first-scanned entry
most significant.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence

from .errors import DimensionMismatch, IndexOutOfRange
from .gf import FieldSpec


@dataclass(frozen=True)
class Subspace:
    spec: FieldSpec
    n: int
    mat: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def vectors(self) -> Iterator[tuple[int, ...]]:
        """All q**dim vectors of the subspace (brute force, small cases only)."""
        add, mul = self.spec.tables[:2]
        for coeffs in itertools.product(range(self.spec.q), repeat=self.dim):
            v = [0] * self.n
            for c, row in zip(coeffs, self.mat):
                if c:
                    v = [add[a][mul[c][b]] for a, b in zip(v, row)]
            yield tuple(v)

    def __repr__(self):
        return f"Subspace(q={self.spec.q}, n={self.n}, mat={list(map(list, self.mat))})"


def _reduce(spec, n, rows):
    add, mul, neg, inv = spec.tables
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        if r == len(m):
            break
        piv = next((t for t in range(r, len(m)) if m[t][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        iv = inv[m[r][c]]
        m[r] = [mul[iv][x] for x in m[r]]
        for t in range(len(m)):
            if t != r and m[t][c]:
                f = neg[m[t][c]]
                m[t] = [add[a][mul[f][b]] for a, b in zip(m[t], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rref(spec: FieldSpec, n: int, rows: Sequence[Sequence[int]]) -> Subspace:
    """Canonical subspace spanned by ``rows``."""
    for row in rows:
        if len(row) != n:
            raise DimensionMismatch(f"vector of length {len(row)} in F_q^{n}")
        if any(not 0 <= x < spec.q for x in row):
            raise ValueError(f"entry outside F_{spec.q} in {tuple(row)}")
    mat, pivots = _reduce(spec, n, rows)
    return Subspace(spec, n, tuple(map(tuple, mat)), tuple(pivots))


def zero_subspace(spec: FieldSpec, n: int) -> Subspace:
    return Subspace(spec, n, (), ())


def _same_space(a, b):
    if a.spec != b.spec or a.n != b.n:
        raise DimensionMismatch(f"F_{a.spec.q}^{a.n} vs F_{b.spec.q}^{b.n}")


def intersect_dim(a: Subspace, b: Subspace) -> int:
    _same_space(a, b)
    _, piv = _reduce(a.spec, a.n, a.mat + b.mat)
    return a.dim + b.dim - len(piv)


def contains(a: Subspace, b: Subspace) -> bool:
    """True iff a is a subspace of b."""
    return intersect_dim(a, b) == a.dim


def intersection(a: Subspace, b: Subspace) -> Subspace:
    """a ∩ b via the Zassenhaus algorithm."""
    _same_space(a, b)
    n = a.n
    zero = (0,) * n
    stacked = [row + row for row in a.mat] + [row + zero for row in b.mat]
    mat, _ = _reduce(a.spec, 2 * n, stacked)
    basis = [row[n:] for row in mat if not any(row[:n])]
    return rref(a.spec, n, basis)


class Cell(NamedTuple):
    pivots: tuple[int, ...]
    free: tuple[tuple[int, int], ...]  # (row, column) in scan order
    offset: int  # rank of the first subspace in the cell
    size: int  # q ** len(free)


@lru_cache(maxsize=256)
def cells(q: int, n: int, k: int) -> tuple[Cell, ...]:
    """Schubert cells of G(n, k) over F_q, in rref-rank-v1 order."""
    out = []
    offset = 0
    for pivots in itertools.combinations(range(n), k):
        pset = set(pivots)
        free = tuple((t, c) for t, p in enumerate(pivots)
                     for c in range(p + 1, n) if c not in pset)
        size = q ** len(free)
        out.append(Cell(pivots, free, offset, size))
        offset += size
    return tuple(out)


@lru_cache(maxsize=256)
def _cell_index(q, n, k):
    cs = cells(q, n, k)
    return {c.pivots: idx for idx, c in enumerate(cs)}, [c.offset for c in cs]


def count(q: int, n: int, k: int) -> int:
    cs = cells(q, n, k)
    return cs[-1].offset + cs[-1].size if cs else 0


def _subspace_from_cell(spec, n, cell, x):
    k = len(cell.pivots)
    mat = [[0] * n for _ in range(k)]
    for t, p in enumerate(cell.pivots):
        mat[t][p] = 1
    for t, c in reversed(cell.free):
        x, mat[t][c] = divmod(x, spec.q)
    return Subspace(spec, n, tuple(map(tuple, mat)), cell.pivots)


def enumerate_subspaces(spec: FieldSpec, n: int, k: int,
                        worker: int = 0, workers: int = 1) -> Iterator[Subspace]:
    """Stream every k-dim subspace once, in rank order.

    With ``workers > 1`` only ranks congruent to ``worker`` mod ``workers`` are
    produced.
    """
    if not 0 <= k <= n:
        return
    rank_ = 0
    for cell in cells(spec.q, n, k):
        for x in range(cell.size):
            if rank_ % workers == worker:
                yield _subspace_from_cell(spec, n, cell, x)
            rank_ += 1


def rank(sub: Subspace) -> int:
    index, _ = _cell_index(sub.spec.q, sub.n, sub.dim)
    cell = cells(sub.spec.q, sub.n, sub.dim)[index[sub.pivots]]
    x = 0
    for t, c in cell.free:
        x = x * sub.spec.q + sub.mat[t][c]
    return cell.offset + x


def unrank(spec: FieldSpec, n: int, k: int, index: int) -> Subspace:
    total = count(spec.q, n, k)
    if not 0 <= index < total:
        raise IndexOutOfRange(f"rank {index} outside [0, {total})")
    _, offsets = _cell_index(spec.q, n, k)
    ci = bisect.bisect_right(offsets, index) - 1
    cell = cells(spec.q, n, k)[ci]
    return _subspace_from_cell(spec, n, cell, index - cell.offset)


def normalized_coefficients(q: int, k: int) -> list[tuple[int, ...]]:
    """Coefficient vectors of F_q^k whose first nonzero entry is 1 (one per point)."""
    out = []
    for lead in range(k):
        for tail in itertools.product(range(q), repeat=k - lead - 1):
            out.append((0,) * lead + (1,) + tail)
    return out
