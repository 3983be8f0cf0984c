"""Brute-force reference computations, independent of the code under test.

Subspaces here are frozensets of vector codes built by repeatedly adjoining a
vector to a smaller subspace; no row reduction, ranking or formula is used.
"""

import itertools
from functools import lru_cache

from qpool import gf


class VectorSpace:
    def __init__(self, q, n):
        self.q, self.n = q, n
        F = gf.field_make(q)
        self.vectors = list(itertools.product(range(q), repeat=n))
        self.code = {v: t for t, v in enumerate(self.vectors)}
        self.add = [[self.code[tuple(gf.add(F, a, b) for a, b in zip(u, v))]
                     for v in self.vectors] for u in self.vectors]
        self.smul = [[self.code[tuple(gf.mul(F, c, a) for a in v)] for v in self.vectors]
                     for c in range(q)]
        self.zero = self.code[(0,) * n]

    def adjoin(self, sub, v):
        return frozenset(self.add[s][self.smul[c][v]] for s in sub for c in range(self.q))

    def span(self, codes):
        sub = frozenset([self.zero])
        for v in codes:
            sub = self.adjoin(sub, v)
        return sub


@lru_cache(maxsize=None)
def space(q, n):
    return VectorSpace(q, n)


@lru_cache(maxsize=None)
def subspaces(q, n):
    """dim -> set of all subspaces (as frozensets of codes)."""
    V = space(q, n)
    levels = [{frozenset([V.zero])}]
    for _ in range(n):
        nxt = set()
        for sub in levels[-1]:
            covered = set(sub)
            for v in range(len(V.vectors)):
                if v not in covered:
                    sup = V.adjoin(sub, v)
                    covered |= sup
                    nxt.add(sup)
        levels.append(nxt)
    return levels


def dim_of(q, sub):
    d, size = 0, 1
    while size < len(sub):
        size *= q
        d += 1
    assert size == len(sub)
    return d


def min_private_bruteforce(dense_cols, s):
    """dense_cols: list of frozensets of row indices."""
    best = None
    for c, col in enumerate(dense_cols):
        others = [j for j in range(len(dense_cols)) if j != c]
        for cov in itertools.combinations(others, s):
            union = set().union(*(dense_cols[j] for j in cov))
            cnt = len(col - union)
            if best is None or cnt < best:
                best = cnt
    return best
