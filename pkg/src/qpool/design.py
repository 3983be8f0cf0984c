"""Pooling-design construction and the matrix interchange formats.

All four designs share one incidence rule: a row object (subset or subspace)
and a column object meet the design iff they share exactly ``target`` points,
where points are ground-set elements for the set designs and 1-dimensional
subspaces for the q-designs.  :class:`IncidenceSource` streams rows and
columns as arrays of point codes without materializing the matrix;
:func:`materialize` turns a source into a column-major :class:`PoolingMatrix`.
"""

from __future__ import annotations

import bisect
import itertools
import json
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .combinatorics import binom, gaussian, q_int
from .errors import (
    ChecksumMismatch,
    HypothesisViolation,
    IndexOutOfRange,
    MalformedFile,
    ResourceBudgetExceeded,
    VersionMismatch,
)
from .gf import field_make
from .grassmannian import cells, normalized_coefficients, unrank, _cell_index

FAMILIES = ("q-containment", "q-intersection", "set-containment", "set-intersection")
FORMAT_V1 = "qpool-matrix/v1"
DEFAULT_BUDGET_BITS = 1 << 31
CHUNK_ROWS = 1 << 16


@dataclass(frozen=True)
class DesignParams:
    family: str
    n: int
    k: int
    d: int
    q: int | None = None
    i: int | None = None

    @property
    def is_q(self) -> bool:
        return self.family.startswith("q-")

    @property
    def is_intersection(self) -> bool:
        return self.family.endswith("-intersection")

    @property
    def target_dim(self) -> int:
        return self.i if self.is_intersection else self.d

    @property
    def order(self) -> str:
        return "rref-rank-v1" if self.is_q else "lex-subset-v1"

    def validate(self) -> "DesignParams":
        if self.family not in FAMILIES:
            raise HypothesisViolation(f"unknown family {self.family!r}")
        if self.is_q:
            if self.q is None:
                raise HypothesisViolation(f"family {self.family} requires q")
            field_make(self.q)
        elif self.q is not None:
            raise HypothesisViolation(f"family {self.family} takes no q")
        if not 1 <= self.d < self.k < self.n:
            raise HypothesisViolation(
                f"requires 1 <= d < k < n (got d={self.d}, k={self.k}, n={self.n})")
        if self.is_intersection:
            if self.i is None:
                raise HypothesisViolation(f"family {self.family} requires i")
            lo = max(0, self.d + self.k - self.n) if self.is_q else 0
            if not lo <= self.i <= self.d:
                raise HypothesisViolation(
                    f"requires {lo} <= i <= d (got i={self.i}, d={self.d})")
        elif self.i is not None:
            raise HypothesisViolation(f"family {self.family} takes no i")
        return self

    def to_dict(self) -> dict:
        out = {}
        if self.q is not None:
            out["q"] = self.q
        out.update(n=self.n, k=self.k, d=self.d)
        if self.i is not None:
            out["i"] = self.i
        return out

    def count(self, dim: int) -> int:
        return gaussian(self.q, self.n, dim) if self.is_q else binom(self.n, dim)

    @property
    def row_count(self) -> int:
        return self.count(self.d)

    @property
    def col_count(self) -> int:
        return self.count(self.k)

    def column_weight(self) -> int:
        """Ones per column, identical for every column."""
        n, k, d = self.n, self.k, self.d
        if not self.is_q:
            i = self.target_dim
            return binom(k, i) * binom(n - k, d - i)
        q, i = self.q, self.target_dim
        return gaussian(q, k, i) * q ** ((d - i) * (k - i)) * gaussian(q, n - k, d - i)


def unrank_subset(n: int, k: int, index: int) -> tuple[int, ...]:
    """The ``index``-th k-subset of range(n) in lexicographic order."""
    total = math.comb(n, k)
    if not 0 <= index < total:
        raise IndexOutOfRange(f"rank {index} outside [0, {total})")
    out = []
    x = 0
    for pos in range(k):
        while True:
            block = math.comb(n - x - 1, k - pos - 1)
            if index < block:
                break
            index -= block
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def rank_subset(n: int, subset) -> int:
    subset = sorted(subset)
    k = len(subset)
    r, prev = 0, -1
    for pos, x in enumerate(subset):
        for y in range(prev + 1, x):
            r += math.comb(n - y - 1, k - pos - 1)
        prev = x
    return r


class IncidenceSource:
    """Implicit design: row and column point codes on demand, rows streamed in rank order."""

    def __init__(self, params: DesignParams):
        self.params = params.validate()
        p = params
        self.row_count = p.row_count
        self.col_count = p.col_count
        if p.is_q:
            self.spec = field_make(p.q)
            self.ncodes = p.q ** p.n
            self.target = q_int(p.q, p.target_dim)
            self.row_points = q_int(p.q, p.d)
            self.col_points_n = q_int(p.q, p.k)
        else:
            self.spec = None
            self.ncodes = p.n
            self.target = p.target_dim
            self.row_points = p.d
            self.col_points_n = p.k

    # -- q-designs ---------------------------------------------------------
    def _cell_block(self, dim, cell, x0, cnt):
        q, n = self.params.q, self.params.n
        coeffs = np.array(normalized_coefficients(q, dim), dtype=np.int64).reshape(-1, dim)
        out = np.empty((cnt, coeffs.shape[0]), dtype=np.int32)
        free = np.array(cell.free, dtype=np.int64).reshape(-1, 2)
        _kernels.cell_points(q, n, np.array(cell.pivots, dtype=np.int64),
                             free[:, 0].copy(), free[:, 1].copy(), x0, cnt, coeffs,
                             self.spec.add_array, self.spec.mul_array, out)
        return out

    def _stream(self, dim, chunk):
        p = self.params
        if p.is_q:
            for cell in cells(p.q, p.n, dim):
                for x0 in range(0, cell.size, chunk):
                    cnt = min(chunk, cell.size - x0)
                    yield cell.offset + x0, self._cell_block(dim, cell, x0, cnt)
        else:
            combos = itertools.combinations(range(p.n), dim)
            first = 0
            while True:
                block = list(itertools.islice(combos, chunk))
                if not block:
                    return
                yield first, np.array(block, dtype=np.int32).reshape(len(block), dim)
                first += len(block)

    def row_chunks(self, chunk: int = CHUNK_ROWS) -> Iterator[tuple[int, np.ndarray]]:
        """Yield ``(first_rank, points)`` blocks of at least ``chunk`` rows (except the last)."""
        pending, first, size = [], 0, 0
        for start, pts in self._stream(self.params.d, chunk):
            if not pending:
                first = start
            pending.append(pts)
            size += len(pts)
            if size >= chunk:
                yield first, np.concatenate(pending)
                pending, size = [], 0
        if pending:
            yield first, np.concatenate(pending)

    def all_points(self, dim: int) -> np.ndarray:
        parts = [pts for _, pts in self._stream(dim, CHUNK_ROWS)]
        return np.concatenate(parts) if parts else np.empty((0, 0), dtype=np.int32)

    def col_points(self, ranks) -> np.ndarray:
        p = self.params
        out = np.empty((len(ranks), self.col_points_n), dtype=np.int32)
        for t, r in enumerate(ranks):
            r = int(r)
            if not 0 <= r < self.col_count:
                raise IndexOutOfRange(f"column rank {r} outside [0, {self.col_count})")
            if p.is_q:
                _, offsets = _cell_index(p.q, p.n, p.k)
                ci = bisect.bisect_right(offsets, r) - 1
                cell = cells(p.q, p.n, p.k)[ci]
                out[t] = self._cell_block(p.k, cell, r - cell.offset, 1)[0]
            else:
                out[t] = unrank_subset(p.n, p.k, r)
        return out

    def row_object(self, r: int):
        p = self.params
        return unrank(self.spec, p.n, p.d, r) if p.is_q else unrank_subset(p.n, p.d, r)

    def col_object(self, c: int):
        p = self.params
        return unrank(self.spec, p.n, p.k, c) if p.is_q else unrank_subset(p.n, p.k, c)


@dataclass(eq=False)
class PoolingMatrix:
    """Binary matrix stored column-major: ``columns[c]`` is the bitset of rows hit by column c."""

    params: DesignParams | None
    row_count: int
    col_count: int
    columns: np.ndarray

    @property
    def words(self) -> int:
        return self.columns.shape[1]

    def __eq__(self, other):
        if not isinstance(other, PoolingMatrix):
            return NotImplemented
        return (self.params == other.params and self.row_count == other.row_count
                and self.col_count == other.col_count
                and np.array_equal(self.columns, other.columns))

    def column_weights(self) -> np.ndarray:
        return np.bitwise_count(self.columns).sum(axis=1, dtype=np.int64)

    def ones(self) -> int:
        return int(self.column_weights().sum())

    def entry(self, r: int, c: int) -> int:
        return int(self.columns[c, r >> 6] >> np.uint64(r & 63)) & 1

    def column_rows(self, c: int) -> list[int]:
        return bitset_rows(self.columns[c], self.row_count)

    def to_dense(self) -> np.ndarray:
        """rows x cols boolean array."""
        raw = self.columns.astype("<u8").view(np.uint8)
        bits = np.unpackbits(raw, axis=1, bitorder="little")[:, : self.row_count]
        return bits.T.astype(bool)

    @classmethod
    def from_dense(cls, dense, params: DesignParams | None = None) -> "PoolingMatrix":
        dense = np.asarray(dense, dtype=bool)
        rows, cols = dense.shape
        words = max(1, -(-rows // 64))
        padded = np.zeros((cols, words * 64), dtype=np.uint8)
        padded[:, :rows] = dense.T
        packed = np.packbits(padded, axis=1, bitorder="little")
        return cls(params, rows, cols, packed.view("<u8").astype(np.uint64))


def bitset_rows(words: np.ndarray, row_count: int, limit: int | None = None) -> list[int]:
    bits = np.unpackbits(np.ascontiguousarray(words).astype("<u8").view(np.uint8),
                         bitorder="little")[:row_count]
    rows = np.flatnonzero(bits)
    return [int(r) for r in (rows if limit is None else rows[:limit])]


def _check_budget(rows, cols, budget):
    if rows * cols > budget:
        raise ResourceBudgetExceeded(rows, cols, budget)


def materialize(source: IncidenceSource, budget: int = DEFAULT_BUDGET_BITS,
                workers: int = 1) -> PoolingMatrix:
    rows, cols = source.row_count, source.col_count
    _check_budget(rows, cols, budget)
    p = source.params
    row_pts = source.all_points(p.d)
    col_pts = source.all_points(p.k)
    words = max(1, -(-rows // 64))
    out = np.zeros((cols, words), dtype=np.uint64)
    parts = [np.arange(w, cols, workers, dtype=np.int64) for w in range(workers)]

    def run(idx):
        _kernels.build_columns(row_pts, col_pts, idx, source.ncodes, source.target, out)

    if workers == 1:
        run(parts[0])
    else:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, parts))
    return PoolingMatrix(p, rows, cols, out)


def build(params: DesignParams, budget: int = DEFAULT_BUDGET_BITS, workers: int = 1) -> PoolingMatrix:
    params.validate()
    _check_budget(params.row_count, params.col_count, budget)
    return materialize(IncidenceSource(params), budget, workers)


def build_q_containment(q, d, k, n, budget=DEFAULT_BUDGET_BITS, workers=1):
    return build(DesignParams("q-containment", n, k, d, q=q), budget, workers)


def build_q_intersection(q, i, d, k, n, budget=DEFAULT_BUDGET_BITS, workers=1):
    return build(DesignParams("q-intersection", n, k, d, q=q, i=i), budget, workers)


def build_set_containment(d, k, n, budget=DEFAULT_BUDGET_BITS, workers=1):
    return build(DesignParams("set-containment", n, k, d), budget, workers)


def build_set_intersection(i, d, k, n, budget=DEFAULT_BUDGET_BITS, workers=1):
    return build(DesignParams("set-intersection", n, k, d, i=i), budget, workers)


# -- serialization -------------------------------------------------------------

def _payloads(m: PoolingMatrix) -> list[bytes]:
    nbytes = -(-m.row_count // 8)
    raw = m.columns.astype("<u8").tobytes()
    stride = m.words * 8
    return [raw[c * stride: c * stride + nbytes] for c in range(m.col_count)]


def export_json(m: PoolingMatrix) -> bytes:
    if m.params is None:
        raise ValueError("only design matrices (with params) can be exported")
    payloads = _payloads(m)
    doc = {
        "format": FORMAT_V1,
        "family": m.params.family,
        "params": m.params.to_dict(),
        "row_count": m.row_count,
        "col_count": m.col_count,
        "row_order": m.params.order,
        "col_order": m.params.order,
        "checksum": f"{zlib.crc32(b''.join(payloads)):08x}",
        "columns": [p.hex() for p in payloads],
    }
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode("ascii")


def export_csv(m: PoolingMatrix) -> bytes:
    dense = m.to_dense()
    lines = ["row,col"]
    for r, c in zip(*np.nonzero(dense)):
        lines.append(f"{r},{c}")
    return ("\n".join(lines) + "\n").encode("ascii")


def export(m: PoolingMatrix, fmt: str = "json-v1") -> bytes:
    if fmt == "json-v1":
        return export_json(m)
    if fmt == "csv":
        return export_csv(m)
    raise ValueError(f"unknown format {fmt!r}")


def _offset(raw: bytes, key: str):
    pos = raw.find(f'"{key}"'.encode())
    return pos if pos >= 0 else None


def import_json(raw: bytes) -> PoolingMatrix:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedFile("not UTF-8", exc.start) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"invalid JSON: {exc.msg}", len(text[: exc.pos].encode())) from None
    if not isinstance(doc, dict):
        raise MalformedFile("top level is not an object", 0)

    def need(key, kind):
        if key not in doc:
            raise MalformedFile(f"missing field {key!r}", 0)
        val = doc[key]
        if not isinstance(val, kind) or isinstance(val, bool):
            raise MalformedFile(f"field {key!r} has wrong type", _offset(raw, key))
        return val

    fmt = need("format", str)
    if fmt != FORMAT_V1:
        if fmt.startswith("qpool-matrix/"):
            raise VersionMismatch(f"unsupported format version {fmt!r}, expected {FORMAT_V1!r}")
        raise MalformedFile(f"unknown format {fmt!r}", _offset(raw, "format"))
    family = need("family", str)
    if family not in FAMILIES:
        raise MalformedFile(f"unknown family {family!r}", _offset(raw, "family"))
    pdoc = need("params", dict)
    at = _offset(raw, "params")
    keys = ["n", "k", "d"]
    if family.startswith("q-"):
        keys.append("q")
    if family.endswith("-intersection"):
        keys.append("i")
    for key in keys:
        if not isinstance(pdoc.get(key), int) or isinstance(pdoc.get(key), bool):
            raise MalformedFile(f"family {family} requires integer param {key!r}", at)
    extra = set(pdoc) - set(keys)
    if extra:
        raise MalformedFile(f"unexpected params {sorted(extra)}", at)
    params = DesignParams(family, pdoc["n"], pdoc["k"], pdoc["d"], q=pdoc.get("q"), i=pdoc.get("i"))
    try:
        params.validate()
    except Exception as exc:
        raise MalformedFile(f"invalid params: {exc}", at) from None
    rows, cols = need("row_count", int), need("col_count", int)
    if rows != params.row_count or cols != params.col_count:
        raise MalformedFile(
            f"declared size {rows}x{cols} does not match params ({params.row_count}x{params.col_count})",
            _offset(raw, "row_count"))
    for key in ("row_order", "col_order"):
        if need(key, str) != params.order:
            raise MalformedFile(f"{key} must be {params.order!r}", _offset(raw, key))
    checksum = need("checksum", str)
    columns = need("columns", list)
    at = _offset(raw, "columns")
    if len(columns) != cols:
        raise MalformedFile(f"col_count is {cols} but {len(columns)} column records present", at)
    nbytes = -(-rows // 8)
    payloads = []
    for c, h in enumerate(columns):
        if not isinstance(h, str) or len(h) != 2 * nbytes or h != h.lower():
            raise MalformedFile(f"column {c} is not {2 * nbytes} lowercase hex digits", at)
        try:
            payloads.append(bytes.fromhex(h))
        except ValueError:
            raise MalformedFile(f"column {c} is not valid hex", at) from None
    actual = f"{zlib.crc32(b''.join(payloads)):08x}"
    if checksum != actual:
        raise ChecksumMismatch(f"checksum {checksum} does not match payload ({actual})")
    words = max(1, -(-rows // 64))
    buf = np.zeros((cols, words * 8), dtype=np.uint8)
    if cols:
        buf[:, :nbytes] = np.frombuffer(b"".join(payloads), dtype=np.uint8).reshape(cols, nbytes)
    columns_arr = buf.view("<u8").astype(np.uint64)
    if rows % 64:
        spill = columns_arr[:, -1] >> np.uint64(rows % 64)
        if spill.any():
            raise MalformedFile("bits set beyond row_count", at)
    return PoolingMatrix(params, rows, cols, columns_arr)


def import_csv(raw: bytes, params: DesignParams) -> PoolingMatrix:
    """Read the csv listing; dimensions come from ``params`` since csv does not carry them."""
    params.validate()
    rows, cols = params.row_count, params.col_count
    lines = raw.decode("ascii", errors="replace").splitlines()
    if not lines or lines[0].strip() != "row,col":
        raise MalformedFile("missing 'row,col' header", 0)
    dense = np.zeros((rows, cols), dtype=bool)
    offset = len(lines[0]) + 1
    for line in lines[1:]:
        try:
            r, c = (int(x) for x in line.split(","))
        except ValueError:
            raise MalformedFile(f"bad csv line {line!r}", offset) from None
        if not (0 <= r < rows and 0 <= c < cols):
            raise MalformedFile(f"entry ({r},{c}) outside {rows}x{cols}", offset)
        dense[r, c] = True
        offset += len(line) + 1
    return PoolingMatrix.from_dense(dense, params)


def import_matrix(raw: bytes, params: DesignParams | None = None) -> PoolingMatrix:
    head = raw.lstrip()[:7]
    if head.startswith(b"{"):
        return import_json(raw)
    if head.startswith(b"row,col"):
        if params is None:
            raise MalformedFile("csv files carry no design parameters; pass params", 0)
        return import_csv(raw, params)
    raise MalformedFile("unrecognized matrix file", 0)
