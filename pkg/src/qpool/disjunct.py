"""Measure s^e-disjunctness of pooling matrices.

A matrix is s^e-disjunct when every column keeps at least e+1 one-rows outside
the union of any s other columns; the smallest such count over all choices is
``min_private`` and the best e is ``min_private - 1``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .design import IncidenceSource, PoolingMatrix, bitset_rows, CHUNK_ROWS
from .errors import HypothesisViolation, IndexOutOfRange, SelfCover, WorkloadBudgetExceeded
from .rng import trial_rng

DEFAULT_WORKLOAD = 2 * 10**8
WITNESS_ROWS = 16


class Status(str, enum.Enum):
    DISJUNCT = "disjunct"
    NOT_DISJUNCT = "not-disjunct"
    NOT_FALSIFIED = "lower-bound-not-falsified"
    FALSIFIED = "falsified"


@dataclass(frozen=True)
class Witness:
    column: int
    covers: tuple[int, ...]
    private_rows: tuple[int, ...]  # first WITNESS_ROWS private rows


@dataclass(frozen=True)
class DisjunctReport:
    s: int
    mode: str  # "exhaustive" or "sampled"
    min_private: int
    status: Status
    witness: Witness
    e_measured: int | None = None
    threshold: int | None = None
    tuples: int = 0
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "mode": self.mode,
            "min_private": self.min_private,
            "e_measured": self.e_measured,
            "status": self.status.value,
            "threshold": self.threshold,
            "tuples": self.tuples,
            "seed": None if self.seed is None else f"{self.seed:016x}",
            "witness": {
                "column": self.witness.column,
                "covers": list(self.witness.covers),
                "private_rows": list(self.witness.private_rows),
            },
        }


def _check_cover(col_count, c, others):
    for x in (c, *others):
        if not 0 <= x < col_count:
            raise IndexOutOfRange(f"column rank {x} outside [0, {col_count})")
    if c in others:
        raise SelfCover(f"column {c} cannot cover itself")
    if len(set(others)) != len(others):
        raise HypothesisViolation("covering columns must be distinct")


def private_count(matrix: PoolingMatrix, c: int, others) -> int:
    """Ones of column c outside the union of ``others``."""
    others = tuple(int(x) for x in others)
    _check_cover(matrix.col_count, c, others)
    return int(_kernels.private_count(matrix.columns, c, np.array(others, dtype=np.int64)))


def private_rows(matrix: PoolingMatrix, c: int, others, limit: int | None = None) -> list[int]:
    others = tuple(others)
    _check_cover(matrix.col_count, c, others)
    bits = matrix.columns[c]
    if others:
        bits = bits & ~np.bitwise_or.reduce(matrix.columns[list(others)], axis=0)
    return bitset_rows(bits, matrix.row_count, limit)


def exhaustive_workload(col_count: int, s: int) -> int:
    return col_count * math.comb(col_count - 1, s)


def _check_s(col_count, s):
    if not 0 <= s <= col_count - 1:
        raise HypothesisViolation(f"requires 0 <= s <= col_count-1 (got s={s}, {col_count} columns)")


def _status(min_private):
    if min_private >= 1:
        return Status.DISJUNCT, min_private - 1
    return Status.NOT_DISJUNCT, None


def measure_exhaustive(matrix: PoolingMatrix, s: int, budget: int = DEFAULT_WORKLOAD,
                       workers: int = 1) -> DisjunctReport:
    """Exact minimum private count over every column and every s others.

    Columns are partitioned by residue class over ``workers`` threads; the
    reduction keeps the lowest column index among minima, and within a column
    the lexicographically first covering set, so output does not depend on
    the worker count.
    """
    _check_s(matrix.col_count, s)
    work = exhaustive_workload(matrix.col_count, s)
    if work > budget:
        raise WorkloadBudgetExceeded(work, budget)
    ncols = matrix.col_count
    best = np.empty(ncols, dtype=np.int64)
    wit = np.empty((ncols, s), dtype=np.int64)
    parts = [np.arange(w, ncols, workers, dtype=np.int64) for w in range(workers)]

    def run(idx):
        b = np.empty(len(idx), dtype=np.int64)
        w = np.empty((len(idx), s), dtype=np.int64)
        _kernels.exhaustive_min(matrix.columns, s, idx, b, w)
        best[idx] = b
        wit[idx] = w

    if workers == 1:
        run(parts[0])
    else:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, parts))
    c = int(np.argmin(best))
    covers = tuple(int(x) for x in wit[c])
    status, e = _status(int(best[c]))
    witness = Witness(c, covers, tuple(private_rows(matrix, c, covers, WITNESS_ROWS)))
    return DisjunctReport(s, "exhaustive", int(best[c]), status, witness, e_measured=e, tuples=work)


def sample_tuples(col_count: int, s: int, trials: int, seed: int,
                  worker: int = 0, workers: int = 1):
    """Draw ``(c, covers)`` for the trials congruent to ``worker`` mod ``workers``."""
    _check_s(col_count, s)
    idx = np.arange(worker, trials, workers, dtype=np.int64)
    cs = np.empty(len(idx), dtype=np.int64)
    covers = np.empty((len(idx), s), dtype=np.int64)
    for t, trial in enumerate(idx):
        rng = trial_rng(seed, int(trial))
        c = int(rng.integers(col_count))
        rest = np.sort(rng.choice(col_count - 1, size=s, replace=False))
        cs[t] = c
        covers[t] = rest + (rest >= c)
    return idx, cs, covers


def _all_tuples(col_count, s, trials, seed, workers):
    cs = np.empty(trials, dtype=np.int64)
    covers = np.empty((trials, s), dtype=np.int64)

    def run(w):
        idx, c, cov = sample_tuples(col_count, s, trials, seed, w, workers)
        cs[idx] = c
        covers[idx] = cov

    if workers == 1:
        run(0)
    else:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, range(workers)))
    return cs, covers


class _StreamPlan:
    """Bit-sliced membership tables for streaming private counts, 64 tuples per block."""

    def __init__(self, source: IncidenceSource, cs, covers):
        self.source = source
        trials, s = covers.shape
        self.trials = trials
        self.nblocks = -(-trials // 64)
        roles = np.concatenate([cs[:, None], covers], axis=1)  # trials x (s+1)
        uniq, inverse = np.unique(roles, return_inverse=True)
        pts = source.col_points(uniq)  # len(uniq) x npts
        inverse = inverse.reshape(roles.shape)
        self.mem = np.zeros((self.nblocks, s + 1, source.ncodes), dtype=np.uint64)
        t = np.arange(trials)
        lane_bits = np.left_shift(np.uint64(1), (t % 64).astype(np.uint64))
        npts = pts.shape[1]
        for role in range(s + 1):
            codes = pts[inverse[:, role]]  # trials x npts
            np.bitwise_or.at(
                self.mem,
                (np.repeat(t // 64, npts), role, codes.ravel()),
                np.repeat(lane_bits, npts),
            )
        self.nbits = max(1, int(source.row_points).bit_length())
        self.accbits = max(1, int(source.row_count).bit_length())

    def counts(self, workers=1, chunk=CHUNK_ROWS) -> np.ndarray:
        acc = np.zeros((self.nblocks, self.accbits), dtype=np.uint64)
        parts = [np.arange(w, self.nblocks, workers, dtype=np.int64) for w in range(workers)]
        pool = ThreadPoolExecutor(workers) if workers > 1 else None
        try:
            for _, pts in self.source.row_chunks(chunk):
                def run(blocks, pts=pts):
                    _kernels.stream_private(pts, self.mem, self.source.target,
                                            self.nbits, blocks, acc)
                if pool is None:
                    run(parts[0])
                else:
                    list(pool.map(run, parts))
        finally:
            if pool is not None:
                pool.shutdown()
        lanes = np.arange(64, dtype=np.uint64)
        bits = (acc[:, None, :] >> lanes[None, :, None]) & np.uint64(1)  # block x lane x bit
        weights = np.left_shift(1, np.arange(self.accbits, dtype=np.int64))
        counts = (bits.astype(np.int64) * weights).sum(axis=2).ravel()
        return counts[: self.trials]

    def rows_for(self, trial, limit=WITNESS_ROWS, chunk=CHUNK_ROWS) -> list[int]:
        out = np.empty(limit, dtype=np.int64)
        nout = 0
        for first, pts in self.source.row_chunks(chunk):
            nout = _kernels.stream_private_rows(pts, self.mem, self.source.target, self.nbits,
                                               trial // 64, trial % 64, first, out, nout)
            if nout >= limit:
                break
        return [int(x) for x in out[:nout]]


def stream_private_count(source: IncidenceSource, c: int, others) -> int:
    """Private count computed by streaming every row of an implicit design."""
    others = tuple(int(x) for x in others)
    _check_cover(source.col_count, c, others)
    plan = _StreamPlan(source, np.array([c]), np.array([others], dtype=np.int64).reshape(1, -1))
    return int(plan.counts()[0])


def falsify_sampled(target, s: int, threshold: int, trials: int, seed: int,
                    workers: int = 1) -> DisjunctReport:
    """Search random (column, s covers) tuples for a private count below ``threshold``.

    ``target`` is a built :class:`PoolingMatrix` or an :class:`IncidenceSource`
    whose rows are streamed.  Passing means no counterexample was sampled; it
    is evidence, not proof.
    """
    if threshold < 1:
        raise HypothesisViolation(f"requires threshold >= 1 (got {threshold})")
    if trials < 1:
        raise HypothesisViolation(f"requires trials >= 1 (got {trials})")
    cs, covers = _all_tuples(target.col_count, s, trials, seed, workers)
    if isinstance(target, PoolingMatrix):
        counts = _kernels.private_counts(target.columns, cs, covers)
        plan = None
    else:
        plan = _StreamPlan(target, cs, covers)
        counts = plan.counts(workers)
    t = int(np.argmin(counts))
    c, cov = int(cs[t]), tuple(int(x) for x in covers[t])
    if plan is None:
        rows = private_rows(target, c, cov, WITNESS_ROWS)
    else:
        rows = plan.rows_for(t)
    low = int(counts[t])
    status = Status.FALSIFIED if low < threshold else Status.NOT_FALSIFIED
    return DisjunctReport(s, "sampled", low, status, Witness(c, cov, tuple(rows)),
                          threshold=threshold, tuples=trials, seed=seed)


@dataclass(frozen=True)
class FullyCheck:
    certified: bool
    reason: str
    at_s: DisjunctReport = field(repr=False)
    at_s_plus_1: DisjunctReport | None = field(repr=False, default=None)


def check_fully(matrix: PoolingMatrix, s: int, e: int, budget: int = DEFAULT_WORKLOAD,
                workers: int = 1) -> FullyCheck:
    """Certify that (s, e) are both tight.

    Needs s^e-disjunct but not s^(e+1)-disjunct (measured e equals e) and not
    (s+1)^e-disjunct (some s+1 covers leave at most e private rows).
    """
    at_s = measure_exhaustive(matrix, s, budget, workers)
    if at_s.e_measured != e:
        got = "not disjunct" if at_s.e_measured is None else f"e_measured = {at_s.e_measured}"
        return FullyCheck(False, f"at s={s}: {got}, expected e = {e}", at_s)
    if s + 1 > matrix.col_count - 1:
        return FullyCheck(False, f"only {matrix.col_count} columns: s+1 = {s + 1} covers are "
                                 "impossible, so every larger s holds vacuously", at_s)
    nxt = measure_exhaustive(matrix, s + 1, budget, workers)
    if nxt.min_private > e:
        return FullyCheck(False, f"at s={s + 1}: min_private = {nxt.min_private} > e = {e}, "
                                 f"still {s + 1}^{e}-disjunct", at_s, nxt)
    return FullyCheck(True, f"e_measured({s}) = {e} and min_private({s + 1}) = "
                            f"{nxt.min_private} <= {e}", at_s, nxt)
