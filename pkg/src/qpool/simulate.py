"""Encode/decode simulation of non-adaptive group testing with test errors.

Decoding keeps every column that has at most floor(e/2) one-rows among the
negative pools.  On an s^e-disjunct matrix this recovers any set of at most s
positives when at most floor(e/2) outcomes are flipped.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .design import PoolingMatrix, bitset_rows
from .errors import HypothesisViolation, IndexOutOfRange, TooManyFlips
from .rng import SIMULATOR, trial_rng

MAX_FAILURES = 16


@dataclass(eq=False)
class Outcome:
    row_count: int
    bits: np.ndarray  # uint64 words, bit r set = pool r positive

    def __eq__(self, other):
        if not isinstance(other, Outcome):
            return NotImplemented
        return self.row_count == other.row_count and np.array_equal(self.bits, other.bits)

    def positive_rows(self) -> list[int]:
        return bitset_rows(self.bits, self.row_count)

    def distance(self, other: "Outcome") -> int:
        return int(np.bitwise_count(self.bits ^ other.bits).sum())


def encode(matrix: PoolingMatrix, positives) -> Outcome:
    """Pool r is positive iff it contains a positive item."""
    positives = [int(c) for c in positives]
    for c in positives:
        if not 0 <= c < matrix.col_count:
            raise IndexOutOfRange(f"column rank {c} outside [0, {matrix.col_count})")
    bits = np.zeros(matrix.words, dtype=np.uint64)
    if positives:
        bits = np.bitwise_or.reduce(matrix.columns[positives], axis=0)
    return Outcome(matrix.row_count, bits)


def _flip(outcome, rows):
    bits = outcome.bits.copy()
    for r in rows:
        bits[r >> 6] ^= np.uint64(1) << np.uint64(r & 63)
    return Outcome(outcome.row_count, bits)


def inject_errors(outcome: Outcome, flips=None, *, t: int | None = None,
                  seed: int | None = None, trial: int = 0) -> Outcome:
    """Flip the given rows, or ``t`` distinct random rows drawn from ``(seed, trial)``."""
    if flips is not None:
        rows = sorted({int(r) for r in flips})
        if len(rows) > outcome.row_count:
            raise TooManyFlips(f"{len(rows)} flips on {outcome.row_count} rows")
        for r in rows:
            if not 0 <= r < outcome.row_count:
                raise IndexOutOfRange(f"row {r} outside [0, {outcome.row_count})")
        return _flip(outcome, rows)
    if t is None or seed is None:
        raise ValueError("give explicit flips or both t and seed")
    if not 0 <= t <= outcome.row_count:
        raise TooManyFlips(f"{t} flips on {outcome.row_count} rows")
    rng = trial_rng(seed, trial, SIMULATOR)
    return _flip(outcome, rng.choice(outcome.row_count, size=t, replace=False))


def negative_hits(matrix: PoolingMatrix, outcome: Outcome) -> np.ndarray:
    """Per column, the number of its rows whose pool tested negative."""
    return np.bitwise_count(matrix.columns & ~outcome.bits).sum(axis=1, dtype=np.int64)


def decode(matrix: PoolingMatrix, outcome: Outcome, e: int) -> frozenset[int]:
    if e < 0:
        raise HypothesisViolation(f"requires e >= 0 (got {e})")
    if outcome.row_count != matrix.row_count:
        raise HypothesisViolation("outcome length differs from the matrix row count")
    hits = negative_hits(matrix, outcome)
    return frozenset(int(c) for c in np.flatnonzero(hits <= e // 2))


@dataclass(frozen=True)
class Failure:
    trial: int
    positives: tuple[int, ...]
    flipped: tuple[int, ...]
    decoded: tuple[int, ...]


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    successes: int
    s_used: int
    e_used: int
    t_used: int
    seed: int
    out_of_guarantee: bool
    failures: tuple[Failure, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "s": self.s_used,
            "e": self.e_used,
            "t": self.t_used,
            "seed": f"{self.seed:016x}",
            "out_of_guarantee": self.out_of_guarantee,
            "failures": [
                {"trial": f.trial, "positives": list(f.positives),
                 "flipped": list(f.flipped), "decoded": list(f.decoded)}
                for f in self.failures
            ],
        }


def run_trial(matrix: PoolingMatrix, s: int, e: int, t: int, seed: int, trial: int):
    """One draw: returns (positives, flipped rows, decoded set)."""
    rng = trial_rng(seed, trial, SIMULATOR)
    size = int(rng.integers(0, s + 1))
    positives = np.sort(rng.choice(matrix.col_count, size=size, replace=False))
    flipped = np.sort(rng.choice(matrix.row_count, size=t, replace=False))
    outcome = _flip(encode(matrix, positives), flipped)
    decoded = decode(matrix, outcome, e)
    return tuple(int(x) for x in positives), tuple(int(x) for x in flipped), decoded


def simulate(matrix: PoolingMatrix, s: int, e: int, t: int, trials: int, seed: int,
             workers: int = 1) -> SimulationReport:
    """Plant a uniform-size positive set (size uniform in 0..s), encode, flip t rows, decode."""
    if not 0 <= s <= matrix.col_count:
        raise HypothesisViolation(f"requires 0 <= s <= col_count (got s={s})")
    if not 0 <= t <= matrix.row_count:
        raise TooManyFlips(f"{t} flips on {matrix.row_count} rows")
    if e < 0 or trials < 0:
        raise HypothesisViolation("requires e >= 0 and trials >= 0")

    def run(w):
        ok, bad = 0, []
        for trial in range(w, trials, workers):
            pos, flipped, decoded = run_trial(matrix, s, e, t, seed, trial)
            if decoded == frozenset(pos):
                ok += 1
            else:
                bad.append(Failure(trial, pos, flipped, tuple(sorted(decoded))))
        return ok, bad

    if workers == 1:
        results = [run(0)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(workers)))
    successes = sum(ok for ok, _ in results)
    failures = sorted((f for _, bad in results for f in bad), key=lambda f: f.trial)
    return SimulationReport(trials, successes, s, e, t, seed, t > e // 2,
                            tuple(failures[:MAX_FAILURES]))
