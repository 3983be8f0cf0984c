"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
1 for hypothesis/validation failures, 2 for I/O and file-format failures,
3 for exceeded resource budgets.
"""


class QpoolError(Exception):
    exit_code = 1


class NonPrimePower(QpoolError, ValueError):
    def __init__(self, q):
        super().__init__(f"q={q} is not a prime power >= 2")
        self.q = q


class HypothesisViolation(QpoolError, ValueError):
    """A parameter tuple fails a precondition; the message names the inequality."""


class UnknownBound(QpoolError):
    """No theorem provides a bound for the requested parameters."""


class DimensionMismatch(QpoolError, ValueError):
    pass


class IndexOutOfRange(QpoolError, IndexError):
    pass


class SelfCover(QpoolError, ValueError):
    pass


class TooManyFlips(QpoolError, ValueError):
    pass


class FieldDivisionByZero(QpoolError, ZeroDivisionError):
    pass


class MalformedFile(QpoolError):
    exit_code = 2

    def __init__(self, message, offset=None):
        where = f" (byte offset {offset})" if offset is not None else ""
        super().__init__(message + where)
        self.offset = offset


class VersionMismatch(QpoolError):
    exit_code = 2


class ChecksumMismatch(QpoolError):
    exit_code = 2


class ResourceBudgetExceeded(QpoolError):
    exit_code = 3

    def __init__(self, rows, cols, budget):
        super().__init__(
            f"matrix of {rows} x {cols} = {rows * cols} bits exceeds budget of {budget} bits"
        )
        self.rows = rows
        self.cols = cols
        self.budget = budget


class WorkloadBudgetExceeded(QpoolError):
    exit_code = 3

    def __init__(self, tuples, budget):
        super().__init__(f"exhaustive workload of {tuples} tuples exceeds budget of {budget}")
        self.tuples = tuples
        self.budget = budget
