"""Exception hierarchy.

Each family maps to one CLI exit code (see ``exit_code``).
"""


class CKThermoError(Exception):
    exit_code = 1


class ValidationError(CKThermoError, ValueError):
    exit_code = 2


class NonBinaryEntry(ValidationError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"entry ({row},{col}) = {value!r} is not 0 or 1")


class ZeroRow(ValidationError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"ZeroRow({index}): row {index} of A is identically zero")


class ZeroColumn(ValidationError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"ZeroColumn({index}): column {index} of A is identically zero")


class NotSquare(ValidationError):
    pass


class CapacityExceeded(ValidationError):
    def __init__(self, count, limit):
        self.count, self.limit = count, limit
        super().__init__(f"{count} cylinders exceed the capacity limit {limit}")


class InadmissibleWord(ValidationError):
    def __init__(self, word):
        self.word = tuple(word)
        super().__init__(f"word {','.join(map(str, word)) or 'e'} is not admissible")


class PotentialSyntaxError(ValidationError):
    def __init__(self, offset, expected, text=""):
        self.offset, self.expected = offset, expected
        super().__init__(f"syntax error at offset {offset}: expected {expected}")


class EvaluationError(ValidationError):
    def __init__(self, message, word=None):
        self.word = word
        where = "" if word is None else f" on cylinder [{','.join(map(str, word))}]"
        super().__init__(message + where)


class NonPositivePotential(ValidationError):
    pass


class HNotExceedingOne(ValidationError):
    def __init__(self, m):
        self.m = m
        super().__init__(f"HNotExceedingOne: min H = {m!r} <= 1")


class DepthMismatch(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class NoConvergence(CKThermoError, ArithmeticError):
    exit_code = 3

    def __init__(self, max_iter, residuals=None, message=None):
        self.max_iter = max_iter
        self.residuals = residuals
        super().__init__(message or f"no convergence after {max_iter} iterations (last residuals {residuals})")


class InvariantViolation(CKThermoError, AssertionError):
    exit_code = 4


class InequalityViolation(InvariantViolation):
    pass


class MonotonicityViolation(InvariantViolation):
    pass


class NotPrimitiveWarning(UserWarning):
    pass


def exit_code(exc):
    if isinstance(exc, CKThermoError):
        return exc.exit_code
    if isinstance(exc, OSError):
        return 5
    return 1
