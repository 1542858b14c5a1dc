"""Exception hierarchy shared by every module of the package."""


class SparseDuelError(ValueError):
    """Base class for all errors raised by sparse_duel."""


class NonSquare(SparseDuelError):
    pass


class EntryOutOfRange(SparseDuelError):
    pass


class ComplementViolation(SparseDuelError):
    pass


class DiagonalNotHalf(SparseDuelError):
    pass


class BadN(SparseDuelError):
    pass


class BadEpsilon(SparseDuelError):
    pass


class InvalidPermutation(SparseDuelError):
    pass


class DegenerateGap(SparseDuelError):
    """A gap that must be strictly positive is zero or negative."""


class IndexOutOfRange(SparseDuelError, IndexError):
    pass


class DomainError(SparseDuelError):
    """Argument outside the mathematical domain of a formula."""


class NoSolution(SparseDuelError):
    pass


class PhaseOneAmbiguity(SparseDuelError):
    pass


class ParseError(SparseDuelError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InconsistentFeatureCount(ParseError):
    pass


class NoComparablePairs(SparseDuelError):
    pass


class ConfigError(SparseDuelError):
    pass


class DegenerateWinner(DegenerateGap):
    pass
