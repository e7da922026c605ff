"""Exception hierarchy shared by every module of the package."""


class BigConjError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(BigConjError, ValueError):
    """Raised when a vector does not live in the ambient space of an object."""


class IndeterminateSum(BigConjError, ArithmeticError):
    """Raised on ``(+inf) + (-inf)`` or ``0 * (+-inf)``."""


class NoClosedForm(BigConjError):
    """Raised when no conjugation rule applies; fall back to grid conjugation."""


class AllInfinite(BigConjError):
    """Raised when a function is ``+inf`` on the whole evaluation grid."""


class RankDeficientBasis(BigConjError, ValueError):
    """Raised when a basis that must have full column rank does not."""


class NoSolution(BigConjError):
    """Raised when an iterative solver exhausts its iteration budget."""


class HypothesisFailed(BigConjError):
    """Raised when a verification suite's hypothesis does not hold.

    The name of the failing predicate is kept in :attr:`predicate`.
    """

    def __init__(self, predicate, detail=""):
        msg = predicate if not detail else f"{predicate}: {detail}"
        super().__init__(msg)
        self.predicate = predicate
        self.detail = detail


class ParseError(BigConjError, ValueError):
    """Raised when a scenario file cannot be parsed."""


class ValidationError(BigConjError, ValueError):
    """Raised when a scenario parses but is inconsistent; names the field."""

    def __init__(self, field, detail):
        super().__init__(f"{field}: {detail}")
        self.field = field
