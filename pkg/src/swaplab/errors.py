"""Exception hierarchy shared by every swaplab module."""


class SwapLabError(Exception):
    """Base class for all library errors."""


class FormatError(SwapLabError, ValueError):
    """A serialized grammar, machine or sample file is malformed."""


class IndexOutOfRange(SwapLabError, IndexError):
    pass


class InvalidRange(SwapLabError, ValueError):
    pass


class UnknownSymbol(SwapLabError, ValueError):
    pass


class BudgetExceeded(SwapLabError):
    """An exhaustive enumeration ran past its configured node budget."""


class EmptyStringInLanguage(SwapLabError, ValueError):
    pass


class EmptyLanguage(SwapLabError, ValueError):
    pass


class NotGnf(SwapLabError, ValueError):
    pass


class NotGnfNormal(SwapLabError, ValueError):
    pass


class LengthMismatch(SwapLabError, ValueError):
    pass


class UnknownFixture(SwapLabError, KeyError):
    pass


class InvalidLength(SwapLabError, ValueError):
    pass


class InvalidParameter(SwapLabError, ValueError):
    pass


class NotInLanguage(SwapLabError, ValueError):
    """A sample-set member is rejected by the subject machine."""


class InvalidBlocks(SwapLabError, ValueError):
    pass


class InvalidInterval(SwapLabError, ValueError):
    pass


class PreconditionViolated(SwapLabError, ValueError):
    pass


class PathMismatch(SwapLabError, ValueError):
    pass


class PathBudgetExceeded(SwapLabError):
    pass


class NoAssignment(SwapLabError):
    """No index of the Δ set is realized by any examined accepting path."""


class VerificationFailed(SwapLabError, AssertionError):
    """A constructed witness failed re-simulation. Indicates a bug."""
