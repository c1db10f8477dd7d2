"""Exception hierarchy shared by every module."""


class PsatError(Exception):
    """Base class for errors raised by this package."""


class ParseError(PsatError, ValueError):
    """Malformed expression or probability input."""


class LimitExceededError(PsatError):
    """A brute-force or expansion budget was exceeded."""


class InconsistencyError(PsatError):
    """Two computations that must agree did not."""


class MonotonicityError(InconsistencyError):
    """An oracle or curve violated the monotonicity it is required to have."""
