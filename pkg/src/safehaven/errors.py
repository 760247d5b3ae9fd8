"""Exception hierarchy shared by every stage of the pipeline."""


class SafeHavenError(Exception):
    """Base class for all errors raised by :mod:`safehaven`."""


class MalformedRow(SafeHavenError, ValueError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateDate(SafeHavenError, ValueError):
    pass


class NonPositivePrice(SafeHavenError, ValueError):
    pass


class TooShort(SafeHavenError, ValueError):
    pass


class InsufficientOverlap(SafeHavenError, ValueError):
    pass


class SingularDesign(SafeHavenError, ValueError):
    """Design matrix is rank deficient (collinear or constant columns)."""


class InvalidDesign(SafeHavenError, ValueError):
    """Design is full rank but the requested test is undefined on it."""


class NonFinite(SafeHavenError, FloatingPointError):
    pass


class NoConvergence(SafeHavenError, RuntimeError):
    pass


class DegenerateSeries(SafeHavenError, ValueError):
    pass


class WindowOutOfRange(SafeHavenError, ValueError):
    pass


class WindowTruncated(UserWarning):
    """The crisis window runs past the end of the sample and was cut short."""


class DimensionMismatch(SafeHavenError, ValueError):
    pass


class ConfigError(SafeHavenError):
    pass


class AllPairsFailed(SafeHavenError, RuntimeError):
    pass
