"""Exception types shared across the package."""


class MedianwalkError(Exception):
    """Base class for all package errors."""


# --- finite complex construction / queries ---

class NotConnected(MedianwalkError):
    pass


class NotBipartite(MedianwalkError):
    """Carries an odd closed walk witness when available."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotMedian(MedianwalkError):
    """Raised with a witness triple that has zero (or several) medians."""

    def __init__(self, message, triple=None, count=None):
        super().__init__(message)
        self.triple = triple
        self.count = count


class VertexOutOfRange(MedianwalkError):
    pass


class WallOutOfRange(MedianwalkError):
    pass


class SizeBudgetExceeded(MedianwalkError):
    pass


class IntegrityFailure(MedianwalkError):
    """Internal invariant broke; signals a core bug, not bad input."""


class ChainInvalid(MedianwalkError):
    pass


class HierarchyNotFound(MedianwalkError):
    """Search exhausted: existence is guaranteed, so this flags a bug."""


# --- group engine ---

class UnknownGenerator(MedianwalkError):
    pass


class DefiningGraphMismatch(MedianwalkError):
    pass


class PieceMismatch(MedianwalkError):
    pass


class RadiusZero(MedianwalkError):
    pass


class BudgetExceeded(MedianwalkError):
    def __init__(self, message, size=None):
        super().__init__(message)
        self.size = size


# --- walk lab ---

class ProbSumInvalid(MedianwalkError):
    pass


class NotGenerating(MedianwalkError):
    def __init__(self, message, generator=None):
        super().__init__(message)
        self.generator = generator


class TooFewTrials(MedianwalkError):
    pass


# --- configuration ---

class ConfigError(MedianwalkError):
    pass


class ParseError(ConfigError):
    pass


class SchemaViolation(ConfigError):
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class FileMissing(ConfigError):
    pass
