"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ``DataError`` subclasses exit with 3,
``DegenerateInput`` with 4.
"""


class PeerscopeError(Exception):
    """Base class for every error raised by this package."""


class DataError(PeerscopeError):
    """Input data is missing, unreadable or unusable for the requested analysis."""


class NoText(DataError):
    """A text section has no words left after preprocessing."""


class NoCoverage(DataError):
    """None of the tokens of a section were found in a lexicon."""


class DegenerateInput(PeerscopeError):
    """A statistic is undefined for the given values (too few, or zero variance)."""
