"""Exception hierarchy shared across the pipeline."""


class CegocdError(Exception):
    """Base class for all library errors."""


class GraphFormatError(CegocdError):
    """Malformed graph file (bad JSON line, missing field, bad kind)."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DanglingEdgeError(CegocdError):
    """An edge references an entity id that does not exist."""


class DuplicateEntityError(CegocdError):
    """Two entity lines declare the same id."""


class UnknownEntityError(CegocdError, KeyError):
    """Lookup of an entity id that is not in the graph."""


class ProviderError(CegocdError):
    """Transport-level failure talking to a remote provider."""


class ProtocolViolationError(CegocdError):
    """A provider returned something its contract forbids (e.g. invented ids)."""


class EmptyKeywordsError(CegocdError):
    """Keyword extraction produced nothing; the query is unanswerable."""


class EmptySubgraphError(CegocdError):
    """Pruning removed every edge; caller should fall back to neighborhood context."""
