"""Exception hierarchy for fimgraph.

Everything derives from ``ValueError`` so callers that only care about
"bad input" can keep catching that.
"""


class FimGraphError(ValueError):
    """Base class for all fimgraph errors."""


class ConfigError(FimGraphError):
    """An environment setting could not be interpreted."""


class GraphError(FimGraphError):
    """A graph, morphism or path violates a structural requirement."""


class GraphParseError(GraphError):
    """A graph file could not be parsed."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        self.message = message
        super().__init__(f"line {line_number}: {message}")


class WordError(FimGraphError):
    """A word string is not over [a-zA-Z] (or the identity ``1``)."""


class DomainError(FimGraphError):
    """The request is well formed but has no answer."""


class InternalConsistencyError(FimGraphError):
    """Two independent computations disagreed."""
