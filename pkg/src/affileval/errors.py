"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class so
CLI code can map them to messages without string matching.
"""

from __future__ import annotations


class AffilEvalError(Exception):
    """Base class for all package-specific errors."""


class EmptyInput(AffilEvalError):
    """An input collection or file contained no usable rows."""


class MalformedTuple(AffilEvalError):
    """A membership tuple is unusable (empty person or club field)."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"tuple {index}: {reason}")


class EmptyAfterNormalization(AffilEvalError):
    """A label reduced to the empty string after normalization."""


class EmptyGroundTruth(AffilEvalError):
    """The ground-truth tuple list is empty."""


class EmptyPartition(AffilEvalError):
    """A graph partition required by the operation has no nodes."""


class EmptyGraph(AffilEvalError):
    """The graph has no edges but the operation needs at least one."""


class NodeNotFound(AffilEvalError):
    """A queried node is not present in the graph."""


class DegenerateComponent(AffilEvalError):
    """The largest connected component is a single node, so path metrics are undefined."""


class DegenerateGraph(AffilEvalError):
    """The graph is too small for the requested statistic (fewer than 2 nodes in scope)."""


class BudgetUnderflow(AffilEvalError):
    """The edge budget rounded down to zero kept edges."""


class SaturatedGraph(AffilEvalError):
    """No non-edges remain to realize the requested number of false positives."""


class SamplingStalled(AffilEvalError):
    """Rejection sampling exceeded its consecutive-failure cap."""

    def __init__(self, attempts: int):
        self.attempts = attempts
        super().__init__(f"rejection sampling stalled after {attempts} consecutive failures")


class NoData(AffilEvalError):
    """An aggregation was asked for but no usable records exist."""


class MalformedInput(AffilEvalError):
    """A data file line could not be parsed."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class UnknownFormat(AffilEvalError):
    """A file's format could not be determined or is unsupported."""
