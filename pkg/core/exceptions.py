"""
Error types shared by every spannerweave module.

Library code raises these; the management command turns them into exit codes
(format problems -> 2, everything else -> 3).
"""
from typing import Optional, Tuple


class SpannerweaveError(Exception):
    """Base class for all library errors"""


class GraphFormatError(SpannerweaveError):
    """Input text could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContractViolation(SpannerweaveError):
    """A documented pre-condition was not met by the caller"""


class InvalidEdgeError(ContractViolation):
    def __init__(self, edge: Tuple[int, int]):
        self.edge = edge
        super().__init__(f"edge ({edge[0]}, {edge[1]}) is not an edge of the graph")


class DisconnectedGraphError(ContractViolation):
    def __init__(self, components: int):
        self.components = components
        super().__init__(f"graph must be connected, found {components} components")


class CapExceededError(SpannerweaveError):
    """Refusal to run an exponential search above its configured cap"""


class NotASpannerError(SpannerweaveError):
    def __init__(self, message: str, edge: Optional[Tuple[int, int]] = None):
        self.edge = edge
        super().__init__(message)


class InvalidDecompositionError(SpannerweaveError):
    pass


class GeneratorError(SpannerweaveError):
    pass
