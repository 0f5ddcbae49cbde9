"""
Exception hierarchy for the evaluation engine.

Every failure is raised as a subclass of CrpqError so callers can catch the
whole family at once:

    try:
        report = evaluate(query, graph)
    except CyclicQueryError as e:
        print(e.verdict.message)
    except CrpqError as e:
        print(f"evaluation failed: {e}")
"""
from typing import Optional


class CrpqError(Exception):
    """Base exception for engine errors"""
    pass


class RegexSyntaxError(CrpqError):
    """Raised when a regular expression does not parse"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class GraphFormatError(CrpqError):
    """Raised on a malformed graph file line"""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class QuerySyntaxError(CrpqError):
    """Raised on a malformed query file"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class FreshSymbolError(CrpqError):
    """Raised when a filter symbol collides with a label already in use"""
    pass


class CyclicQueryError(CrpqError):
    """Raised when an acyclic-only operation receives a cyclic query"""

    def __init__(self, verdict):
        super().__init__(verdict.message)
        self.verdict = verdict


class NotFreeLeafError(CrpqError):
    """Raised when the free-leaf evaluator receives an unsuitable query"""
    pass


class CapMismatchError(CrpqError):
    """Raised when a restriction table is combined under a different cap"""
    pass


class TailOverlapError(CrpqError):
    """Raised when composed restriction tables share tail variables"""
    pass


class InstanceTooLargeError(CrpqError):
    """Raised when an exhaustive search exceeds its guard"""
    pass


class UncoverableTargetError(CrpqError):
    """Raised when an edge-cover target vertex has no incident edge"""
    pass


class ResourceGuardError(CrpqError):
    """Raised when the oracle exceeds its intermediate row limit"""
    pass


class JoinTreeError(CrpqError):
    """Raised when relation schemas do not admit a join tree"""
    pass


class InvariantViolation(CrpqError):
    """Raised by debug assertions inside the evaluators"""
    pass
