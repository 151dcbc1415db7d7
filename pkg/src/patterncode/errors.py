"""Exception types shared across the package."""

from __future__ import annotations


class PatternCodeError(Exception):
    """Base class for all library errors."""


class NotPrimePower(PatternCodeError, ValueError):
    pass


class FieldTooLarge(PatternCodeError, ValueError):
    pass


class DivisionByZero(PatternCodeError, ZeroDivisionError):
    pass


class BadSymbol(PatternCodeError, ValueError):
    pass


class LengthExceedsField(PatternCodeError, ValueError):
    pass


class TooFewSymbols(PatternCodeError, ValueError):
    pass


class TooFewVertices(PatternCodeError, ValueError):
    pass


class Infeasible(PatternCodeError, ValueError):
    """No code of the requested kind exists for the pattern graph.

    ``witness`` names the offending edge (or edge pair) when one is known.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InfeasibleK(Infeasible):
    pass


class InfiniteChromatic(PatternCodeError, ValueError):
    """Some edge has fewer than k vertices, so no valid k-coloring exists."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(PatternCodeError):
    """A search or enumeration hit its node/work budget.

    Extra keyword arguments are kept on ``info`` so callers can recover the
    best partial result (upper/lower bounds, a fallback coloring, ...).
    """

    def __init__(self, message: str, nodes: int = 0, **info):
        super().__init__(message)
        self.nodes = nodes
        self.info = info
