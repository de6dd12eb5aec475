"""Exception hierarchy shared by every corsol module."""


class CorsolError(Exception):
    """Base class; the CLI maps any subclass to exit status 2."""


class QuadratureFailure(CorsolError):
    pass


class NonFiniteEvaluation(QuadratureFailure):
    pass


class PanelBudgetExceeded(QuadratureFailure):
    pass


class NoDecay(CorsolError):
    """A tail certificate was requested with a non-positive mass floor."""


class MassDeficit(CorsolError):
    """The window [x - d_max, x + d_max] carries less than mass 2."""


class BracketFailure(CorsolError):
    pass


class UnknownName(CorsolError, KeyError):
    pass


class NotSolvable(CorsolError):
    pass


class NoSplit(CorsolError):
    pass


class NoWeight(CorsolError):
    pass


class ZeroRHS(CorsolError):
    pass


class ExpressionSyntaxError(CorsolError, ValueError):
    """Positional parse error: ``position`` is a 0-based character offset."""

    def __init__(self, position, expected, text=""):
        self.position = position
        self.expected = tuple(expected)
        self.text = text
        want = " or ".join(repr(e) for e in self.expected)
        super().__init__(f"at position {position}: expected {want}")
