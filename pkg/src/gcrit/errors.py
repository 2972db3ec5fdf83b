"""Exception hierarchy shared by all gcrit modules."""


class GcritError(Exception):
    """Base class for every error raised by gcrit."""


class InputError(GcritError):
    """Malformed user input (bad tables, unknown names)."""


class NonMonotonicGrid(InputError):
    pass


class NegativeValue(InputError):
    pass


class UnknownPotential(InputError):
    pass


class UnknownMethod(InputError):
    pass


class NumericError(GcritError):
    """A numerical procedure failed to deliver its contract."""


class BudgetExhausted(NumericError):
    pass


class NonFinite(NumericError):
    pass


class GridCheckFailed(NumericError):
    pass


class GridMismatch(NumericError):
    pass


class DivergentMoment(NumericError):
    pass


# alias used by the sequence and Jost routines
MomentDivergent = DivergentMoment


class DegeneratePotential(DivergentMoment):
    """The shape vanishes identically, so no finite coupling binds."""


class NotSquareIntegrable(NumericError):
    pass


class MonotonicityViolated(NumericError):
    pass


class InconsistentBracket(NumericError):
    pass


class NoRoot(NumericError):
    pass


class StepFailure(NumericError):
    pass


class BracketFailure(NumericError):
    pass
