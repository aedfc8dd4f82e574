"""Exception hierarchy. Every error raised by the package derives from KellyError."""


class KellyError(ValueError):
    """Base class for invalid inputs and infeasible requests."""


class LengthMismatch(KellyError):
    pass


class NonpositiveProbability(KellyError):
    pass


class NonpositiveOdds(KellyError):
    pass


class ProbabilitySumViolation(KellyError):
    pass


class InfeasibleStrategy(KellyError):
    pass


class NonpositiveWealthState(KellyError):
    """Some state with positive probability has zero or negative terminal wealth."""


class NonpositiveWeight(KellyError):
    pass


class NonpositiveBudget(KellyError):
    pass


class EmptySupport(KellyError):
    pass


class OverroundSupport(KellyError):
    """Proper support whose state prices sum to one or more."""


class PositivityViolation(KellyError):
    """A support member would receive a non-positive stake at the support's cash level."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class CashOutOfRange(KellyError):
    pass


class ParameterOutOfRange(KellyError):
    pass


class TooManyOutcomes(KellyError):
    pass


class BadStep(KellyError):
    pass


class ZeroTrials(KellyError):
    pass


class DuplicateLabel(KellyError):
    pass


class InvariantViolation(RuntimeError):
    """A computed solution breaks its own closed-form structure (a bug, not bad input)."""
