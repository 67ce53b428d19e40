"""Exception types shared by the checkers."""


class WGCatError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(WGCatError):
    """Input data references ids that were never declared."""


class CheckFailure(WGCatError):
    """A checked property does not hold.

    ``condition`` is a short machine-readable tag (``"associativity"``,
    ``"segal"``, ``"groupoidal"`` ...) and ``where`` locates the failure.
    """

    def __init__(self, condition, where=None, detail=""):
        self.condition = condition
        self.where = where
        self.detail = detail
        msg = condition if where is None else f"{condition} at {where!r}"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class PreconditionError(WGCatError):
    """An operation was called on input that does not meet its precondition."""


class TruncationError(PreconditionError):
    """A simplicial level beyond the stored truncation was requested."""


class SizeCapExceeded(PreconditionError):
    """An input or an intermediate construction is larger than the configured cap."""


class TheoremViolation(WGCatError):
    """A verified statement failed on an input satisfying its hypotheses.

    Carries a ``counterexample`` payload suitable for dumping to disk.
    """

    def __init__(self, statement, counterexample=None, cause=None):
        self.statement = statement
        self.counterexample = counterexample
        self.cause = cause
        super().__init__(f"{statement}: {cause}")


class HypothesisFailure(CheckFailure):
    """The hypotheses of a verified statement do not hold on this input."""
