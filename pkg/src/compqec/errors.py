"""Exception hierarchy.

Precondition failures (bad shapes, non-Hermitian input, infeasible values)
derive from :class:`PreconditionError`; numerical breakdowns derive from
:class:`NumericalFailure`. The CLI maps the two families to distinct exit
codes.
"""


class CompQECError(Exception):
    """Base class for all library errors."""


class PreconditionError(CompQECError, ValueError):
    """An input violates an operation's stated precondition."""


class NumericalFailure(CompQECError, ArithmeticError):
    """A numerical routine did not deliver a result of the required quality."""


class NotHermitian(PreconditionError):
    pass


class NotNormal(PreconditionError):
    pass


class NotUnitary(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class WrongDimension(PreconditionError):
    pass


class DegenerateInput(PreconditionError):
    pass


class DegenerateChords(PreconditionError):
    pass


class DegenerateSpectrum(PreconditionError):
    pass


class BadRank(PreconditionError):
    pass


class BadProbability(PreconditionError):
    pass


class BadParameter(PreconditionError):
    pass


class BadSupport(PreconditionError):
    pass


class NotOrthonormal(PreconditionError):
    pass


class ValueOutsideRange(PreconditionError):
    pass


class EmptySweep(PreconditionError):
    pass


class CombinatorialBlowup(PreconditionError):
    pass


class NotCorrectable(PreconditionError):
    pass


class NotTracePreserving(PreconditionError):
    pass


class RankDeficiency(NumericalFailure):
    pass
