"""Exception hierarchy.

Input problems derive from ``ValueError``; ``InternalConsistencyError``
signals a numerical result that contradicts a proven identity or bound
and therefore points at a bug rather than at bad input.
"""


class LayoutError(ValueError):
    """Unknown label, duplicate label or dimension mismatch."""


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


class KrausError(ValueError):
    pass


class InternalConsistencyError(ArithmeticError):
    pass
