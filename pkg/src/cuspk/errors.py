"""Exception types shared across the toolkit.

Every error that a caller is expected to catch has its own class; anything
else is a plain ValueError and indicates a usage bug, not a mathematical
finding.
"""


class CuspkError(Exception):
    """Base class for all toolkit-specific errors."""


class IntegralityViolation(CuspkError):
    """An unghost step required a division that was not exact."""


class ComplexInvalid(CuspkError):
    """Boundary maps of a chain complex do not square to zero."""


class NotAChainMap(CuspkError):
    """Per-degree matrices fail to commute with the boundary maps."""


class DimensionMismatch(CuspkError):
    """Matrix or vector shapes are inconsistent."""


class ResourceBound(CuspkError):
    """An enumeration would exceed the configured budget."""


class TheoremViolation(CuspkError):
    """A computation contradicts a proved statement; indicates a bug."""


class PreconditionViolation(CuspkError):
    """Arguments violate a documented precondition."""


class WeightOutOfRange(CuspkError):
    """A requested weight lies outside the admissible interval."""
