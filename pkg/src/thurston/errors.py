"""Exception hierarchy.

Three families map onto the command-line exit codes: malformed input (2),
violated mathematical preconditions (3) and invalid walk measures (4).
"""


class ThurstonError(Exception):
    """Base class for every error raised by this package."""


class InputError(ThurstonError, ValueError):
    """Malformed user input: bad word syntax, bad file, bad parameter."""


class MathPreconditionError(ThurstonError):
    """A mathematical precondition of an operation does not hold."""


class MeasureError(ThurstonError, ValueError):
    """A random-walk measure failed validation."""
