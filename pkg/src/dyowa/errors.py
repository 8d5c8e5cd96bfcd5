"""Exception types shared across the package."""


class DyowaError(Exception):
    """Base class for every error raised by this package."""


class ArityError(DyowaError, ValueError):
    """Input length does not match what an operator or family accepts."""


class DomainError(DyowaError, ValueError):
    """A value lies outside the unit interval or a weight vector is malformed."""


class FamilyViolationError(DyowaError, ValueError):
    """A weight-function family produced weights that do not sum to one."""


class DimensionError(DyowaError, ValueError):
    """Image shapes are incompatible with the requested operation."""


class UsageError(DyowaError, ValueError):
    """Invalid parameter choice (unknown name, even window, ...)."""


class FormatError(DyowaError, ValueError):
    """Malformed image data.

    Attributes:
        offset: byte offset into the input where the problem was detected,
            or ``None`` when not applicable.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset
