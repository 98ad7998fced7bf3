"""Exception types shared across the package."""


class DmtError(Exception):
    """Base class for every error raised by dmtlab."""


class DomainError(DmtError, ValueError):
    """An argument lies outside the region where a formula is defined."""


class SizeError(DmtError, ValueError):
    """A brute-force search was asked for a problem too large to enumerate."""


class UnsupportedCaseError(DmtError, ValueError):
    """A curve was requested for a case whose diversity is unbounded."""


class InsufficientDataError(DmtError, ValueError):
    """Too few usable points to fit a slope."""
