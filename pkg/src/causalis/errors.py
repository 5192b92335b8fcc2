"""Exception types shared across the package."""


class CausalisError(Exception):
    """Base class for all package errors."""


class NetworkError(CausalisError, ValueError):
    """A network description is malformed (bad CPT, names, shapes)."""


class RealizationError(CausalisError):
    """A transition has zero probability under the network."""


class InvariantError(CausalisError):
    """An internal consistency check failed.

    Seeing one of these means a bug, not bad input.
    """
