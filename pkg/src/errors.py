"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ATMatchError(Exception):
    """Base class for every error raised by this package."""


class EmbeddingError(ATMatchError, ValueError):
    """The input does not describe a valid plane embedding."""


class InconsistentRotation(EmbeddingError):
    pass


class NotPlanarEmbedding(EmbeddingError):
    pass


class RootNotOnOuterFace(EmbeddingError):
    pass


class RotsysFormatError(EmbeddingError):
    pass


class DisconnectedGraph(EmbeddingError):
    pass


class RootDeleted(ATMatchError, ValueError):
    pass


class UnknownVertex(ATMatchError, KeyError):
    pass


class TooLarge(ATMatchError):
    """An exact enumeration was refused because the input exceeds the configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds enumeration cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class NotInClass(ATMatchError, ValueError):
    pass


class ConfigurationStale(ATMatchError):
    pass


class TheoremViolation(ATMatchError):
    """No valid matching with a good orientation exists for a class member.

    Carries the offending graph so the event can be reproduced by hand.
    """

    def __init__(self, message: str, rotsys: str | None = None):
        super().__init__(message)
        self.rotsys = rotsys
