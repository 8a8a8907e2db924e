"""Exception types shared by every module."""


class ChabtreeError(Exception):
    """Base class."""


class CapacityError(ChabtreeError):
    """An enumeration or construction would exceed its configured size cap."""


class DomainError(ChabtreeError, ValueError):
    """Input outside the operation's domain (bad radius, disconnected graph, ...)."""


class UnsupportedError(ChabtreeError):
    """The operation is not defined for this kind of group specification."""


class NotLocallyDetectableError(ChabtreeError):
    """Orbit representatives cannot be certified inside the explored ball."""
