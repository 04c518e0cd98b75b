"""Exception hierarchy shared by every solver module."""


class GameError(Exception):
    """Base class for all errors raised by extgames."""


class DomainError(GameError, ValueError):
    """An argument lies outside the operation's domain (unknown node, leaf, ...)."""


class PreconditionError(GameError):
    """The game does not belong to the class an operation is defined for."""


class CapacityError(GameError):
    """An enumeration would exceed its configured cap."""

    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: {count} objects exceeds cap {cap}")
        self.what = what
        self.count = count
        self.cap = cap


class ProtocolError(GameError):
    """A user-supplied script (removal list, tie-break choice) is illegal at its step."""


class ValidationError(GameError):
    """An input object violates its structural invariants."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class InternalConsistencyError(GameError, AssertionError):
    """A runtime self-check failed. Always a bug."""
