"""Exception hierarchy shared by every module."""


class QiRigidError(Exception):
    """Base class for all library errors."""


class InvalidSpec(QiRigidError, ValueError):
    pass


class ForeignElement(QiRigidError, ValueError):
    pass


class ResourceLimit(QiRigidError):
    def __init__(self, message, radius_completed=None):
        super().__init__(message)
        self.radius_completed = radius_completed


class Indeterminate(QiRigidError):
    pass


class OutOfRange(QiRigidError):
    pass


class BallTooSmall(QiRigidError):
    pass


class Inconclusive(QiRigidError):
    pass


class PreconditionViolated(QiRigidError, ValueError):
    pass


class NotFound(QiRigidError):
    pass


class InvalidFlow(QiRigidError):
    pass


class TooLarge(QiRigidError):
    pass


class NoRepeat(QiRigidError):
    def __init__(self, message, scanned=None):
        super().__init__(message)
        self.scanned = scanned or {}


class NotFlowPreserving(QiRigidError):
    pass


class NoCycle(QiRigidError):
    pass


class LiftMismatch(QiRigidError):
    pass
