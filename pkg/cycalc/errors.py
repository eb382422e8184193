"""Exception hierarchy for the calculus engine"""


class CalculusError(Exception):
    """Base class for every error raised by the engine"""


class DimensionMismatch(CalculusError):
    """Vector or matrix sizes do not agree"""


class NotAComplex(CalculusError):
    """A composite of two differentials is nonzero"""

    def __init__(self, message, entry=None):
        super().__init__(message)
        self.entry = entry


class NotAChainMap(CalculusError):
    """A map does not commute with the differentials"""

    def __init__(self, message, entry=None):
        super().__init__(message)
        self.entry = entry


class TruncationExceeded(CalculusError):
    """A request falls outside the configured window"""


class AlgebraValidationError(CalculusError):
    """Structure constants violate associativity, unit or weight laws"""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InconsistentSystem(CalculusError):
    """A linear system has no solution; carries the certificate row combination"""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class WindowTooSmall(CalculusError):
    """An operator system that must be solvable was not solvable on the window"""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NotACycle(CalculusError):
    """An element expected to be closed is not"""


class NotMaurerCartan(CalculusError):
    """An element fails the Maurer-Cartan equation"""


class RelationFailure(CalculusError):
    """An L-infinity relation fails; carries the arity where it first fails"""

    def __init__(self, message, arity=None):
        super().__init__(message)
        self.arity = arity


class ConditionViolation(CalculusError):
    """A deformation object or morphism violates its defining conditions"""

    def __init__(self, message, conditions=()):
        super().__init__(message)
        self.conditions = tuple(conditions)


class StabilizationError(CalculusError):
    """A truncated window did not stabilize when enlarged"""


class ConfigError(CalculusError):
    """Invalid run configuration"""
