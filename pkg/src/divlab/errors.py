"""Exception hierarchy shared by all divlab modules."""


class DivlabError(Exception):
    """Base class for every error raised by divlab."""


class DomainError(DivlabError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapabilityError(DivlabError):
    """A function does not expose a derivative order that was requested."""


class ConditioningError(DivlabError, ArithmeticError):
    """A linear system is numerically singular."""


class AccuracyError(DivlabError, ArithmeticError):
    """Quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConvergenceError(DivlabError, ArithmeticError):
    """An iterative method (Remez exchange) stalled."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ValidationError(DivlabError, ValueError):
    """A modulus function is not a member of the admissible class."""


class CorpusLookupError(DivlabError, KeyError):
    """Unknown corpus identifier."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class PreconditionError(DivlabError, ValueError):
    """Knot separation or hypothesis of a check is violated."""


class ConfigError(DivlabError, ValueError):
    """Malformed trial configuration or baseline file."""
