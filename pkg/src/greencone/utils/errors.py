"""
Errors raised by greencone. Every library failure derives from GreenConeError so the CLI can
map it onto an exit code.
"""


class GreenConeError(Exception):
    """Base class of all greencone errors."""


class UnsupportedProblem(GreenConeError):
    """The (n, k, B) combination has no catalogued kernel or envelope."""


class DomainError(GreenConeError):
    """A point lies outside the domain where the quantity is defined."""


class QuadratureFailure(GreenConeError):
    """Adaptive quadrature could not reach the requested tolerance."""


class RootNotFound(GreenConeError):
    """A bracketing search found no sign change. Indicates a bug, not bad input."""


class InvalidThreshold(GreenConeError):
    """A hypothesis threshold is not positive."""


class ThresholdOrdering(GreenConeError):
    """Thresholds violate the ordering a theorem requires."""


class NoConvergence(GreenConeError):
    """A fixed-point iteration did not converge from a seed."""


class SlotUnfilled(GreenConeError):
    """A multiplicity certificate has a localization slot with no solution."""

    def __init__(self, slot: str):
        super().__init__(f"no accepted solution fills slot '{slot}'")
        self.slot = slot


class ExpressionError(GreenConeError):
    """An expression string could not be parsed or uses forbidden names."""


class NonlinearityError(GreenConeError):
    """Branch list does not define a valid nonnegative continuous nonlinearity."""


class ConfigError(GreenConeError):
    """A problem or settings file is malformed."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
