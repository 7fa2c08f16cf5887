"""Exception types shared across the package."""


class CarlitzError(Exception):
    """Base class for errors raised by this package."""


class RamificationError(CarlitzError):
    """A q-th root would push exponent denominators past the configured cap."""


class PrecisionLossError(CarlitzError):
    """An operation produced a value known to no digits at all."""


class TruncationError(CarlitzError):
    """A computation ran out of known series/expansion coefficients."""


class ResonanceError(CarlitzError):
    """A regular-singular solve hit a vanishing resonance denominator."""

    def __init__(self, message, resonances=None):
        super().__init__(message)
        self.resonances = list(resonances or [])


class UndefinedTermError(CarlitzError):
    """A hypergeometric term has a vanishing denominator but nonzero numerator."""


class InputError(CarlitzError):
    """Malformed user-supplied input (CLI / JSON exchange format)."""
