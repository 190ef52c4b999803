"""Exception types shared across the package."""
from __future__ import annotations


class CstarkError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(CstarkError, ValueError):
    """Shapes do not fit the operation."""


class DivisibilityError(CstarkError, ValueError):
    """A unital embedding M_m -> M_n was requested with m not dividing n."""


class InputError(CstarkError, ValueError):
    """An argument violates a precondition (e.g. a non-projection)."""


class OutOfBasinError(InputError):
    """Spectral rounding was asked to round a matrix too far from a projection."""


class CauchyViolation(CstarkError):
    """Approximations of a computable point are not a fast Cauchy sequence."""

    def __init__(self, k: int, distance_lo, bound):
        self.k = k
        self.distance_lo = distance_lo
        self.bound = bound
        super().__init__(
            f"approximations {k} and {k + 1} are at distance >= {distance_lo}, "
            f"exceeding the bound {bound}")


class StagingError(CstarkError):
    """A staged enumeration produced too few items within the given fuel."""

    def __init__(self, message: str, fuel: int):
        self.fuel = fuel
        super().__init__(f"{message} (fuel spent: {fuel})")


class FuelExhausted(CstarkError):
    """A search ran out of fuel; carries the amount spent."""

    def __init__(self, message: str, fuel: int):
        self.fuel = fuel
        super().__init__(f"{message} (fuel spent: {fuel})")


class SupernaturalMismatchSuspected(CstarkError):
    """The interleaving search failed; the two supernatural numbers probably differ."""

    def __init__(self, stage: int, searched_bound: int):
        self.stage = stage
        self.searched_bound = searched_bound
        super().__init__(
            f"no divisibility match at interleaving step {stage} "
            f"after searching stages below {searched_bound}")


class ParseError(CstarkError, ValueError):
    """Text input could not be parsed; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int = 1, column: int = 1, text: str | None = None):
        self.line = line
        self.column = column
        self.text = text
        super().__init__(f"line {line}, column {column}: {message}")
