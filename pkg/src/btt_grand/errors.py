"""Exception types raised across the package."""

from __future__ import annotations


class ShapeError(ValueError):
    """Operand dimensions do not agree."""


class NotInvertibleError(ValueError):
    """A square GF(2) matrix is singular."""


class SamplingError(RuntimeError):
    """Rejection sampling ran out of attempts."""


class ParseError(ValueError):
    """Malformed alist input. ``line`` is 1-based, or None if unknown."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConstructionError(ValueError):
    """A code could not be built from the given parameters."""


class TransformationError(RuntimeError):
    """The balanced tree transformation found no acceptable matrix.

    ``best`` holds the best attempt seen (a :class:`BttResult`), if any.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class SchemeError(ValueError):
    """Segmentation cannot be built, e.g. a chosen leaf set is empty."""


class ParityInputError(KeyError):
    """A parity assignment is missing a required segment."""


class ConfigurationError(ValueError):
    """Decoder inputs are inconsistent with each other."""


class AnalysisError(ValueError):
    """Simulation results lack what an analysis needs."""
