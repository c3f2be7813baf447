"""Exception hierarchy shared across the library.

Numeric trouble (NaN/Inf, divergence) is kept distinct from bad input
data and bad configuration so the CLI can map each family to its own
exit code.
"""


class LexsentError(Exception):
    """Base class for all library errors."""


class ShapeError(LexsentError):
    """Operand shapes are inconsistent with the operation."""


class NumericError(LexsentError):
    """A tensor value is NaN or infinite."""


class DivergenceError(NumericError):
    """Training produced a non-finite loss; message names the epoch."""


class ConfigError(LexsentError):
    """A configuration value is out of range or missing."""


class DataError(LexsentError):
    """A corpus record or data file is malformed."""


class CheckpointError(LexsentError):
    """A checkpoint is unreadable or incompatible with the model."""


class OracleError(LexsentError):
    """The finite-difference oracle detected a non-deterministic loss."""
