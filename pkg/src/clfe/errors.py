"""Exception types shared across the package.

Each failure mode gets its own class so the CLI can map exceptions to
stable exit codes and tests can assert on the precise cause.
"""


class ClfeError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteEntry(ClfeError):
    """A matrix or vector contains NaN or Inf."""


class EmptyClass(ClfeError):
    """A declared class id has no samples."""


class LengthMismatch(ClfeError):
    """Two aligned sequences differ in length."""


class DimensionError(ClfeError):
    """Matrix shapes are incompatible or out of range."""


class KTooLarge(ClfeError):
    """Requested neighbor count exceeds what the data can provide."""


class TooFewSamplesForThermal(ClfeError):
    """The heat-kernel bandwidth needs a 7th nearest neighbor (n >= 8)."""


class ZeroThermal(ClfeError):
    """Heat-kernel bandwidth is zero: at least 7 exact duplicate samples."""


class ZeroEmbeddingNorm(ClfeError):
    """A projected sample has (near-)zero norm; cosine similarity undefined."""


class EmptyPositiveRow(ClfeError):
    """A sample has no positive pair, so its loss term is undefined."""


class NonFiniteGradient(ClfeError):
    """Gradient contains NaN or Inf."""


class InvalidSplit(ClfeError):
    """train_per_class is infeasible for the given labels."""


class ParseError(ClfeError):
    """A data, config, or model file failed to parse."""


class MissingLabels(ClfeError):
    """A supervised method was requested on unlabeled data."""


class ConfigError(ClfeError):
    """Bad or unknown configuration key or value."""
