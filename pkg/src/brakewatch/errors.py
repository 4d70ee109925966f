"""Exception types shared across the package."""


class BrakewatchError(Exception):
    """Base class for all errors raised by this package."""


class ModelFormatError(BrakewatchError):
    """Model document violates the model file schema or tree structure."""


class DimensionError(BrakewatchError):
    """Feature vector length does not match the model."""


class TrainingError(BrakewatchError):
    """Training preconditions not met (empty data, single-class labels)."""


class ConfigError(BrakewatchError):
    """Invalid configuration: bad parameters, missing files, cross-validation failures."""


class SchemaError(BrakewatchError):
    """A data, catalog, transform, or event file violates its schema."""


class NotFoundError(BrakewatchError):
    """A referenced row, entity, feature, or alert does not exist."""

    def __init__(self, message: str, **refs):
        super().__init__(message)
        self.refs = refs


class ConflictError(BrakewatchError):
    """A key that must be unique was seen twice (row key, alert id)."""


class OracleCapError(BrakewatchError):
    """Exhaustive attribution oracle refused: too many participating features."""


class EmptyDistributionError(BrakewatchError):
    """No non-missing values available to summarize."""
