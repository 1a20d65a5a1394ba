"""Exception hierarchy shared by every stage."""


class TouchAuthError(Exception):
    """Base class for all toolkit errors."""


class IngestError(TouchAuthError):
    """Input could not be read at all."""


class ConfigError(TouchAuthError, ValueError):
    """Bad configuration, bad header, or bad option value."""


class ContractError(TouchAuthError, ValueError):
    """A precondition promised by an upstream stage was violated."""


class DataError(TouchAuthError, ValueError):
    """Data is valid but unusable, e.g. too little enrollment data."""


class TrainingError(TouchAuthError, RuntimeError):
    """Model fitting failed (divergence, single-class labels)."""
