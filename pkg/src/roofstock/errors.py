"""Exception types shared across the pipeline."""


class RoofstockError(Exception):
    """Base class for all pipeline errors."""


class ConfigurationError(RoofstockError):
    """Invalid configuration: bad transform, thresholds out of range, unknown keys."""


class ValidationError(RoofstockError):
    """Input data violates a contract (bad geometry, unknown label, split conflict)."""


class PipelineError(RoofstockError):
    """A pipeline stage failed; carries the underlying backend message."""
