"""Exception types shared across the package."""


class RiskGapError(Exception):
    """Base class for all errors raised by this package."""


class AllocationError(RiskGapError):
    """Invalid risk-bucket allocation (bad length, negative weight, bad sum)."""


class ModelError(RiskGapError):
    """Invalid market model parameters (schema or numerical validity)."""


class MetricError(RiskGapError):
    """Invalid discrepancy-metric request (unknown id, bad penalty matrix, bad epsilon)."""


class DatasetError(RiskGapError):
    """Dataset ingestion or analytics failure (schema, row validation, empty slices)."""


class SynthesisError(RiskGapError):
    """Infeasible synthetic-cohort specification."""
