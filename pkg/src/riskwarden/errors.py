"""Exception hierarchy shared across the engine.

Every error carries a stable machine-readable ``code`` so the CLI and the
HTTP service can map failures consistently.
"""


class RiskwardenError(Exception):
    """Base class for all engine errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DomainError(RiskwardenError):
    """A value fell outside its documented domain."""

    code = "domain_error"


class DriverOutOfDomain(DomainError):
    code = "driver_out_of_domain"


class InsufficientHistory(RiskwardenError):
    code = "insufficient_history"


class DegenerateTime(RiskwardenError):
    code = "degenerate_time"


class BackwardForecast(RiskwardenError):
    code = "backward_forecast"


class KindMismatch(RiskwardenError):
    code = "kind_mismatch"


class NonMonotoneTime(RiskwardenError):
    code = "non_monotone_time"


class UnknownRisk(RiskwardenError):
    code = "unknown_risk"


class DuplicateId(RiskwardenError):
    code = "duplicate_id"


class DanglingDependency(RiskwardenError):
    code = "dangling_dependency"


class PathExists(RiskwardenError):
    code = "path_exists"


class InvalidHorizon(RiskwardenError):
    code = "invalid_horizon"


class SchemaVersionMismatch(RiskwardenError):
    code = "schema_version_mismatch"


class ParseError(RiskwardenError):
    code = "parse_error"


class MalformedTable(RiskwardenError):
    code = "malformed_table"


class EmptyTaxonomy(RiskwardenError):
    code = "empty_taxonomy"


class StageError(RiskwardenError):
    """Failure inside one stage of the nine-stage assessment cycle."""

    code = "stage_error"

    def __init__(self, stage: int, message: str):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
