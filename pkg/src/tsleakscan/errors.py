"""Exception hierarchy shared across the package."""


class LeakScanError(Exception):
    """Base class for all errors raised by tsleakscan."""


class FormatError(LeakScanError):
    """Input file does not parse under the declared format."""


class ValidationError(LeakScanError):
    """Parsed input violates a collection invariant (duplicate id, missing value, ...)."""


class ContractViolation(LeakScanError):
    """A caller broke an operation precondition (length mismatch, empty collection, ...)."""


class ConsistencyError(LeakScanError):
    """A report refers to series that are not part of the given collection."""


class ConfigError(LeakScanError):
    """A configuration value is outside its legal range."""
