"""Exception taxonomy shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(ToolkitError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class NumericError(ToolkitError, RuntimeError):
    """A numerical procedure failed to converge or certify its result."""


class WindowTooSmallError(NumericError):
    """A truncated lattice window leaks more probability mass than allowed."""


class ConfigError(ToolkitError, ValueError):
    """An experiment or CLI configuration is malformed."""
