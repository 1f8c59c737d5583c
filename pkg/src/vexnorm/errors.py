"""Exception types shared across the library."""


class VexnormError(Exception):
    """Base class for all library errors."""


class ArgumentError(VexnormError, ValueError):
    """A caller-supplied argument violates a documented precondition."""


class BudgetError(VexnormError, RuntimeError):
    """A requested discretization exceeds the configured resource budget."""


class ConstructionError(VexnormError, ValueError):
    """A test-function family member could not be constructed as requested."""


class DataError(VexnormError, ValueError):
    """An experiment input is degenerate (e.g. a zero-norm family member)."""


class ConfigError(VexnormError, ValueError):
    """An experiment configuration file is malformed or inconsistent."""
