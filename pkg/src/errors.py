"""Exception types raised by the superdet library and mapped to exit codes by the CLI."""


class SuperdetError(Exception):
    """Base class for all superdet errors."""


class InvalidArgumentError(SuperdetError, ValueError):
    """An argument is outside its documented domain."""


class OutOfRangeError(SuperdetError, ValueError):
    """A computation would leave the numerically safe range."""


class NoDecaySignalError(SuperdetError):
    """A correlation series carries no usable decay information."""


class InadequateDataError(SuperdetError):
    """Too little data for a statistically stable answer."""


class TooLargeError(SuperdetError):
    """A requested workload exceeds its configured cap."""


class UsageError(SuperdetError):
    """The command line is malformed."""


class ConfigError(SuperdetError):
    """A configuration file could not be read or validated."""
