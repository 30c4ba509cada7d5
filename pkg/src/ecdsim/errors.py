"""Error taxonomy shared across the package.

Each class maps to a CLI exit code: configuration problems exit 2,
capacity/accuracy problems exit 3, numerical failures exit 4.
"""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration / contract violation."""


class CapacityError(RuntimeError):
    """A resource budget (branch count, memory, scan size) was exceeded."""


class AccuracyError(RuntimeError):
    """A requested accuracy cannot be met (e.g. truncation leak too large)."""


class NumericalError(RuntimeError):
    """A computation produced an unusable numerical result."""


EXIT_CODES = {
    ConfigError: 2,
    CapacityError: 3,
    AccuracyError: 3,
    NumericalError: 4,
}
