"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes, so raising the right class matters:
ConfigError -> 2, DataError -> 3, NumericalError -> 4.
"""


class UpliftKitError(Exception):
    """Base class for all errors raised by upliftkit."""


class ConfigError(UpliftKitError):
    """Invalid configuration: bad file, bad key, inconsistent options."""


class DataError(UpliftKitError, ValueError):
    """Invalid data: malformed CSV, schema violations, empty arms."""


class NumericalError(UpliftKitError, ArithmeticError):
    """Numerical failure: rank deficiency, undefined importances."""
