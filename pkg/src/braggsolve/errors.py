"""Error classes shared across the solver.

The CLI maps these onto distinct exit codes, so raising the right class
matters for scripting: ConfigError -> 2, DataError -> 3, NumericalError -> 4.
"""


class ConfigError(ValueError):
    """Invalid configuration value or inconsistent grid/beam setup."""


class DataError(ValueError):
    """Malformed or insufficient input data (tables, trajectory files)."""


class NumericalError(RuntimeError):
    """Non-finite state or a failed linear solve during time stepping."""


class DomainError(ValueError):
    """Query point outside the computational domain."""
