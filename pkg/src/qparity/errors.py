"""Exception types with CLI exit-code semantics.

ConfigError maps to exit code 2 (bad user input), PreconditionError and
its subclasses to exit code 3 (physically illegal simulation request).
"""


class ConfigError(ValueError):
    """Invalid run configuration (bad flag value, malformed config file)."""


class PreconditionError(ValueError):
    """A simulation operation was asked to do something its contract forbids."""


class ConditionViolation(PreconditionError):
    """A loss pattern destroys a logical qubit entirely (no photon left)."""
