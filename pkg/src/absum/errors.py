"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, BudgetError -> 3,
InternalInvariantError -> 4.
"""


class AbsumError(Exception):
    """Base class for all package errors."""


class FamilyError(AbsumError):
    """A sequence/weight family is misconfigured (non-positive weight,
    unbounded generator, explicit list exhausted, ...)."""


class ConfigError(AbsumError):
    """Invalid experiment config: schema violation or unknown field."""


class BudgetError(AbsumError):
    """A window or enumeration exceeds its configured resource budget."""


class OracleBudgetError(BudgetError):
    """A naive oracle call exceeds its declared budget."""


class InternalInvariantError(AbsumError):
    """An internal consistency check failed; indicates a bug."""
