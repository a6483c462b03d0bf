"""Exception types shared across the package.

The CLI maps these onto exit codes: input-side problems (DimensionError,
ValidationError, CapacityError, StateFileError) exit with 2, violations of
guaranteed internal inequalities (InternalConsistencyError) exit with 1.
"""


class GcqError(Exception):
    """Base class for all package errors."""


class DimensionError(GcqError, ValueError):
    """Array shapes or local dimensions are incompatible with the operation."""


class ValidationError(GcqError, ValueError):
    """Input violates a numeric precondition (normalization, hermiticity, ...)."""


class CapacityError(GcqError, ValueError):
    """Requested dense tensor exceeds the configured capacity guard."""


class StateFileError(GcqError, ValueError):
    """A state file could not be parsed or failed its invariants on load."""


class InternalConsistencyError(GcqError, RuntimeError):
    """A computed value violates an inequality that holds by construction."""
