"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad parameters or malformed inputs (CLI exit code 2)."""


class ScaleCeilingError(RuntimeError):
    """An operation was asked to exceed its documented desk-scale ceiling
    (CLI exit code 3)."""


class BudgetViolation(ValidationError):
    """A jammer strategy produced an error pattern outside its flip budget
    or outside its allowed support."""
