"""Exception types shared across the package."""


class TampernetError(Exception):
    """Base class for package errors."""


class InputError(TampernetError):
    """Invalid user-supplied data (network files, scenarios, CLI args)."""


class InvariantError(TampernetError):
    """An internal structural invariant was violated; indicates a bug."""
