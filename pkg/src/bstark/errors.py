"""Exception hierarchy shared across the package.

CLI exit codes: ConfigError -> 2, PrecisionError -> 3, InvariantError -> 4.
"""


class BStarkError(Exception):
    """Base class for all package errors."""


class ConfigError(BStarkError):
    """Invalid run configuration (bad d, non-inert p, wrong smoothing prime...)."""


class UnsupportedFieldError(ConfigError):
    """Field outside the supported range (non-squarefree d, class number > 1)."""


class PrecisionError(BStarkError):
    """Working p-adic precision is too small to complete a reconstruction."""


class InvariantError(BStarkError):
    """A proven identity failed, which signals an engine bug, not user error."""


class DegenerateShiftError(BStarkError):
    """Lattice coset passes through the cone vertex; choose a different shift."""
