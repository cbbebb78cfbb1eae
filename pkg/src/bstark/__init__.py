"""Exact arithmetic pipeline for Brumer-Stark units over real quadratic fields.

Layers, bottom up: integer/rational linear algebra (`intmat`), real quadratic
fields and narrow ray class groups (`field`), signed Shintani cone domains
(`cones`), partial zeta values at s=0 and Stickelberger elements (`zeta`),
the unramified quadratic local ring (`padic`), integer-valued measures
(`measure`), unit reconstruction and verification (`pipeline`), and group-ring
ideal algebra (`groupring`).  `cli` is the batch front end.

Everything is exact: rationals, integers, residues.  No floating point enters
any computed value; numpy is used only for large exact integer enumerations.
"""

ENGINE_VERSION = "bstark-0.1.0"

from .errors import (
    BStarkError,
    ConfigError,
    DegenerateShiftError,
    InvariantError,
    PrecisionError,
    UnsupportedFieldError,
)
from .field import FieldContext, FieldElement, IdealF, make_field

__all__ = [
    "ENGINE_VERSION",
    "BStarkError",
    "ConfigError",
    "DegenerateShiftError",
    "InvariantError",
    "PrecisionError",
    "UnsupportedFieldError",
    "FieldContext",
    "FieldElement",
    "IdealF",
    "make_field",
]
