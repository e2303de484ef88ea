"""Zero-cycles on bielliptic surfaces: exponent certificates and a Brauer-group witness."""

__version__ = "0.1.0"

from .elliptic import O, EllipticCurve
from .errors import (
    BiellipticError,
    InputError,
    PreconditionError,
    ResourceError,
    ScriptParseError,
    SingularCurveError,
    UnsupportedPrimeError,
)

__all__ = [
    "O",
    "EllipticCurve",
    "BiellipticError",
    "InputError",
    "PreconditionError",
    "ResourceError",
    "ScriptParseError",
    "SingularCurveError",
    "UnsupportedPrimeError",
    "__version__",
]
