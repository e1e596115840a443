"""gradus: exact computer algebra for degree-like functions on polynomial rings."""

__version__ = "0.1.0"

from .rings import (
    NEG_INF,
    ContextMismatchError,
    LaurentPolynomial,
    ParseError,
    PolyError,
    RingContext,
    SubstitutionError,
    XiPoly,
    format_poly,
    parse_poly,
    ring_context,
)

__all__ = [
    "NEG_INF",
    "ContextMismatchError",
    "LaurentPolynomial",
    "ParseError",
    "PolyError",
    "RingContext",
    "SubstitutionError",
    "XiPoly",
    "format_poly",
    "parse_poly",
    "ring_context",
    "__version__",
]
