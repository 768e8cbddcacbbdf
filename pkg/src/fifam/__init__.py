"""Construction, verification, structure and extremal search for
hierarchically r-closed theta-intersecting set families."""

from .core import (
    HALF,
    Family,
    FamilyError,
    Theta,
    Verdict,
    elements,
    is_intersecting,
    is_r_closed,
    is_sunflower,
    make_fraction,
    pair_ok,
    to_mask,
    tuple_ok,
)

__version__ = "0.1.0"

__all__ = [
    "HALF",
    "Family",
    "FamilyError",
    "Theta",
    "Verdict",
    "elements",
    "is_intersecting",
    "is_r_closed",
    "is_sunflower",
    "make_fraction",
    "pair_ok",
    "to_mask",
    "tuple_ok",
    "__version__",
]
