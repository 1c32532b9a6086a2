"""Exact computation with multiple zeta values in Tate algebras over F_q[theta]."""

from .composition import (
    CompositionArray,
    Degree,
    EMPTY_ARRAY,
    EMPTY_SET,
    WeightedSubset,
    enumerate_admissible,
    format_array,
    parse_array,
)
from .context import Context
from .field import GF, gf
from .series import TruncSeries
from .theta import RationalFn, ThetaPoly, d_poly, l_poly
from .tpoly import TPoly

__all__ = [
    "CompositionArray",
    "Context",
    "Degree",
    "EMPTY_ARRAY",
    "EMPTY_SET",
    "GF",
    "RationalFn",
    "ThetaPoly",
    "TPoly",
    "TruncSeries",
    "WeightedSubset",
    "d_poly",
    "enumerate_admissible",
    "format_array",
    "gf",
    "l_poly",
    "parse_array",
]
