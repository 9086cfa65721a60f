"""Exact bookkeeping for cutoff complexes of Hodge data and their analytic shadows."""

from .hodge import HodgeDatum, InvalidHodgeDatum, shipped, validate
from .lattice import Window
from .tcomplex import GradedSpace, build_truncation

__all__ = [
    "GradedSpace",
    "HodgeDatum",
    "InvalidHodgeDatum",
    "Window",
    "build_truncation",
    "shipped",
    "validate",
]

__version__ = "0.1.0"
