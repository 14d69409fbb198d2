"""Symbolic and numerical experiments with real polynomial map germs."""
from .poly import DimensionMismatch, MapGerm, Poly, PolyMat, TermLimitExceeded, compose, det, jacobian, minors
from .parse import format_germ, load_germ, parse_germ_file, parse_poly

__version__ = "0.1.0"
