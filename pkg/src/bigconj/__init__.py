"""Fitzpatrick functions, conjugation and linear-relation calculus in finite dimensions."""

from .errors import (
    AllInfinite, BigConjError, DimensionMismatch, HypothesisFailed, IndeterminateSum,
    NoClosedForm, NoSolution, ParseError, RankDeficientBasis, ValidationError,
)
from .extreal import INF, NEG_INF, ExtReal
from .grids import GridSpec
from .relations import LinearRelation
from .sets import Ball, Box, Polytope, Segment, Singleton, Subspace

__all__ = [
    "AllInfinite", "BigConjError", "DimensionMismatch", "HypothesisFailed", "IndeterminateSum",
    "NoClosedForm", "NoSolution", "ParseError", "RankDeficientBasis", "ValidationError",
    "INF", "NEG_INF", "ExtReal", "GridSpec", "LinearRelation",
    "Ball", "Box", "Polytope", "Segment", "Singleton", "Subspace",
]

__version__ = "0.1.0"
