"""Exact sl(2) boundary calculus: series blocks, rewriting engine, half-space model."""

from .errors import (
    DomainError,
    ExceptionalWeightError,
    MalformedInputError,
    ModelError,
    NoSolutionError,
    ParseError,
    PoleError,
    Sl2BoundaryError,
    WeightMismatchError,
)
from .exact import H0, RationalFunction, WeightPolynomial, pochhammer, ratfunc_eval, ratfunc_reduce

__version__ = "0.1.0"
