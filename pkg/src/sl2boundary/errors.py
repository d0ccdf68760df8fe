"""Exception hierarchy shared by the engines and the CLI."""

from __future__ import annotations


class Sl2BoundaryError(Exception):
    """Base class for all package errors."""

    exit_code = 4


class MalformedInputError(Sl2BoundaryError, ValueError):
    """Structurally invalid input (zero denominator, bad generator, ...)."""

    exit_code = 3


class DomainError(Sl2BoundaryError, ValueError):
    """An operation was called outside its mathematical domain."""

    exit_code = 3


class PoleError(DomainError, ZeroDivisionError):
    """A rational function was evaluated at one of its poles.

    ``h0`` is the offending weight; ``index`` is the series index at which
    the pole surfaced, when known.
    """

    def __init__(self, h0, index=None, message=None):
        self.h0 = h0
        self.index = index
        if message is None:
            message = f"pole at h0 = {h0}"
            if index is not None:
                message += f" (series index {index})"
        super().__init__(message)


class ExceptionalWeightError(DomainError):
    """First-kind expansion hit an exceptional weight h0 in {2, 3, ...}.

    Carries the order ``ell`` at which the recursion stops, the reported
    obstruction and the tangential quantity P_{h0-1} f0 restricted to the
    boundary so callers can route to :func:`obstruction` or the log solver.
    """

    def __init__(self, h0, ell, obstruction=None, tangential=None, multiple=None):
        self.h0 = h0
        self.ell = ell
        self.obstruction = obstruction
        self.tangential = tangential
        self.multiple = multiple
        super().__init__(
            f"exceptional weight h0 = {h0}: first-kind expansion obstructed at "
            f"order {ell}; use obstruction() or solve_log_kind()"
        )


class WeightMismatchError(DomainError):
    pass


class NoSolutionError(DomainError):
    pass


class ModelError(Sl2BoundaryError):
    """Internal inconsistency detected by a model computation."""

    exit_code = 4


class ParseError(Sl2BoundaryError, ValueError):
    """Syntax error with a 1-based line/column position."""

    exit_code = 2

    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {self.line}, column {self.column}")
