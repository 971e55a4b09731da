"""Exception hierarchy.

Two families matter for the CLI exit-code contract: invalid input
(:class:`InputError`, exit code 2) and statistical degeneracy discovered
at runtime (:class:`DegeneracyError`, exit code 3).  Everything else is a
plain bug and escapes as whatever it is.
"""

from __future__ import annotations


class TailTreeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(TailTreeError):
    """Invalid input: bad parameters, malformed files, shape mismatches."""


class InvalidParameter(InputError):
    """A numeric parameter is outside its admissible range."""


class DimensionMismatch(InputError):
    """Two objects that must share a dimension do not."""


class DimensionTooLarge(InputError):
    """The requested dimension exceeds a hard combinatorial limit."""


class KOutOfRange(InputError):
    """The effective-sample-size parameter k is outside its valid range."""


class NegativeGamma(InvalidParameter):
    """A Husler-Reiss variogram parameter is negative."""


class NotSymmetric(InputError):
    """A matrix that must be symmetric is not."""


# -- tree structure ----------------------------------------------------------

class TreeStructureError(InputError):
    """An edge list does not describe a labeled tree."""


class WrongEdgeCount(TreeStructureError):
    """A tree on d nodes needs exactly d - 1 edges."""


class SelfLoop(TreeStructureError):
    """An edge joins a node to itself."""


class DuplicateEdge(TreeStructureError):
    """The same unordered node pair appears twice."""


class Disconnected(TreeStructureError):
    """The edges do not connect all nodes."""


class InvalidNode(TreeStructureError):
    """A node index is outside [0, d)."""


class EdgeModelMismatch(InputError):
    """edge_models does not carry exactly one entry per tree edge."""


# -- file parsing ------------------------------------------------------------

class ParseError(InputError):
    """A file cannot be parsed; carries 1-based row/column when known."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        self.row = row
        self.col = col
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", column {col}" if col is not None else "") + ")"
        super().__init__(message + where)


class TooFewRows(ParseError):
    """A data matrix needs at least two rows."""


class TooFewColumns(ParseError):
    """A data matrix needs at least two numeric columns."""


class NonNumericCell(ParseError):
    """A data cell could not be parsed as a float."""


# -- degeneracy --------------------------------------------------------------

class DegeneracyError(TailTreeError):
    """The data admit no meaningful answer (exit code 3)."""


class NoFiniteTree(DegeneracyError):
    """No spanning tree of finite total weight exists."""


class AllZeroWeights(DegeneracyError):
    """A weight vector that must have positive mass is all zero."""


class SimulationBudgetExceeded(TailTreeError):
    """The exact sampler exceeded its proposal cap; diagnostic, not input error."""
