"""Exception taxonomy.

Every error that a caller can provoke with bad input gets its own class so
tests can assert on the precise failure mode.  Conditions that are ordinary
negative answers (infeasible matrix, Hall violator, non-planar verdict) are
returned as values, not raised.
"""

from __future__ import annotations


class StripPlanarityError(Exception):
    """Base class for all library errors."""


# -- graph construction ----------------------------------------------------

class StripViolation(StripPlanarityError):
    """An edge joins clusters that are not equal or consecutive."""

    def __init__(self, edge, labels):
        self.edge = edge
        self.labels = labels
        super().__init__(f"edge {edge} joins clusters {labels}")


class DanglingEndpoint(StripPlanarityError):
    """An edge references an undeclared vertex."""


class DuplicateVertexId(StripPlanarityError):
    """The same vertex id was declared twice."""


# -- embedding surgery -----------------------------------------------------

class NotIntraCluster(StripPlanarityError):
    """Contraction requested for an edge whose ends lie in different clusters."""


class LoopContraction(StripPlanarityError):
    """Contraction requested for a loop."""


class NonContiguousPartition(StripPlanarityError):
    """Vertex split arcs do not partition the rotation into two contiguous arcs."""


class NotACycle(StripPlanarityError):
    """Edge set does not form a single simple cycle."""


# -- walks and paths -------------------------------------------------------

class WalkNotInGraph(StripPlanarityError):
    """A walk references darts absent from the embedding."""


class NotAPath(StripPlanarityError):
    """Vertex sequence is not a path of the graph."""


class PreconditionViolated(StripPlanarityError):
    """A documented operation precondition does not hold for the input."""


class BudgetExceeded(StripPlanarityError):
    """Exhaustive search hit its configured budget before reaching a verdict."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


# -- parity drawings -------------------------------------------------------

class NotBounded(StripPlanarityError):
    """An edge spans clusters outside the closed interval of its endpoints."""


class NotEven(StripPlanarityError):
    """Operation requires an even drawing (all crossing parities zero)."""


class Not3ConnectedSubdivision(StripPlanarityError):
    """Base graph is not a subdivision of a 3-connected graph."""


class OddIndependentPair(StripPlanarityError):
    """Drawing has an odd pair of independent edges where evenness is required."""


class NotIncident(StripPlanarityError):
    """Named edges are not all incident to the named vertex."""


class ParityObstruction(StripPlanarityError):
    """Crossing-parity pattern at a vertex is not realizable by pull moves."""

    def __init__(self, message, quadruple=None):
        self.quadruple = quadruple
        super().__init__(message)


# -- matrices and PC-trees -------------------------------------------------

class StairViolation(StripPlanarityError):
    """A column of an ambiguous matrix has a 0/1 entry below an ambiguous one."""


class TooManyLeaves(StripPlanarityError):
    """PC-tree order enumeration requested above the configured leaf bound."""


# -- solver input classification -------------------------------------------

class NotASubdividedStar(StripPlanarityError):
    """Input graph is not a subdivided star."""


class LowDegree(StripPlanarityError):
    """Operation requires a vertex of degree at least three."""


class NotATree(StripPlanarityError):
    """Input graph is not a tree."""


class BadClusterRange(StripPlanarityError):
    """Cluster labels are outside the expected range."""


class NotATheta(StripPlanarityError):
    """Input graph is not a theta graph."""


class SearchBudgetExceeded(StripPlanarityError):
    """Backtracking solver exceeded its configured search bound."""


# -- embedder --------------------------------------------------------------

class NotCandidateEmbedding(StripPlanarityError):
    """In- and out-edges interleave in some rotation; no upward drawing exists."""

    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"in/out edges alternate at {vertex!r}")


class InternalContradiction(StripPlanarityError):
    """A step that theory guarantees must succeed failed: implementation bug."""


class UnsupportedClass(StripPlanarityError):
    """No exact algorithm is available for this input class."""
