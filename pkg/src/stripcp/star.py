"""Strip planarity for subdivided stars.

Only the rotation at the center is a free choice; every other vertex has
degree at most two.  A pair of paths through the center, one dipping to a
low level while staying under a high one, the other climbing to the high
level while staying above the low one, forbids its four center edges from
alternating in the rotation.  Grouping these vetoes by the witnessing
(low, high) level pair, ordering the pairs into blocks so that the
involved edge sets only shrink, and blanking columns that have dropped
out of play yields a 0/1/* stair matrix.  The ambiguous circular-ones
test on that matrix decides strip planarity and hands back a rotation
that realizes a strip clustered embedding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    InternalContradiction,
    NotASubdividedStar,
    PreconditionViolated,
)
from .graph import (
    ClusteredGraph,
    Dart,
    EdgeId,
    EmbeddedGraph,
    Vertex,
    build_embedding,
    default_embedding,
    rev,
)
from .pctree import AmbiguousMatrix, Infeasible, stair_closure, test_ambiguous


@dataclass(frozen=True)
class RotationRestriction:
    """One veto group: cap edges must not alternate with cup edges.

    ``cap_edges`` are the center edges opening a descent to ``low`` that
    stays strictly under ``high``; ``cup_edges`` open an ascent to
    ``high`` staying strictly above ``low``.  Any cap assembled from two
    cap edges and any cup from two cup edges meet exactly at the center,
    so the induced constraint is purely on the rotation there.
    """

    low: int
    high: int
    cap_edges: frozenset[EdgeId]
    cup_edges: frozenset[EdgeId]

    @property
    def edges(self) -> frozenset[EdgeId]:
        return self.cap_edges | self.cup_edges


@dataclass(frozen=True)
class IntervalSet:
    """All veto groups of a star, in block order.

    The order starts with the pair of largest low and smallest high
    level, lists its block (descents deepening, then ascents growing),
    and recurses on the strictly wider pairs.  Along this order the edge
    set of a group is contained in the union of the previous group's
    edge sets once trimmed, which is what makes the stair matrix work.
    """

    center: Vertex
    intervals: tuple[RotationRestriction, ...]

    def level_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((r.low, r.high) for r in self.intervals)


def _center_of(G: ClusteredGraph) -> Vertex:
    if not G.is_subdivided_star:
        raise NotASubdividedStar("input is not a subdivided star")
    branch = [v for v in G.vertices if G.degree(v) >= 3]
    if not branch:
        raise NotASubdividedStar("no branch vertex: the graph is a path")
    return branch[0]


def _leg_profile(G: ClusteredGraph, first: Dart) -> list[int]:
    """Cluster labels along the leg entered through ``first``."""
    labels = [G.gamma[G.tail(first)]]
    prev = first
    cur = G.head(first)
    while True:
        labels.append(G.gamma[cur])
        onward = [d for d in G.incident[cur] if d != rev(prev)]
        if not onward:
            return labels
        prev = onward[0]
        cur = G.head(prev)


def _excursions(profile: list[int]) -> tuple[dict[int, int], dict[int, int]]:
    """First-visit summaries of a leg profile.

    For every level below the start, the maximum seen up to its first
    visit; for every level above, the minimum seen.  Prefixes ending at
    a first visit are the extreme-path halves with the least peak (or
    greatest valley) through this leg, since longer prefixes only widen
    the range.
    """
    start = profile[0]
    drop: dict[int, int] = {}
    rise: dict[int, int] = {}
    hi = lo = start
    for x in profile:
        hi = max(hi, x)
        lo = min(lo, x)
        if x < start and x not in drop:
            drop[x] = hi
        if x > start and x not in rise:
            rise[x] = lo
    return drop, rise


def leg_interval_order(
    center_label: int, legs: Mapping[EdgeId, Sequence[int]]
) -> tuple[RotationRestriction, ...]:
    """Block-ordered veto groups computed from leg label profiles.

    ``legs`` maps a leg key (reused in the cap/cup sets of the result)
    to the labels along that leg, center first.  Works for any star-like
    bundle of paths sharing one hub, whether or not the hub is an actual
    vertex of some graph at hand.
    """
    drops: dict[EdgeId, dict[int, int]] = {}
    rises: dict[EdgeId, dict[int, int]] = {}
    for key, prof in legs.items():
        if not prof or prof[0] != center_label:
            raise PreconditionViolated("leg profile must start at the center")
        drops[key], rises[key] = _excursions(list(prof))
    g = center_label
    lo = min((min(p) for p in legs.values()), default=g)
    hi = max((max(p) for p in legs.values()), default=g)
    found: dict[tuple[int, int], RotationRestriction] = {}
    for s in range(lo, g):
        for b in range(g + 1, hi + 1):
            caps = frozenset(
                e for e, dm in drops.items() if s in dm and dm[s] < b
            )
            cups = frozenset(
                e for e, rm in rises.items() if b in rm and rm[b] > s
            )
            # a cap needs two legs and a cup two more; the sets are
            # disjoint because one leg cannot both descend under `high`
            # and ascend over `low` first
            if caps & cups:
                raise InternalContradiction("cap and cup edges overlap")
            if len(caps) >= 2 and len(cups) >= 2:
                found[(s, b)] = RotationRestriction(s, b, caps, cups)

    remaining = set(found)
    ordered: list[RotationRestriction] = []
    while remaining:
        s0 = max(s for s, _ in remaining)
        b0 = min(b for _, b in remaining)
        if (s0, b0) not in remaining:
            raise InternalContradiction("witness pairs are not interlocked")
        deepening = sorted(
            (p for p in remaining if p[1] == b0 and p[0] < s0), reverse=True
        )
        growing = sorted(p for p in remaining if p[0] == s0 and p[1] > b0)
        block = [(s0, b0), *deepening, *growing]
        ordered.extend(found[p] for p in block)
        remaining.difference_update(block)
    return tuple(ordered)


def interval_order(star: ClusteredGraph) -> IntervalSet:
    """Every witnessed (low, high) pair with its edge sets, block-ordered."""
    center = _center_of(star)
    legs = {
        d >> 1: _leg_profile(star, d) for d in star.incident[center]
    }
    return IntervalSet(
        center=center,
        intervals=leg_interval_order(star.gamma[center], legs),
    )


def restriction_rows(
    intervals: Sequence[RotationRestriction], keys: Sequence[EdgeId]
) -> list[tuple[int | str, ...]]:
    """One 0/1/* row per veto group: 0 on caps, 1 on cups, * elsewhere."""
    return [
        tuple(
            0 if k in r.cap_edges else 1 if k in r.cup_edges else "*"
            for k in keys
        )
        for r in intervals
    ]


def build_star_matrix(star: ClusteredGraph) -> AmbiguousMatrix:
    """The stair matrix over center edges; rows follow the block order.

    Row entries: 0 on surviving cap edges, 1 on surviving cup edges, *
    elsewhere.  A column is trimmed (goes ambiguous) from the first row
    whose edge set misses it onward, even if a later group would name it
    again; the discarded occurrences are implied by the earlier rows.
    """
    iv = interval_order(star)
    columns = tuple(sorted(d >> 1 for d in star.incident[iv.center]))
    return stair_closure(restriction_rows(iv.intervals, columns), columns)


@dataclass(frozen=True)
class StarSolution:
    planar: bool
    center: Vertex | None = None
    rotation: tuple[EdgeId, ...] | None = None
    matrix: AmbiguousMatrix | None = None
    embedding: EmbeddedGraph | None = None


def star_embedding(
    star: ClusteredGraph, center: Vertex, rotation: tuple[EdgeId, ...]
) -> EmbeddedGraph:
    """Embedding with the given cyclic edge order at the center."""
    rot: dict[Vertex, list[Dart]] = {
        v: list(star.incident[v]) for v in star.gamma
    }
    at_center = []
    for e in rotation:
        u, _ = star.edges[e]
        at_center.append(2 * e + (0 if u == center else 1))
    if sorted(at_center) != sorted(rot[center]):
        raise PreconditionViolated(
            "rotation must name each center edge exactly once"
        )
    rot[center] = at_center
    return build_embedding(star, rot)


def solve_star(star: ClusteredGraph) -> StarSolution:
    """Decide strip planarity of a subdivided star.

    On acceptance the accompanying rotation at the center realizes a
    strip clustered embedding; paths are accepted outright since their
    embedding is unique up to reflection and two sub-paths of a path
    never cross.
    """
    if not star.is_subdivided_star:
        raise NotASubdividedStar("input is not a subdivided star")
    if all(star.degree(v) <= 2 for v in star.vertices):
        return StarSolution(planar=True, embedding=default_embedding(star))
    matrix = build_star_matrix(star)
    order = test_ambiguous(matrix)
    if order is Infeasible:
        return StarSolution(
            planar=False, center=_center_of(star), matrix=matrix
        )
    rotation = tuple(order)
    center = _center_of(star)
    return StarSolution(
        planar=True,
        center=center,
        rotation=rotation,
        matrix=matrix,
        embedding=star_embedding(star, center, rotation),
    )
