"""Algebraic crossing numbers of walks in an embedded graph.

Two walks are drawn as curves that follow their edge sequences, perturbed
into parallel lanes along shared edges so that all crossings happen inside
small disks around shared vertices.  Inside a disk every visit is either a
chord (the walk passes through) or a radius (the walk terminates at the
center).  Crossings are summed with signs; the convention is fixed so that
a curve crossing another from its left to its right counts +1.

Chord/chord contributions are 0 or +-1 by the alternation test on the disk
boundary.  A chord against a radius contributes +-1/2: the radius endpoint
sits at the center, the chord passes the center on an undetermined side,
and the half value is the average over both resolutions.  Consequently the
total is an integer whenever neither walk terminates at a vertex of the
other, and a half-integer otherwise.  Values are computed in integer
half-units and exposed as exact fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import WalkNotInGraph
from .graph import ClusteredGraph, Dart, EmbeddedGraph, Vertex, rev


@dataclass(frozen=True)
class Walk:
    """Directed walk as a dart sequence; closed walks wrap around."""

    darts: tuple[Dart, ...]
    closed: bool = False

    def __post_init__(self):
        if not self.darts:
            raise WalkNotInGraph("empty walk")

    def reversed(self) -> "Walk":
        return Walk(tuple(rev(d) for d in reversed(self.darts)), self.closed)

    def length(self) -> int:
        return len(self.darts)


def check_walk(G: ClusteredGraph, w: Walk) -> None:
    for d in w.darts:
        if (d >> 1) not in G.edges:
            raise WalkNotInGraph(f"dart {d} not in graph")
    for a, b in zip(w.darts, w.darts[1:]):
        if G.head(a) != G.tail(b):
            raise WalkNotInGraph(f"darts {a},{b} do not chain")
    if w.closed and G.head(w.darts[-1]) != G.tail(w.darts[0]):
        raise WalkNotInGraph("closed walk does not return to its start")


def walk_from_vertices(
    G: ClusteredGraph, vertices: Sequence[Vertex], closed: bool = False
) -> Walk:
    """Dart walk through the given vertices, lowest edge id on each step."""
    seq = list(vertices)
    if closed and len(seq) > 1 and seq[0] == seq[-1]:
        seq = seq[:-1]
    hops = list(zip(seq, seq[1:]))
    if closed:
        hops.append((seq[-1], seq[0]))
    darts = []
    for u, v in hops:
        e = G.edge_between(u, v)
        if e is None:
            raise WalkNotInGraph(f"no edge between {u!r} and {v!r}")
        darts.append(2 * e if G.edges[e][0] == u else 2 * e + 1)
    return Walk(tuple(darts), closed)


# ---------------------------------------------------------------------------
# visits

_CHORD, _START, _END = 0, 1, 2

# a visit is (kind, port_a, port_b) with ports as flattened circle positions;
# for radii only port_a is meaningful


def _traversals_by_edge(walks: Sequence[Walk]) -> dict[int, list[tuple[int, int]]]:
    """edge id -> [(walk index, step index)] in lane order."""
    lanes: dict[int, list[tuple[int, int]]] = {}
    for w, walk in enumerate(walks):
        for i, d in enumerate(walk.darts):
            lanes.setdefault(d >> 1, []).append((w, i))
    for e in lanes:
        lanes[e].sort()
    return lanes


def _port_positions(
    emb: EmbeddedGraph, v: Vertex, lanes: dict[int, list[tuple[int, int]]]
) -> dict[tuple[int, int, Dart], int]:
    """Clockwise position of every occupied port on the disk around v.

    A port is keyed (walk, step, dart-at-v).  Walking the rotation, the
    lanes of each edge appear ascending at the tail-side dart and
    descending at the head side, which keeps the lanes parallel along the
    edge band.
    """
    pos: dict[tuple[int, int, Dart], int] = {}
    n = 0
    for d in emb.rotation[v]:
        occ = lanes.get(d >> 1, ())
        ordered = occ if d % 2 == 0 else list(reversed(occ))
        for (w, i) in ordered:
            pos[(w, i, d)] = n
            n += 1
    return pos


def _visits_at(
    G: ClusteredGraph, w: int, walk: Walk
) -> dict[Vertex, list[tuple[int, tuple[int, int, Dart], tuple[int, int, Dart] | None]]]:
    """Group the walk's visits by vertex.

    Chord entries carry (in-port key, out-port key); radii carry the single
    port key.  Port key = (walk, step, dart attached at the vertex).
    """
    m = len(walk.darts)
    out: dict[Vertex, list] = {}

    def add(v, item):
        out.setdefault(v, []).append(item)

    rng = range(m) if walk.closed else range(1, m)
    for i in rng:
        j = (i - 1) % m
        v = G.tail(walk.darts[i])
        inp = (w, j, rev(walk.darts[j]))
        outp = (w, i, walk.darts[i])
        add(v, (_CHORD, inp, outp))
    if not walk.closed:
        add(G.tail(walk.darts[0]), (_START, (w, 0, walk.darts[0]), None))
        add(G.head(walk.darts[-1]), (_END, (w, m - 1, rev(walk.darts[-1])), None))
    return out


def _in_cw_arc(x: int, a: int, b: int, n: int) -> bool:
    """Is position x strictly inside the clockwise arc a -> b?"""
    return 0 < (x - a) % n < (b - a) % n


def _cross_halves(s1, s2, pos, n) -> int:
    """Signed crossings (in half-units) of one visit pair on a disk."""
    k1, a1, b1 = s1
    k2, a2, b2 = s2
    if k1 != _CHORD and k2 != _CHORD:
        return 0  # radii meet at the center only: endpoint contact
    if k1 != _CHORD:
        return -_cross_halves(s2, s1, pos, n)
    p_a1, p_b1 = pos[a1], pos[b1]
    if k2 == _CHORD:
        in_left = _in_cw_arc(pos[a2], p_a1, p_b1, n)
        out_left = _in_cw_arc(pos[b2], p_a1, p_b1, n)
        if in_left == out_left:
            return 0
        return 2 if in_left else -2
    # the clockwise arc in-port -> out-port is the chord's left side
    r_left = _in_cw_arc(pos[a2], p_a1, p_b1, n)
    if k2 == _END:
        return 1 if r_left else -1
    return -1 if r_left else 1


def algebraic_intersection_halves(emb: EmbeddedGraph, W1: Walk, W2: Walk) -> int:
    """i_A in half-units: sum of signed crossings of the two drawn curves."""
    G = emb.graph
    check_walk(G, W1)
    check_walk(G, W2)
    lanes = _traversals_by_edge([W1, W2])
    vis1 = _visits_at(G, 0, W1)
    vis2 = _visits_at(G, 1, W2)
    total = 0
    for v in vis1.keys() & vis2.keys():
        pos = _port_positions(emb, v, lanes)
        n = len(pos)
        for s1 in vis1[v]:
            for s2 in vis2[v]:
                total += _cross_halves(s1, s2, pos, n)
    return total


def algebraic_intersection(emb: EmbeddedGraph, W1: Walk, W2: Walk) -> Fraction:
    """Signed crossing count; half-integer when a walk ends on the other."""
    return Fraction(algebraic_intersection_halves(emb, W1, W2), 2)
