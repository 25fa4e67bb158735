"""Clustered multigraphs and combinatorial embeddings.

A clustered graph here is a multigraph (loops allowed) whose vertices carry
integer cluster labels, with every edge staying inside a cluster or joining
two consecutive ones.  An embedding is a rotation system: the clockwise
cyclic order of edge ends around every vertex, plus a designated outer face.

Dart convention: edge ``e`` with endpoint pair ``(u, v)`` owns darts
``2*e`` (attached at ``u``, read as directed u -> v) and ``2*e + 1``
(attached at ``v``, directed v -> u); ``rev(d) == d ^ 1``.  Face tracing
follows the rule: the successor of dart ``d`` is the clockwise successor of
``rev(d)`` in the rotation at ``head(d)``.  With clockwise rotations this
makes each facial walk keep its face on one fixed side, and a connected
rotation system describes a sphere embedding iff V - E + F == 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    DanglingEndpoint,
    DuplicateVertexId,
    LoopContraction,
    NonContiguousPartition,
    NotACycle,
    NotIntraCluster,
    StripViolation,
)

Vertex = str
Dart = int
EdgeId = int

#: face key used when the graph has no darts at all (single vertex)
EMPTY_FACE = -1


def rev(d: Dart) -> Dart:
    return d ^ 1


# ---------------------------------------------------------------------------
# clustered multigraph


@dataclass(frozen=True)
class ClusteredGraph:
    """Multigraph with cluster labels satisfying the strip edge condition."""

    gamma: Mapping[Vertex, int]
    edges: Mapping[EdgeId, tuple[Vertex, Vertex]]

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(sorted(self.gamma))

    @cached_property
    def num_clusters(self) -> int:
        if not self.gamma:
            return 0
        return max(self.gamma.values())

    @cached_property
    def min_cluster(self) -> int:
        return min(self.gamma.values()) if self.gamma else 0

    @cached_property
    def incident(self) -> Mapping[Vertex, tuple[Dart, ...]]:
        """Darts attached at each vertex, sorted (not a rotation)."""
        by_vertex: dict[Vertex, list[Dart]] = {v: [] for v in self.gamma}
        for e, (u, v) in self.edges.items():
            by_vertex[u].append(2 * e)
            by_vertex[v].append(2 * e + 1)
        return {v: tuple(sorted(ds)) for v, ds in by_vertex.items()}

    def degree(self, v: Vertex) -> int:
        return len(self.incident[v])

    def endpoints(self, e: EdgeId) -> tuple[Vertex, Vertex]:
        return self.edges[e]

    def dart_vertex(self, d: Dart) -> Vertex:
        """The vertex the dart is attached at (its tail)."""
        return self.edges[d >> 1][d & 1]

    def tail(self, d: Dart) -> Vertex:
        return self.edges[d >> 1][d & 1]

    def head(self, d: Dart) -> Vertex:
        return self.edges[d >> 1][1 - (d & 1)]

    def neighbors(self, v: Vertex) -> list[Vertex]:
        return sorted({self.head(d) for d in self.incident[v]})

    def is_loop(self, e: EdgeId) -> bool:
        u, v = self.edges[e]
        return u == v

    @cached_property
    def darts(self) -> tuple[Dart, ...]:
        out: list[Dart] = []
        for e in self.edges:
            out.append(2 * e)
            out.append(2 * e + 1)
        return tuple(sorted(out))

    def edge_between(self, u: Vertex, v: Vertex) -> EdgeId | None:
        for e, (a, b) in sorted(self.edges.items()):
            if (a, b) in ((u, v), (v, u)):
                return e
        return None

    # -- structure queries --

    @cached_property
    def components(self) -> tuple[frozenset[Vertex], ...]:
        seen: set[Vertex] = set()
        comps: list[frozenset[Vertex]] = []
        for start in self.vertices:
            if start in seen:
                continue
            stack, comp = [start], {start}
            seen.add(start)
            while stack:
                x = stack.pop()
                for d in self.incident[x]:
                    y = self.head(d)
                    if y not in seen:
                        seen.add(y)
                        comp.add(y)
                        stack.append(y)
            comps.append(frozenset(comp))
        return tuple(comps)

    @property
    def is_connected(self) -> bool:
        return len(self.components) <= 1

    @property
    def is_tree(self) -> bool:
        return (
            self.is_connected
            and len(self.edges) == max(len(self.gamma) - 1, 0)
            and not any(self.is_loop(e) for e in self.edges)
        )

    @property
    def is_forest(self) -> bool:
        return (
            len(self.edges) == len(self.gamma) - len(self.components)
            and not any(self.is_loop(e) for e in self.edges)
        )

    @property
    def is_path_graph(self) -> bool:
        return self.is_tree and all(self.degree(v) <= 2 for v in self.vertices)

    @property
    def is_subdivided_star(self) -> bool:
        if not self.is_tree:
            return False
        return sum(1 for v in self.vertices if self.degree(v) >= 3) <= 1

    def theta_poles(self) -> tuple[Vertex, Vertex] | None:
        """The two branch vertices if this is a theta graph, else None.

        A theta graph is the union of n >= 3 internally disjoint paths
        joining two poles; every non-pole vertex has degree 2.
        """
        if not self.is_connected or not self.gamma:
            return None
        if any(self.is_loop(e) for e in self.edges):
            return None
        big = [v for v in self.vertices if self.degree(v) >= 3]
        if len(big) != 2:
            return None
        if any(self.degree(v) != 2 for v in self.vertices if v not in big):
            return None
        u, v = big
        if self.degree(u) != self.degree(v):
            return None
        # all paths must run pole to pole: no pole-to-self excursions
        for path in self.pole_paths(u, v):
            if path[0] == path[-1]:
                return None
        return (u, v)

    def pole_paths(self, u: Vertex, v: Vertex) -> list[list[Vertex]]:
        """Maximal degree-2 chains starting at u, for theta classification."""
        paths = []
        for d in self.incident[u]:
            walk = [u]
            cur = self.head(d)
            prev_dart = d
            while cur not in (u, v):
                walk.append(cur)
                nxt = [x for x in self.incident[cur] if x != rev(prev_dart)]
                if len(nxt) != 1:
                    break
                prev_dart = nxt[0]
                cur = self.head(prev_dart)
            walk.append(cur)
            paths.append(walk)
        return paths


def build_clustered_graph(
    vertices: Iterable[tuple[Vertex, int]] | Mapping[Vertex, int],
    edges: Iterable[tuple[Vertex, Vertex]],
    *,
    compact: bool = True,
    strip: bool = True,
) -> ClusteredGraph:
    """Validate and build, compacting cluster labels to 1..k.

    Raises DuplicateVertexId / DanglingEndpoint / StripViolation.  The strip
    condition is checked on the labels as given, before compaction; pass
    ``strip=False`` for flat clustered instances whose clusters carry no
    order (edges may then join any two clusters).
    """
    if isinstance(vertices, Mapping):
        gamma = dict(vertices)
    else:
        gamma = {}
        for vid, cl in vertices:
            if vid in gamma:
                raise DuplicateVertexId(vid)
            gamma[vid] = int(cl)
    edge_map: dict[EdgeId, tuple[Vertex, Vertex]] = {}
    for i, (u, v) in enumerate(edges):
        if u not in gamma or v not in gamma:
            raise DanglingEndpoint((u, v))
        if strip and abs(gamma[u] - gamma[v]) > 1:
            raise StripViolation((u, v), (gamma[u], gamma[v]))
        edge_map[i] = (u, v)
    if compact and gamma:
        levels = sorted(set(gamma.values()))
        remap = {lv: i + 1 for i, lv in enumerate(levels)}
        gamma = {v: remap[lv] for v, lv in gamma.items()}
    return ClusteredGraph(gamma=gamma, edges=edge_map)


def relabel(G: ClusteredGraph, new_gamma: Mapping[Vertex, int]) -> ClusteredGraph:
    """Same structure, different labels (validated)."""
    return build_clustered_graph(dict(new_gamma), [G.edges[e] for e in sorted(G.edges)])


# ---------------------------------------------------------------------------
# embeddings


@dataclass(frozen=True)
class FacialWalk:
    """One face: its darts in traversal order.  Key = minimal dart."""

    darts: tuple[Dart, ...]

    @property
    def key(self) -> int:
        return min(self.darts) if self.darts else EMPTY_FACE

    @property
    def cardinality(self) -> int:
        return len(self.darts)

    def vertices(self, G: ClusteredGraph) -> tuple[Vertex, ...]:
        return tuple(G.tail(d) for d in self.darts)


@dataclass(frozen=True)
class EmbeddedGraph:
    """Rotation system over a clustered graph, with a designated outer face.

    ``rotation[v]`` is the clockwise cyclic sequence of darts at ``v``.
    ``outer`` is the key (minimal dart) of the outer facial walk.
    """

    graph: ClusteredGraph
    rotation: Mapping[Vertex, tuple[Dart, ...]]
    outer: int = EMPTY_FACE

    @cached_property
    def dart_position(self) -> Mapping[Dart, tuple[Vertex, int]]:
        pos: dict[Dart, tuple[Vertex, int]] = {}
        for v, rot in self.rotation.items():
            for i, d in enumerate(rot):
                if d in pos:
                    raise ValueError(f"dart {d} appears twice in rotations")
                pos[d] = (v, i)
        return pos

    def rotation_successor(self, d: Dart) -> Dart:
        v, i = self.dart_position[d]
        rot = self.rotation[v]
        return rot[(i + 1) % len(rot)]

    def rotation_predecessor(self, d: Dart) -> Dart:
        v, i = self.dart_position[d]
        rot = self.rotation[v]
        return rot[(i - 1) % len(rot)]

    def next_in_face(self, d: Dart) -> Dart:
        return self.rotation_successor(rev(d))

    @cached_property
    def faces(self) -> tuple[FacialWalk, ...]:
        return tuple(trace_faces(self))

    def validate(self) -> None:
        expect = set(self.graph.darts)
        got = set(self.dart_position)
        if expect != got:
            raise ValueError("rotations do not cover the darts exactly once")

    @cached_property
    def face_by_dart(self) -> Mapping[Dart, int]:
        out: dict[Dart, int] = {}
        for f in self.faces:
            for d in f.darts:
                out[d] = f.key
        return out

    @cached_property
    def faces_by_key(self) -> Mapping[int, FacialWalk]:
        return {f.key: f for f in self.faces}

    @property
    def outer_walk(self) -> FacialWalk:
        return self.faces_by_key[self.outer]

    def is_planar(self) -> bool:
        """Euler check; assumes the underlying graph is connected."""
        V = len(self.graph.gamma)
        E = len(self.graph.edges)
        F = len(self.faces)
        return V - E + F == 2

    def faces_at(self, v: Vertex) -> tuple[int, ...]:
        return tuple(sorted({self.face_by_dart[d] for d in self.rotation[v]}))


def trace_faces(emb: EmbeddedGraph) -> list[FacialWalk]:
    """Partition darts into facial walks; sorted by key."""
    all_darts = emb.graph.darts
    if not all_darts:
        return [FacialWalk(darts=())]
    emb.validate()
    unused = set(all_darts)
    walks: list[FacialWalk] = []
    while unused:
        start = min(unused)
        walk = []
        d = start
        while True:
            walk.append(d)
            unused.discard(d)
            d = emb.next_in_face(d)
            if d == start:
                break
            if d not in unused:
                raise ValueError("face tracing revisited a consumed dart")
        walks.append(FacialWalk(darts=tuple(walk)))
    walks.sort(key=lambda w: w.key)
    return walks


def build_embedding(
    G: ClusteredGraph,
    rotation: Mapping[Vertex, Sequence[Dart]],
    outer: int | None = None,
) -> EmbeddedGraph:
    """Wrap a rotation system; outer defaults to the face with minimal key."""
    rot = {v: tuple(rotation.get(v, ())) for v in G.gamma}
    emb = EmbeddedGraph(graph=G, rotation=rot)
    emb.validate()
    if outer is None:
        outer = emb.faces[0].key
    elif outer not in {f.key for f in emb.faces}:
        raise ValueError(f"no face with key {outer}")
    return EmbeddedGraph(graph=G, rotation=rot, outer=outer)


def default_embedding(G: ClusteredGraph, outer: int | None = None) -> EmbeddedGraph:
    """Embedding with rotations in sorted dart order (fine for trees)."""
    return build_embedding(G, {v: G.incident[v] for v in G.gamma}, outer)


# ---------------------------------------------------------------------------
# embedding surgery


def contract_intra_cluster_edge(emb: EmbeddedGraph, e: EdgeId) -> EmbeddedGraph:
    """Contract edge e (same-cluster ends), merging the head into the tail.

    The rotation of the removed endpoint is spliced into the survivor at the
    position of the contracted edge, preserving all faces.  Parallel edges
    become loops and keep their rotation positions.
    """
    G = emb.graph
    u, v = G.edges[e]
    if u == v:
        raise LoopContraction(e)
    if G.gamma[u] != G.gamma[v]:
        raise NotIntraCluster(e)
    du, dv = 2 * e, 2 * e + 1  # du at u, dv at v
    rot_u = list(emb.rotation[u])
    rot_v = list(emb.rotation[v])
    iu = rot_u.index(du)
    iv = rot_v.index(dv)
    # v's darts starting after dv, in cyclic order, excluding dv
    spliced = [rot_v[(iv + 1 + j) % len(rot_v)] for j in range(len(rot_v) - 1)]
    merged = rot_u[:iu] + spliced + rot_u[iu + 1:]

    new_edges = {}
    for f, (a, b) in G.edges.items():
        if f == e:
            continue
        new_edges[f] = (u if a == v else a, u if b == v else b)
    new_gamma = {w: lv for w, lv in G.gamma.items() if w != v}
    G2 = ClusteredGraph(gamma=new_gamma, edges=new_edges)
    rot2 = {w: emb.rotation[w] for w in new_gamma if w != u}
    rot2[u] = tuple(merged)
    emb2 = EmbeddedGraph(graph=G2, rotation=rot2)
    outer2 = _transfer_face(emb, emb2, removed={du, dv})
    return EmbeddedGraph(graph=G2, rotation=rot2, outer=outer2)


def _transfer_face(old: EmbeddedGraph, new: EmbeddedGraph, removed: set[Dart]) -> int:
    """Key of the new face containing the old outer face's surviving darts."""
    survivors = [d for d in old.outer_walk.darts if d not in removed]
    if not survivors:
        return new.faces[0].key
    return new.face_by_dart[survivors[0]]


def split_vertex(
    emb: EmbeddedGraph,
    v: Vertex,
    arc1: Sequence[Dart],
    arc2: Sequence[Dart],
    new_id: Vertex | None = None,
) -> EmbeddedGraph:
    """Split v into v (keeping arc1) and a new vertex (arc2), joined by a
    fresh edge placed at the two cut corners.  Inverse of contraction.
    """
    G = emb.graph
    rot = emb.rotation[v]
    a1, a2 = list(arc1), list(arc2)
    if sorted(a1 + a2) != sorted(rot):
        raise NonContiguousPartition("arcs do not partition the rotation")
    if a1 and a2:
        doubled = list(rot) + list(rot)
        joined = a1 + a2

        def is_cyclic_block(block: list[Dart]) -> bool:
            n = len(rot)
            for s in range(n):
                if doubled[s:s + len(block)] == block:
                    return True
            return False

        if not (is_cyclic_block(joined) or is_cyclic_block(a2 + a1)):
            raise NonContiguousPartition("arcs are not contiguous")
    if new_id is None:
        new_id = v + "′"
        while new_id in G.gamma:
            new_id += "′"
    e_new = max(G.edges, default=-1) + 1
    d_at_v, d_at_new = 2 * e_new, 2 * e_new + 1
    new_edges = dict(G.edges)
    new_edges[e_new] = (v, new_id)
    new_gamma = dict(G.gamma)
    new_gamma[new_id] = G.gamma[v]
    moved = set(a2)
    for f, (a, b) in G.edges.items():
        na = new_id if (a == v and 2 * f in moved) else a
        nb = new_id if (b == v and 2 * f + 1 in moved) else b
        new_edges[f] = (na, nb)
    G2 = ClusteredGraph(gamma=new_gamma, edges=new_edges)
    rot2 = {w: r for w, r in emb.rotation.items() if w != v}
    rot2[v] = tuple(a1) + (d_at_v,)
    rot2[new_id] = tuple(a2) + (d_at_new,)
    emb2 = EmbeddedGraph(graph=G2, rotation=rot2)
    outer2 = _transfer_face(emb, emb2, removed=set())
    return EmbeddedGraph(graph=G2, rotation=rot2, outer=outer2)


# ---------------------------------------------------------------------------
# interior of a cycle


def cycle_vertices(G: ClusteredGraph, cycle_edges: Sequence[EdgeId]) -> set[Vertex]:
    """Vertex set of a simple cycle given by edge ids; validates 2-regularity."""
    if not cycle_edges or len(set(cycle_edges)) != len(cycle_edges):
        raise NotACycle(tuple(cycle_edges))
    deg: dict[Vertex, int] = {}
    for e in cycle_edges:
        if e not in G.edges:
            raise NotACycle(tuple(cycle_edges))
        u, v = G.edges[e]
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    if any(c != 2 for c in deg.values()):
        raise NotACycle(tuple(cycle_edges))
    # connectivity of the cycle subgraph
    verts = set(deg)
    adj: dict[Vertex, set[EdgeId]] = {v: set() for v in verts}
    for e in cycle_edges:
        u, v = G.edges[e]
        adj[u].add(e)
        adj[v].add(e)
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for e in adj[x]:
            u, v = G.edges[e]
            y = v if u == x else u
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if seen != verts:
        raise NotACycle(tuple(cycle_edges))
    return verts


def interior_vertices_of_cycle(
    emb: EmbeddedGraph, cycle_edges: Sequence[EdgeId]
) -> frozenset[Vertex]:
    """Vertices strictly inside the cycle (outer face fixes the outside)."""
    on_cycle = cycle_vertices(emb.graph, cycle_edges)
    cyc = set(cycle_edges)
    # dual reachability from the outer face, never crossing cycle edges
    exterior = {emb.outer}
    stack = [emb.outer]
    while stack:
        fk = stack.pop()
        for d in emb.faces_by_key[fk].darts:
            if (d >> 1) in cyc:
                continue
            other = emb.face_by_dart[rev(d)]
            if other not in exterior:
                exterior.add(other)
                stack.append(other)
    inside = set()
    for v in emb.graph.vertices:
        if v in on_cycle:
            continue
        d0 = emb.rotation[v][0] if emb.rotation[v] else None
        if d0 is None:
            continue  # isolated vertex: not locatable, treat as exterior
        if emb.face_by_dart[d0] not in exterior:
            inside.add(v)
    return frozenset(inside)


# ---------------------------------------------------------------------------
# orientation by labels


@dataclass(frozen=True)
class DirectedStripGraph:
    base: ClusteredGraph
    orientation: Mapping[EdgeId, tuple[Vertex, Vertex]]

    @cached_property
    def out_edges(self) -> Mapping[Vertex, tuple[EdgeId, ...]]:
        out: dict[Vertex, list[EdgeId]] = {v: [] for v in self.base.gamma}
        for e, (t, _h) in self.orientation.items():
            out[t].append(e)
        return {v: tuple(sorted(es)) for v, es in out.items()}

    @cached_property
    def in_edges(self) -> Mapping[Vertex, tuple[EdgeId, ...]]:
        inc: dict[Vertex, list[EdgeId]] = {v: [] for v in self.base.gamma}
        for e, (_t, h) in self.orientation.items():
            inc[h].append(e)
        return {v: tuple(sorted(es)) for v, es in inc.items()}

    def sources(self) -> tuple[Vertex, ...]:
        return tuple(
            v for v in self.base.vertices
            if self.out_edges[v] and not self.in_edges[v]
        )

    def sinks(self) -> tuple[Vertex, ...]:
        return tuple(
            v for v in self.base.vertices
            if self.in_edges[v] and not self.out_edges[v]
        )


def orient_by_labels(G: ClusteredGraph) -> DirectedStripGraph:
    """Each edge points to the larger label; same-label ties go lexicographic."""
    orientation: dict[EdgeId, tuple[Vertex, Vertex]] = {}
    for e, (u, v) in G.edges.items():
        gu, gv = G.gamma[u], G.gamma[v]
        if gu < gv or (gu == gv and u <= v):
            orientation[e] = (u, v)
        else:
            orientation[e] = (v, u)
    return DirectedStripGraph(base=G, orientation=orientation)


# ---------------------------------------------------------------------------
# suppressing degree-2 vertices


@dataclass(frozen=True)
class PathRecord:
    """Original path replaced by one edge after suppression."""

    vertices: tuple[Vertex, ...]
    min_label: int
    max_label: int


def suppress_degree_two(
    G: ClusteredGraph, keep: set[Vertex]
) -> tuple[ClusteredGraph, dict[EdgeId, PathRecord]]:
    """Suppress every degree-2 vertex not in ``keep``.

    Each maximal suppressible chain becomes a single new edge; the record
    stores the full original vertex path with its label extremes.  Edges not
    merged keep their ids with identity records.  Components that are cycles
    with no keepable anchor are rejected.
    """
    suppress = {
        v for v in G.vertices
        if v not in keep and G.degree(v) == 2
        and not any(G.is_loop(d >> 1) for d in G.incident[v])
    }
    records: dict[EdgeId, PathRecord] = {}
    new_edges: dict[EdgeId, tuple[Vertex, Vertex]] = {}
    next_id = max(G.edges, default=-1) + 1
    used: set[EdgeId] = set()

    def labels_of(path: Sequence[Vertex]) -> tuple[int, int]:
        labs = [G.gamma[x] for x in path]
        return min(labs), max(labs)

    for e in sorted(G.edges):
        if e in used:
            continue
        u, v = G.edges[e]
        if u in suppress and v in suppress:
            continue  # picked up while walking a chain from an anchor
        if u not in suppress and v not in suppress:
            used.add(e)
            mn, mx = labels_of((u, v))
            records[e] = PathRecord(vertices=(u, v), min_label=mn, max_label=mx)
            new_edges[e] = (u, v)
            continue
        anchor, inner = (u, v) if v in suppress else (v, u)
        # walk the chain of suppressible vertices
        path = [anchor, inner]
        used.add(e)
        prev, cur = anchor, inner
        while cur in suppress:
            nxt_edge = None
            for d in G.incident[cur]:
                f = d >> 1
                if f in used:
                    continue
                nxt_edge = f
                break
            if nxt_edge is None:
                break
            used.add(nxt_edge)
            a, b = G.edges[nxt_edge]
            nxt = b if a == cur else a
            path.append(nxt)
            prev, cur = cur, nxt
        mn, mx = labels_of(path)
        eid = next_id
        next_id += 1
        records[eid] = PathRecord(vertices=tuple(path), min_label=mn, max_label=mx)
        new_edges[eid] = (path[0], path[-1])

    leftover = set()
    for e in sorted(G.edges):
        if e not in used:
            u, v = G.edges[e]
            leftover.add((u, v))
    if leftover:
        raise ValueError(
            "suppression found an unanchored all-degree-two cycle: "
            f"{sorted(leftover)}"
        )
    new_gamma = {v: G.gamma[v] for v in G.vertices if v not in suppress}
    return ClusteredGraph(gamma=new_gamma, edges=new_edges), records
