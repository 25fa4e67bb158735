"""Forbidden substructures of embedded strip clustered graphs.

An embedded instance fails to be strip planar for exactly two reasons: a
vertex trapped inside a cycle whose labels are all strictly larger or all
strictly smaller, or a pair of paths, one dipping down to a shared low
level at both ends (a cap) and one rising to a shared high level (a cup),
that interleave in levels, intersect in a path, and have nonzero algebraic
crossing number.  This module provides the witnesses, their search, and the
resulting decision procedure for embedded instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal, Sequence

from .errors import (
    BudgetExceeded,
    NotACycle,
    NotAPath,
    PreconditionViolated,
    InternalContradiction,
)
from .graph import (
    ClusteredGraph,
    Dart,
    EmbeddedGraph,
    Vertex,
    cycle_vertices,
    interior_vertices_of_cycle,
    rev,
)
from .intersection import (
    Walk,
    algebraic_intersection,
    walk_from_vertices,
)

# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class CapCup:
    """Path whose two ends share the extreme label of the whole path."""

    path: tuple[Vertex, ...]
    kind: Literal["cap", "cup"]
    level: int


@dataclass(frozen=True)
class InterleavingPair:
    cap: CapCup
    cup: CapCup
    shared: tuple[Vertex, ...]


@dataclass(frozen=True)
class PairFeasibility:
    feasible: bool
    value: Fraction


@dataclass(frozen=True)
class UnfeasiblePair:
    pair: InterleavingPair
    value: Fraction


@dataclass(frozen=True)
class TrappedVertex:
    vertex: Vertex
    cycle: tuple[Vertex, ...]


@dataclass(frozen=True)
class Verdict:
    planar: bool
    witness: UnfeasiblePair | TrappedVertex | None = None


# ---------------------------------------------------------------------------
# caps and cups


def _require_path(G: ClusteredGraph, P: Sequence[Vertex]) -> None:
    if not P:
        raise NotAPath(tuple(P))
    if len(set(P)) != len(P):
        raise NotAPath(tuple(P))
    for u, v in zip(P, P[1:]):
        if G.edge_between(u, v) is None:
            raise NotAPath(tuple(P))
    for v in P:
        if v not in G.gamma:
            raise NotAPath(tuple(P))


def classify_cap_cup(G: ClusteredGraph, P: Sequence[Vertex]) -> CapCup | None:
    """Cap/cup classification by the label profile, or None.

    A path whose ends share a label that is simultaneously weak minimum and
    maximum (at most two vertices, all labels equal) is reported as a cap;
    such paths never participate in interleaving pairs either way.
    """
    _require_path(G, P)
    labels = [G.gamma[v] for v in P]
    if labels[0] != labels[-1]:
        return None
    level = labels[0]
    inner = labels[1:-1]
    if all(x > level for x in inner):
        return CapCup(path=tuple(P), kind="cap", level=level)
    if all(x < level for x in inner):
        return CapCup(path=tuple(P), kind="cup", level=level)
    return None


def _shared_subpath(
    p1: Sequence[Vertex], p2: Sequence[Vertex]
) -> tuple[Vertex, ...] | None:
    """Ordered intersection of two vertex paths if it forms a path.

    Common edges are compared as unordered vertex pairs; for an honest path
    shape every common vertex must lie on one chain of common edges.
    """
    common_v = set(p1) & set(p2)
    if not common_v:
        return None
    if len(common_v) == 1:
        return (next(iter(common_v)),)
    e1 = {frozenset(p) for p in zip(p1, p1[1:])}
    e2 = {frozenset(p) for p in zip(p2, p2[1:])}
    common_e = {e for e in e1 & e2 if e <= common_v}
    deg: dict[Vertex, int] = {v: 0 for v in common_v}
    for e in common_e:
        for v in e:
            deg[v] += 1
    if any(d > 2 for d in deg.values()):
        return None
    if len(common_e) != len(common_v) - 1:
        return None  # a tree shape needs exactly n-1 edges; cycles have n
    ends = [v for v in sorted(common_v) if deg[v] <= 1]
    if len(ends) != 2:
        return None
    # walk the chain
    adj: dict[Vertex, list[Vertex]] = {v: [] for v in common_v}
    for e in common_e:
        a, b = tuple(e)
        adj[a].append(b)
        adj[b].append(a)
    walk = [ends[0]]
    prev = None
    while True:
        nxts = [x for x in adj[walk[-1]] if x != prev]
        if not nxts:
            break
        prev = walk[-1]
        walk.append(nxts[0])
    if set(walk) != common_v:
        return None  # disconnected intersection
    return tuple(walk)


def make_interleaving_pair(
    G: ClusteredGraph, cap_path: Sequence[Vertex], cup_path: Sequence[Vertex]
) -> InterleavingPair:
    """Validate the interleaving conditions and package the pair."""
    cap = classify_cap_cup(G, cap_path)
    cup = classify_cap_cup(G, cup_path)
    if cap is None or cap.kind != "cap":
        raise PreconditionViolated("first path is not a cap")
    if cup is None or cup.kind != "cup":
        raise PreconditionViolated("second path is not a cup")
    lab1 = [G.gamma[v] for v in cap_path]
    lab2 = [G.gamma[v] for v in cup_path]
    if not (min(lab1) < min(lab2) <= max(lab1) < max(lab2)):
        raise PreconditionViolated("label ranges do not interleave")
    shared = _shared_subpath(cap_path, cup_path)
    if shared is None:
        raise PreconditionViolated("intersection is not a path")
    return InterleavingPair(cap=cap, cup=cup, shared=shared)


def pair_feasibility(emb: EmbeddedGraph, pair: InterleavingPair) -> PairFeasibility:
    """Feasibility = vanishing algebraic crossing number of the two paths.

    The cap's ends lie strictly below every cup label and vice versa, so
    neither path terminates on the other and the count is an integer,
    independent of the orientations up to sign.
    """
    w1 = walk_from_vertices(emb.graph, pair.cap.path)
    w2 = walk_from_vertices(emb.graph, pair.cup.path)
    val = algebraic_intersection(emb, w1, w2)
    return PairFeasibility(feasible=(val == 0), value=val)


# ---------------------------------------------------------------------------
# trapped vertices


def _dual_reach(
    emb: EmbeddedGraph, start_faces: set[int], blocked: set[int]
) -> set[int]:
    """Faces reachable from start_faces crossing only unblocked edges."""
    reach = set(start_faces)
    stack = list(start_faces)
    while stack:
        fk = stack.pop()
        for d in emb.faces_by_key[fk].darts:
            if (d >> 1) in blocked:
                continue
            other = emb.face_by_dart[rev(d)]
            if other not in reach:
                reach.add(other)
                stack.append(other)
    return reach


def _simple_cycles_of_even_subgraph(
    G: ClusteredGraph, edges: set[int]
) -> Iterator[list[int]]:
    """Edge-disjoint simple cycles covering an even-degree edge set.

    Loop-erased walking: extend a trail edge by edge and pop a simple cycle
    whenever the current vertex reappears on the trail.  Every vertex has
    even degree, so the trail can only die back at its own origin.
    """
    unused = set(edges)
    inc: dict[Vertex, set[int]] = {}
    for e in edges:
        u, v = G.edges[e]
        inc.setdefault(u, set()).add(e)
        inc.setdefault(v, set()).add(e)

    def consume(e: int) -> None:
        unused.discard(e)
        u, v = G.edges[e]
        inc[u].discard(e)
        inc[v].discard(e)

    while unused:
        e0 = min(unused)
        u0, v0 = G.edges[e0]
        consume(e0)
        path_e = [e0]
        path_v = [u0, v0]
        while path_e:
            cur = path_v[-1]
            if cur in path_v[:-1]:
                i = path_v.index(cur)
                yield path_e[i:]
                del path_e[i:]
                del path_v[i + 1:]
                continue
            avail = inc.get(cur, ())
            if not avail:
                break
            e = min(avail)
            consume(e)
            a, b = G.edges[e]
            path_e.append(e)
            path_v.append(b if a == cur else a)


def _ordered_cycle_vertices(G: ClusteredGraph, cycle_edges: list[int]) -> tuple[Vertex, ...]:
    u0, v0 = G.edges[cycle_edges[0]]
    if len(cycle_edges) == 1:
        return (u0,)
    order = [u0, v0]
    for e in cycle_edges[1:-1]:
        a, b = G.edges[e]
        order.append(b if a == order[-1] else a)
    return tuple(order)


def _trapping_cycle(
    emb: EmbeddedGraph, v: Vertex, sense: Literal["above", "below"]
) -> tuple[Vertex, ...] | None:
    G = emb.graph
    gv = G.gamma[v]
    if sense == "above":
        blocked = {
            e for e, (a, b) in G.edges.items()
            if G.gamma[a] > gv and G.gamma[b] > gv
        }
    else:
        blocked = {
            e for e, (a, b) in G.edges.items()
            if G.gamma[a] < gv and G.gamma[b] < gv
        }
    if not blocked or not emb.rotation[v]:
        return None
    start = {emb.face_by_dart[d] for d in emb.rotation[v]}
    reach = _dual_reach(emb, start, blocked)
    if emb.outer in reach:
        return None
    boundary = set()
    for e in blocked:
        fa = emb.face_by_dart[2 * e]
        fb = emb.face_by_dart[2 * e + 1]
        if (fa in reach) != (fb in reach):
            boundary.add(e)
    for cyc in _simple_cycles_of_even_subgraph(G, boundary):
        if v in interior_vertices_of_cycle(emb, cyc):
            return _ordered_cycle_vertices(G, cyc)
    raise InternalContradiction(
        f"separating boundary around {v!r} yielded no simple witness cycle"
    )


def is_trapped(emb: EmbeddedGraph, v: Vertex) -> tuple[Vertex, ...] | None:
    """A cycle trapping v (all labels beyond v's), or None."""
    for sense in ("above", "below"):
        cyc = _trapping_cycle(emb, v, sense)
        if cyc is not None:
            return cyc
    return None


def find_trapped_vertex(emb: EmbeddedGraph) -> TrappedVertex | None:
    """First trapped vertex in sorted order, with a witnessing cycle.

    Polynomial search: for each vertex, the faces around it are flooded
    through every edge that is not entirely above (entirely below) the
    vertex's level; failure to reach the outer face proves a fully higher
    (lower) labeled cycle encloses the vertex.
    """
    if not emb.graph.is_connected:
        raise PreconditionViolated("embedded operations need a connected graph")
    for v in emb.graph.vertices:
        cyc = is_trapped(emb, v)
        if cyc is not None:
            return TrappedVertex(vertex=v, cycle=cyc)
    return None


def trapped_by_face_subsets(
    emb: EmbeddedGraph, max_subsets: int = 50_000
) -> TrappedVertex | None:
    """Exhaustive trapped search over unions of bounded faces.

    Every simple cycle bounds a union of bounded faces, so enumerating the
    face subsets whose boundary is a single simple cycle covers all
    candidate witnesses.  Deterministic order: subset size, then face keys.
    """
    if not emb.graph.is_connected:
        raise PreconditionViolated("embedded operations need a connected graph")
    G = emb.graph
    bounded = sorted(f.key for f in emb.faces if f.key != emb.outer)
    examined = 0
    for size in range(1, len(bounded) + 1):
        for subset in itertools.combinations(bounded, size):
            examined += 1
            if examined > max_subsets:
                raise BudgetExceeded(
                    f"face subset budget {max_subsets} exhausted"
                )
            chosen = set(subset)
            edge_sides: dict[int, int] = {}
            for e in G.edges:
                ins = (emb.face_by_dart[2 * e] in chosen) + (
                    emb.face_by_dart[2 * e + 1] in chosen
                )
                edge_sides[e] = ins
            boundary = [e for e, c in edge_sides.items() if c == 1]
            try:
                on_cycle = cycle_vertices(G, boundary)
            except NotACycle:
                continue
            inside = interior_vertices_of_cycle(emb, boundary)
            if not inside:
                continue
            labels = [G.gamma[x] for x in on_cycle]
            lo, hi = min(labels), max(labels)
            for v in sorted(inside):
                if G.gamma[v] < lo or G.gamma[v] > hi:
                    order = _boundary_cycle_order(G, boundary)
                    return TrappedVertex(vertex=v, cycle=order)
    return None


def _boundary_cycle_order(G: ClusteredGraph, cycle_edges: list[int]) -> tuple[Vertex, ...]:
    adj: dict[Vertex, list[tuple[Vertex, int]]] = {}
    for e in cycle_edges:
        u, v = G.edges[e]
        adj.setdefault(u, []).append((v, e))
        adj.setdefault(v, []).append((u, e))
    start = min(adj)
    order = [start]
    used: set[int] = set()
    cur = start
    while True:
        nxt = [(w, e) for (w, e) in adj[cur] if e not in used]
        if not nxt:
            break
        w, e = nxt[0]
        used.add(e)
        if w == start:
            break
        order.append(w)
        cur = w
    return tuple(order)


# ---------------------------------------------------------------------------
# cap/cup enumeration


def _enumerate_extreme_paths(
    emb: EmbeddedGraph, level: int, kind: Literal["cap", "cup"]
) -> Iterator[tuple[Dart, ...]]:
    """All simple dart paths with both ends at the level and interior
    strictly beyond it (above for caps, below for cups), each undirected
    path emitted once."""
    G = emb.graph
    good = (lambda g: g > level) if kind == "cap" else (lambda g: g < level)
    starts = [v for v in G.vertices if G.gamma[v] == level]
    for s in starts:
        stack: list[tuple[Vertex, tuple[Dart, ...], frozenset[Vertex]]] = [
            (s, (), frozenset((s,)))
        ]
        while stack:
            v, path, visited = stack.pop()
            for d in sorted(G.incident[v], reverse=True):
                u = G.head(d)
                if u in visited:
                    continue
                gu = G.gamma[u]
                if gu == level:
                    if path and u > s:
                        yield path + (d,)
                    continue
                if good(gu):
                    stack.append((u, path + (d,), visited | {u}))


def _walk_vertices(G: ClusteredGraph, darts: tuple[Dart, ...]) -> tuple[Vertex, ...]:
    return tuple(G.tail(d) for d in darts) + (G.head(darts[-1]),)


def check_embedded(
    emb: EmbeddedGraph,
    mode: Literal["exhaustive", "constructive"] = "exhaustive",
    path_budget: int = 20_000,
) -> Verdict:
    """Decision for an embedded strip clustered instance.

    Exhaustive mode searches trapped vertices over face subsets and then
    all interleaving cap/cup pairs per level pair, within the path budget.
    Constructive mode runs the normalization and extreme-assignment
    pipeline and reports its outcome; the two must agree.
    """
    if not emb.graph.is_connected:
        raise PreconditionViolated("embedded operations need a connected graph")
    if mode == "constructive":
        from .embedder import decide_embedded

        return decide_embedded(emb)
    trap = trapped_by_face_subsets(emb)
    if trap is not None:
        return Verdict(planar=False, witness=trap)
    G = emb.graph
    k = G.num_clusters

    def capped(gen):
        out = []
        for darts in gen:
            out.append(darts)
            if len(out) > path_budget:
                return out, True
        return out, False

    caps: dict[int, tuple[list, bool]] = {}
    cups: dict[int, tuple[list, bool]] = {}
    for s in range(1, k + 1):
        for b in range(s + 2, k + 1):
            if s not in caps:
                caps[s] = capped(_enumerate_extreme_paths(emb, s, "cap"))
            if b not in cups:
                cups[b] = capped(_enumerate_extreme_paths(emb, b, "cup"))
            cap_list, cap_trunc = caps[s]
            cup_list, cup_trunc = cups[b]
            if cap_trunc or cup_trunc or (
                len(cap_list) + len(cup_list) > path_budget
            ):
                raise BudgetExceeded(
                    f"path budget {path_budget} exhausted at levels ({s},{b})"
                )
            for cd in cap_list:
                p1 = _walk_vertices(G, cd)
                lab1 = [G.gamma[x] for x in p1]
                for ud in cup_list:
                    p2 = _walk_vertices(G, ud)
                    lab2 = [G.gamma[x] for x in p2]
                    if not (s < min(lab2) <= max(lab1) < b):
                        continue
                    shared = _shared_subpath(p1, p2)
                    if shared is None:
                        continue
                    val = algebraic_intersection(emb, Walk(cd), Walk(ud))
                    if val != 0:
                        pair = InterleavingPair(
                            cap=CapCup(path=p1, kind="cap", level=s),
                            cup=CapCup(path=p2, kind="cup", level=b),
                            shared=shared,
                        )
                        return Verdict(
                            planar=False,
                            witness=UnfeasiblePair(pair=pair, value=val),
                        )
    return Verdict(planar=True, witness=None)


# ---------------------------------------------------------------------------
# interleaving pair extraction


def _trim_to_extreme_subpath(
    G: ClusteredGraph,
    path: list[Vertex],
    cutoff: int,
    kind: Literal["cap", "cup"],
) -> list[list[Vertex]]:
    """Candidate sub-paths with both ends at the cutoff level and interior
    beyond it, covering maximal runs of the path's beyond-cutoff stretches."""
    beyond = (
        (lambda g: g > cutoff) if kind == "cap" else (lambda g: g < cutoff)
    )
    out: list[list[Vertex]] = []
    i = 0
    n = len(path)
    while i < n:
        if not beyond(G.gamma[path[i]]):
            i += 1
            continue
        j = i
        while j < n and beyond(G.gamma[path[j]]):
            j += 1
        # path[i:j] is a maximal beyond-cutoff run; flanks must exist and
        # sit exactly at the cutoff since labels move by at most one
        if i - 1 >= 0 and j < n:
            cand = path[i - 1:j + 1]
            if G.gamma[cand[0]] == cutoff and G.gamma[cand[-1]] == cutoff:
                out.append(cand)
        i = j
    return out


def _union_cycle_surgery(
    G: ClusteredGraph, p1: list[Vertex], p2: list[Vertex]
) -> list[Vertex] | None:
    """Reroute p2 along p1 across every detour cycle of their union.

    Common vertices are taken in p1 order; p2's stretch between two common
    vertices that are consecutive on p1's chain but joined differently in
    p2 gets replaced by p1's stretch, collapsing union cycles.  Returns the
    simple path between p2's ends afterwards, or None if it degenerates.
    """
    pos1 = {v: i for i, v in enumerate(p1)}
    walk = list(p2)
    limit = (len(p1) + len(p2)) ** 2 + 10
    passes = 0
    changed = True
    while changed:
        passes += 1
        if passes > limit:
            return None
        changed = False
        commons = [i for i, v in enumerate(walk) if v in pos1]
        for a, b in zip(commons, commons[1:]):
            va, vb = walk[a], walk[b]
            seg1 = (
                p1[pos1[va]:pos1[vb] + 1]
                if pos1[va] <= pos1[vb]
                else p1[pos1[vb]:pos1[va] + 1][::-1]
            )
            seg2 = walk[a:b + 1]
            if seg1 != seg2:
                walk[a:b + 1] = seg1
                changed = True
                break
    # shortcut repetitions to a simple path
    seen: dict[Vertex, int] = {}
    simple: list[Vertex] = []
    for v in walk:
        if v in seen:
            del simple[seen[v] + 1:]
            for x in list(seen):
                if seen[x] > seen[v]:
                    del seen[x]
        else:
            seen[v] = len(simple)
            simple.append(v)
    if len(simple) < 2:
        return None
    return simple


def extract_interleaving(
    emb: EmbeddedGraph, P1: Sequence[Vertex], P2: Sequence[Vertex]
) -> InterleavingPair:
    """Interleaving pair carved out of two crossing paths.

    Preconditions: both are paths, they share a vertex, each path's label
    range excludes the other's endpoint labels, and the embedding has no
    trapped vertex.  The returned cap/cup sub-paths preserve the algebraic
    crossing number of the originals; the construction trims each path to
    the sub-path responsible for all crossings and reroutes the cup along
    the cap wherever their union closes a cycle.
    """
    G = emb.graph
    _require_path(G, P1)
    _require_path(G, P2)
    l1 = [G.gamma[v] for v in P1]
    l2 = [G.gamma[v] for v in P2]
    ends1 = {l1[0], l1[-1]}
    ends2 = {l2[0], l2[-1]}
    if set(l1) & ends2 or set(l2) & ends1:
        raise PreconditionViolated("endpoint labels reach the other path")
    if not (set(P1) & set(P2)):
        raise PreconditionViolated("paths do not intersect")
    if find_trapped_vertex(emb) is not None:
        raise PreconditionViolated("embedding has a trapped vertex")
    lo, hi = (list(P1), list(P2)) if min(l1) < min(l2) else (list(P2), list(P1))
    llo = [G.gamma[v] for v in lo]
    lhi = [G.gamma[v] for v in hi]
    if not (min(llo) < min(lhi) <= max(llo) < max(lhi)):
        raise PreconditionViolated("label ranges do not properly overlap")
    target = algebraic_intersection(
        emb, walk_from_vertices(G, P1), walk_from_vertices(G, P2)
    )
    sign = 1 if lo == list(P1) else -1
    s = min(lhi) - 1
    b = max(llo) + 1
    cap_cands = _trim_to_extreme_subpath(G, lo, s, "cap")
    cup_cands = _trim_to_extreme_subpath(G, hi, b, "cup")
    for cap_p in cap_cands:
        for cup_p in cup_cands:
            got = _try_pair(emb, cap_p, cup_p, Fraction(sign) * target)
            if got is not None:
                return got
    # fallback: all equal-level-ended sub-paths of each (tiny inputs)
    for cap_p in _all_extreme_subpaths(G, lo, "cap"):
        for cup_p in _all_extreme_subpaths(G, hi, "cup"):
            got = _try_pair(emb, cap_p, cup_p, Fraction(sign) * target)
            if got is not None:
                return got
    raise InternalContradiction("no crossing-preserving interleaving pair found")


def _all_extreme_subpaths(G, path: list[Vertex], kind) -> list[list[Vertex]]:
    out = []
    n = len(path)
    for i in range(n):
        for j in range(i + 1, n):
            sub = path[i:j + 1]
            c = classify_cap_cup(G, sub)
            if c is not None and c.kind == kind and len(sub) > 2:
                out.append(sub)
    return out


def _try_pair(
    emb: EmbeddedGraph,
    cap_p: list[Vertex],
    cup_p: list[Vertex],
    target: Fraction,
) -> InterleavingPair | None:
    G = emb.graph
    if not (set(cap_p) & set(cup_p)):
        return None
    shared = _shared_subpath(cap_p, cup_p)
    if shared is None:
        rerouted = _union_cycle_surgery(G, cap_p, cup_p)
        if rerouted is None:
            return None
        cup_p = rerouted
        if not (set(cap_p) & set(cup_p)):
            return None
        shared = _shared_subpath(cap_p, cup_p)
        if shared is None:
            return None
    try:
        pair = make_interleaving_pair(G, cap_p, cup_p)
    except PreconditionViolated:
        return None
    val = algebraic_intersection(
        emb,
        walk_from_vertices(G, cap_p),
        walk_from_vertices(G, cup_p),
    )
    if val != target:
        return None
    return pair
