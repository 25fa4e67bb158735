"""Strip planarity for theta graphs.

A theta graph is a union of n >= 3 internally disjoint paths joining two
poles.  A planar embedding is determined by a circular order of the
paths around one pole (the other pole sees it reversed) plus an outer
face, i.e. a circular order of the n pole edges and one outer-face
marker.  The solver enumerates exactly the orders surviving the trap
rows with a PC-tree and checks each survivor against the rotation
constraints of a companion double-star tree built from the two pole
neighbourhoods; a survivor is realized, verified, and returned.
"""

from __future__ import annotations

from dataclasses import dataclass

from .characterization import check_embedded
from .errors import (
    InternalContradiction,
    NotATheta,
    SearchBudgetExceeded,
)
from .graph import (
    ClusteredGraph,
    Dart,
    EdgeId,
    EmbeddedGraph,
    Vertex,
    build_clustered_graph,
    build_embedding,
)
from .pctree import AmbiguousMatrix, PCTree, order_respects
from .tree import MasterMatrix, assemble_master

OUTER = "outer"


@dataclass(frozen=True)
class PolePath:
    """One pole-to-pole path: vertices, edge ids, and its level interval."""

    vertices: tuple[Vertex, ...]
    edges: tuple[EdgeId, ...]
    low: int
    high: int

    @property
    def u_edge(self) -> EdgeId:
        return self.edges[0]

    @property
    def v_edge(self) -> EdgeId:
        return self.edges[-1]


def extract_paths(
    G: ClusteredGraph,
) -> tuple[Vertex, Vertex, tuple[PolePath, ...]]:
    """Poles and the pole-to-pole paths, indexed by ascending edge at u.

    The first pole u is the lexicographically smaller one; every path is
    listed from u to v.  Single-edge paths (parallel pole edges) are
    legal and have an empty interior.
    """
    poles = G.theta_poles()
    if poles is None:
        raise NotATheta("input graph is not a theta graph")
    u, v = sorted(poles)
    paths = []
    for d in G.incident[u]:
        verts = [u]
        eids = []
        dart: Dart = d
        while True:
            eids.append(dart >> 1)
            nxt = G.head(dart)
            if nxt == v:
                verts.append(v)
                break
            verts.append(nxt)
            (dart,) = [x for x in G.incident[nxt] if x != dart ^ 1]
        levels = [G.gamma[w] for w in verts]
        paths.append(
            PolePath(
                vertices=tuple(verts),
                edges=tuple(eids),
                low=min(levels),
                high=max(levels),
            )
        )
    return u, v, tuple(paths)


def select_reference_path(paths: tuple[PolePath, ...]) -> int:
    """Index of the path whose level interval is inclusion-minimal.

    No other path's interval may be a strict subset; ties between equal
    minimal intervals go to the least index.
    """
    def strictly_inside(a: PolePath, b: PolePath) -> bool:
        return (b.low, b.high) != (a.low, a.high) and (
            b.low >= a.low and b.high <= a.high
        )

    for j, pj in enumerate(paths):
        if not any(strictly_inside(pj, pi) for pi in paths):
            return j
    raise InternalContradiction("no inclusion-minimal interval")


@dataclass(frozen=True)
class CompanionTree:
    """Double star joined by the reference path, with its leaf bookkeeping.

    ``graph`` contains one leg per non-reference path at each pole: the
    u-side leg copies the path with the far pole cut off, and vice
    versa, so interior vertices of those paths appear twice under
    suffixed names.  ``u_leaf[i]``/``v_leaf[i]`` name the leg tips;
    paths without interior vertices have no legs and map to None.
    """

    graph: ClusteredGraph
    u_leaf: dict[int, Vertex | None]
    v_leaf: dict[int, Vertex | None]
    u_leg_dart: dict[int, Dart]
    v_leg_dart: dict[int, Dart]
    u_path_dart: Dart
    v_path_dart: Dart


def build_companion_tree(
    G: ClusteredGraph, u: Vertex, v: Vertex,
    paths: tuple[PolePath, ...], alpha: int,
) -> CompanionTree:
    ref = paths[alpha]
    verts: list[tuple[Vertex, int]] = [(u, G.gamma[u]), (v, G.gamma[v])]
    verts += [(w, G.gamma[w]) for w in ref.vertices[1:-1]]
    edges: list[tuple[Vertex, Vertex]] = []
    prev = u
    for w in list(ref.vertices[1:-1]) + [v]:
        edges.append((prev, w))
        prev = w
    u_leaf: dict[int, Vertex | None] = {}
    v_leaf: dict[int, Vertex | None] = {}
    u_leg_dart: dict[int, Dart] = {}
    v_leg_dart: dict[int, Dart] = {}
    for i, p in enumerate(paths):
        if i == alpha:
            continue
        interior = p.vertices[1:-1]
        if not interior:
            u_leaf[i] = v_leaf[i] = None
            continue
        u_leg_dart[i] = 2 * len(edges)
        prev = u
        for w in interior:
            verts.append((f"{w}@u", G.gamma[w]))
            edges.append((prev, f"{w}@u"))
            prev = f"{w}@u"
        u_leaf[i] = prev
        v_leg_dart[i] = 2 * len(edges)
        prev = v
        for w in reversed(interior):
            verts.append((f"{w}@v", G.gamma[w]))
            edges.append((prev, f"{w}@v"))
            prev = f"{w}@v"
        v_leaf[i] = prev
    return CompanionTree(
        graph=build_clustered_graph(verts, edges, compact=False),
        u_leaf=u_leaf,
        v_leaf=v_leaf,
        u_leg_dart=u_leg_dart,
        v_leg_dart=v_leg_dart,
        u_path_dart=0,
        v_path_dart=2 * (len(ref.edges) - 1) + 1,
    )


def build_trap_matrix(G: ClusteredGraph) -> AmbiguousMatrix:
    """Rows forbidding trapped interior vertices, over the pole edges at u.

    Columns are the edges at the smaller pole plus an outer-face marker
    that every row sets to zero.  For each distinct path minimum, one
    row zeroes all paths dipping that low: those paths and the outer
    face must sit together in the rotation, otherwise the shallower
    paths close a cycle over a deep interior vertex.  Symmetric rows
    cover the maxima.
    """
    u, v, paths = extract_paths(G)
    columns: tuple = tuple(p.u_edge for p in paths) + (OUTER,)
    rows = []
    for m in sorted({p.low for p in paths}):
        rows.append(tuple(0 if p.low <= m else 1 for p in paths) + (0,))
    for m in sorted({p.high for p in paths}, reverse=True):
        rows.append(tuple(0 if p.high >= m else 1 for p in paths) + (0,))
    return AmbiguousMatrix.build(tuple(rows), columns)


@dataclass(frozen=True)
class ThetaInstance:
    """Everything the search consults, plus the order-transfer bookkeeping.

    The end-order tree has one u-side leaf per path and one v-side leaf
    per non-reference path; the consistency star pins the two pole
    rotations to opposite orientations through the two leaf maps (the
    spare u-map leaf lands on a v-side leaf, the spare v-map leaf on
    the outer-face marker).
    """

    poles: tuple[Vertex, Vertex]
    paths: tuple[PolePath, ...]
    alpha: int
    companion: CompanionTree
    trap: AmbiguousMatrix
    master: MasterMatrix
    end_leaves_u: tuple[str, ...]
    end_leaves_v: tuple[str, ...]
    consistency_leaves: tuple[str, ...]
    phi_u: dict[str, str]
    phi_v: dict[str, str]


def build_theta_instance(G: ClusteredGraph) -> ThetaInstance:
    u, v, paths = extract_paths(G)
    alpha = select_reference_path(paths)
    companion = build_companion_tree(G, u, v, paths, alpha)
    n = len(paths)
    others = [i for i in range(n) if i != alpha]
    spare_u = f"f{others[0]}"
    phi_u = {f"c{i}": f"e{i}" for i in others}
    phi_u[f"c{alpha}"] = spare_u
    phi_v = {f"c{i}": f"f{i}" for i in others}
    phi_v[f"c{alpha}"] = OUTER
    return ThetaInstance(
        poles=(u, v),
        paths=paths,
        alpha=alpha,
        companion=companion,
        trap=build_trap_matrix(G),
        master=assemble_master(companion.graph),
        end_leaves_u=tuple(f"e{i}" for i in range(n)),
        end_leaves_v=tuple(f"f{i}" for i in others),
        consistency_leaves=tuple(f"c{i}" for i in range(n)),
        phi_u=phi_u,
        phi_v=phi_v,
    )


def induced_leaf_cycle(
    inst: ThetaInstance, sigma: tuple[int, ...]
) -> tuple[Vertex, ...]:
    """Leaf order of the companion tree when the paths rotate as sigma.

    The rotation at u lists the legs in sigma order starting after the
    reference path; the rotation at v lists them reversed, matching the
    opposite orientations of any planar pole rotation pair.
    """
    comp = inst.companion
    k = sigma.index(inst.alpha)
    after = sigma[k + 1:] + sigma[:k]
    rotation: dict[Vertex, list[Dart]] = {}
    Gp = comp.graph
    for w in Gp.vertices:
        rotation[w] = list(Gp.incident[w])
    (uu, vv) = inst.poles
    rotation[uu] = [comp.u_path_dart] + [
        comp.u_leg_dart[i] for i in after if i in comp.u_leg_dart
    ]
    rotation[vv] = [comp.v_path_dart] + [
        comp.v_leg_dart[i] for i in reversed(after) if i in comp.v_leg_dart
    ]
    emb = build_embedding(Gp, rotation)
    (face,) = emb.faces
    return tuple(
        Gp.tail(d) for d in face.darts if Gp.degree(Gp.tail(d)) == 1
    )


@dataclass(frozen=True)
class ThetaSolution:
    planar: bool
    instance: ThetaInstance
    rotation_u: tuple[EdgeId, ...] | None = None
    rotation_v: tuple[EdgeId, ...] | None = None
    embedding: EmbeddedGraph | None = None
    orders_tried: int = 0


def _realize(
    G: ClusteredGraph, inst: ThetaInstance, sigma: tuple[int, ...],
    gap: tuple[int, int],
) -> EmbeddedGraph:
    """Embed with rotation sigma at u, reversed at v, outer at the gap."""
    u, v = inst.poles
    paths = inst.paths

    def dart_at(eid: EdgeId, w: Vertex) -> Dart:
        a, _ = G.edges[eid]
        return 2 * eid + (0 if a == w else 1)

    rotation: dict[Vertex, list[Dart]] = {
        w: list(G.incident[w]) for w in G.vertices
    }
    rotation[u] = [dart_at(paths[i].u_edge, u) for i in sigma]
    rotation[v] = [dart_at(paths[i].v_edge, v) for i in reversed(sigma)]
    emb = build_embedding(G, rotation)
    boundary = set(paths[gap[0]].edges) | set(paths[gap[1]].edges)
    for face in emb.faces:
        if {d >> 1 for d in face.darts} == boundary:
            return EmbeddedGraph(
                graph=G, rotation=emb.rotation, outer=face.key
            )
    raise InternalContradiction(
        f"no face bounded by paths {gap[0]} and {gap[1]}"
    )


def solve_theta(G: ClusteredGraph, max_paths: int = 10) -> ThetaSolution:
    """Decide strip planarity of a theta graph, exactly.

    Enumerates the circular orders of pole edges plus outer-face marker
    that a PC-tree seeded with the trap rows still captures; each is
    mapped to a pole rotation pair (reversed at the far pole) and kept
    iff the companion tree's rotation constraints hold on the induced
    leaf cycle.  The first survivor is embedded with the outer face at
    the marker and returned after verification.
    """
    inst = build_theta_instance(G)
    n = len(inst.paths)
    if n > max_paths:
        raise SearchBudgetExceeded(
            f"{n} paths exceed the configured bound of {max_paths}"
        )
    path_of = {p.u_edge: i for i, p in enumerate(inst.paths)}
    tree = PCTree.star(inst.trap.columns)
    for row in inst.trap.rows:
        zeros = [c for c, x in zip(inst.trap.columns, row) if x == 0]
        if not tree.make_consecutive(zeros):
            return ThetaSolution(planar=False, instance=inst)
    master = inst.master
    tried = 0
    for order in tree.allowed_orders(max_leaves=n + 1):
        tried += 1
        k = order.index(OUTER)
        word = order[k + 1:] + order[:k]
        sigma = tuple(path_of[c] for c in word)
        cycle = induced_leaf_cycle(inst, sigma)
        if not order_respects(cycle, master.matrix.rows, master.matrix.columns):
            continue
        emb = _realize(G, inst, sigma, (sigma[-1], sigma[0]))
        verdict = check_embedded(emb)
        if not verdict.planar:
            raise InternalContradiction(
                "surviving order produced a rejected embedding"
            )
        return ThetaSolution(
            planar=True,
            instance=inst,
            rotation_u=tuple(inst.paths[i].u_edge for i in sigma),
            rotation_v=tuple(
                inst.paths[i].v_edge for i in reversed(sigma)
            ),
            embedding=emb,
            orders_tried=tried,
        )
    return ThetaSolution(planar=False, instance=inst, orders_tried=tried)
