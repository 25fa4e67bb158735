"""Strip planarity for trees.

In a planar drawing of a tree the leaves of every subtree occupy a
circular arc of the outer boundary, and every branch vertex inherits the
rotation vetoes of the subdivided star obtained by unfolding the paths
from it to the leaves.  Expressing both over one column set (the leaves)
gives a single ambiguous stair matrix: leaf bipartitions of the internal
edges on top, then the per-vertex stair blocks ordered bottom-up in the
suppressed tree, each block shedding the rows already implied at its
parent, and a final re-blanking pass to restore the stair shape.  The
ambiguous circular-ones test on that matrix decides strip planarity; an
accepting circular leaf order nests every subtree inside its arc, which
fixes the rotation everywhere and yields a strip clustered embedding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import LowDegree, NotATree, PreconditionViolated
from .graph import (
    ClusteredGraph,
    Dart,
    EdgeId,
    EmbeddedGraph,
    Vertex,
    build_clustered_graph,
    build_embedding,
    default_embedding,
    suppress_degree_two,
)
from .pctree import (
    AmbiguousMatrix,
    Infeasible,
    first_infeasible_row,
    stair_closure,
    test_ambiguous,
)
from .star import leg_interval_order, restriction_rows


def tree_leaves(G: ClusteredGraph) -> tuple[Vertex, ...]:
    """The degree-1 vertices in sorted order; the master matrix columns."""
    return tuple(sorted(v for v in G.vertices if G.degree(v) == 1))


def _bfs(G: ClusteredGraph, root: Vertex):
    """Vertices in BFS order plus parent pointers and parent edge ids."""
    parent: dict[Vertex, Vertex] = {}
    parent_edge: dict[Vertex, EdgeId] = {}
    order = [root]
    seen = {root}
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for d in G.incident[u]:
            w = G.head(d)
            if w not in seen:
                seen.add(w)
                parent[w] = u
                parent_edge[w] = d >> 1
                order.append(w)
    return order, parent, parent_edge


def _leaf_profiles(
    G: ClusteredGraph, v: Vertex
) -> list[tuple[Vertex, list[int]]]:
    """Per leaf (sorted), the labels along the path from ``v`` to it."""
    _, parent, _ = _bfs(G, v)
    out = []
    for leaf in tree_leaves(G):
        if leaf == v:
            continue
        path = [leaf]
        while path[-1] != v:
            path.append(parent[path[-1]])
        path.reverse()
        out.append((leaf, [G.gamma[x] for x in path]))
    return out


def build_gv_star(
    G: ClusteredGraph, v: Vertex
) -> tuple[ClusteredGraph, tuple[Vertex, ...]]:
    """Unfold the paths from ``v`` to every leaf into a subdivided star.

    Leg j enters through center edge id j and copies the labels along
    the path to the j-th leaf in sorted order; the returned tuple names
    that leaf for each leg.  Shared path prefixes are duplicated on
    purpose: only the level behaviour of each full walk matters for the
    rotation vetoes at ``v``.
    """
    if not G.is_tree:
        raise NotATree("input graph is not a tree")
    if G.degree(v) < 3:
        raise LowDegree(f"vertex {v!r} has degree {G.degree(v)}, need >= 3")
    profiles = _leaf_profiles(G, v)
    verts = [(v, G.gamma[v])]
    spokes: list[tuple[Vertex, Vertex]] = []
    chains: list[tuple[Vertex, Vertex]] = []
    for j, (_, prof) in enumerate(profiles):
        prev = v
        for i, lvl in enumerate(prof[1:], start=1):
            name = f"{j}:{i}"
            verts.append((name, lvl))
            (spokes if i == 1 else chains).append((prev, name))
            prev = name
    star = build_clustered_graph(verts, spokes + chains, compact=False)
    return star, tuple(leaf for leaf, _ in profiles)


def build_bridge_rows(
    G: ClusteredGraph,
) -> tuple[tuple[EdgeId, ...], tuple[tuple[int, ...], ...]]:
    """Leaf bipartition rows, one per edge splitting the leaves 2+/2+.

    Every tree edge is a bridge; its removal splits the leaves in two.
    Rows are listed by ascending edge id, 0 on the side holding the
    lexicographically least leaf.  Splits with fewer than two leaves on
    a side constrain nothing circularly and are dropped.
    """
    if not G.is_tree:
        raise NotATree("input graph is not a tree")
    leaves = tree_leaves(G)
    if not G.edges:
        return (), ()
    root = min(G.gamma)
    order, parent, parent_edge = _bfs(G, root)
    below: dict[Vertex, set[Vertex]] = {u: set() for u in order}
    for u in reversed(order):
        if G.degree(u) == 1:
            below[u].add(u)
        if u != root:
            below[parent[u]] |= below[u]
    child_of = {e: u for u, e in parent_edge.items()}
    ids = []
    rows = []
    for e in sorted(G.edges):
        side = below[child_of[e]]
        if len(side) < 2 or len(leaves) - len(side) < 2:
            continue
        flip = leaves[0] in side
        rows.append(
            tuple(int((l in side) != flip) for l in leaves)
        )
        ids.append(e)
    return tuple(ids), tuple(rows)


@dataclass(frozen=True)
class MasterBlock:
    """Row slice of the master matrix owned by one branch vertex."""

    vertex: Vertex
    start: int
    stop: int
    windows: tuple[tuple[int, int], ...]
    dropped: int


@dataclass(frozen=True)
class MasterMatrix:
    """Bridge rows on top, then per-branch-vertex blocks, re-blanked."""

    matrix: AmbiguousMatrix
    root: Vertex
    bridge_edges: tuple[EdgeId, ...]
    blocks: tuple[MasterBlock, ...]


def assemble_master(G: ClusteredGraph) -> MasterMatrix:
    """Pool bridge rows and all branch-vertex stair blocks over the leaves.

    The root is the branch vertex with the least id.  Blocks stack by
    non-increasing distance from the root in the tree with its degree-2
    vertices suppressed (ties by id), so constraints tighten bottom-up.
    A non-root block drops the rows whose level window strictly contains
    the label range of the suppressed path to its parent: such a veto
    already binds the parent's matrix and would over-constrain here.
    """
    if not G.is_tree:
        raise NotATree("input graph is not a tree")
    leaves = tree_leaves(G)
    bridge_edges, bridge_rows = build_bridge_rows(G)
    branch = sorted(v for v in G.vertices if G.degree(v) >= 3)
    if not branch:
        return MasterMatrix(
            matrix=stair_closure(bridge_rows, leaves),
            root=min(G.gamma),
            bridge_edges=bridge_edges,
            blocks=(),
        )
    root = branch[0]
    suppressed, records = suppress_degree_two(G, keep={root})
    order, _, parent_edge = _bfs(suppressed, root)
    depth = {root: 0}
    span: dict[Vertex, tuple[int, int]] = {
        root: (G.min_cluster, G.num_clusters)
    }
    for u in order[1:]:
        rec = records[parent_edge[u]]
        # label range of the original path from u to its suppressed parent
        span[u] = (rec.min_label, rec.max_label)
    for u in order:
        for d in suppressed.incident[u]:
            w = suppressed.head(d)
            depth.setdefault(w, depth[u] + 1)

    rows: list[tuple[int | str, ...]] = list(bridge_rows)
    blocks: list[MasterBlock] = []
    for v in sorted(branch, key=lambda u: (-depth[u], u)):
        legs = {
            j: prof for j, (_, prof) in enumerate(_leaf_profiles(G, v))
        }
        iv = leg_interval_order(G.gamma[v], legs)
        full = stair_closure(
            restriction_rows(iv, range(len(leaves))), leaves
        )
        lo, hi = span[v]
        keep = [
            i for i, r in enumerate(iv) if not (r.low < lo and hi < r.high)
        ]
        start = len(rows)
        rows.extend(full.rows[i] for i in keep)
        blocks.append(
            MasterBlock(
                vertex=v,
                start=start,
                stop=len(rows),
                windows=tuple((iv[i].low, iv[i].high) for i in keep),
                dropped=len(iv) - len(keep),
            )
        )
    return MasterMatrix(
        matrix=stair_closure(rows, leaves),
        root=root,
        bridge_edges=bridge_edges,
        blocks=tuple(blocks),
    )


def realize_leaf_order(
    G: ClusteredGraph, order: Sequence[Vertex]
) -> EmbeddedGraph:
    """Embed the tree with its leaves in the given circular order.

    Requires every subtree's leaf set to occupy a circular arc of the
    order, which the bridge rows guarantee on accepted instances.  The
    rotation at a vertex reads the parent edge first, then the children
    by where their arcs begin going around the circle.
    """
    leaves = tree_leaves(G)
    pos = {leaf: i for i, leaf in enumerate(order)}
    if sorted(order) != list(leaves) or len(pos) != len(leaves):
        raise PreconditionViolated("order must list each leaf exactly once")
    root = min((v for v in G.vertices if G.degree(v) >= 3), default=None)
    if root is None:
        return default_embedding(G)
    n = len(leaves)
    walk, parent, parent_edge = _bfs(G, root)
    children: dict[Vertex, list[tuple[Vertex, Dart]]] = {u: [] for u in walk}
    for u in walk[1:]:
        e = parent_edge[u]
        a, _ = G.edges[e]
        children[parent[u]].append((u, 2 * e + (0 if a == parent[u] else 1)))
    sub: dict[Vertex, set[int]] = {u: set() for u in walk}
    for u in reversed(walk):
        if G.degree(u) == 1:
            sub[u].add(pos[u])
        if u != root:
            sub[parent[u]] |= sub[u]
    rotation: dict[Vertex, list[Dart]] = {}
    for u in walk:
        if not children[u]:
            rotation[u] = list(G.incident[u])
            continue
        if u == root:
            shift = 0
        else:
            starts = [p for p in sub[u] if (p - 1) % n not in sub[u]]
            if len(starts) != 1:
                raise PreconditionViolated(
                    f"leaves under {u!r} are not circularly consecutive"
                )
            shift = starts[0]
        keyed = sorted(
            (min((p - shift) % n for p in sub[w]), w, d)
            for w, d in children[u]
        )
        if u == root:
            ahead = []
        else:
            e = parent_edge[u]
            ahead = [2 * e + (0 if G.edges[e][0] == u else 1)]
        rotation[u] = ahead + [d for _, _, d in keyed]
    return build_embedding(G, rotation)


@dataclass(frozen=True)
class TreeSolution:
    planar: bool
    leaf_order: tuple[Vertex, ...] | None = None
    embedding: EmbeddedGraph | None = None
    master: MasterMatrix | None = None
    failing_row: int | None = None


def solve_tree(G: ClusteredGraph) -> TreeSolution:
    """Decide strip planarity of a tree.

    Paths are accepted outright: with maximum degree two every closing
    walk pair is forced flat and no veto can arise.  Otherwise the
    master matrix goes through the ambiguous circular-ones test; an
    accepting leaf order is realized as an embedding, a rejection
    reports the first master row that cannot be satisfied.
    """
    if not G.is_tree:
        raise NotATree("input graph is not a tree")
    if all(G.degree(v) <= 2 for v in G.vertices):
        return TreeSolution(
            planar=True,
            leaf_order=tree_leaves(G),
            embedding=default_embedding(G),
        )
    master = assemble_master(G)
    order = test_ambiguous(master.matrix)
    if order is Infeasible:
        return TreeSolution(
            planar=False,
            master=master,
            failing_row=first_infeasible_row(master.matrix),
        )
    return TreeSolution(
        planar=True,
        leaf_order=tuple(order),
        embedding=realize_leaf_order(G, tuple(order)),
        master=master,
    )
