"""Brute-force strip planarity oracle.

Enumerates every rotation system of the input graph (and, for each planar
one, every outer-face choice) and asks the embedded-instance decision for a
verdict.  Exponential and only meant for small instances, but independent
of the polynomial solvers, which makes it the ground truth they are tested
against.

For trees the enumeration is reduced by subtree symmetry: darts at a vertex
whose hanging subtrees are isomorphic as labeled rooted trees are
interchangeable, so only distinct cyclic words of subtree types are
instantiated.  The reduction never drops an embedding class; relabeling
isomorphic subtrees is a label-preserving automorphism and the embedded
decision is invariant under those.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Literal, Mapping, Sequence

from .characterization import check_embedded
from .errors import BudgetExceeded
from .graph import (
    ClusteredGraph,
    Dart,
    EmbeddedGraph,
    Vertex,
    build_clustered_graph,
)

OracleVerdict = Literal["planar", "not_planar", "budget_exceeded"]


@dataclass(frozen=True)
class OracleLimits:
    max_vertices: int = 10
    max_embeddings: int = 5_000_000


@dataclass(frozen=True)
class OracleResult:
    verdict: OracleVerdict
    embedding: EmbeddedGraph | None = None
    embeddings_tried: int = 0

    @property
    def planar(self) -> bool:
        return self.verdict == "planar"


# ---------------------------------------------------------------------------
# rotation enumeration


def _subtree_code(G: ClusteredGraph, root: Vertex, parent: Vertex, memo: dict):
    key = (root, parent)
    if key in memo:
        return memo[key]
    kids = sorted(
        _subtree_code(G, u, root, memo)
        for u in G.neighbors(root)
        if u != parent
    )
    code = (G.gamma[root], tuple(kids))
    memo[key] = code
    return code


def _vertex_orders(
    G: ClusteredGraph, v: Vertex, type_memo: dict | None
) -> list[tuple[Dart, ...]]:
    """Cyclic orders to try at v: all of them, up to rotation of the word,
    and modulo subtree-type symmetry when a tree's type memo is given."""
    darts = sorted(G.incident[v])
    if len(darts) <= 2:
        return [tuple(darts)]
    if type_memo is None:
        first, rest = darts[0], darts[1:]
        return [(first, *p) for p in itertools.permutations(rest)]
    types = {d: _subtree_code(G, G.head(d), v, type_memo) for d in darts}
    by_type: dict = {}
    for d in darts:
        by_type.setdefault(types[d], []).append(d)
    t0 = min(by_type)
    rest_types = sorted(types[d] for d in darts)
    rest_types.remove(t0)
    words = sorted({(t0, *p) for p in itertools.permutations(rest_types)})
    out = []
    for word in words:
        counters = {t: iter(ds) for t, ds in by_type.items()}
        out.append(tuple(next(counters[t]) for t in word))
    return out


def enumerate_embeddings(
    G: ClusteredGraph, symmetry: bool = True
) -> Iterator[EmbeddedGraph]:
    """All planar embedded instances of a connected graph, lexicographically
    by rotation choice and then by outer face key."""
    vs = sorted(G.vertices)
    type_memo: dict | None = {} if (symmetry and G.is_tree) else None
    per = [_vertex_orders(G, v, type_memo) for v in vs]
    for combo in itertools.product(*per):
        rot: Mapping[Vertex, tuple[Dart, ...]] = dict(zip(vs, combo))
        emb = EmbeddedGraph(graph=G, rotation=rot)
        if not emb.is_planar():
            continue
        for f in emb.faces:
            yield EmbeddedGraph(graph=G, rotation=rot, outer=f.key)


def _induced(G: ClusteredGraph, comp: frozenset[Vertex]) -> ClusteredGraph:
    return ClusteredGraph(
        gamma={v: G.gamma[v] for v in sorted(comp)},
        edges={e: uv for e, uv in G.edges.items() if uv[0] in comp},
    )


# ---------------------------------------------------------------------------
# instance enumeration for sweeps


def _canonical_code(n: int, adj: list[list[int]]) -> tuple:
    """Isomorphism key of an unlabeled tree: root code at the centroid."""

    def subtree_sizes(root: int) -> list[int]:
        size = [1] * n
        order, parent = [root], [-1] * n
        seen = [False] * n
        seen[root] = True
        for u in order:
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    order.append(w)
        for u in reversed(order):
            if parent[u] >= 0:
                size[parent[u]] += size[u]
        return [
            max(
                [size[w] for w in adj[u] if w != parent[u]]
                + [n - size[u]],
                default=0,
            )
            for u in range(n)
        ]

    heaviest = subtree_sizes(0)
    best = min(heaviest)
    centroids = [u for u in range(n) if heaviest[u] == best]

    def code(u: int, parent: int) -> tuple:
        return tuple(sorted(code(w, u) for w in adj[u] if w != parent))

    return min(code(c, -1) for c in centroids)


def tree_shapes(n: int) -> list[tuple[tuple[int, int], ...]]:
    """One edge list per isomorphism class of trees on n vertices.

    Grown by attaching vertex m to every vertex of every smaller shape
    and deduplicating by canonical code; counts run 1, 1, 1, 2, 3, 6,
    11, 23, 47 for n = 1..9.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    shapes: list[tuple[tuple[int, int], ...]] = [()]
    for m in range(1, n):
        seen: dict[tuple, tuple[tuple[int, int], ...]] = {}
        for edges in shapes:
            for v in range(m):
                grown = edges + ((v, m),)
                adj: list[list[int]] = [[] for _ in range(m + 1)]
                for a, b in grown:
                    adj[a].append(b)
                    adj[b].append(a)
                seen.setdefault(_canonical_code(m + 1, adj), grown)
        shapes = list(seen.values())
    return shapes


def strip_labelings(
    edges: Sequence[tuple[int, int]], n: int, k: int
) -> Iterator[dict[int, int]]:
    """Every cluster labeling of a tree shape with levels in 1..k.

    Adjacent labels differ by at most one and the minimum label is pinned
    to 1, which removes vertical-shift duplicates (a connected shape's
    labels always cover a contiguous range).
    """
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    order = [0]
    parent = [-1] * n
    seen = [False] * n
    seen[0] = True
    for u in order:
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                order.append(w)
    labels = [0] * n

    def assign(i: int) -> Iterator[dict[int, int]]:
        if i == len(order):
            if min(labels) == 1:
                yield {u: labels[u] for u in range(n)}
            return
        u = order[i]
        if parent[u] < 0:
            choices = range(1, k + 1)
        else:
            p = labels[parent[u]]
            choices = range(max(1, p - 1), min(k, p + 1) + 1)
        for c in choices:
            labels[u] = c
            yield from assign(i + 1)

    yield from assign(0)


def shape_graph(
    edges: Sequence[tuple[int, int]], labels: Mapping[int, int]
) -> ClusteredGraph:
    """Clustered graph over string ids for an integer shape + labeling."""
    verts = [(str(u), labels[u]) for u in sorted(labels)]
    return build_clustered_graph(
        verts, [(str(a), str(b)) for a, b in edges], compact=False
    )


# ---------------------------------------------------------------------------
# decision


def _decide_connected(
    G: ClusteredGraph, limits: OracleLimits, tried: int
) -> tuple[EmbeddedGraph | Literal["none", "budget"], int]:
    unknown = False
    for emb in enumerate_embeddings(G):
        tried += 1
        if tried > limits.max_embeddings:
            return "budget", tried
        try:
            if check_embedded(emb, mode="exhaustive").planar:
                return emb, tried
        except BudgetExceeded:
            unknown = True
    return ("budget" if unknown else "none"), tried


def oracle_decide(
    G: ClusteredGraph, limits: OracleLimits = OracleLimits()
) -> OracleResult:
    """Strip planarity by exhausting embedded instances per component.

    Components are independent: each planar component can be drawn in its
    strips beside the others, so the verdict is their conjunction.
    """
    if len(G.vertices) > limits.max_vertices:
        return OracleResult(verdict="budget_exceeded")
    tried = 0
    witness: EmbeddedGraph | None = None
    for comp in sorted(G.components, key=min):
        sub = _induced(G, comp)
        res, tried = _decide_connected(sub, limits, tried)
        if res == "budget":
            return OracleResult(verdict="budget_exceeded", embeddings_tried=tried)
        if res == "none":
            return OracleResult(verdict="not_planar", embeddings_tried=tried)
        witness = res
    if len(G.components) != 1:
        witness = None
    return OracleResult(
        verdict="planar", embedding=witness, embeddings_tried=tried
    )
