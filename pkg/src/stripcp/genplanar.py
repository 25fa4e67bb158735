"""Randomized planar embedded instances for tests and experiments.

Instances are grown face by face: starting from a single labeled edge we
repeatedly attach pendant vertices at face corners or draw chords across a
face between two of its corners.  Both operations keep the rotation system
planar by construction, so the generator covers multigraphs with loops and
arbitrary nestings without ever needing a planarity test.
"""

from __future__ import annotations

import random
from typing import Sequence

from .graph import (
    ClusteredGraph,
    Dart,
    EmbeddedGraph,
    FacialWalk,
    Vertex,
    build_embedding,
    rev,
)


def _corner_vertex(emb: EmbeddedGraph, walk: FacialWalk, t: int) -> Vertex:
    return emb.graph.head(walk.darts[t])


def attach_leaf(
    emb: EmbeddedGraph, face_key: int, t: int, label: int, name: Vertex
) -> EmbeddedGraph:
    """New degree-1 vertex joined into the corner after step t of the face."""
    walk = emb.faces_by_key[face_key]
    u = _corner_vertex(emb, walk, t)
    G = emb.graph
    e = max(G.edges, default=-1) + 1
    d_u, d_new = 2 * e, 2 * e + 1
    gamma = dict(G.gamma)
    gamma[name] = label
    edges = dict(G.edges)
    edges[e] = (u, name)
    G2 = ClusteredGraph(gamma=gamma, edges=edges)
    rot = {v: list(r) for v, r in emb.rotation.items()}
    _insert_at_corner(emb, rot, walk, t, d_u)
    rot[name] = [d_new]
    rot2 = {v: tuple(r) for v, r in rot.items()}
    emb2 = EmbeddedGraph(graph=G2, rotation=rot2)
    outer2 = _same_face(emb, emb2, emb.outer)
    return EmbeddedGraph(graph=G2, rotation=rot2, outer=outer2)


def add_chord(
    emb: EmbeddedGraph, face_key: int, t1: int, t2: int
) -> EmbeddedGraph:
    """Edge drawn inside the face between the corners after steps t1, t2.

    t1 == t2 produces a loop bounding an empty disk at that corner.
    """
    walk = emb.faces_by_key[face_key]
    u = _corner_vertex(emb, walk, t1)
    v = _corner_vertex(emb, walk, t2)
    G = emb.graph
    e = max(G.edges, default=-1) + 1
    d_u, d_v = 2 * e, 2 * e + 1
    gamma = dict(G.gamma)
    edges = dict(G.edges)
    edges[e] = (u, v)
    G2 = ClusteredGraph(gamma=gamma, edges=edges)
    rot = {w: list(r) for w, r in emb.rotation.items()}
    # later corner first so the earlier anchor's index stays valid
    for t, d in sorted(((t1, d_u), (t2, d_v)), reverse=True):
        _insert_at_corner(emb, rot, walk, t, d)
    rot2 = {w: tuple(r) for w, r in rot.items()}
    emb2 = EmbeddedGraph(graph=G2, rotation=rot2)
    outer2 = _same_face(emb, emb2, emb.outer)
    return EmbeddedGraph(graph=G2, rotation=rot2, outer=outer2)


def _insert_at_corner(
    emb: EmbeddedGraph,
    rot: dict[Vertex, list[Dart]],
    walk: FacialWalk,
    t: int,
    new_dart: Dart,
) -> None:
    """Insert new_dart at the corner after step t: between the reversal of
    the step dart and its rotation successor at the corner vertex."""
    d = walk.darts[t]
    v = emb.graph.head(d)
    anchor = rev(d)
    i = rot[v].index(anchor)
    rot[v].insert(i + 1, new_dart)


def _same_face(old: EmbeddedGraph, new: EmbeddedGraph, key: int) -> int:
    """Track the outer face across an insertion (it may have been split)."""
    if key == -1 or not old.faces_by_key[key].darts:
        return new.faces[0].key
    for d in old.faces_by_key[key].darts:
        fk = new.face_by_dart.get(d)
        if fk is not None:
            return fk
    return new.faces[0].key


def random_planar_embedding(
    rng: random.Random,
    *,
    grow_steps: int = 8,
    levels: int = 3,
    chord_bias: float = 0.5,
    allow_loops: bool = True,
) -> EmbeddedGraph:
    """Connected labeled planar embedding grown by random corner surgery."""
    g0 = 1 + rng.randrange(levels)
    g1 = min(levels, g0 + rng.choice((0, 1))) if levels > 1 else g0
    base = ClusteredGraph(gamma={"v0": g0, "v1": g1}, edges={0: ("v0", "v1")})
    emb = build_embedding(base, {"v0": (0,), "v1": (1,)})
    n = 2
    for _ in range(grow_steps):
        faces = emb.faces
        walk = faces[rng.randrange(len(faces))]
        if not walk.darts:
            continue
        L = len(walk.darts)
        if rng.random() < chord_bias:
            t1 = rng.randrange(L)
            t2 = rng.randrange(L)
            if t1 == t2 and not allow_loops:
                continue
            u = _corner_vertex(emb, walk, t1)
            v = _corner_vertex(emb, walk, t2)
            if abs(emb.graph.gamma[u] - emb.graph.gamma[v]) > 1:
                continue
            emb = add_chord(emb, walk.key, t1, t2)
        else:
            t = rng.randrange(L)
            u = _corner_vertex(emb, walk, t)
            gu = emb.graph.gamma[u]
            lo = max(1, gu - 1)
            hi = min(levels, gu + 1)
            emb = attach_leaf(
                emb, walk.key, t, rng.randint(lo, hi), f"v{n}"
            )
            n += 1
    return emb


def random_closed_walk(
    emb: EmbeddedGraph, rng: random.Random, max_len: int = 8
) -> tuple[Dart, ...] | None:
    """Random closed dart walk: wander, then return by shortest dart path."""
    G = emb.graph
    if not G.darts:
        return None
    d0 = rng.choice(G.darts)
    walk = [d0]
    for _ in range(rng.randrange(max_len)):
        v = G.head(walk[-1])
        walk.append(rng.choice(list(G.incident[v])))
    start = G.tail(walk[0])
    tail = _dart_path(G, G.head(walk[-1]), start)
    if tail is None:
        return None
    return tuple(walk + tail)


def random_open_walk(
    emb: EmbeddedGraph, rng: random.Random, max_len: int = 8
) -> tuple[Dart, ...]:
    G = emb.graph
    d0 = rng.choice(G.darts)
    walk = [d0]
    for _ in range(rng.randrange(max_len)):
        v = G.head(walk[-1])
        walk.append(rng.choice(list(G.incident[v])))
    return tuple(walk)


def _dart_path(G, src: Vertex, dst: Vertex) -> list[Dart] | None:
    """Darts of a BFS path src -> dst; empty list when src == dst."""
    if src == dst:
        return []
    prev: dict[Vertex, Dart] = {src: -1}
    frontier = [src]
    while frontier:
        nxt = []
        for x in frontier:
            for d in G.incident[x]:
                y = G.head(d)
                if y not in prev:
                    prev[y] = d
                    if y == dst:
                        path = []
                        while y != src:
                            path.append(prev[y])
                            y = G.tail(prev[y])
                        return path[::-1]
                    nxt.append(y)
        frontier = nxt
    return None
