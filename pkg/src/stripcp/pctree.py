"""PC-trees and circular-ones testing.

A PC-tree stores a family of circular orders over a set of labeled leaves:
P-nodes allow any arrangement of their incident subtrees, C-nodes fix a
cyclic arrangement up to reflection, and every reflection choice is made
independently per C-node.  Intersecting the family with "this leaf subset
must form a circular arc" is the one mutating operation; rows of a 0/1
matrix are fed through it to decide the circular-ones property.

Also here: the ambiguous-entry variant (rows over {0,1,*} whose columns
must be stair shaped, a * only ever followed by more *), extraction of the
always-consecutive leaf sets, and a scanner for the two minimal forbidden
submatrix shapes (a cyclic-adjacency block with a spare zero column, and
three dominoes pinned by a transversal row).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Literal, Mapping, Sequence

from .errors import (
    InternalContradiction,
    PreconditionViolated,
    StairViolation,
    TooManyLeaves,
)

Label = Hashable


class _InfeasibleType:
    """Singleton returned when no circular order survives a constraint."""

    _instance = None

    def __new__(cls) -> "_InfeasibleType":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Infeasible"

    def __bool__(self) -> bool:
        return False


Infeasible = _InfeasibleType()


def _sorted_labels(labels: Iterable[Label]) -> list[Label]:
    labels = list(labels)
    try:
        return sorted(labels)  # type: ignore[type-var]
    except TypeError:
        return sorted(labels, key=repr)


def _label_key(label: Label):
    return (label.__class__.__name__, repr(label))


# ---------------------------------------------------------------------------
# the tree


class PCTree:
    """Unrooted tree over P-nodes, C-nodes, and labeled leaves.

    Node ids are internal integers.  Adjacency lists are meaningful up to
    order only at C-nodes, where the list is read as a cyclic sequence; we
    nevertheless keep every list in deterministic order so that traversals
    and reported orders are reproducible.
    """

    def __init__(self) -> None:
        self._kind: dict[int, str] = {}
        self._adj: dict[int, list[int]] = {}
        self._label: dict[int, Label] = {}
        self._leaf_of: dict[Label, int] = {}
        self._next = 0

    # -- construction ------------------------------------------------------

    def _new_node(self, kind: str) -> int:
        nid = self._next
        self._next += 1
        self._kind[nid] = kind
        self._adj[nid] = []
        return nid

    @classmethod
    def star(cls, labels: Sequence[Label]) -> "PCTree":
        """Free tree: one P-node with one leaf per label.  Captures all orders."""
        tree = cls()
        labels = list(labels)
        if len(set(labels)) != len(labels):
            raise PreconditionViolated("duplicate leaf labels")
        if not labels:
            return tree
        if len(labels) == 1:
            leaf = tree._new_node("L")
            tree._label[leaf] = labels[0]
            tree._leaf_of[labels[0]] = leaf
            return tree
        hub = tree._new_node("P")
        for lab in labels:
            leaf = tree._new_node("L")
            tree._label[leaf] = lab
            tree._leaf_of[lab] = leaf
            tree._adj[hub].append(leaf)
            tree._adj[leaf].append(hub)
        return tree

    @classmethod
    def from_structure(
        cls,
        adjacency: Mapping[Hashable, Sequence[Hashable]],
        kinds: Mapping[Hashable, str],
    ) -> "PCTree":
        """Build from named nodes.

        ``kinds`` maps internal node names to "P" or "C"; every name absent
        from it is a leaf and its name doubles as its label.  For C-nodes
        the adjacency sequence is taken as the ring order.
        """
        tree = cls()
        names = set(adjacency)
        for u, nbrs in adjacency.items():
            names.update(nbrs)
        ids: dict[Hashable, int] = {}
        for name in sorted(names, key=_label_key):
            kind = kinds.get(name)
            if kind is None:
                nid = tree._new_node("L")
                tree._label[nid] = name
                tree._leaf_of[name] = nid
            elif kind in ("P", "C"):
                nid = tree._new_node(kind)
            else:
                raise PreconditionViolated(f"unknown node kind {kind!r}")
            ids[name] = nid
        edges = set()
        for u, nbrs in adjacency.items():
            for w in nbrs:
                edges.add(frozenset((ids[u], ids[w])))
                if ids[w] not in tree._adj[ids[u]]:
                    tree._adj[ids[u]].append(ids[w])
                if ids[u] not in tree._adj[ids[w]]:
                    tree._adj[ids[w]].append(ids[u])
        if len(edges) != len(names) - 1:
            raise PreconditionViolated("structure is not a tree")
        # connectivity
        seen = {next(iter(ids.values()))} if ids else set()
        stack = list(seen)
        while stack:
            u = stack.pop()
            for w in tree._adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(names):
            raise PreconditionViolated("structure is not connected")
        for name, kind in kinds.items():
            if tree._kind[ids[name]] == "L":
                continue
            if len(tree._adj[ids[name]]) < 2:
                raise PreconditionViolated(f"internal node {name!r} has degree < 2")
        return tree

    def copy(self) -> "PCTree":
        tree = PCTree()
        tree._kind = dict(self._kind)
        tree._adj = {u: list(ns) for u, ns in self._adj.items()}
        tree._label = dict(self._label)
        tree._leaf_of = dict(self._leaf_of)
        tree._next = self._next
        return tree

    # -- inspection --------------------------------------------------------

    def leaves(self) -> tuple[Label, ...]:
        return tuple(_sorted_labels(self._leaf_of))

    def leaf_count(self) -> int:
        return len(self._leaf_of)

    def _edges(self) -> list[tuple[int, int]]:
        out = []
        for u, nbrs in self._adj.items():
            for w in nbrs:
                if u < w:
                    out.append((u, w))
        return out

    def _side_leaf_ids(self, u: int, v: int) -> set[int]:
        """Leaf node ids strictly beyond v, seen from u."""
        seen = {u, v}
        stack = [v]
        out = set()
        while stack:
            x = stack.pop()
            if self._kind[x] == "L":
                out.add(x)
            for w in self._adj[x]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return out

    def side_leaves(self, u: int, v: int) -> frozenset[Label]:
        """Labels on the far side of the edge (u, v), beyond v."""
        if v not in self._adj.get(u, ()):
            raise PreconditionViolated(f"({u}, {v}) is not an edge")
        return frozenset(self._label[x] for x in self._side_leaf_ids(u, v))

    # -- order enumeration -------------------------------------------------

    def _child_sequences(self, u: int, parent: int) -> Iterator[tuple[Label, ...]]:
        """Leaf sequences readable from the subtree at u, entered from parent."""
        if self._kind[u] == "L":
            yield (self._label[u],)
            return
        nbrs = [w for w in self._adj[u] if w != parent]
        if self._kind[u] == "C" and len(nbrs) >= 2:
            ring = self._adj[u]
            i = ring.index(parent)
            fwd = ring[i + 1 :] + ring[:i]
            directions = [fwd]
            bwd = list(reversed(fwd))
            if bwd != fwd:
                directions.append(bwd)
            for seq in directions:
                for parts in itertools.product(
                    *[list(self._child_sequences(w, u)) for w in seq]
                ):
                    yield tuple(itertools.chain.from_iterable(parts))
            return
        # P-node (or degree-2 pass-through): all arrangements
        pools = {w: list(self._child_sequences(w, u)) for w in nbrs}
        for perm in itertools.permutations(nbrs):
            for parts in itertools.product(*[pools[w] for w in perm]):
                yield tuple(itertools.chain.from_iterable(parts))

    def _first_sequence(self, u: int, parent: int) -> tuple[Label, ...]:
        if self._kind[u] == "L":
            return (self._label[u],)
        nbrs = [w for w in self._adj[u] if w != parent]
        if self._kind[u] == "C" and len(nbrs) >= 2:
            ring = self._adj[u]
            i = ring.index(parent)
            nbrs = ring[i + 1 :] + ring[:i]
        return tuple(
            itertools.chain.from_iterable(self._first_sequence(w, u) for w in nbrs)
        )

    def default_order(self) -> tuple[Label, ...]:
        """One captured circular order, deterministically chosen."""
        labs = self.leaves()
        if len(labs) <= 1:
            return labs
        anchor = labs[0]
        a = self._leaf_of[anchor]
        if not self._adj[a]:
            # isolated leaves only happen in degenerate >=2-leaf forests,
            # which delete_leaves never produces
            raise InternalContradiction("disconnected leaf")
        root = self._adj[a][0]
        return (anchor,) + self._first_sequence(root, a)

    def order_matching(self, target: Sequence[Label]) -> tuple[Label, ...]:
        """A captured order whose restriction to ``target`` is ``target``.

        ``target`` is a cyclic sequence over a subset of the leaves; the
        restriction matches it up to rotation and reflection.  Raises
        InternalContradiction when no captured order complies: callers use
        this only when an extension is guaranteed to exist.
        """
        live = set(target)
        if len(live) != len(target):
            raise PreconditionViolated("target repeats a label")
        if not live <= set(self._leaf_of):
            raise PreconditionViolated("target is not a leaf subset")
        if len(target) <= 2:
            return self.default_order()
        anchor = target[0]
        a = self._leaf_of[anchor]
        root = self._adj[a][0]
        counts = self._live_counts(a, root, live)
        for word in (tuple(target[1:]), tuple(reversed(target[1:]))):
            seq = self._guided(root, a, word, live, counts)
            if seq is not None:
                return (anchor,) + seq
        raise InternalContradiction("no captured order matches the target")

    def _live_counts(self, start_parent: int, root: int, live: set) -> dict:
        """Per rooted (parent, child) edge: count of live leaves below child."""
        parent = {root: start_parent}
        order = [root]
        stack = [root]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w != parent[u]:
                    parent[w] = u
                    order.append(w)
                    stack.append(w)
        counts: dict[tuple[int, int], int] = {}
        for u in reversed(order):
            p = parent[u]
            if self._kind[u] == "L":
                counts[(p, u)] = 1 if self._label[u] in live else 0
            else:
                counts[(p, u)] = sum(
                    counts[(u, w)] for w in self._adj[u] if w != p
                )
        return counts

    def _guided(
        self,
        u: int,
        parent: int,
        word: tuple[Label, ...],
        live: set,
        counts: dict,
    ) -> tuple[Label, ...] | None:
        """Arrange the subtree so its live leaves read exactly ``word``."""
        if self._kind[u] == "L":
            lab = self._label[u]
            if lab in live:
                return (lab,) if word == (lab,) else None
            return (lab,) if not word else None
        nbrs = [w for w in self._adj[u] if w != parent]
        # every live letter below u sits below exactly one child; the word
        # must therefore split into one contiguous run per child
        owner: dict[Label, int] = {}
        for w in nbrs:
            if counts[(u, w)]:
                for x in self._side_leaf_ids(u, w):
                    lab = self._label[x]
                    if lab in live:
                        owner[lab] = w
        runs: list[tuple[int, list[Label]]] = []
        for lab in word:
            c = owner.get(lab)
            if c is None:
                return None
            if runs and runs[-1][0] == c:
                runs[-1][1].append(lab)
            else:
                runs.append((c, [lab]))
        if len({c for c, _ in runs}) != len(runs):
            return None
        if self._kind[u] == "C" and len(nbrs) >= 2:
            ring = self._adj[u]
            i = ring.index(parent)
            fwd = ring[i + 1 :] + ring[:i]
            for cand in (fwd, list(reversed(fwd))):
                if [w for w in cand if counts[(u, w)]] != [c for c, _ in runs]:
                    continue
                by_child = {c: tuple(sub) for c, sub in runs}
                parts = []
                ok = True
                for w in cand:
                    got = self._guided(w, u, by_child.get(w, ()), live, counts)
                    if got is None:
                        ok = False
                        break
                    parts.append(got)
                if ok:
                    return tuple(itertools.chain.from_iterable(parts))
            return None
        parts = []
        for c, sub in runs:
            got = self._guided(c, u, tuple(sub), live, counts)
            if got is None:
                return None
            parts.append(got)
        for w in nbrs:
            if not counts[(u, w)]:
                parts.append(self._first_sequence(w, u))
        return tuple(itertools.chain.from_iterable(parts))

    def allowed_orders(self, max_leaves: int = 12) -> Iterator[tuple[Label, ...]]:
        """All captured circular orders, one canonical representative each.

        Canonical = lexicographically least over rotations and both
        reflections, which pins the least label first.
        """
        labs = self.leaves()
        if len(labs) > max_leaves:
            raise TooManyLeaves(f"{len(labs)} leaves > bound {max_leaves}")
        if len(labs) <= 2:
            yield labs
            return
        anchor = labs[0]
        a = self._leaf_of[anchor]
        root = self._adj[a][0]
        seen: set[tuple[Label, ...]] = set()
        for seq in self._child_sequences(root, a):
            fwd = (anchor,) + seq
            rev_ = (anchor,) + tuple(reversed(seq))
            canon = min(fwd, rev_, key=lambda t: tuple(_label_key(x) for x in t))
            if canon not in seen:
                seen.add(canon)
                yield canon

    # -- arc membership ----------------------------------------------------

    def _constraint_sets(self, include_trivial: bool) -> list[tuple[frozenset, str]]:
        n = self.leaf_count()
        out: list[tuple[frozenset, str]] = []
        seen: set[frozenset] = set()

        def push(leaves: frozenset, why: str) -> None:
            if not include_trivial and (len(leaves) <= 1 or len(leaves) >= n - 1):
                return
            if leaves in seen:
                return
            seen.add(leaves)
            out.append((leaves, why))

        for u, v in self._edges():
            push(self.side_leaves(v, u), f"edge side toward node {u}")
            push(self.side_leaves(u, v), f"edge side toward node {v}")
        for u in self._adj:
            if self._kind[u] != "C":
                continue
            ring = self._adj[u]
            d = len(ring)
            sides = [frozenset(self._label[x] for x in self._side_leaf_ids(u, w)) for w in ring]
            for start in range(d):
                for length in range(2, d - 1):
                    run: set[Label] = set()
                    for j in range(length):
                        run |= sides[(start + j) % d]
                    push(frozenset(run), f"arc of {length} subtrees at C-node {u}")
        return out

    def captures(self, order: Sequence[Label]) -> bool:
        """Does the tree allow this circular order of all its leaves?"""
        labs = set(self.leaves())
        if set(order) != labs or len(order) != len(labs):
            raise PreconditionViolated("order must list every leaf exactly once")
        pos = {lab: i for i, lab in enumerate(order)}
        n = len(order)
        for leaves, _ in self._constraint_sets(include_trivial=True):
            if not _is_circular_arc([pos[x] for x in leaves], n):
                return False
        return True

    # -- deletion ----------------------------------------------------------

    def delete_leaves(self, labels: Iterable[Label]) -> None:
        """Drop the named leaves, then suppress dead and degree-2 internals."""
        labels = list(labels)
        for lab in labels:
            if lab not in self._leaf_of:
                raise PreconditionViolated(f"{lab!r} is not a leaf label")
        dirty: set[int] = set()
        for lab in labels:
            leaf = self._leaf_of.pop(lab)
            del self._label[leaf]
            for w in self._adj[leaf]:
                self._adj[w].remove(leaf)
                dirty.add(w)
            del self._adj[leaf]
            del self._kind[leaf]
        while dirty:
            u = dirty.pop()
            if u not in self._kind or self._kind[u] == "L":
                continue
            deg = len(self._adj[u])
            if deg >= 3:
                continue
            if deg == 2:
                a, b = self._adj[u]
                self._adj[a][self._adj[a].index(u)] = b
                self._adj[b][self._adj[b].index(u)] = a
            elif deg == 1:
                (a,) = self._adj[u]
                self._adj[a].remove(u)
                dirty.add(a)
            del self._adj[u]
            del self._kind[u]

    # -- the one mutating constraint ---------------------------------------

    def make_consecutive(self, labels: Iterable[Label]) -> bool:
        """Restrict to circular orders where ``labels`` form an arc.

        Returns False (leaving the tree untouched) when no captured order
        complies; True otherwise, after updating in place.
        """
        want = set(labels)
        missing = want - set(self._leaf_of)
        if missing:
            raise PreconditionViolated(f"not leaf labels: {_sorted_labels(missing)}")
        S = {self._leaf_of[x] for x in want}
        return self._make_consecutive(S)

    def _make_consecutive(self, S: set[int]) -> bool:
        n_leaves = len(self._leaf_of)
        if len(S) <= 1 or n_leaves - len(S) <= 1:
            return True

        cnt_s, cnt_t, parent = self._count_sides(S)

        def state(u: int, v: int) -> str:
            s = cnt_s[(u, v)]
            if s == 0:
                return "E"
            if s == cnt_t[(u, v)]:
                return "F"
            return "M"

        edges = [(p, u) for u, p in parent.items() if p is not None]

        # no-op: S is exactly one side of some edge
        for p, u in edges:
            for a, b in ((p, u), (u, p)):
                if cnt_s[(a, b)] == len(S) and cnt_s[(a, b)] == cnt_t[(a, b)]:
                    return True

        bichromatic = [
            (p, u) for p, u in edges if state(p, u) == "M" and state(u, p) == "M"
        ]
        if not bichromatic:
            return self._split_single_node(S, state)
        return self._split_path(S, state, bichromatic)

    def _count_sides(
        self, S: set[int]
    ) -> tuple[dict[tuple[int, int], int], dict[tuple[int, int], int], dict[int, int | None]]:
        """Per directed edge (u, v): count of S-leaves / all leaves beyond v."""
        root = next(iter(self._adj))
        parent: dict[int, int | None] = {root: None}
        order = [root]
        stack = [root]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in parent:
                    parent[w] = u
                    order.append(w)
                    stack.append(w)
        cnt_s: dict[tuple[int, int], int] = {}
        cnt_t: dict[tuple[int, int], int] = {}
        for u in reversed(order):
            p = parent[u]
            if p is None:
                continue
            if self._kind[u] == "L":
                cnt_s[(p, u)] = 1 if u in S else 0
                cnt_t[(p, u)] = 1
            else:
                cnt_s[(p, u)] = sum(cnt_s[(u, w)] for w in self._adj[u] if w != p)
                cnt_t[(p, u)] = sum(cnt_t[(u, w)] for w in self._adj[u] if w != p)
            cnt_s[(u, p)] = len(S) - cnt_s[(p, u)]
            cnt_t[(u, p)] = len(self._leaf_of) - cnt_t[(p, u)]
        return cnt_s, cnt_t, parent

    def _split_single_node(self, S: set[int], state) -> bool:
        """No bichromatic edge: all of S hangs at one node, possibly split."""
        hits = [
            u
            for u in self._adj
            if self._kind[u] != "L"
            and all(state(u, w) != "M" for w in self._adj[u])
        ]
        if len(hits) != 1:
            raise InternalContradiction("mixed far sides admit no unique hub")
        x = hits[0]
        fulls = [w for w in self._adj[x] if state(x, w) == "F"]
        if self._kind[x] == "C":
            # ring order is fixed: feasible iff the full sides are contiguous
            st = [state(x, w) for w in self._adj[x]]
            breaks = sum(1 for i in range(len(st)) if st[i] != st[(i + 1) % len(st)])
            return breaks == 2
        if len(fulls) < 2 or len(self._adj[x]) - len(fulls) < 2:
            raise InternalContradiction("one-sided hub should be a no-op")
        y = self._new_node("P")
        for w in fulls:
            self._adj[w][self._adj[w].index(x)] = y
        self._adj[y] = fulls + [x]
        self._adj[x] = [w for w in self._adj[x] if state(x, w) != "F"] + [y]
        return True

    def _split_path(self, S: set[int], state, bichromatic) -> bool:
        deg: dict[int, int] = {}
        inc: dict[int, list[int]] = {}
        for u, v in bichromatic:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
            inc.setdefault(u, []).append(v)
            inc.setdefault(v, []).append(u)
        if any(d > 2 for d in deg.values()):
            return False
        ends = sorted(u for u, d in deg.items() if d == 1)
        if len(ends) != 2:
            return False
        path = [ends[0]]
        prev: int | None = None
        while True:
            nxt = [w for w in inc[path[-1]] if w != prev]
            if not nxt:
                break
            prev = path[-1]
            path.append(nxt[0])
        if len(path) != len(bichromatic) + 1:
            return False  # bichromatic edges are not a single path

        # per path node: hanging subtrees split into pure full / empty runs
        m = len(path) - 1
        plan: list[tuple[int, list[int], list[int]]] = []
        for i, u in enumerate(path):
            on_path = [w for w in (path[i - 1] if i else None, path[i + 1] if i < m else None) if w is not None]
            hang = [w for w in self._adj[u] if w not in on_path]
            if any(state(u, w) == "M" for w in hang):
                return False
            if self._kind[u] == "C":
                got = self._c_node_runs(u, state, on_path, last_endpoint=(i == m))
                if got is None:
                    return False
                fulls, empties = got
            else:
                fulls = [w for w in hang if state(u, w) == "F"]
                empties = [w for w in hang if state(u, w) == "E"]
            if i in (0, m) and (not fulls or not empties):
                raise InternalContradiction("path endpoint lacks a pure side")
            plan.append((u, fulls, empties))

        # assemble the replacement ring: fulls in path order, then empties
        # in reverse path order, so both color classes are contiguous
        z = self._new_node("C")
        ring: list[int] = []

        def emit(u: int, children: list[int]) -> None:
            if not children:
                return
            if self._kind[u] == "C" or len(children) == 1:
                for c in children:
                    self._adj[c][self._adj[c].index(u)] = z
                    ring.append(c)
            else:
                w = self._new_node("P")
                for c in children:
                    self._adj[c][self._adj[c].index(u)] = w
                self._adj[w] = [z] + children
                ring.append(w)

        for u, fulls, _ in plan:
            emit(u, fulls)
        for u, _, empties in reversed(plan):
            emit(u, empties)
        self._adj[z] = ring
        for u in path:
            del self._adj[u]
            del self._kind[u]
        return True

    def _c_node_runs(self, u: int, state, on_path: list[int], last_endpoint: bool):
        """Split a path C-node's ring into oriented full and empty runs.

        Returns (fulls, empties) in the order they must appear on the new
        ring, or None when the fixed ring cannot comply.  On the new ring
        the first endpoint's blocks wrap around the seam (empties close the
        ring, fulls open it) while the last endpoint's blocks sit adjacent
        as fulls-then-empties, so the two endpoints read their rings with
        opposite conventions.
        """
        ring = self._adj[u]
        if len(on_path) == 1:
            i = ring.index(on_path[0])
            seq = ring[i + 1 :] + ring[:i]
            st = "".join(state(u, w) for w in seq)
            k = st.count("F")
            as_is = None
            if st == "E" * (len(st) - k) + "F" * k:
                as_is = not last_endpoint
            elif st == "F" * k + "E" * (len(st) - k):
                as_is = last_endpoint
            if as_is is None:
                return None
            use = seq if as_is else list(reversed(seq))
            return [w for w in use if state(u, w) == "F"], [
                w for w in use if state(u, w) == "E"
            ]
        a = ring.index(on_path[0])
        b = ring.index(on_path[1])
        d = len(ring)
        arc_a = [ring[(a + j) % d] for j in range(1, (b - a) % d)]
        arc_b = [ring[(b + j) % d] for j in range(1, (a - b) % d)]
        if all(state(u, w) == "F" for w in arc_a) and all(
            state(u, w) == "E" for w in arc_b
        ):
            return arc_a, arc_b
        if all(state(u, w) == "E" for w in arc_a) and all(
            state(u, w) == "F" for w in arc_b
        ):
            return list(reversed(arc_b)), list(reversed(arc_a))
        return None


def _is_circular_arc(positions: list[int], n: int) -> bool:
    if len(positions) <= 1 or len(positions) >= n:
        return True
    ps = sorted(positions)
    breaks = 0
    for i, p in enumerate(ps):
        nxt = ps[(i + 1) % len(ps)]
        if (nxt - p) % n != 1:
            breaks += 1
    return breaks <= 1


# ---------------------------------------------------------------------------
# constraints


@dataclass(frozen=True)
class Constraint:
    """A leaf subset consecutive in every captured circular order."""

    leaves: frozenset
    provenance: str


def extract_constraints(tree: PCTree) -> list[Constraint]:
    """All nontrivial always-consecutive leaf sets, with their tree origin.

    Edge sides give one constraint per direction; every run of at least two
    consecutive subtrees around a C-node gives a composite constraint.
    Sets of size <= 1 or >= leaves-1 are suppressed.
    """
    pairs = tree._constraint_sets(include_trivial=False)
    pairs.sort(key=lambda p: (len(p[0]), tuple(_label_key(x) for x in _sorted_labels(p[0]))))
    return [Constraint(leaves=s, provenance=why) for s, why in pairs]


# ---------------------------------------------------------------------------
# row application and plain circular-ones


def apply_row(tree: PCTree, zeros: Iterable[Label], ones: Iterable[Label]):
    """Constrain: zeros form an arc and ones form an arc.

    Mutates and returns ``tree``; returns ``Infeasible`` (tree unchanged)
    when no captured order complies.  Either side may be empty, which makes
    that side vacuous.
    """
    zeros = set(zeros)
    ones = set(ones)
    if zeros & ones:
        raise PreconditionViolated("zeros and ones overlap")
    backup = tree.copy()
    if not tree.make_consecutive(zeros):
        return Infeasible
    if not tree.make_consecutive(ones):
        # first half may have restructured; roll back in place
        tree._kind = backup._kind
        tree._adj = backup._adj
        tree._label = backup._label
        tree._leaf_of = backup._leaf_of
        tree._next = backup._next
        return Infeasible
    return tree


def _as_binary_rows(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    out = []
    width = None
    for r in rows:
        t = tuple(r)
        if width is None:
            width = len(t)
        elif len(t) != width:
            raise PreconditionViolated("ragged matrix")
        if any(x not in (0, 1) for x in t):
            raise PreconditionViolated("entries must be 0 or 1")
        out.append(t)
    return out


def order_respects(
    order: Sequence[Label],
    rows: Sequence[Sequence[int | str]],
    columns: Sequence[Label] | None = None,
) -> bool:
    """Check a circular column order against every row, skipping * entries."""
    if columns is None:
        columns = tuple(range(len(rows[0]) if rows else 0))
    pos_all = {c: i for i, c in enumerate(order)}
    if set(pos_all) != set(columns):
        raise PreconditionViolated("order must list every column exactly once")
    for row in rows:
        live = [c for c in order if row[columns.index(c)] != "*"]
        sub = {c: i for i, c in enumerate(live)}
        ones = [sub[c] for c in live if row[columns.index(c)] == 1]
        if not _is_circular_arc(ones, len(live)):
            return False
    return True


def test_circular_ones(
    rows: Sequence[Sequence[int]], columns: Sequence[Label] | None = None
):
    """Circular-ones decision for a 0/1 matrix.

    Returns a circular column order under which every row's ones (hence
    also its zeros) are circularly consecutive, or ``Infeasible``.
    """
    rows = _as_binary_rows(rows)
    if columns is None:
        columns = tuple(range(len(rows[0]) if rows else 0))
    else:
        columns = tuple(columns)
        if rows and len(columns) != len(rows[0]):
            raise PreconditionViolated("column labels do not match width")
    tree = PCTree.star(columns)
    for row in rows:
        zeros = {c for c, x in zip(columns, row) if x == 0}
        ones = {c for c, x in zip(columns, row) if x == 1}
        if apply_row(tree, zeros, ones) is Infeasible:
            return Infeasible
    order = tree.default_order() if columns else ()
    if rows and not order_respects(order, rows, columns):
        raise InternalContradiction("accepted order fails a row")
    return order


# ---------------------------------------------------------------------------
# ambiguous matrices


@dataclass(frozen=True)
class AmbiguousMatrix:
    """Rows over {0, 1, *}; in each column a * is only followed by more *."""

    rows: tuple[tuple[int | str, ...], ...]
    columns: tuple[Label, ...]

    @classmethod
    def build(
        cls,
        rows: Sequence[Sequence[int | str]],
        columns: Sequence[Label] | None = None,
    ) -> "AmbiguousMatrix":
        norm = []
        width = None
        for r in rows:
            t = tuple(r)
            if width is None:
                width = len(t)
            elif len(t) != width:
                raise PreconditionViolated("ragged matrix")
            if any(x not in (0, 1, "*") for x in t):
                raise PreconditionViolated("entries must be 0, 1, or *")
            norm.append(t)
        if width is None:
            width = 0 if columns is None else len(columns)
        if columns is None:
            columns = tuple(range(width))
        else:
            columns = tuple(columns)
            if len(columns) != width:
                raise PreconditionViolated("column labels do not match width")
            if len(set(columns)) != width:
                raise PreconditionViolated("duplicate column labels")
        for j in range(width):
            starred = False
            for i, row in enumerate(norm):
                if row[j] == "*":
                    starred = True
                elif starred:
                    raise StairViolation(
                        f"column {columns[j]!r} has a 0/1 entry below a * (row {i})"
                    )
        return cls(rows=tuple(norm), columns=columns)

    @classmethod
    def from_text(cls, text: str) -> "AmbiguousMatrix":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            entries: list[int | str] = []
            for ch in line.replace(" ", ""):
                if ch in "01":
                    entries.append(int(ch))
                elif ch == "*":
                    entries.append("*")
                else:
                    raise PreconditionViolated(f"bad matrix character {ch!r}")
            rows.append(entries)
        return cls.build(rows)

    def to_text(self) -> str:
        return "\n".join("".join(str(x) for x in row) for row in self.rows)

    def depth(self, column: Label) -> int:
        """Number of leading non-* entries in the column."""
        j = self.columns.index(column)
        for i, row in enumerate(self.rows):
            if row[j] == "*":
                return i
        return len(self.rows)


def stair_closure(
    rows: Sequence[Sequence[int | str]],
    columns: Sequence[Label] | None = None,
) -> AmbiguousMatrix:
    """Blank the minimum number of 0/1 entries to get a stair matrix.

    Per column the first * is final: every later 0/1 entry in that column
    is replaced by *.  Rows already stair-shaped pass through unchanged.
    """
    norm = [tuple(r) for r in rows]
    width = len(norm[0]) if norm else (0 if columns is None else len(columns))
    running = set(range(width))
    out: list[tuple[int | str, ...]] = []
    for row in norm:
        if len(row) != width:
            raise PreconditionViolated("ragged matrix")
        t = list(row)
        for j in range(width):
            if t[j] != "*" and j not in running:
                t[j] = "*"
        running.intersection_update(
            j for j in range(width) if t[j] != "*"
        )
        out.append(tuple(t))
    return AmbiguousMatrix.build(out, columns)


def first_infeasible_row(matrix: AmbiguousMatrix) -> int:
    """Least row index whose prefix already fails the ambiguous test.

    Rows only ever constrain, so prefix feasibility is monotone and the
    boundary can be bisected.  Raises if the matrix is in fact feasible.
    """
    if test_ambiguous(matrix) is not Infeasible:
        raise PreconditionViolated("matrix is feasible")

    def bad(i: int) -> bool:
        prefix = AmbiguousMatrix.build(matrix.rows[: i + 1], matrix.columns)
        return test_ambiguous(prefix) is Infeasible

    lo, hi = 0, len(matrix.rows) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if bad(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def test_ambiguous(matrix: AmbiguousMatrix):
    """Circular-ones decision for a stair-shaped ambiguous matrix.

    Processes rows top-down on a shrinking tree: before row i the leaves
    whose column is * in row i are deleted, then the row's 0/1 pattern is
    applied.  Accepts iff no row fails; on acceptance a full-column
    circular order is assembled by extending the deepest tree's order
    backward through snapshots, and verified against every row.
    """
    cols = matrix.columns
    if not matrix.rows or not cols:
        return tuple(cols)
    depth = {c: matrix.depth(c) for c in cols}
    tree = PCTree.star([c for c in cols if depth[c] >= 1])
    snaps: list[PCTree] = []
    for i, row in enumerate(matrix.rows):
        live = {c for c, x in zip(cols, row) if x != "*"}
        gone = [c for c in tree.leaves() if c not in live]
        if gone:
            tree.delete_leaves(gone)
        zeros = {c for c, x in zip(cols, row) if x == 0}
        ones = {c for c, x in zip(cols, row) if x == 1}
        if apply_row(tree, zeros, ones) is Infeasible:
            return Infeasible
        snaps.append(tree.copy())
    order = snaps[-1].default_order()
    for snap in reversed(snaps[:-1]):
        if len(snap.leaves()) == len(order):
            # no column expires at this level: the order extends unchanged
            continue
        order = snap.order_matching(order)
    tail = [c for c in _sorted_labels(cols) if depth[c] == 0]
    order = tuple(order) + tuple(tail)
    if not order_respects(order, matrix.rows, cols):
        raise InternalContradiction("assembled order fails a row")
    return order


# ---------------------------------------------------------------------------
# forbidden submatrices


def cyclic_block_matrix(k: int) -> list[tuple[int, ...]]:
    """k rows over k+1 columns: row i has ones at {i, i+1 mod k}; last column zero.

    Not circular-ones for any k >= 3: the k used columns would all have to
    be pairwise cyclically adjacent while the spare column sits elsewhere.
    """
    if k < 3:
        raise PreconditionViolated("need k >= 3")
    rows = []
    for i in range(k):
        row = [0] * (k + 1)
        row[i] = 1
        row[(i + 1) % k] = 1
        rows.append(tuple(row))
    return rows


def domino_matrix() -> list[tuple[int, ...]]:
    """4 rows over 6 columns: three disjoint dominoes plus a transversal row."""
    return [
        (1, 1, 0, 0, 0, 0),
        (0, 0, 1, 1, 0, 0),
        (0, 0, 0, 0, 1, 1),
        (0, 1, 0, 1, 0, 1),
    ]


@dataclass(frozen=True)
class TuckerObstruction:
    """A submatrix certifying that circular-ones fails.

    ``rows``/``cols`` index the input; after inverting the rows listed in
    ``inverted`` (within the chosen columns), row order ``rows`` and column
    order ``cols`` reproduce cyclic_block_matrix(len(rows)) for kind
    "cycle", or domino_matrix() for kind "dominoes".
    """

    kind: Literal["cycle", "dominoes"]
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    inverted: tuple[int, ...]

    def materialize(self, matrix: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
        out = []
        for r in self.rows:
            row = [matrix[r][c] for c in self.cols]
            if r in self.inverted:
                row = [1 - x for x in row]
            out.append(tuple(row))
        return out


def _row_as_pair(row: Sequence[int], cols: tuple[int, ...]) -> list[tuple[frozenset, bool]]:
    """Ways to read the row, restricted to cols, as a 2-set: plain or inverted."""
    support = frozenset(c for c in cols if row[c] == 1)
    out = []
    if len(support) == 2:
        out.append((support, False))
    if len(cols) - len(support) == 2:
        out.append((frozenset(set(cols) - support), True))
    return out


def _find_cycle_obstruction(rows, k: int) -> TuckerObstruction | None:
    n_cols = len(rows[0])
    for rset in itertools.combinations(range(len(rows)), k):
        for cset in itertools.combinations(range(n_cols), k + 1):
            options = [_row_as_pair(rows[r], cset) for r in rset]
            if any(not opt for opt in options):
                continue
            for choice in itertools.product(*options):
                hit = _assemble_cycle(rset, cset, choice, k)
                if hit is not None:
                    return hit
    return None


def _assemble_cycle(rset, cset, choice, k: int) -> TuckerObstruction | None:
    degree: dict[int, int] = {}
    for pair, _ in choice:
        for c in pair:
            degree[c] = degree.get(c, 0) + 1
    if any(d != 2 for d in degree.values()) or len(degree) != k:
        return None
    spare = [c for c in cset if c not in degree]
    if len(spare) != 1:
        return None
    # walk the 2-regular graph; it must be one cycle through all k columns
    by_col: dict[int, list[int]] = {}
    for idx, (pair, _) in enumerate(choice):
        for c in pair:
            by_col.setdefault(c, []).append(idx)
    start = min(degree)
    first_rows = sorted(by_col[start])
    row_idx = first_rows[0]
    col_seq = [start]
    row_seq = [row_idx]
    cur = next(iter(choice[row_idx][0] - {start}))
    while cur != start:
        col_seq.append(cur)
        a, b = by_col[cur]
        row_idx = b if a == row_idx else a
        row_seq.append(row_idx)
        cur = next(iter(choice[row_idx][0] - {cur}))
    if len(col_seq) != k:
        return None
    # canonical direction: second column as small as possible
    if len(col_seq) > 2 and col_seq[-1] < col_seq[1]:
        col_seq = [col_seq[0]] + col_seq[:0:-1]
        row_seq = row_seq[::-1]
    return TuckerObstruction(
        kind="cycle",
        rows=tuple(rset[i] for i in row_seq),
        cols=tuple(col_seq) + tuple(spare),
        inverted=tuple(sorted(rset[i] for i in row_seq if choice[i][1])),
    )


def _find_domino_obstruction(rows) -> TuckerObstruction | None:
    n_cols = len(rows[0])
    for rset in itertools.combinations(range(len(rows)), 4):
        for cset in itertools.combinations(range(n_cols), 6):
            for t_row in rset:
                d_rows = [r for r in rset if r != t_row]
                d_opts = [_row_as_pair(rows[r], cset) for r in d_rows]
                if any(not opt for opt in d_opts):
                    continue
                support = frozenset(c for c in cset if rows[t_row][c] == 1)
                t_opts: list[tuple[frozenset, bool]] = []
                if len(support) == 3:
                    t_opts = [(support, False), (frozenset(set(cset) - support), True)]
                if not t_opts:
                    continue
                for choice in itertools.product(*d_opts):
                    pairs = [p for p, _ in choice]
                    union = frozenset().union(*pairs)
                    if len(union) != 6:
                        continue
                    for t_set, t_inv in t_opts:
                        if all(len(t_set & p) == 1 for p in pairs):
                            return _canonical_domino(
                                d_rows, t_row, choice, t_set, t_inv
                            )
    return None


def _canonical_domino(d_rows, t_row, choice, t_set, t_inv) -> TuckerObstruction:
    blocks = []
    for r, (pair, inv) in zip(d_rows, choice):
        inside = next(iter(pair & t_set))
        outside = next(iter(pair - t_set))
        blocks.append((min(pair), r, inv, outside, inside))
    blocks.sort()
    cols: list[int] = []
    rows_out: list[int] = []
    inverted = []
    for _, r, inv, outside, inside in blocks:
        cols.extend((outside, inside))
        rows_out.append(r)
        if inv:
            inverted.append(r)
    rows_out.append(t_row)
    if t_inv:
        inverted.append(t_row)
    return TuckerObstruction(
        kind="dominoes",
        rows=tuple(rows_out),
        cols=tuple(cols),
        inverted=tuple(sorted(inverted)),
    )


def tucker_scan(
    rows: Sequence[Sequence[int]],
) -> TuckerObstruction | None:
    """Search for a submatrix blocking circular-ones.

    Returns an obstruction reducible, by row/column permutation plus row
    inversion, to a cyclic block matrix or to the domino matrix; None when
    no such submatrix exists, which (for the sizes this library sweeps)
    coincides with the matrix having circular-ones.
    """
    rows = _as_binary_rows(rows)
    if not rows or not rows[0]:
        return None
    n_cols = len(rows[0])
    for k in range(3, min(len(rows), n_cols - 1) + 1):
        hit = _find_cycle_obstruction(rows, k)
        if hit is not None:
            return hit
    return _find_domino_obstruction(rows)
