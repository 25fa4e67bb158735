"""Linear-time translations between strip instances and 3-cluster flat ones.

Forward: folding the strip labels modulo 3 turns a strip instance into a
flat clustered instance with clusters {0, 1, 2} of equal decision value (a
strip drawing wraps into a spiral through the three wedges, and a flat
drawing unrolls).  Backward, for trees only: the strip labels can be
regenerated from the residues by a breadth-first sweep, since consecutive
residues determine the label step and a tree has no cycle to contradict
the propagation.
"""

from __future__ import annotations

from collections import deque

from .errors import BadClusterRange, NotATree
from .graph import ClusteredGraph, build_clustered_graph

RESIDUES = (0, 1, 2)


def strip_to_three_clusters(G: ClusteredGraph) -> ClusteredGraph:
    """Replace every strip label by its residue modulo 3."""
    gamma = {v: lv % 3 for v, lv in G.gamma.items()}
    edges = [G.edges[e] for e in sorted(G.edges)]
    return build_clustered_graph(gamma, edges, compact=False, strip=False)


def three_cluster_tree_to_strip(G: ClusteredGraph) -> ClusteredGraph:
    """Lift residues {0,1,2} on a tree (forest) back to strip labels.

    Each component is seeded at its lexicographically least vertex, whose
    strip label is its own residue; a neighbor's label is then the unique
    value within one step whose residue matches.  Labels are compacted so
    the least used strip is 1.
    """
    if not all(lv in RESIDUES for lv in G.gamma.values()):
        raise BadClusterRange(sorted(set(G.gamma.values()) - set(RESIDUES)))
    if not G.is_forest:
        raise NotATree()
    label: dict[str, int] = {}
    for comp in G.components:
        seed = min(comp)
        label[seed] = G.gamma[seed]
        queue = deque([seed])
        while queue:
            u = queue.popleft()
            for w in G.neighbors(u):
                if w in label:
                    continue
                step = (G.gamma[w] - G.gamma[u]) % 3
                # residue step 0 / 1 / 2 means same / next / previous strip
                label[w] = label[u] + (step if step < 2 else -1)
                queue.append(w)
    edges = [G.edges[e] for e in sorted(G.edges)]
    return build_clustered_graph(label, edges, compact=True)
