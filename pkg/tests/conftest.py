"""Shared instance builders for the test suite."""

from stripcp.graph import ClusteredGraph, build_clustered_graph


def ramp(start: int, *targets: int) -> list[int]:
    """Unit-step level profile visiting the targets in turn; start excluded."""
    prof: list[int] = []
    cur = start
    for t in targets:
        step = 1 if t >= cur else -1
        prof.extend(range(cur + step, t + step, step))
        cur = t
    return prof


def star_of_legs(center_level: int, legs: list[list[int]]) -> ClusteredGraph:
    """Star with center ``v``; leg j enters through edge id j.

    Each leg is a level profile of the vertices beyond the center.  The
    spoke edges are listed first so that the edge incident to the center
    on leg j receives id j, which keeps matrix columns readable.
    """
    verts = [("v", center_level)]
    spokes = []
    chains = []
    for i, prof in enumerate(legs):
        prev = "v"
        for j, lvl in enumerate(prof):
            name = f"l{i}.{j}"
            verts.append((name, lvl))
            (spokes if j == 0 else chains).append((prev, name))
            prev = name
    return build_clustered_graph(verts, spokes + chains, compact=False)


def figure_star() -> ClusteredGraph:
    """Seven-leg star over levels 2..7 with center at level 5.

    Four legs descend to level 2 without climbing, one climbs to 6, two
    climb to 7; the witnessed level pairs are exactly {2,3,4} x {6,7}.
    """
    return star_of_legs(
        5,
        [
            ramp(5, 2),  # e0
            ramp(5, 6),  # e1
            ramp(5, 2),  # e2
            ramp(5, 7),  # e3
            ramp(5, 7),  # e4
            ramp(5, 2),  # e5
            ramp(5, 2),  # e6
        ],
    )


def cycle_pattern_star() -> ClusteredGraph:
    """Five-leg star whose veto rows contain a cyclic obstruction."""
    return star_of_legs(
        5,
        [
            ramp(5, 6, 2, 9),
            ramp(5, 7, 1),
            ramp(5, 4, 8, 1),
            ramp(5, 3, 9),
            ramp(5, 1),
        ],
    )


def domino_pattern_star() -> ClusteredGraph:
    """Six-leg star whose key veto rows form the three-dominoes matrix.

    Legs come in pairs around level windows (4,6), (3,7), (2,8): one leg
    of each pair additionally climbs to 9, producing the transversal row
    at window (1,9).
    """
    return star_of_legs(
        5,
        [
            ramp(5, 6, 1),
            ramp(5, 6, 2, 9),
            ramp(5, 4, 7, 1),
            ramp(5, 4, 7, 2, 9),
            ramp(5, 3, 8, 1),
            ramp(5, 3, 9),
        ],
    )
