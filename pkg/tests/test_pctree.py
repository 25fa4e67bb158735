"""PC-tree circular-ones engine, cross-validated against brute force."""

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from stripcp.errors import (
    PreconditionViolated,
    StairViolation,
    TooManyLeaves,
)
from stripcp.pctree import (
    AmbiguousMatrix,
    Constraint,
    Infeasible,
    PCTree,
    apply_row,
    cyclic_block_matrix,
    domino_matrix,
    extract_constraints,
    order_respects,
    tucker_scan,
)
from stripcp.pctree import test_ambiguous as decide_ambiguous
from stripcp.pctree import test_circular_ones as decide_circular


# -- brute-force reference --------------------------------------------------


def all_circular_orders(labels):
    labels = sorted(labels)
    if len(labels) <= 2:
        return [tuple(labels)]
    return [(labels[0],) + p for p in itertools.permutations(labels[1:])]


def canon(order):
    lo = min(order)
    i = order.index(lo)
    rot = order[i:] + order[:i]
    rev = (rot[0],) + tuple(reversed(rot[1:]))
    return min(rot, rev)


def is_arc(order, members):
    pos = [i for i, x in enumerate(order) if x in members]
    n = len(order)
    if len(pos) <= 1 or len(pos) >= n:
        return True
    breaks = sum(
        1 for i, p in enumerate(pos) if (pos[(i + 1) % len(pos)] - p) % n != 1
    )
    return breaks <= 1


def brute_circular_ones(rows, ncols):
    if ncols <= 2 or not rows:
        return True
    return any(
        all(is_arc(o, {c for c in range(ncols) if r[c] == 1}) for r in rows)
        for o in all_circular_orders(range(ncols))
    )


# -- row application --------------------------------------------------------


def test_star_row_restricts_to_adjacent_pairs():
    tree = PCTree.star(["a", "b", "c", "d"])
    out = apply_row(tree, {"a", "b"}, {"c", "d"})
    assert out is tree
    got = set(tree.allowed_orders())
    assert got == {("a", "b", "c", "d"), ("a", "b", "d", "c")}
    for order in all_circular_orders("abcd"):
        assert tree.captures(order) == (canon(order) in got)


def test_all_zeros_row_is_vacuous():
    tree = PCTree.star(["a", "b", "c", "d"])
    before = set(tree.allowed_orders())
    assert apply_row(tree, {"a", "b", "c", "d"}, set()) is tree
    assert set(tree.allowed_orders()) == before


def test_apply_row_rejects_overlap():
    tree = PCTree.star(["a", "b", "c"])
    with pytest.raises(PreconditionViolated):
        apply_row(tree, {"a"}, {"a", "b"})
    with pytest.raises(PreconditionViolated):
        tree.make_consecutive({"z"})


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_rows_filter_captured_orders_exactly(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 6)
    labels = list(range(n))
    tree = PCTree.star(labels)
    feasible = {canon(o) for o in all_circular_orders(labels)}
    for _ in range(rng.randint(1, 5)):
        ones = {x for x in labels if rng.random() < 0.5}
        zeros = set(labels) - ones
        want = {o for o in feasible if is_arc(o, ones)}
        out = apply_row(tree, zeros, ones)
        if out is Infeasible:
            assert not want
            return
        got = set(tree.allowed_orders())
        assert got == want
        feasible = want


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_leaf_deletion_restricts_orders(seed):
    rng = random.Random(seed)
    n = rng.randint(5, 7)
    labels = list(range(n))
    tree = PCTree.star(labels)
    for _ in range(rng.randint(1, 4)):
        ones = {x for x in labels if rng.random() < 0.5}
        if apply_row(tree, set(labels) - ones, ones) is Infeasible:
            return
    before = set(tree.allowed_orders())
    drop = set(rng.sample(labels, rng.randint(1, n - 2)))
    tree.delete_leaves(drop)
    want = {canon(tuple(x for x in o if x not in drop)) for o in before}
    assert set(tree.allowed_orders()) == want


# -- plain circular-ones ----------------------------------------------------


def test_identity_matrix_accepts():
    order = decide_circular([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert order is not Infeasible
    assert order_respects(order, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


@pytest.mark.parametrize("k", [3, 4, 5, 6, 7])
def test_cyclic_block_family_rejected(k):
    matrix = cyclic_block_matrix(k)
    assert decide_circular(matrix) is Infeasible
    for i in range(k):
        sub = matrix[:i] + matrix[i + 1 :]
        order = decide_circular(sub)
        assert order is not Infeasible
        assert order_respects(order, sub)


def test_domino_family_rejected_at_last_row():
    matrix = domino_matrix()
    cols = tuple(range(6))
    tree = PCTree.star(cols)
    for row in matrix[:3]:
        ones = {c for c, x in zip(cols, row) if x == 1}
        assert apply_row(tree, set(cols) - ones, ones) is tree
    last_ones = {c for c, x in zip(cols, matrix[3]) if x == 1}
    assert apply_row(tree, set(cols) - last_ones, last_ones) is Infeasible
    assert decide_circular(matrix) is Infeasible
    for i in range(4):
        sub = matrix[:i] + matrix[i + 1 :]
        order = decide_circular(sub)
        assert order is not Infeasible
        assert order_respects(order, sub)


def test_decision_matches_brute_force_sweep():
    rng = random.Random(91)
    for _ in range(500):
        ncols = rng.randint(3, 6)
        nrows = rng.randint(1, 6)
        rows = [
            tuple(rng.randint(0, 1) for _ in range(ncols)) for _ in range(nrows)
        ]
        want = brute_circular_ones(rows, ncols)
        got = decide_circular(rows)
        assert (got is not Infeasible) == want, rows
        if got is not Infeasible:
            assert order_respects(got, rows)
        assert (tucker_scan(rows) is None) == want, rows


def test_anchor_normalization_matches_consecutive_ones():
    # inverting every row with a one in the anchor column, then dropping the
    # column, turns the circular question into a consecutive one
    def brute_consecutive(rows, ncols):
        if ncols <= 1 or not rows:
            return True
        for perm in itertools.permutations(range(ncols)):
            pos = {c: i for i, c in enumerate(perm)}
            ok = True
            for r in rows:
                ones = sorted(pos[c] for c in range(ncols) if r[c] == 1)
                if ones and ones[-1] - ones[0] != len(ones) - 1:
                    ok = False
                    break
            if ok:
                return True
        return False

    rng = random.Random(17)
    for _ in range(120):
        ncols = rng.randint(3, 6)
        nrows = rng.randint(1, 5)
        rows = [
            tuple(rng.randint(0, 1) for _ in range(ncols)) for _ in range(nrows)
        ]
        normalized = [
            tuple(1 - x for x in r[1:]) if r[0] == 1 else r[1:] for r in rows
        ]
        lhs = decide_circular(rows) is not Infeasible
        assert lhs == brute_consecutive(normalized, ncols - 1), rows


# -- ambiguous matrices -----------------------------------------------------


def test_stair_violation_raises():
    with pytest.raises(StairViolation):
        AmbiguousMatrix.build([(1, "*"), (0, 0)])


def test_all_ambiguous_matrix_accepts():
    m = AmbiguousMatrix.build([("*", "*", "*"), ("*", "*", "*")])
    assert decide_ambiguous(m) == (0, 1, 2)


def test_ambiguous_padding_keeps_domino_rejection():
    rows = [tuple(r) for r in domino_matrix()] + [("*",) * 6, ("*",) * 6]
    assert decide_ambiguous(AmbiguousMatrix.build(rows)) is Infeasible


def test_ambiguous_order_covers_expired_columns():
    # column 2 dies after the first row but must still appear in the order
    rows = [(1, 1, 0, 0), (1, 1, "*", 0), (0, 1, "*", 1)]
    m = AmbiguousMatrix.build(rows)
    order = decide_ambiguous(m)
    assert order is not Infeasible
    assert sorted(order) == [0, 1, 2, 3]
    assert order_respects(order, rows, m.columns)


def test_ambiguous_matches_brute_force_sweep():
    rng = random.Random(44)
    for _ in range(250):
        ncols = rng.randint(3, 6)
        nrows = rng.randint(1, 5)
        depths = [rng.randint(0, nrows) for _ in range(ncols)]
        rows = [
            tuple(
                rng.randint(0, 1) if i < depths[j] else "*"
                for j in range(ncols)
            )
            for i in range(nrows)
        ]
        m = AmbiguousMatrix.build(rows)
        got = decide_ambiguous(m)
        want = any(
            order_respects(o, rows, m.columns)
            for o in all_circular_orders(range(ncols))
        )
        assert (got is not Infeasible) == want, rows
        if got is not Infeasible:
            assert order_respects(got, rows, m.columns)


def test_matrix_text_round_trip():
    text = "110*\n0110\n# comment\n*001\n"
    with pytest.raises(StairViolation):
        AmbiguousMatrix.from_text(text)
    good = AmbiguousMatrix.from_text("1100\n011*\n0*1*")
    assert good.rows[1] == (0, 1, 1, "*")
    assert good.to_text() == "1100\n011*\n0*1*"
    assert good.depth(1) == 2


# -- order reconstruction ---------------------------------------------------


def test_order_matching_places_dead_leaves():
    tree = PCTree.star(["a", "b", "c", "d", "x"])
    assert apply_row(tree, {"a", "x"}, {"b", "c", "d"}) is tree
    order = tree.order_matching(("a", "b", "c", "d"))
    kept = tuple(v for v in order if v != "x")
    assert canon(kept) == canon(("a", "b", "c", "d"))
    assert tree.captures(order)


# -- constraints and enumeration --------------------------------------------


def test_star_has_no_nontrivial_constraints():
    assert extract_constraints(PCTree.star(list("abcde"))) == []


def test_two_hub_split_yields_one_edge_constraint():
    tree = PCTree.from_structure(
        {"x": ["a", "b", "c", "y"], "y": ["d", "e", "f", "x"]},
        {"x": "P", "y": "P"},
    )
    got = {c.leaves for c in extract_constraints(tree)}
    assert got == {frozenset("abc"), frozenset("def")}


@pytest.mark.parametrize("k", [4, 5])
def test_constraints_match_always_consecutive_sets(k):
    matrix = cyclic_block_matrix(k)
    cols = tuple(range(k + 1))
    tree = PCTree.star(cols)
    for row in matrix[: k - 1]:
        ones = {c for c, x in zip(cols, row) if x == 1}
        assert apply_row(tree, set(cols) - ones, ones) is tree
    allowed = list(tree.allowed_orders())
    want = {
        frozenset(s)
        for r in range(2, len(cols) - 1)
        for s in itertools.combinations(cols, r)
        if all(is_arc(o, set(s)) for o in allowed)
    }
    assert {c.leaves for c in extract_constraints(tree)} == want


def test_allowed_order_counts():
    assert len(list(PCTree.star("abcd").allowed_orders())) == 3
    assert len(list(PCTree.star("abcde").allowed_orders())) == 12
    ring = PCTree.from_structure({"c": ["a", "b", "d", "e"]}, {"c": "C"})
    assert list(ring.allowed_orders()) == [("a", "b", "d", "e")]
    with pytest.raises(TooManyLeaves):
        next(PCTree.star(list(range(13))).allowed_orders())


# -- obstruction scan -------------------------------------------------------


def test_scan_reduces_chain_input_to_dominoes():
    chain = [
        (1, 1, 0, 0, 0, 0),
        (1, 1, 1, 1, 0, 0),
        (0, 0, 1, 1, 0, 0),
        (1, 0, 0, 1, 1, 0),
    ]
    obs = tucker_scan(chain)
    assert obs is not None and obs.kind == "dominoes"
    assert obs.inverted == (1,)
    assert obs.materialize(chain) == [tuple(r) for r in domino_matrix()]


@pytest.mark.parametrize("k", [3, 5, 7])
def test_scan_recovers_cyclic_blocks(k):
    matrix = cyclic_block_matrix(k)
    obs = tucker_scan(matrix)
    assert obs is not None and obs.kind == "cycle"
    assert len(obs.rows) == k
    assert obs.materialize(matrix) == [tuple(r) for r in matrix]


def test_scan_finds_nothing_in_feasible_matrix():
    assert tucker_scan([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) is None
    assert tucker_scan([]) is None


# -- structure validation ---------------------------------------------------


def test_from_structure_rejects_non_trees():
    with pytest.raises(PreconditionViolated):
        PCTree.from_structure(
            {"x": ["a", "b", "y"], "y": ["a", "x"]}, {"x": "P", "y": "P"}
        )


def test_copies_are_independent():
    tree = PCTree.star(["a", "b", "c", "d"])
    twin = tree.copy()
    assert apply_row(twin, {"a", "b"}, {"c", "d"}) is twin
    assert len(list(tree.allowed_orders())) == 3
    assert len(list(twin.allowed_orders())) == 2
