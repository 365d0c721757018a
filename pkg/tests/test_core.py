import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import u, v
from esc_search import (
    BipartiteGraph,
    DegreeConstraint,
    ThresholdBox,
    WorkingGraph,
    cascade_delete,
    filtered_view,
    lemma3_check,
    lemma4_check,
    materialize_community,
    maximal_core,
    maximal_core_containing,
)
from esc_search.core import component, peel_max_threshold, threshold_in_box
from strategies import instances


def whole(G):
    return filtered_view(G)


def k22():
    return BipartiteGraph(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)], [[1.0]] * 4)


def test_degree_constraint_validation():
    for a, b in [(0, 1), (1, 0), (-2, 2)]:
        with pytest.raises(ValueError):
            DegreeConstraint(a, b)


# ---------------------------------------------------------------- cores

def test_maximal_core_examples(T1, T2, c22):
    assert len(maximal_core(whole(T1), c22)) == 4
    W = whole(T1)
    W.remove_edge(3)
    assert len(maximal_core(W, c22)) == 0
    assert len(maximal_core(whole(T2), c22)) == 10


def test_maximal_core_leaves_input_alone(T1, c22):
    W = whole(T1)
    W.remove_edge(3)
    maximal_core(W, c22)
    assert len(W) == 3


def test_core_containing_examples(T2, c22):
    H = maximal_core_containing(whole(T2), c22, u(0))
    assert len(H) == 10 and H.significance == (1, 5)
    outer = filtered_view(T2, ThresholdBox.at_least((0, 9)))
    H = maximal_core_containing(outer, c22, u(0))
    assert H.edge_ids == frozenset(range(4, 10)) and H.significance == (1, 9)
    assert H.upper_vertices == {0, 1, 2} and H.lower_vertices == {2, 3}
    assert maximal_core_containing(outer, c22, v(0)) is None


def test_core_containing_isolated_query():
    G = BipartiteGraph(3, 2, [(0, 0), (0, 1), (1, 0), (1, 1)], [[1.0]] * 4)
    assert maximal_core_containing(whole(G), DegreeConstraint(1, 1), u(2)) is None


def test_core_containing_picks_the_query_component():
    pairs = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)]
    G = BipartiteGraph(4, 4, pairs, [[1.0]] * 4 + [[2.0]] * 4)
    H = maximal_core_containing(whole(G), DegreeConstraint(2, 2), u(3))
    assert H.edge_ids == {4, 5, 6, 7} and H.significance == (2,)


def is_connected_core(W, c):
    G = W.graph
    live = [x for x in range(G.n) if W.deg[x]]
    if not live:
        return False
    if any(W.deg[x] < c.bound_of(G, x) for x in live):
        return False
    verts, _ = component(W, live[0])
    return len(verts) == len(live)


@settings(max_examples=60, deadline=None)
@given(instances(dims=st.just(1), max_side=5, max_edges=14))
def test_core_idempotent_and_monotone(inst):
    G, c, _ = inst
    core = maximal_core(whole(G), c)
    assert maximal_core(core, c).edge_ids() == core.edge_ids()
    for x in range(G.n):
        assert core.deg[x] == 0 or core.deg[x] >= c.bound_of(G, x)
    sub = whole(G)
    for e in range(0, G.m, 2):
        sub.remove_edge(e)
    assert set(maximal_core(sub, c).edge_ids()) <= set(core.edge_ids())


# ---------------------------------------------------------------- cascades

def test_cascade_abort_restores(T1, c22):
    W = whole(T1)
    before = (bytes(W.alive), list(W.deg), len(W))
    e = next(e for e in range(T1.m) if T1.eu[e] == 0 and T1.ev[e] == T1.upper_count)
    W.remove_edge(e)
    rollback = [e]
    assert not cascade_delete(W, u(0), u(0), c22, rollback)
    assert (bytes(W.alive), list(W.deg), len(W)) == before


def test_cascade_ok_keeps_query_core(T2, c22):
    W = whole(T2)
    W.remove_edge(0)
    rollback = [0]
    assert cascade_delete(W, u(0), u(0), c22, rollback)
    H = maximal_core_containing(W, c22, u(0))
    assert H is not None and {4, 5, 6, 7, 8, 9} <= H.edge_ids


def test_cascade_no_violation(T2, c22):
    rollback = []
    W = whole(T2)
    assert cascade_delete(W, u(0), u(0), c22, rollback)
    assert rollback == [] and len(W) == 10


def test_cascade_refuses_fixed_edge(T2, c22):
    # dropping an inner edge of u1 cascades into the other inner edges
    W = whole(T2)
    W.remove_edge(2)
    rollback = [2]
    ok = cascade_delete(W, v(0), u(2), c22, rollback, fixed={0})
    assert not ok and len(W) == 10


@settings(max_examples=80, deadline=None)
@given(instances(dims=st.just(1), max_side=5, max_edges=14), st.data())
def test_cascade_abort_is_exact(inst, data):
    G, c, q = inst
    W = whole(G)
    e = data.draw(st.integers(0, G.m - 1))
    fixed = set(data.draw(st.lists(st.integers(0, G.m - 1), max_size=3))) - {e}
    before = (bytes(W.alive), list(W.deg), len(W))
    W.remove_edge(e)
    rollback = [e]
    start = G.ref(G.eu[e])
    if cascade_delete(W, start, q, c, rollback, fixed):
        assert all(W.alive[f] for f in fixed)
        assert all(not W.alive[f] for f in rollback)
    else:
        assert (bytes(W.alive), list(W.deg), len(W)) == before


# ---------------------------------------------------------------- pruning checks

def test_pruning_check_examples(T2, c22):
    assert lemma3_check(whole(k22()), c22) and lemma4_check(whole(k22()), c22)
    path = BipartiteGraph(2, 1, [(0, 0), (1, 0)], [[1.0]] * 2)
    assert not lemma3_check(whole(path), c22)
    star = BipartiteGraph(1, 3, [(0, 0), (0, 1), (0, 2)], [[1.0]] * 3)
    assert not lemma4_check(whole(star), c22)
    assert lemma3_check(whole(T2), c22) and lemma4_check(whole(T2), c22)


def test_degree_count_check_reads_at_least():
    K33 = BipartiteGraph(3, 3, list(itertools.product(range(3), repeat=2)), [[1.0]] * 9)
    assert lemma4_check(whole(K33), DegreeConstraint(2, 2))


@settings(max_examples=40, deadline=None)
@given(instances(dims=st.just(1), max_side=4, max_edges=10))
def test_pruning_checks_never_reject_a_real_core(inst):
    G, c, _ = inst
    full = whole(G)
    for r in range(1, G.m + 1):
        for sub in itertools.combinations(range(G.m), r):
            W = WorkingGraph.from_edges(G, sub)
            if not is_connected_core(W, c):
                continue
            assert lemma3_check(W, c) and lemma4_check(W, c)
            # and the component of the whole graph around it
            start = G.eu[sub[0]]
            _, edges = component(full, start)
            C = WorkingGraph.from_edges(G, edges)
            assert lemma3_check(C, c) and lemma4_check(C, c)


# ---------------------------------------------------------------- materialization

def test_materialize_examples(T2, c22):
    H = materialize_community(T2, c22, u(0), (8, 5))
    assert H.edge_ids == {0, 1, 2, 3} and H.significance == (8, 5)
    H = materialize_community(T2, c22, u(0), (1, 9))
    assert H.edge_ids == set(range(4, 10)) and H.significance == (1, 9)
    assert materialize_community(T2, c22, u(0), (9, 9)) is None
    with pytest.raises(ValueError):
        materialize_community(T2, c22, u(0), (1,))


@settings(max_examples=80, deadline=None)
@given(instances(), st.data())
def test_materialized_community_invariants(inst, data):
    G, c, q = inst
    t = data.draw(st.lists(st.integers(0, 5), min_size=G.dims, max_size=G.dims))
    H = materialize_community(G, c, q, t)
    if H is None:
        return
    W = WorkingGraph.from_edges(G, H.edge_ids)
    assert is_connected_core(W, c)
    assert H.contains(q)
    assert H.significance == tuple(G.attrs[sorted(H.edge_ids)].min(axis=0))
    assert all(s >= x for s, x in zip(H.significance, t))


# ---------------------------------------------------------------- peel primitive

@settings(max_examples=150, deadline=None)
@given(instances(), st.data())
def test_compiled_peel_matches_reference(inst, data):
    G, c, q = inst
    dim = data.draw(st.integers(0, G.dims - 1))
    lo = data.draw(st.lists(st.integers(0, 4), min_size=G.dims, max_size=G.dims))
    strict = data.draw(st.lists(st.booleans(), min_size=G.dims, max_size=G.dims))
    I = ThresholdBox(tuple(map(float, lo)), tuple(strict))
    ref = peel_max_threshold(filtered_view(G, I), c, G.vid(q), dim)
    assert threshold_in_box(G, c, G.vid(q), I, dim) == ref
    if ref is None:
        assert maximal_core_containing(filtered_view(G, I), c, q) is None
    else:
        box = I.tighten(dim, ref)
        H = maximal_core_containing(filtered_view(G, box), c, q)
        assert H is not None and H.significance[dim] == ref
        above = I.tighten(dim, ref, strict=True)
        assert maximal_core_containing(filtered_view(G, above), c, q) is None
