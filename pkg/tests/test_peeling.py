import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import u, v, with_columns
from esc_search import (
    SkylineSet,
    Stats,
    ThresholdBox,
    check_lemma1_order,
    get_cand_vals,
    materialize_community,
    oracle_skyline,
    peel_dim1,
    peel_dim2,
    peel_dim3,
    peel_dimN,
    peel_search,
)
from esc_search.oracle import oracle_community
from strategies import instances, random_instance


def fixed_skyline(G, c, q, F):
    """Skyline over the grid, keeping only communities that hold every edge of F."""
    values = [sorted(set(G.attrs[:, i])) for i in range(G.dims)]
    out = SkylineSet()
    for t in itertools.product(*values):
        comp = oracle_community(G, c, q, t)
        if comp is not None and F <= comp:
            out.add(tuple(G.attrs[sorted(comp)].min(axis=0)))
    return out


def test_peel_dim1_examples(T1, T2, c22):
    assert peel_dim1(T1, c22, u(0)) == 2
    assert peel_dim1(T2, c22, u(0), dim=1) == 9
    assert peel_dim1(T2, c22, u(0), ThresholdBox.at_least((0, 9)), dim=0) == 1
    assert peel_dim1(T2, c22, v(0), ThresholdBox.at_least((0, 9)), dim=0) is None


def test_peel_dim1_rejects_bad_dim(T1, c22):
    with pytest.raises(ValueError):
        peel_dim1(T1, c22, u(0), dim=1)


def test_peel_dim2_examples(T1, T2, c22):
    assert peel_dim2(T2, c22, u(0)) == {(1, 9), (8, 5)}
    assert peel_dim2(with_columns(T1, T1.attrs[:, 0]), c22, u(0)) == {(2, 2)}
    assert peel_dim2(T2, c22, v(0), ThresholdBox.at_least((0, 9))) == set()


def test_peel_dim2_swapped_roles(T2, c22):
    assert peel_dim2(T2, c22, u(0), dims=(1, 0)) == {(9, 1), (5, 8)}


def test_get_cand_vals_examples(T1, T2, T3, c22):
    assert list(get_cand_vals(T2, c22, u(0), 1)) == [5, 9]
    assert list(get_cand_vals(T1, c22, u(0), 0)) == [2]
    cv = get_cand_vals(T3, c22, u(0), 2)
    assert list(cv) == [2, 4]
    # anchors carry the value they stand for
    for f, es in cv.anchors.items():
        assert es and all(T3.attrs[e, 2] == f for e in es)


def test_get_cand_vals_without_core(T2):
    from esc_search import DegreeConstraint
    assert list(get_cand_vals(T2, DegreeConstraint(3, 3), u(2), 0)) == []


def test_peel_dim3_examples(T1, T3, c22):
    assert peel_dim3(T3, c22, u(0)) == {(1, 9, 4), (8, 5, 2)}
    T1x3 = with_columns(T1, T1.attrs[:, 0], T1.attrs[:, 0])
    assert peel_dim3(T1x3, c22, u(0)) == {(2, 2, 2)}
    assert peel_dim3(T3, c22, u(2)) == {(1, 9, 4)}


def test_peel_dimN_examples(T3, c22):
    T4 = with_columns(T3, 7)
    assert peel_dimN(T4, c22, u(0), d=4) == {(1, 9, 4, 7), (8, 5, 2, 7)}
    assert peel_dimN(T3, c22, u(0), d=3) == peel_dim3(T3, c22, u(0))
    with pytest.raises(ValueError):
        peel_dimN(T3, c22, u(0), d=2)


@pytest.mark.parametrize("seed", [1, 3, 5])
def test_peel_dimN_random_d4(seed):
    rng = np.random.default_rng(seed)
    G, c, q = random_instance(rng, 4, max_side=6, max_edges=18)
    assert peel_dimN(G, c, q, d=4) == oracle_skyline(G, c, q)


def test_dims_subset_and_order(T3, c22):
    assert peel_search(T3, c22, u(0), dims=(2, 0)) == {(4, 1), (2, 8)}
    assert peel_search(T3, c22, u(0), dims=(1,)) == {(9,)}
    with pytest.raises(ValueError):
        peel_search(T3, c22, u(0), dims=(0, 0))


# ---------------------------------------------------------------- properties

@settings(max_examples=150, deadline=None)
@given(instances())
def test_matches_oracle(inst):
    G, c, q = inst
    S = peel_search(G, c, q)
    assert S == oracle_skyline(G, c, q)
    assert S == peel_search(G, c, q, prune=False)
    if G.dims == 2:
        assert check_lemma1_order(S)
    for vec in S:
        H = materialize_community(G, c, q, vec)
        assert H is not None and H.significance == vec


@settings(max_examples=100, deadline=None)
@given(instances(dims=st.integers(1, 3), max_edges=14), st.data())
def test_fixed_edges_are_honoured(inst, data):
    G, c, q = inst
    F = frozenset(data.draw(st.lists(st.integers(0, G.m - 1), max_size=2)))
    S = peel_search(G, c, q, F=F)
    assert S == fixed_skyline(G, c, q, F)
    for vec in S:
        H = materialize_community(G, c, q, vec)
        assert F <= H.edge_ids


@settings(max_examples=100, deadline=None)
@given(instances(dims=st.integers(2, 4)), st.data())
def test_candidates_cover_every_skyline_value(inst, data):
    G, c, q = inst
    dim = data.draw(st.integers(0, G.dims - 1))
    cv = get_cand_vals(G, c, q, dim)
    assert list(cv) == sorted(set(cv))
    assert set(cv) <= set(G.attrs[:, dim])
    assert {vec[dim] for vec in oracle_skyline(G, c, q)} <= set(cv)


@settings(max_examples=40, deadline=None)
@given(instances(dims=st.integers(3, 4)))
def test_runs_are_deterministic(inst):
    G, c, q = inst
    a, b = Stats(), Stats()
    assert peel_search(G, c, q, stats=a) == peel_search(G, c, q, stats=b)
    assert a == b
