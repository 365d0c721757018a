import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import u
from esc_search import (
    BipartiteGraph,
    OracleRefused,
    dominates,
    filtered_view,
    generate_attributes,
    materialize_community,
    maximal_core_containing,
    oracle_community,
    oracle_skyline,
    random_topology,
    verify_result,
)
from esc_search.skyline import ThresholdBox
from strategies import instances


def test_oracle_examples(T1, T2, T3, c22):
    assert oracle_skyline(T1, c22, u(0)) == {(2,)}
    assert oracle_skyline(T2, c22, u(0)) == {(1, 9), (8, 5)}
    assert oracle_skyline(T3, c22, u(0)) == {(1, 9, 4), (8, 5, 2)}


def test_oracle_guard(c22):
    G = generate_attributes(random_topology(10, 10, 41, 0), 2, 1, 9, 0, integral=True)
    with pytest.raises(OracleRefused):
        oracle_skyline(G, c22, u(0))
    oracle_skyline(G, c22, u(0), force=True)
    wide = BipartiteGraph(2, 2, [(0, 0)], [[1.0] * 5])
    with pytest.raises(OracleRefused):
        oracle_skyline(wide, c22, u(0))


@settings(max_examples=100, deadline=None)
@given(instances(), st.data())
def test_oracle_community_matches_core_routine(inst, data):
    G, c, q = inst
    t = data.draw(st.lists(st.integers(0, 5), min_size=G.dims, max_size=G.dims))
    comp = oracle_community(G, c, q, t)
    H = maximal_core_containing(filtered_view(G, ThresholdBox.at_least(t)), c, q)
    assert (comp is None) == (H is None)
    if H is not None:
        assert comp == H.edge_ids


@settings(max_examples=100, deadline=None)
@given(instances(), st.randoms())
def test_oracle_output_is_sound_and_order_free(inst, rnd):
    G, c, q = inst
    S = oracle_skyline(G, c, q)
    for vec in S:
        assert materialize_community(G, c, q, vec).significance == vec
    assert not any(dominates(a, b) for a in S for b in S)
    perm = list(range(G.m))
    rnd.shuffle(perm)
    H = BipartiteGraph(G.upper_count, G.lower_count,
                       [(G.eu[e], G.ev[e] - G.upper_count) for e in perm], G.attrs[perm])
    assert oracle_skyline(H, c, q) == S


def test_verify_result_accepts_the_answer(T2, c22):
    report = verify_result(T2, c22, u(0), {(1, 9), (8, 5)})
    assert report.ok, str(report)
    names = [ch.name for ch in report.checks]
    assert "oracle equality" in names and "non-dominance" in names


def test_verify_result_flags_dominance(T2, c22):
    report = verify_result(T2, c22, u(0), {(1, 9), (1, 5)})
    assert not report.ok
    assert any(ch.name == "non-dominance" for ch in report.failures)


def test_verify_result_flags_unrealizable(T2, c22):
    report = verify_result(T2, c22, u(0), {(9, 9)})
    assert any(ch.name.startswith("realizable") for ch in report.failures)
    assert "FAIL" in str(report)


def test_verify_result_flags_missing_vectors(T2, c22):
    report = verify_result(T2, c22, u(0), {(8, 5)})
    assert [ch.name for ch in report.failures] == ["oracle equality"]


def test_verify_result_skips_oracle_when_large(c22):
    G = generate_attributes(random_topology(12, 12, 60, 1), 2, 1, 9, 1, integral=True)
    report = verify_result(G, c22, u(0), set())
    assert all(ch.name != "oracle equality" for ch in report.checks)
    forced = verify_result(G, c22, u(0), set(), force=True)
    assert any(ch.name == "oracle equality" for ch in forced.checks)
