"""Walk through the small fixture graphs: every family, every answer.

Run from the repository root: ``python demos/fixture_walkthrough.py``.
"""

from pathlib import Path

from esc_search import (
    DegreeConstraint,
    VertexRef,
    expand_search,
    load_edge_list,
    materialize_community,
    oracle_skyline,
    peel_search,
)

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def show(name: str, q: VertexRef, c: DegreeConstraint) -> None:
    with open(DATA / f"{name}.el") as fh:
        G = load_edge_list(fh)
    print(f"{name}: {G.upper_count} upper, {G.lower_count} lower, {G.m} edges, d={G.dims}")
    answers = {"peel": peel_search(G, c, q), "expand": expand_search(G, c, q), "oracle": oracle_skyline(G, c, q)}
    for family, S in answers.items():
        print(f"  {family:>6}: {sorted(S)}")
    for vec in sorted(answers["peel"]):
        H = materialize_community(G, c, q, vec)
        ups = sorted(G.upper_labels[i] for i in H.upper_vertices)
        lows = sorted(G.lower_labels[j] for j in H.lower_vertices)
        print(f"  community at {vec}: {ups} x {lows}, {len(H)} edges")
    print()


if __name__ == "__main__":
    c = DegreeConstraint(2, 2)
    show("T1", VertexRef.upper(0), c)
    # u0 sits in both the dense inner square and the outer block, so it
    # gets one community per trade-off; u2 only reaches the outer block.
    show("T2", VertexRef.upper(0), c)
    show("T2", VertexRef.upper(2), c)
    show("T3", VertexRef.upper(0), c)
