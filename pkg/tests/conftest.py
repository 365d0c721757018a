from pathlib import Path

import numpy as np
import pytest

from esc_search import BipartiteGraph, DegreeConstraint, VertexRef, load_edge_list

DATA = Path(__file__).parent / "data"


def load_fixture(name: str) -> BipartiteGraph:
    with open(DATA / f"{name}.el") as fh:
        return load_edge_list(fh)


@pytest.fixture(scope="session")
def T1():
    return load_fixture("T1")


@pytest.fixture(scope="session")
def T2():
    return load_fixture("T2")


@pytest.fixture(scope="session")
def T3():
    return load_fixture("T3")


@pytest.fixture
def c22():
    return DegreeConstraint(2, 2)


def u(i: int) -> VertexRef:
    return VertexRef.upper(i)


def v(j: int) -> VertexRef:
    return VertexRef.lower(j)


def with_columns(G: BipartiteGraph, *cols) -> BipartiteGraph:
    """``G`` with extra attribute columns; a scalar becomes a constant column."""
    extra = [np.full(G.m, float(c)) if np.isscalar(c) else np.asarray(c, dtype=float) for c in cols]
    return G.with_attrs(np.column_stack([G.attrs, *extra]))
