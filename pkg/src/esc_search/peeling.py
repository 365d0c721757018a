"""Peeling search: shrink the graph by deleting minimum-attribute edges.

Every routine takes ``dims``, the attribute dimensions it is free to
optimise, in the order their values appear in the returned vectors. The
last listed dimension is the one the outer loop enumerates; for two free
dimensions ``(a, b)`` the alternation runs ``b`` first, exactly like the
single-pair case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from . import _kernels as K
from .core import (
    DegreeConstraint,
    Stats,
    _mask_box,
    peel_max_threshold,
    threshold_in_box,
)
from .graph import BipartiteGraph, VertexRef, filtered_view
from .skyline import SkylineSet, ThresholdBox, divide_space, minimal_corners


def _box(G: BipartiteGraph, I: ThresholdBox | None) -> ThresholdBox:
    return ThresholdBox.vacuous(G.dims) if I is None else I


def peel_dim1(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    I: ThresholdBox | None = None,
    dim: int = 0,
    F: Iterable[int] = (),
    stats: Stats | None = None,
) -> float | None:
    """Best attainable minimum of ``X[dim]`` over cores holding ``q`` under ``I``.

    None when ``q`` has no core at all under ``I`` (or the fixed edges in
    ``F`` cannot all sit in its component).
    """
    if not 0 <= dim < G.dims:
        raise ValueError(f"dimension {dim} out of range for d={G.dims}")
    stats = stats if stats is not None else Stats()
    stats.iterations += 1
    F = frozenset(F)
    if not F:
        return threshold_in_box(G, c, G.vid(q), I, dim, stats)
    W = filtered_view(G, _box(G, I))
    return peel_max_threshold(W, c, G.vid(q), dim, F, stats)


def peel_dim2(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    I: ThresholdBox | None = None,
    F: Iterable[int] = (),
    dims: Sequence[int] = (0, 1),
    stats: Stats | None = None,
) -> SkylineSet:
    """All skyline pairs over ``dims = (a, b)`` by alternating 1-d peels."""
    a, b = dims
    I = _box(G, I)
    F = frozenset(F)
    stats = stats if stats is not None else Stats()
    out = SkylineSet()
    f2 = peel_dim1(G, c, q, I, b, F, stats)
    while f2 is not None:
        f1 = peel_dim1(G, c, q, I.tighten(b, f2), a, F, stats)
        if f1 is None:
            break
        out.add((f1, f2))
        f2 = peel_dim1(G, c, q, I.tighten(a, f1, strict=True), b, F, stats)
    return out


@dataclass(frozen=True)
class CandidateValues(Sequence):
    """Ascending values one dimension's significance can take.

    ``anchors[v]`` lists the edges of value ``v`` that lie in the query's
    community at threshold ``v``; any community whose minimum in this
    dimension is exactly ``v`` contains at least one of them.
    """

    values: tuple[float, ...]
    anchors: dict[float, tuple[int, ...]] = field(default_factory=dict, compare=False)

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)


def get_cand_vals(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    dim: int,
    I: ThresholdBox | None = None,
    stats: Stats | None = None,
) -> CandidateValues:
    """Every value ``X[dim]`` takes as the minimum of the query's community
    while the graph is peeled in ascending ``X[dim]`` order.

    One forward peel stamps each edge with the step that deleted it; a
    backward union-find pass then replays the graph states and tests which
    minimum-value edges were connected to the query at their turn.
    """
    if not 0 <= dim < G.dims:
        raise ValueError(f"dimension {dim} out of range for d={G.dims}")
    stats = stats if stats is not None else Stats()
    stats.iterations += 1
    stats.cores_computed += 1
    A = G.arrays
    alive, deg = _mask_box(G, I)
    values, edges = K.candidates(
        A.indptr, A.inc, A.eu, A.ev, alive, deg, G.bounds_array(c.alpha, c.beta),
        G.order_array(dim), A.cols[dim], G.vid(q),
    )
    anchors: dict[float, list[int]] = {}
    for v, e in zip(values.tolist(), edges.tolist()):
        anchors.setdefault(v, []).append(e)
    return CandidateValues(tuple(anchors), {v: tuple(es) for v, es in anchors.items()})


Inner = Callable[..., SkylineSet]


def _peel_outer(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    I: ThresholdBox,
    F: frozenset[int],
    dims: Sequence[int],
    prune: bool,
    stats: Stats,
    inner: Inner,
) -> SkylineSet:
    last, rest = dims[-1], tuple(dims[:-1])
    cands = get_cand_vals(G, c, q, last, I, stats)
    cols = [G.columns[k] for k in rest]
    found = SkylineSet()
    out = SkylineSet()
    # Corners of the region no found vector covers, each with the best
    # X[last] any community strictly above it reaches (computed lazily).
    corners = {(0.0,) * len(rest)}
    reach: dict[tuple, float | None] = {}
    for f in reversed(cands.values):
        if prune:
            # A community pinned at X[last] == f contains one of the anchors,
            # so its other significances are capped by that anchor's values.
            if all(found.covers(tuple(col[e] for col in cols)) for e in cands.anchors[f]):
                continue
            if found and not _corner_reaches(G, c, q, I, F, rest, last, f, corners, reach, stats):
                continue
        stats.iterations += 1
        for t in inner(G, c, q, I.tighten(last, f), F, rest, prune, stats):
            out.add(t + (f,))
            if found.add(t):
                corners = divide_space(corners, t)
        if prune:
            corners = {p for p in minimal_corners(corners) if reach.get(p, 0.0) is not None}
    return out


def _corner_reaches(G, c, q, I, F, rest, last, f, corners, reach, stats) -> bool:
    """Whether some uncovered corner still admits a community with X[last] >= f."""
    for p in sorted(corners):
        if p not in reach:
            box = I
            for k, x in zip(rest, p):
                box = box.tighten(k, x, strict=True)
            reach[p] = peel_dim1(G, c, q, box, last, F, stats)
        if reach[p] is not None and reach[p] >= f:
            return True
    return False


def _as_dims(G: BipartiteGraph, d: int | None, dims: Sequence[int] | None) -> tuple[int, ...]:
    if dims is None:
        dims = range(G.dims if d is None else d)
    dims = tuple(dims)
    if len(set(dims)) != len(dims) or not all(0 <= k < G.dims for k in dims):
        raise ValueError(f"invalid dimension list {dims} for d={G.dims}")
    return dims


def _dim2_inner(G, c, q, I, F, dims, prune, stats):
    return peel_dim2(G, c, q, I, F, dims, stats)


def peel_dim3(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    I: ThresholdBox | None = None,
    F: Iterable[int] = (),
    dims: Sequence[int] | None = None,
    prune: bool = True,
    stats: Stats | None = None,
) -> SkylineSet:
    dims = _as_dims(G, 3, dims)
    if len(dims) != 3:
        raise ValueError("peel_dim3 needs exactly three free dimensions")
    stats = stats if stats is not None else Stats()
    return _peel_outer(G, c, q, _box(G, I), frozenset(F), dims, prune, stats, _dim2_inner)


def _dimN_inner(G, c, q, I, F, dims, prune, stats):
    return peel_dimN(G, c, q, I, F, dims=dims, prune=prune, stats=stats)


def peel_dimN(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    I: ThresholdBox | None = None,
    F: Iterable[int] = (),
    d: int | None = None,
    *,
    dims: Sequence[int] | None = None,
    prune: bool = True,
    stats: Stats | None = None,
) -> SkylineSet:
    dims = _as_dims(G, d, dims)
    if len(dims) < 3:
        raise ValueError("peel_dimN needs at least three free dimensions")
    stats = stats if stats is not None else Stats()
    if len(dims) == 3:
        return peel_dim3(G, c, q, I, F, dims, prune, stats)
    return _peel_outer(G, c, q, _box(G, I), frozenset(F), dims, prune, stats, _dimN_inner)


def peel_search(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    dims: Sequence[int] | None = None,
    *,
    I: ThresholdBox | None = None,
    F: Iterable[int] = (),
    prune: bool = True,
    stats: Stats | None = None,
) -> SkylineSet:
    """Skyline significance vectors of the query over ``dims`` (default all)."""
    dims = _as_dims(G, None, dims)
    stats = stats if stats is not None else Stats()
    G.vid(q)
    if len(dims) == 1:
        v = peel_dim1(G, c, q, I, dims[0], F, stats)
        return SkylineSet([] if v is None else [(v,)])
    if len(dims) == 2:
        return peel_dim2(G, c, q, I, F, dims, stats)
    return peel_dimN(G, c, q, I, F, dims=dims, prune=prune, stats=stats)
