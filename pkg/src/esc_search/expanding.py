"""Expanding search: grow an accumulator graph in decreasing attribute order.

The single-dimension routine adds edges in threshold batches and keeps a
union-find over the accumulator, with per-component edge, vertex and
high-degree counts. Two cheap necessary conditions on q's component gate
the comparatively expensive core extraction:

* edge surplus: ``alpha*beta - alpha - beta <= E - U - L``;
* enough heavy vertices: at least ``beta`` upper vertices of degree
  ``>= alpha`` and at least ``alpha`` lower vertices of degree ``>= beta``.

Higher dimensions recurse through a frontier of solution-space corners.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .core import (
    Community,
    _box_arrays,
    threshold_in_edges,
    DegreeConstraint,
    Stats,
    _fixed_connected,
    component,
    lemma3_holds,
    lemma4_holds,
    peel_max_threshold,
    prune_to_core,
)
from .graph import BipartiteGraph, VertexRef, WorkingGraph
from .skyline import SkylineSet, ThresholdBox, divide_space, minimal_corners


def _box(G: BipartiteGraph, I: ThresholdBox | None) -> ThresholdBox:
    return ThresholdBox.vacuous(G.dims) if I is None else I


def query_upper_bound(
    G: BipartiteGraph,
    q: VertexRef,
    c: DegreeConstraint,
    dim: int,
    I: ThresholdBox | None = None,
) -> float | None:
    """k-th largest ``X[dim]`` on the query's edges (k = its degree bound).

    No community holding ``q`` can have a larger minimum in ``dim``. None
    when ``q`` has fewer than k admissible edges.
    """
    if not 0 <= dim < G.dims:
        raise ValueError(f"dimension {dim} out of range for d={G.dims}")
    qv = G.vid(q)
    k = c.alpha if G.is_upper(qv) else c.beta
    edges = G.adj[qv]
    if I is not None:
        edges = [e for e in edges if I.admits(G.attrs[e])]
    if len(edges) < k:
        return None
    col = G.columns[dim]
    return sorted((col[e] for e in edges), reverse=True)[k - 1]


class _Accumulator:
    """Edge set grown one edge at a time with per-component counters."""

    def __init__(self, G: BipartiteGraph, c: DegreeConstraint):
        self.G = G
        self.c = c
        self.bounds = G.degree_bounds(c.alpha, c.beta)
        self.nu = G.upper_count
        self.parent: dict[int, int] = {}
        self.deg: dict[int, int] = {}
        self.adj: dict[int, list[int]] = {}
        # per root: [edges, upper, lower, heavy upper, heavy lower]
        self.count: dict[int, list[int]] = {}

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def _touch(self, v: int) -> int:
        if v not in self.parent:
            self.parent[v] = v
            self.deg[v] = 0
            self.adj[v] = []
            self.count[v] = [0, 1, 0, 0, 0] if v < self.nu else [0, 0, 1, 0, 0]
        d = self.deg[v] + 1
        self.deg[v] = d
        r = self.find(v)
        if d == self.bounds[v]:
            self.count[r][3 if v < self.nu else 4] += 1
        return r

    def add(self, e: int) -> None:
        a, b = self.G.eu[e], self.G.ev[e]
        ra, rb = self._touch(a), self._touch(b)
        self.adj[a].append(e)
        self.adj[b].append(e)
        if ra != rb:
            ca, cb = self.count.pop(ra), self.count[rb]
            for i in range(5):
                cb[i] += ca[i]
            self.parent[ra] = rb
        self.count[rb][0] += 1

    def counts_of(self, v: int) -> list[int] | None:
        if v not in self.parent:
            return None
        return self.count[self.find(v)]

    def core_of(self, qv: int, fixed: frozenset[int], stats: Stats) -> list[int] | None:
        """Edges of q's connected core inside q's component, or None."""
        G, adj = self.G, self.adj
        verts, edges, seen = [qv], [], {qv}
        i = 0
        while i < len(verts):
            v = verts[i]
            i += 1
            upper = v < self.nu
            for e in adj[v]:
                if upper:
                    edges.append(e)
                o = G.ev[e] if upper else G.eu[e]
                if o not in seen:
                    seen.add(o)
                    verts.append(o)
        W = WorkingGraph.from_edges(G, edges)
        prune_to_core(W, self.c, stats, verts)
        if W.deg[qv] < self.bounds[qv]:
            return None
        if fixed and not _fixed_connected(W, qv, fixed):
            return None
        return component(W, qv)[1]


def _community_at(
    G: BipartiteGraph, c: DegreeConstraint, qv: int, edges: list[int], dim: int, t: float, stats: Stats
) -> Community:
    col = G.columns[dim]
    keep = [e for e in edges if col[e] >= t]
    W = WorkingGraph.from_edges(G, keep)
    prune_to_core(W, c, stats, {G.eu[e] for e in keep} | {G.ev[e] for e in keep})
    return Community.from_edges(G, component(W, qv)[1])


def _strip(
    G: BipartiteGraph, c: DegreeConstraint, qv: int, edges: list[int], dim: int, F: frozenset[int], stats: Stats
) -> float:
    t = peel_max_threshold(WorkingGraph.from_edges(G, edges), c, qv, dim, F, stats, edges=edges)
    assert t is not None, "stripping lost a core that was just extracted"
    return t


def _grow(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    dim: int,
    I: ThresholdBox | None,
    prune: bool,
    stats: Stats,
) -> np.ndarray | None:
    """Edge ids of the best community in ``dim`` (compiled path, no fixed edges)."""
    stats.iterations += 1
    top = query_upper_bound(G, q, c, dim, I)
    if top is None:
        return None
    A = G.arrays
    lo, strict = _box_arrays(G, I)
    edges, attempts, cores = K.expand_one(
        A.indptr, A.inc, A.eu, A.ev, A.attrs, lo, strict, dim, G.order_array(dim),
        G.bounds_array(c.alpha, c.beta), G.upper_count, G.vid(q), top, c.alpha, c.beta, prune,
    )
    stats.iterations += attempts
    stats.cores_computed += cores
    return edges if len(edges) else None


def expand_dim1(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    dim: int = 0,
    I: ThresholdBox | None = None,
    F: Iterable[int] = (),
    prune: bool = True,
    stats: Stats | None = None,
) -> Community | None:
    """Community of ``q`` with the largest minimum in ``dim`` under ``I``.

    Extraction attempts gallop: after a failed attempt on a component of
    ``E`` edges, the next waits until the component has doubled (or the
    edges run out). Overshooting is harmless because the found core is
    stripped back to the exact best threshold before returning.
    """
    stats = stats if stats is not None else Stats()
    F = frozenset(F)
    if not F:
        edges = _grow(G, c, q, dim, I, prune, stats)
        return None if edges is None else Community.from_edges(G, edges.tolist())
    stats.iterations += 1
    top = query_upper_bound(G, q, c, dim, I)
    if top is None:
        return None
    qv = G.vid(q)
    col = G.columns[dim]
    order = G.order(dim)
    if I is not None:
        keep = I.mask(G.attrs)
        order = [e for e in order if keep[e]]
    acc = _Accumulator(G, c)
    pos = len(order) - 1
    thr = top
    tried = failed = 0
    found = None
    while pos >= 0:
        while pos >= 0 and col[order[pos]] >= thr:
            acc.add(order[pos])
            pos -= 1
        cnt = acc.counts_of(qv)
        if cnt is not None:
            E = cnt[0]
            if E > tried and (E >= 2 * failed or pos < 0):
                if not prune or (
                    lemma3_holds(E, cnt[1], cnt[2], c) and lemma4_holds(cnt[3], cnt[4], c)
                ):
                    tried = E
                    stats.iterations += 1
                    found = acc.core_of(qv, F, stats)
                    if found is not None:
                        break
                    failed = E
        if pos >= 0:
            thr = col[order[pos]]
    if found is None:
        return None
    t = _strip(G, c, qv, found, dim, F, stats)
    return _community_at(G, c, qv, found, dim, t, stats)


def expand_dim2(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    F: Iterable[int] = (),
    dims: Sequence[int] = (0, 1),
    I: ThresholdBox | None = None,
    prune: bool = True,
    stats: Stats | None = None,
) -> SkylineSet:
    """Skyline pairs over ``dims = (a, b)``.

    Each round grows the best community in ``b`` among edges with ``X[a]``
    above the last recorded value, then strips it in ``a``; the pair is
    recorded and ``a``'s bound advances past it.
    """
    a, b = dims
    I = _box(G, I)
    F = frozenset(F)
    stats = stats if stats is not None else Stats()
    qv = G.vid(q)
    out = SkylineSet()
    region = I
    while True:
        if F:
            H = expand_dim1(G, c, q, b, region, F, prune, stats)
            if H is None:
                break
            f2 = H.significance[b]
            f1 = _strip(G, c, qv, list(H.edge_ids), a, F, stats)
        else:
            edges = _grow(G, c, q, b, region, prune, stats)
            if edges is None:
                break
            f2 = float(G.arrays.cols[b][edges].min())
            f1 = threshold_in_edges(G, c, qv, edges, a, stats)
        out.add((f1, f2))
        region = I.tighten(a, f1, strict=True)
    return out


def _best(G, c, q, dim, I, F, prune, stats) -> float | None:
    """Best attainable minimum of ``X[dim]`` for ``q`` inside ``I``."""
    if F:
        H = expand_dim1(G, c, q, dim, I, F, prune, stats)
        return None if H is None else H.significance[dim]
    edges = _grow(G, c, q, dim, I, prune, stats)
    return None if edges is None else float(G.arrays.cols[dim][edges].min())


def _corner_box(I: ThresholdBox, rest: Sequence[int], corner: Sequence[float]) -> ThresholdBox:
    for k, p in zip(rest, corner):
        I = I.tighten(k, p, strict=True)
    return I


def _frontier(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    F: frozenset[int],
    dims: tuple[int, ...],
    I: ThresholdBox,
    prune: bool,
    stats: Stats,
    inner,
) -> SkylineSet:
    last, rest = dims[-1], dims[:-1]
    top = _best(G, c, q, last, I, F, prune, stats)
    out = SkylineSet()
    if top is None:
        return out
    origin = (0.0,) * len(rest)
    corners = {origin}
    seen = {origin}
    heap = [(-top, origin)]
    found = SkylineSet()
    while heap:
        negf, corner = heapq.heappop(heap)
        if prune and corner not in corners:
            continue
        f = -negf
        stats.iterations += 1
        region = _corner_box(I, rest, corner).tighten(last, f)
        fresh = []
        for t in inner(G, c, q, F, rest, region, prune, stats):
            out.add(t + (f,))
            if found.add(t):
                fresh.append(t)
        if not fresh:
            corners.discard(corner)
        for t in fresh:
            corners = divide_space(corners, t)
        corners = minimal_corners(corners)
        for cn in sorted(corners - seen):
            seen.add(cn)
            f_cn = _best(G, c, q, last, _corner_box(I, rest, cn), F, prune, stats)
            if f_cn is None:
                corners.discard(cn)
            else:
                heapq.heappush(heap, (-f_cn, cn))
    return out


def _dim2_inner(G, c, q, F, dims, I, prune, stats):
    return expand_dim2(G, c, q, F, dims, I, prune, stats)


def _dimN_inner(G, c, q, F, dims, I, prune, stats):
    return expand_dimN(G, c, q, F, dims=dims, I=I, prune=prune, stats=stats)


def _as_dims(G: BipartiteGraph, d: int | None, dims: Sequence[int] | None) -> tuple[int, ...]:
    if dims is None:
        dims = range(G.dims if d is None else d)
    dims = tuple(dims)
    if len(set(dims)) != len(dims) or not all(0 <= k < G.dims for k in dims):
        raise ValueError(f"invalid dimension list {dims} for d={G.dims}")
    return dims


def expand_dim3(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    F: Iterable[int] = (),
    dims: Sequence[int] | None = None,
    I: ThresholdBox | None = None,
    prune: bool = True,
    stats: Stats | None = None,
) -> SkylineSet:
    dims = _as_dims(G, 3, dims)
    if len(dims) != 3:
        raise ValueError("expand_dim3 needs exactly three free dimensions")
    stats = stats if stats is not None else Stats()
    return _frontier(G, c, q, frozenset(F), dims, _box(G, I), prune, stats, _dim2_inner)


def expand_dimN(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    F: Iterable[int] = (),
    d: int | None = None,
    *,
    dims: Sequence[int] | None = None,
    I: ThresholdBox | None = None,
    prune: bool = True,
    stats: Stats | None = None,
) -> SkylineSet:
    dims = _as_dims(G, d, dims)
    if len(dims) < 3:
        raise ValueError("expand_dimN needs at least three free dimensions")
    stats = stats if stats is not None else Stats()
    if len(dims) == 3:
        return expand_dim3(G, c, q, F, dims, I, prune, stats)
    return _frontier(G, c, q, frozenset(F), dims, _box(G, I), prune, stats, _dimN_inner)


def expand_search(
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
        f = _best(G, c, q, dims[0], I, frozenset(F), prune, stats)
        return SkylineSet([] if f is None else [(f,)])
    if len(dims) == 2:
        return expand_dim2(G, c, q, F, dims, I, prune, stats)
    return expand_dimN(G, c, q, F, dims=dims, I=I, prune=prune, stats=stats)
