"""(alpha, beta)-cores, cascade deletion and community extraction.

All routines work on a :class:`~esc_search.graph.WorkingGraph`. Core
computation is a worklist fixpoint (no recursion), so it is safe on graphs
with millions of edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .graph import BipartiteGraph, VertexRef, WorkingGraph, filtered_view
from .skyline import ThresholdBox


@dataclass(frozen=True)
class DegreeConstraint:
    alpha: int
    beta: int

    def __post_init__(self):
        if int(self.alpha) != self.alpha or int(self.beta) != self.beta:
            raise ValueError("alpha and beta must be integers")
        if self.alpha < 1 or self.beta < 1:
            raise ValueError(f"alpha and beta must be >= 1, got ({self.alpha}, {self.beta})")

    def bound_of(self, graph: BipartiteGraph, vid: int) -> int:
        return self.alpha if graph.is_upper(vid) else self.beta


@dataclass
class Stats:
    """Work counters reported alongside search results."""

    iterations: int = 0
    cores_computed: int = 0


@dataclass(frozen=True)
class Community:
    upper_vertices: frozenset[int]
    lower_vertices: frozenset[int]
    edge_ids: frozenset[int]
    significance: tuple[float, ...] = field(compare=False)

    @classmethod
    def from_edges(cls, graph: BipartiteGraph, edge_ids: Iterable[int]) -> "Community":
        ids = frozenset(edge_ids)
        if not ids:
            raise ValueError("a community needs at least one edge")
        idx = np.fromiter(ids, dtype=np.int64)
        sig = tuple(float(x) for x in graph.attrs[idx].min(axis=0))
        ups = frozenset(graph.eu[e] for e in ids)
        lows = frozenset(graph.ev[e] - graph.upper_count for e in ids)
        return cls(ups, lows, ids, sig)

    def __len__(self) -> int:
        return len(self.edge_ids)

    def contains(self, ref: VertexRef) -> bool:
        if ref.layer.value == "u":
            return ref.index in self.upper_vertices
        return ref.index in self.lower_vertices


_NOSTATS = Stats()


# ----------------------------------------------------------------------
# low-level fixpoints

def _cascade_all(W: WorkingGraph, stack: list[int], bounds: Sequence[int], out: list[int] | None) -> None:
    """Delete vertices below their bound until none remain; no abort."""
    alive, deg = W.alive, W.deg
    G = W.graph
    eu, ev, adj = G.eu, G.ev, G.adj
    removed = 0
    while stack:
        v = stack.pop()
        if deg[v] >= bounds[v] or deg[v] == 0:
            continue
        for e in adj[v]:
            if alive[e]:
                alive[e] = 0
                a = eu[e]
                b = ev[e]
                deg[a] -= 1
                deg[b] -= 1
                removed += 1
                if out is not None:
                    out.append(e)
                o = b if a == v else a
                if 0 < deg[o] < bounds[o]:
                    stack.append(o)
    W.size -= removed


def _cascade(
    W: WorkingGraph,
    stack: list[int],
    qv: int,
    bounds: Sequence[int],
    rollback: list[int],
    fixed: frozenset[int] | set[int],
) -> bool:
    """Deletion cascade that refuses to kill ``qv`` or delete a fixed edge.

    On refusal every edge in ``rollback`` (including any the caller put
    there before the call) is restored and False is returned.
    """
    alive, deg = W.alive, W.deg
    G = W.graph
    eu, ev, adj = G.eu, G.ev, G.adj
    while stack:
        v = stack.pop()
        d = deg[v]
        if d >= bounds[v]:
            continue
        if v == qv:
            _restore(W, rollback)
            return False
        if d == 0:
            continue
        for e in adj[v]:
            if alive[e]:
                if e in fixed:
                    _restore(W, rollback)
                    return False
                alive[e] = 0
                a = eu[e]
                b = ev[e]
                deg[a] -= 1
                deg[b] -= 1
                W.size -= 1
                rollback.append(e)
                o = b if a == v else a
                if deg[o] < bounds[o]:
                    stack.append(o)
    return True


def _restore(W: WorkingGraph, rollback: list[int]) -> None:
    for e in reversed(rollback):
        W.restore_edge(e)
    rollback.clear()


def prune_to_core(
    W: WorkingGraph,
    c: DegreeConstraint,
    stats: Stats = _NOSTATS,
    vertices: Iterable[int] | None = None,
) -> WorkingGraph:
    """In-place maximal (alpha, beta)-core of ``W``; returns ``W``.

    ``vertices``, when given, must include every vertex with live edges; it
    spares a scan over all vertices of the underlying graph.
    """
    bounds = W.graph.degree_bounds(c.alpha, c.beta)
    deg = W.deg
    pool = range(W.graph.n) if vertices is None else vertices
    stack = [v for v in pool if 0 < deg[v] < bounds[v]]
    _cascade_all(W, stack, bounds, None)
    stats.cores_computed += 1
    return W


def component(W: WorkingGraph, vid: int) -> tuple[list[int], list[int]]:
    """(vertex ids, edge ids) of the connected component holding ``vid``."""
    G = W.graph
    alive, eu, ev, adj = W.alive, G.eu, G.ev, G.adj
    if W.deg[vid] == 0:
        return [vid], []
    seen = {vid}
    verts = [vid]
    edges = []
    i = 0
    nu = G.upper_count
    while i < len(verts):
        v = verts[i]
        i += 1
        upper = v < nu
        for e in adj[v]:
            if alive[e]:
                # every edge is met twice; keep it once, from its upper end
                if upper:
                    edges.append(e)
                o = ev[e] if upper else eu[e]
                if o not in seen:
                    seen.add(o)
                    verts.append(o)
    return verts, edges


# ----------------------------------------------------------------------
# public operations

def maximal_core(W: WorkingGraph, c: DegreeConstraint) -> WorkingGraph:
    """Largest subgraph of ``W`` meeting the degree bounds (maybe empty or
    disconnected). ``W`` itself is left untouched."""
    return prune_to_core(W.copy(), c)


def maximal_core_containing(
    W: WorkingGraph, c: DegreeConstraint, q: VertexRef, stats: Stats = _NOSTATS
) -> Community | None:
    core = prune_to_core(W.copy(), c, stats)
    qv = W.graph.vid(q)
    if core.deg[qv] == 0:
        return None
    _, edges = component(core, qv)
    return Community.from_edges(W.graph, edges)


def cascade_delete(
    W: WorkingGraph,
    start: VertexRef,
    q: VertexRef,
    c: DegreeConstraint,
    rollback: list[int],
    fixed: Iterable[int] = (),
) -> bool:
    """Resolve degree violations reachable from ``start`` by deleting edges.

    Returns True when the cascade completes. Returns False (abort) when it
    would delete a fixed edge or push ``q`` below its degree bound; in that
    case every edge recorded in ``rollback`` is put back, so callers that
    log their own initial removal there get the graph back unchanged.
    """
    G = W.graph
    bounds = G.degree_bounds(c.alpha, c.beta)
    return _cascade(W, [G.vid(start)], G.vid(q), bounds, rollback, frozenset(fixed))


def _layer_counts(W: WorkingGraph) -> tuple[int, int, int]:
    G = W.graph
    nu = G.upper_count
    deg = W.deg
    U = sum(1 for v in range(nu) if deg[v])
    L = sum(1 for v in range(nu, G.n) if deg[v])
    return W.size, U, L


def lemma3_holds(E: int, U: int, L: int, c: DegreeConstraint) -> bool:
    return c.alpha * c.beta - c.alpha - c.beta <= E - U - L


def lemma4_holds(upper_hi: int, lower_hi: int, c: DegreeConstraint) -> bool:
    # upper_hi: upper vertices with degree >= alpha; lower_hi: lower with >= beta
    return upper_hi >= c.beta and lower_hi >= c.alpha


def lemma3_check(C: WorkingGraph, c: DegreeConstraint) -> bool:
    """Edge-surplus test; False proves no connected core fits inside ``C``."""
    return lemma3_holds(*_layer_counts(C), c)


def lemma4_check(C: WorkingGraph, c: DegreeConstraint) -> bool:
    """Needs >= beta upper vertices of degree >= alpha and >= alpha lower
    vertices of degree >= beta."""
    G = C.graph
    nu = G.upper_count
    deg = C.deg
    upper_hi = sum(1 for v in range(nu) if deg[v] >= c.alpha)
    lower_hi = sum(1 for v in range(nu, G.n) if deg[v] >= c.beta)
    return lemma4_holds(upper_hi, lower_hi, c)


def materialize_community(
    G: BipartiteGraph, c: DegreeConstraint, q: VertexRef, v: Sequence[float]
) -> Community | None:
    """The maximal connected core holding ``q`` among edges with ``X >= v``."""
    if len(v) != G.dims:
        raise ValueError(f"vector has {len(v)} dims, graph has {G.dims}")
    return maximal_core_containing(filtered_view(G, ThresholdBox.at_least(v)), c, q)


# ----------------------------------------------------------------------
# shared peel primitive

def _fixed_connected(W: WorkingGraph, qv: int, fixed: frozenset[int]) -> bool:
    if not all(W.alive[e] for e in fixed):
        return False
    verts, _ = component(W, qv)
    reach = set(verts)
    return all(W.graph.eu[e] in reach for e in fixed)


def peel_max_threshold(
    W: WorkingGraph,
    c: DegreeConstraint,
    qv: int,
    dim: int,
    fixed: Iterable[int] = (),
    stats: Stats = _NOSTATS,
    edges: list[int] | None = None,
) -> float | None:
    """Largest ``t`` such that ``q`` keeps a core among edges with ``X[dim] >= t``.

    Consumes ``W`` (peeled in place). Minimum edges are deleted in ascending
    ``(X[dim], edge id)`` order with cascades; the value of the first edge
    whose cascade would drop ``q`` (or touch a fixed edge) is the answer.
    A non-empty ``fixed`` set also requires every fixed edge to stay in the
    component of ``q``. ``edges`` optionally lists the edges of ``W`` so a
    small graph avoids a scan of the full global order.
    """
    G = W.graph
    bounds = G.degree_bounds(c.alpha, c.beta)
    fixed = frozenset(fixed)
    touched = None
    if edges is not None:
        touched = {G.eu[e] for e in edges} | {G.ev[e] for e in edges}
    prune_to_core(W, c, stats, touched)
    if W.deg[qv] < bounds[qv]:
        return None
    if fixed and not _fixed_connected(W, qv, fixed):
        return None
    col = G.columns[dim]
    if edges is not None:
        order = sorted((e for e in edges if W.alive[e]), key=lambda e: (col[e], e))
    else:
        order = G.order(dim)
    alive, eu, ev = W.alive, G.eu, G.ev
    for e in order:
        if not alive[e]:
            continue
        if e in fixed:
            return col[e]
        rollback = [e]
        W.remove_edge(e)
        if not _cascade(W, [eu[e], ev[e]], qv, bounds, rollback, fixed):
            return col[e]
        if fixed and not _fixed_connected(W, qv, fixed):
            _restore(W, rollback)
            return col[e]
    raise AssertionError("peeling exhausted the graph without isolating the query")


# ----------------------------------------------------------------------
# compiled fast paths (no fixed edges)

def _box_arrays(G: BipartiteGraph, I: ThresholdBox | None) -> tuple[np.ndarray, np.ndarray]:
    if I is None:
        return np.zeros(G.dims), np.zeros(G.dims, dtype=np.bool_)
    if I.dims != G.dims:
        raise ValueError(f"threshold box has {I.dims} dims, graph has {G.dims}")
    return np.asarray(I.bounds, dtype=np.float64), np.asarray(I.strict, dtype=np.bool_)


def _mask_box(G: BipartiteGraph, I: ThresholdBox | None) -> tuple[np.ndarray, np.ndarray]:
    A = G.arrays
    lo, strict = _box_arrays(G, I)
    return K.filter_box(A.attrs, lo, strict, A.eu, A.ev, G.n)


def _mask_edges(G: BipartiteGraph, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    A = G.arrays
    alive = np.zeros(G.m, dtype=np.uint8)
    alive[edges] = 1
    deg = np.bincount(np.concatenate([A.eu[edges], A.ev[edges]]), minlength=G.n).astype(np.int64)
    return alive, deg


def threshold_in_box(
    G: BipartiteGraph, c: DegreeConstraint, qv: int, I: ThresholdBox | None, dim: int, stats: Stats = _NOSTATS
) -> float | None:
    """Compiled equivalent of ``peel_max_threshold(filtered_view(G, I), ...)``."""
    alive, deg = _mask_box(G, I)
    return _peel_masked(G, c, qv, alive, deg, dim, stats)


def threshold_in_edges(
    G: BipartiteGraph, c: DegreeConstraint, qv: int, edges: np.ndarray, dim: int, stats: Stats = _NOSTATS
) -> float | None:
    """Best ``X[dim]`` threshold for ``q`` using only the listed edges."""
    alive, deg = _mask_edges(G, edges)
    return _peel_masked(G, c, qv, alive, deg, dim, stats)


def _peel_masked(G, c, qv, alive, deg, dim, stats) -> float | None:
    A = G.arrays
    stats.cores_computed += 1
    ok, t = K.peel_max(A.indptr, A.inc, A.eu, A.ev, alive, deg, G.bounds_array(c.alpha, c.beta),
                       G.order_array(dim), A.cols[dim], qv)
    return float(t) if ok else None
