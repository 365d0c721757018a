"""Brute-force reference answers for small instances.

Nothing here reuses the search code: the oracle has its own set-based core
routine and simply tries every combination of per-dimension thresholds
drawn from the attribute values present in the graph. Any community's
significance is made of its own edges' attributes, so the grid cannot
miss a skyline vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import DegreeConstraint, materialize_community
from .graph import BipartiteGraph, VertexRef
from .skyline import SkylineSet, dominates

MAX_EDGES = 40
MAX_DIMS = 4


class OracleRefused(RuntimeError):
    """Raised when an instance is too large for exhaustive enumeration."""


def _check_size(G: BipartiteGraph, force: bool) -> None:
    if force:
        return
    if G.m > MAX_EDGES or G.dims > MAX_DIMS:
        raise OracleRefused(
            f"instance too large for the oracle (m={G.m}, d={G.dims}; "
            f"limits m<={MAX_EDGES}, d<={MAX_DIMS}); pass force to override"
        )


def oracle_community(
    G: BipartiteGraph, c: DegreeConstraint, q: VertexRef, thresholds: Sequence[float]
) -> frozenset[int] | None:
    """Edge ids of the largest connected core holding ``q`` among edges whose
    attributes are all ``>=`` the thresholds; None if there is none."""
    G.vid(q)
    qk = (q.layer.value, q.index)
    ends = [(("u", u), ("l", v)) for u, v in (G.endpoints(e) for e in range(G.m))]
    edges = {
        e for e, row in enumerate(G.attrs.tolist()) if all(x >= t for x, t in zip(row, thresholds))
    }
    nbrs: dict[tuple, set[int]] = {}
    for e in edges:
        for v in ends[e]:
            nbrs.setdefault(v, set()).add(e)

    def need(v):
        return c.alpha if v[0] == "u" else c.beta

    changed = True
    while changed:
        changed = False
        for v, es in list(nbrs.items()):
            if es and len(es) < need(v):
                for e in list(es):
                    edges.discard(e)
                    for w in ends[e]:
                        nbrs[w].discard(e)
                changed = True
    if not nbrs.get(qk):
        return None
    reach, todo, comp = {qk}, [qk], set()
    while todo:
        v = todo.pop()
        for e in nbrs[v]:
            comp.add(e)
            for w in ends[e]:
                if w not in reach:
                    reach.add(w)
                    todo.append(w)
    return frozenset(comp)


def oracle_skyline(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    force: bool = False,
) -> SkylineSet:
    """Skyline of every significance vector reachable by some threshold grid point."""
    _check_size(G, force)
    G.vid(q)
    rows = G.attrs.tolist()
    values = [sorted({row[i] for row in rows}) for i in range(G.dims)]
    out = SkylineSet()

    def walk(prefix: tuple) -> None:
        i = len(prefix)
        for v in values[i]:
            t = prefix + (v,)
            comp = oracle_community(G, c, q, t + (0.0,) * (G.dims - i - 1))
            # thresholds only shrink the edge set, so larger values fail too
            if comp is None:
                break
            if i + 1 == G.dims:
                out.add(tuple(min(rows[e][k] for e in comp) for k in range(G.dims)))
            else:
                walk(t)

    if G.dims:
        walk(())
    return out


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ch.ok for ch in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [ch for ch in self.checks if not ch.ok]

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name, ok, detail))

    def __str__(self) -> str:
        lines = [f"{'ok  ' if ch.ok else 'FAIL'} {ch.name}" + (f": {ch.detail}" if ch.detail else "")
                 for ch in self.checks]
        return "\n".join(lines)


def verify_result(
    G: BipartiteGraph,
    c: DegreeConstraint,
    q: VertexRef,
    S,
    force: bool = False,
) -> VerificationReport:
    """Check realizability, maximality and non-dominance of every vector in
    ``S``, and equality with the oracle when the instance is small enough."""
    report = VerificationReport()
    vectors = sorted({tuple(float(x) for x in v) for v in S})
    for v in vectors:
        H = materialize_community(G, c, q, v)
        if H is None:
            report.add(f"realizable {v}", False, "no community at these thresholds")
            continue
        report.add(f"realizable {v}", H.significance == v, f"significance {H.significance}")
        ref = oracle_community(G, c, q, v)
        report.add(f"maximal {v}", ref == H.edge_ids, "" if ref == H.edge_ids else "differs from reference community")
    bad = [(a, b) for a in vectors for b in vectors if dominates(a, b)]
    report.add("non-dominance", not bad, f"{bad[0][0]} dominates {bad[0][1]}" if bad else "")
    try:
        _check_size(G, force)
    except OracleRefused:
        return report
    expected = oracle_skyline(G, c, q, force=True)
    report.add("oracle equality", expected == vectors, f"oracle {sorted(expected)}")
    return report
