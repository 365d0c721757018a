"""Compiled inner loops for the search routines.

Every kernel works on the flat arrays of :class:`BipartiteGraph.arrays`:
``indptr``/``inc`` (CSR incidence lists holding edge ids), ``eu``/``ev``
(endpoint vertex ids), ``attrs`` and ``bounds`` (per-vertex degree bound).
``alive`` is a uint8 edge mask and ``deg`` the matching degree array; the
kernels mutate both in place.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _drain(indptr, inc, eu, ev, alive, deg, bounds, stack, sp, log, nlog):
    # delete every vertex that sits below its bound, cascading to neighbours
    while sp > 0:
        sp -= 1
        v = stack[sp]
        if deg[v] >= bounds[v] or deg[v] == 0:
            continue
        for k in range(indptr[v], indptr[v + 1]):
            e = inc[k]
            if alive[e]:
                alive[e] = 0
                a = eu[e]
                b = ev[e]
                deg[a] -= 1
                deg[b] -= 1
                log[nlog] = e
                nlog += 1
                o = b if a == v else a
                if 0 < deg[o] < bounds[o]:
                    stack[sp] = o
                    sp += 1
    return nlog


@njit(cache=True)
def filter_box(attrs, lo, strict, eu, ev, n):
    """Edge mask and degrees of the edges admitted by a threshold box."""
    m, d = attrs.shape
    alive = np.zeros(m, np.uint8)
    deg = np.zeros(n, np.int64)
    for e in range(m):
        ok = True
        for i in range(d):
            x = attrs[e, i]
            if (x <= lo[i]) if strict[i] else (x < lo[i]):
                ok = False
                break
        if ok:
            alive[e] = 1
            deg[eu[e]] += 1
            deg[ev[e]] += 1
    return alive, deg


@njit(cache=True)
def _admitted(attrs, e, lo, strict):
    for i in range(attrs.shape[1]):
        x = attrs[e, i]
        if (x <= lo[i]) if strict[i] else (x < lo[i]):
            return False
    return True


@njit(cache=True)
def prune(indptr, inc, eu, ev, alive, deg, bounds):
    """Reduce ``alive`` to its maximal core; returns the number of deletions."""
    n = deg.shape[0]
    stack = np.empty(n + alive.shape[0] + 2, np.int64)
    log = np.empty(alive.shape[0] + 1, np.int64)
    sp = 0
    for v in range(n):
        if 0 < deg[v] < bounds[v]:
            stack[sp] = v
            sp += 1
    return _drain(indptr, inc, eu, ev, alive, deg, bounds, stack, sp, log, 0)


@njit(cache=True)
def peel_max(indptr, inc, eu, ev, alive, deg, bounds, order, col, qv):
    """Largest threshold on ``col`` keeping ``qv`` inside a core.

    Returns ``(found, value)``. Edges go in ``order`` (ascending value, ties
    by id); the value of the first deletion that sinks ``qv`` is the answer.
    """
    prune(indptr, inc, eu, ev, alive, deg, bounds)
    if deg[qv] < bounds[qv]:
        return False, 0.0
    m = alive.shape[0]
    stack = np.empty(deg.shape[0] + m + 2, np.int64)
    log = np.empty(m + 1, np.int64)
    for k in range(order.shape[0]):
        e = order[k]
        if not alive[e]:
            continue
        alive[e] = 0
        deg[eu[e]] -= 1
        deg[ev[e]] -= 1
        stack[0] = eu[e]
        stack[1] = ev[e]
        _drain(indptr, inc, eu, ev, alive, deg, bounds, stack, 2, log, 0)
        if deg[qv] < bounds[qv]:
            return True, col[e]
    return False, 0.0


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def candidates(indptr, inc, eu, ev, alive, deg, bounds, order, col, qv):
    """Candidate minima of ``col`` and their anchor edges.

    A forward peel stamps each edge with the explicit-deletion step that
    removed it; a backward union-find pass then checks, at the first step
    of each value ``w``, which ``w``-valued edges were still present and
    connected to ``qv``. Returns parallel arrays ``(values, edges)`` with
    one row per anchor, values ascending.
    """
    m = alive.shape[0]
    n = deg.shape[0]
    prune(indptr, inc, eu, ev, alive, deg, bounds)
    if deg[qv] < bounds[qv]:
        return np.empty(0, np.float64), np.empty(0, np.int64)
    never = m + 2
    stamp = np.full(m, -1, np.int64)
    for e in range(m):
        if alive[e]:
            stamp[e] = never
    # start of each run of equal values in ``order``
    run = np.empty(order.shape[0], np.int64)
    for k in range(order.shape[0]):
        if k > 0 and col[order[k]] == col[order[k - 1]]:
            run[k] = run[k - 1]
        else:
            run[k] = k
    first_pos = np.full(m + 1, -1, np.int64)  # step -> position in order
    stack = np.empty(n + m + 2, np.int64)
    log = np.empty(m + 1, np.int64)
    step = 0
    last_val = -1.0
    for k in range(order.shape[0]):
        e = order[k]
        if not alive[e]:
            continue
        step += 1
        if step == 1 or col[e] != last_val:
            first_pos[step] = k
            last_val = col[e]
        alive[e] = 0
        deg[eu[e]] -= 1
        deg[ev[e]] -= 1
        log[0] = e
        stack[0] = eu[e]
        stack[1] = ev[e]
        nlog = _drain(indptr, inc, eu, ev, alive, deg, bounds, stack, 2, log, 1)
        for i in range(nlog):
            stamp[log[i]] = step
        if deg[qv] < bounds[qv]:
            break
    last = step

    # edges grouped by stamp, latest first
    live = np.empty(m, np.int64)
    cnt = 0
    for e in range(m):
        if stamp[e] >= 0:
            live[cnt] = e
            cnt += 1
    live = live[:cnt]
    keys = np.empty(cnt, np.int64)
    for i in range(cnt):
        keys[i] = -stamp[live[i]]
    live = live[np.argsort(keys, kind="mergesort")]

    parent = np.arange(n)
    out_v = np.empty(cnt, np.float64)
    out_e = np.empty(cnt, np.int64)
    nout = 0
    p = 0
    for s in range(last, 0, -1):
        while p < cnt and stamp[live[p]] >= s:
            e = live[p]
            ra = _find(parent, eu[e])
            rb = _find(parent, ev[e])
            if ra != rb:
                parent[ra] = rb
            p += 1
        k = first_pos[s]
        if k < 0:
            continue
        w = col[order[k]]
        rq = _find(parent, qv)
        j = run[k]
        while j < order.shape[0] and col[order[j]] == w:
            e = order[j]
            if stamp[e] >= s and _find(parent, eu[e]) == rq:
                out_v[nout] = w
                out_e[nout] = e
                nout += 1
            j += 1
    out_v = out_v[:nout]
    out_e = out_e[:nout]
    idx = np.argsort(out_v, kind="mergesort")
    return out_v[idx], out_e[idx]


@njit(cache=True)
def _collect(indptr, inc, eu, ev, mask, qv, seen, verts, edges):
    # BFS over edges flagged in ``mask``; each edge kept once (from its upper end)
    nv = 1
    ne = 0
    verts[0] = qv
    seen[qv] = 1
    i = 0
    while i < nv:
        v = verts[i]
        i += 1
        for k in range(indptr[v], indptr[v + 1]):
            e = inc[k]
            if mask[e]:
                a = eu[e]
                if v == a:
                    edges[ne] = e
                    ne += 1
                    o = ev[e]
                else:
                    o = a
                if not seen[o]:
                    seen[o] = 1
                    verts[nv] = o
                    nv += 1
    for j in range(nv):
        seen[verts[j]] = 0
    return nv, ne


@njit(cache=True)
def _load(edges, ne, eu, ev, walive, wdeg, verts, nv):
    for j in range(nv):
        wdeg[verts[j]] = 0
    for j in range(ne):
        e = edges[j]
        walive[e] = 1
        wdeg[eu[e]] += 1
        wdeg[ev[e]] += 1


@njit(cache=True)
def _unload(edges, ne, walive):
    for j in range(ne):
        walive[edges[j]] = 0


@njit(cache=True)
def _core_in(indptr, inc, eu, ev, bounds, edges, ne, verts, nv, walive, wdeg, stack, log):
    # load an edge list as a working graph and prune it to its core
    _load(edges, ne, eu, ev, walive, wdeg, verts, nv)
    sp = 0
    for j in range(nv):
        v = verts[j]
        if 0 < wdeg[v] < bounds[v]:
            stack[sp] = v
            sp += 1
    _drain(indptr, inc, eu, ev, walive, wdeg, bounds, stack, sp, log, 0)


@njit(cache=True)
def expand_one(indptr, inc, eu, ev, attrs, lo, strict, dim, order, bounds, nu, qv, top, alpha, beta, gate):
    """Grow edges in decreasing ``attrs[:, dim]`` order from threshold ``top``
    until ``qv`` has a core, then strip it to the exact best threshold.

    Returns ``(edges, attempts, cores)``; ``edges`` is empty when no core
    exists. With ``gate`` set, extraction is only attempted when the
    component of ``qv`` passes the edge-surplus and heavy-vertex tests.
    """
    m = attrs.shape[0]
    n = bounds.shape[0]
    col = attrs[:, dim]
    parent = np.arange(n)
    # per root: edges, upper, lower, heavy upper, heavy lower
    cnt = np.zeros((n, 5), np.int64)
    adeg = np.zeros(n, np.int64)
    acc = np.zeros(m, np.uint8)
    walive = np.zeros(m, np.uint8)
    wdeg = np.zeros(n, np.int64)
    seen = np.zeros(n, np.uint8)
    verts = np.empty(n, np.int64)
    edges = np.empty(m, np.int64)
    hverts = np.empty(n, np.int64)
    hedges = np.empty(m, np.int64)
    stack = np.empty(n + m + 2, np.int64)
    log = np.empty(m + 1, np.int64)
    surplus = alpha * beta - alpha - beta

    pos = order.shape[0] - 1
    thr = top
    tried = 0
    failed = 0
    attempts = 0
    cores = 0
    nh = 0
    nhv = 0
    while pos >= 0:
        while pos >= 0 and col[order[pos]] >= thr:
            e = order[pos]
            pos -= 1
            if not _admitted(attrs, e, lo, strict):
                continue
            acc[e] = 1
            for x in (eu[e], ev[e]):
                if adeg[x] == 0:
                    if x < nu:
                        cnt[x, 1] = 1
                    else:
                        cnt[x, 2] = 1
                adeg[x] += 1
                if adeg[x] == bounds[x]:
                    r = _find(parent, x)
                    cnt[r, 3 if x < nu else 4] += 1
            ra = _find(parent, eu[e])
            rb = _find(parent, ev[e])
            if ra != rb:
                for i in range(5):
                    cnt[rb, i] += cnt[ra, i]
                parent[ra] = rb
            cnt[rb, 0] += 1
        while pos >= 0 and not _admitted(attrs, order[pos], lo, strict):
            pos -= 1
        if adeg[qv] > 0:
            r = _find(parent, qv)
            E = cnt[r, 0]
            if E > tried and (E >= 2 * failed or pos < 0):
                ok = True
                if gate:
                    ok = surplus <= E - cnt[r, 1] - cnt[r, 2] and cnt[r, 3] >= beta and cnt[r, 4] >= alpha
                if ok:
                    tried = E
                    attempts += 1
                    cores += 1
                    nv, ne = _collect(indptr, inc, eu, ev, acc, qv, seen, verts, edges)
                    _core_in(indptr, inc, eu, ev, bounds, edges, ne, verts, nv, walive, wdeg, stack, log)
                    if wdeg[qv] >= bounds[qv]:
                        nhv, nh = _collect(indptr, inc, eu, ev, walive, qv, seen, hverts, hedges)
                        _unload(edges, ne, walive)
                        break
                    _unload(edges, ne, walive)
                    failed = E
        if pos >= 0:
            thr = col[order[pos]]
    if nh == 0:
        return np.empty(0, np.int64), attempts, cores

    # strip the found core in ascending (value, id) order
    h = np.sort(hedges[:nh])
    keys = np.empty(nh, np.float64)
    for j in range(nh):
        keys[j] = col[h[j]]
    h = h[np.argsort(keys, kind="mergesort")]
    _load(h, nh, eu, ev, walive, wdeg, hverts, nhv)
    cores += 1
    t = col[h[0]]
    for j in range(nh):
        e = h[j]
        if not walive[e]:
            continue
        walive[e] = 0
        wdeg[eu[e]] -= 1
        wdeg[ev[e]] -= 1
        stack[0] = eu[e]
        stack[1] = ev[e]
        _drain(indptr, inc, eu, ev, walive, wdeg, bounds, stack, 2, log, 0)
        if wdeg[qv] < bounds[qv]:
            t = col[e]
            break
    _unload(h, nh, walive)

    # maximal core of q at threshold t within the found core
    k = 0
    for j in range(nh):
        if col[h[j]] >= t:
            edges[k] = h[j]
            k += 1
    cores += 1
    _core_in(indptr, inc, eu, ev, bounds, edges, k, hverts, nhv, walive, wdeg, stack, log)
    nv, ne = _collect(indptr, inc, eu, ev, walive, qv, seen, verts, hedges)
    _unload(edges, k, walive)
    return hedges[:ne].copy(), attempts, cores
