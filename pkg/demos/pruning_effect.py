"""Count the work pruning saves on random small instances.

Both runs must return the same skyline; only the iteration counts differ.
"""

import numpy as np

from esc_search import BipartiteGraph, DegreeConstraint, Stats, VertexRef, expand_search, peel_search


def instance(rng):
    nu, nl = 12, 12
    cells = rng.choice(nu * nl, 60, replace=False)
    pairs = [(int(x) // nl, int(x) % nl) for x in cells]
    G = BipartiteGraph(nu, nl, pairs, rng.integers(1, 20, size=(60, 3)).astype(float))
    return G, DegreeConstraint(2, 2), VertexRef.upper(int(rng.integers(nu)))


if __name__ == "__main__":
    rng = np.random.default_rng(0)
    totals = {name: [0, 0] for name in ("peel", "expand")}
    for _ in range(100):
        G, c, q = instance(rng)
        for name, fam in (("peel", peel_search), ("expand", expand_search)):
            on, off = Stats(), Stats()
            assert fam(G, c, q, stats=on) == fam(G, c, q, prune=False, stats=off)
            totals[name][0] += on.iterations
            totals[name][1] += off.iterations
    for name, (on, off) in totals.items():
        print(f"{name:>6}: {on} iterations with pruning, {off} without ({100 * (1 - on / off):.0f}% saved)")
