"""How skyline size and search cost grow with the number of attributes.

Generates a sparse random bipartite graph, draws queries from its
(2, 2)-core and runs both families for d = 1..4.
"""

import statistics
import sys

from esc_search import generate_attributes, random_topology
from esc_search.cli import run_bench, warm_up


def main(edges: int = 5_000, queries: int = 10, seed: int = 1) -> None:
    topo = random_topology(edges * 2 // 7, edges * 10 // 26, edges, seed)
    G = generate_attributes(topo, 4, 1, 100, seed, integral=True)
    warm_up()
    rows = run_bench(G, dataset="demo", d_values=(1, 2, 3, 4), queries=queries, seed=seed)
    print(f"{'d':>2} {'algo':>7} {'median ms':>10} {'median ESCs':>12} {'median iters':>13}")
    for d in (1, 2, 3, 4):
        for algo in ("peel", "expand"):
            rs = [r for r in rows if r["d"] == d and r["algo"] == algo]
            ms = statistics.median(r["runtime_ms"] for r in rs)
            n = statistics.median(r["result_count"] for r in rs)
            it = statistics.median(r["iterations"] for r in rs)
            print(f"{d:>2} {algo:>7} {ms:>10.1f} {n:>12} {it:>13}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:]))
