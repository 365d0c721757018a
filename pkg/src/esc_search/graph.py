"""Bipartite graphs with positive multi-dimensional edge attributes.

Vertices live in two layers. Internally both layers share one dense id
space ("vid"): upper vertex ``i`` is vid ``i`` and lower vertex ``j`` is vid
``upper_count + j``. Edge ids are row indices into the attribute array and
stay valid in every :class:`WorkingGraph` derived from the graph.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .skyline import ThresholdBox


class GraphFormatError(ValueError):
    """Malformed edge-list input. ``line`` is 1-based, or None."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Layer(enum.Enum):
    UPPER = "u"
    LOWER = "l"

    @classmethod
    def parse(cls, text: str) -> "Layer":
        key = text.strip().lower()
        if key in ("u", "upper"):
            return cls.UPPER
        if key in ("l", "lower"):
            return cls.LOWER
        raise ValueError(f"unknown layer {text!r} (expected 'u' or 'l')")


@dataclass(frozen=True)
class VertexRef:
    layer: Layer
    index: int

    @classmethod
    def upper(cls, index: int) -> "VertexRef":
        return cls(Layer.UPPER, index)

    @classmethod
    def lower(cls, index: int) -> "VertexRef":
        return cls(Layer.LOWER, index)

    def __lt__(self, other):
        return (self.layer.value, self.index) < (other.layer.value, other.index)


@dataclass(frozen=True)
class GraphArrays:
    indptr: np.ndarray
    inc: np.ndarray
    eu: np.ndarray
    ev: np.ndarray
    attrs: np.ndarray
    cols: np.ndarray  # attrs transposed, one contiguous row per dimension


class BipartiteGraph:
    """Immutable bipartite graph; safe to share between concurrent queries."""

    def __init__(
        self,
        upper_count: int,
        lower_count: int,
        edges: Iterable[tuple[int, int]],
        attrs: np.ndarray | Sequence[Sequence[float]] | None = None,
        *,
        dims: int | None = None,
        upper_labels: Sequence[str] | None = None,
        lower_labels: Sequence[str] | None = None,
    ):
        pairs = [(int(u), int(v)) for u, v in edges]
        m = len(pairs)
        if attrs is None:
            if dims is None:
                raise ValueError("either attrs or dims is required")
            attrs = np.ones((m, dims))
        attrs = np.asarray(attrs, dtype=np.float64)
        if m == 0:
            attrs = attrs.reshape(0, dims if dims is not None else (attrs.shape[1] if attrs.ndim == 2 else 1))
        if attrs.ndim != 2 or attrs.shape[0] != m:
            raise ValueError(f"attrs must have shape (m, d) with m={m}")
        if dims is not None and attrs.shape[1] != dims:
            raise ValueError(f"attrs have {attrs.shape[1]} dims, expected {dims}")
        if attrs.shape[1] < 1:
            raise ValueError("attribute dimensionality must be positive")
        if m and not (np.isfinite(attrs).all() and (attrs > 0).all()):
            raise ValueError("attributes must be finite and strictly positive")
        seen = set()
        for u, v in pairs:
            if not (0 <= u < upper_count and 0 <= v < lower_count):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

        self.upper_count = int(upper_count)
        self.lower_count = int(lower_count)
        self.attrs = attrs
        self.attrs.flags.writeable = False
        self.upper_labels = list(upper_labels) if upper_labels is not None else [f"u{i}" for i in range(upper_count)]
        self.lower_labels = list(lower_labels) if lower_labels is not None else [f"v{j}" for j in range(lower_count)]
        self._upper_index = {lab: i for i, lab in enumerate(self.upper_labels)}
        self._lower_index = {lab: j for j, lab in enumerate(self.lower_labels)}

        # Hot-loop structures are plain lists: indexing numpy scalars from
        # Python is several times slower.
        self.eu: list[int] = [u for u, _ in pairs]
        self.ev: list[int] = [self.upper_count + v for _, v in pairs]
        self.adj: list[list[int]] = [[] for _ in range(self.n)]
        for e, (a, b) in enumerate(zip(self.eu, self.ev)):
            self.adj[a].append(e)
            self.adj[b].append(e)
        self.columns: list[list[float]] = attrs.T.tolist()
        self._order: dict[int, list[int]] = {}
        self._bounds: dict[tuple[int, int], list[int]] = {}
        self._flat: GraphArrays | None = None
        self._order_arr: dict[int, np.ndarray] = {}
        self._bounds_arr: dict[tuple[int, int], np.ndarray] = {}

    # sizes -------------------------------------------------------------
    @property
    def n(self) -> int:
        return self.upper_count + self.lower_count

    @property
    def m(self) -> int:
        return len(self.eu)

    @property
    def dims(self) -> int:
        return self.attrs.shape[1]

    @property
    def edges(self) -> list[tuple[int, int, tuple[float, ...]]]:
        nu = self.upper_count
        return [(u, v - nu, tuple(row)) for u, v, row in zip(self.eu, self.ev, self.attrs.tolist())]

    def __repr__(self) -> str:
        return f"BipartiteGraph(|U|={self.upper_count}, |L|={self.lower_count}, m={self.m}, d={self.dims})"

    # vertex helpers ----------------------------------------------------
    def vid(self, ref: VertexRef) -> int:
        if ref.layer is Layer.UPPER:
            if not 0 <= ref.index < self.upper_count:
                raise IndexError(f"upper index {ref.index} out of range")
            return ref.index
        if not 0 <= ref.index < self.lower_count:
            raise IndexError(f"lower index {ref.index} out of range")
        return self.upper_count + ref.index

    def ref(self, vid: int) -> VertexRef:
        if vid < self.upper_count:
            return VertexRef.upper(vid)
        return VertexRef.lower(vid - self.upper_count)

    def is_upper(self, vid: int) -> bool:
        return vid < self.upper_count

    def lookup(self, layer: Layer | str, label: str) -> VertexRef:
        layer = Layer.parse(layer) if isinstance(layer, str) else layer
        table = self._upper_index if layer is Layer.UPPER else self._lower_index
        try:
            return VertexRef(layer, table[label])
        except KeyError:
            raise KeyError(f"no {layer.name.lower()} vertex labelled {label!r}") from None

    def label(self, ref: VertexRef) -> str:
        if ref.layer is Layer.UPPER:
            return self.upper_labels[ref.index]
        return self.lower_labels[ref.index]

    def degree(self, ref: VertexRef) -> int:
        return len(self.adj[self.vid(ref)])

    def endpoints(self, e: int) -> tuple[int, int]:
        """(upper index, lower index) of edge ``e``."""
        return self.eu[e], self.ev[e] - self.upper_count

    # cached per-dimension structures -----------------------------------
    def order(self, dim: int) -> list[int]:
        """Edge ids sorted by ``X[dim]`` ascending, ties by edge id."""
        if dim not in self._order:
            col = self.attrs[:, dim]
            self._order[dim] = np.lexsort((np.arange(self.m), col)).tolist()
        return self._order[dim]

    def degree_bounds(self, alpha: int, beta: int) -> list[int]:
        key = (alpha, beta)
        if key not in self._bounds:
            self._bounds[key] = [alpha] * self.upper_count + [beta] * self.lower_count
        return self._bounds[key]

    @property
    def arrays(self) -> "GraphArrays":
        """Flat numpy view used by the compiled kernels (built once)."""
        if self._flat is None:
            eu = np.asarray(self.eu, dtype=np.int64)
            ev = np.asarray(self.ev, dtype=np.int64)
            ends = np.concatenate([eu, ev])
            ids = np.concatenate([np.arange(self.m), np.arange(self.m)])
            by_vertex = np.lexsort((ids, ends))
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(ends, minlength=self.n), out=indptr[1:])
            self._flat = GraphArrays(indptr, ids[by_vertex].astype(np.int64), eu, ev,
                                     np.ascontiguousarray(self.attrs), np.ascontiguousarray(self.attrs.T))
        return self._flat

    def order_array(self, dim: int) -> np.ndarray:
        if dim not in self._order_arr:
            self._order_arr[dim] = np.asarray(self.order(dim), dtype=np.int64)
        return self._order_arr[dim]

    def bounds_array(self, alpha: int, beta: int) -> np.ndarray:
        key = (alpha, beta)
        if key not in self._bounds_arr:
            self._bounds_arr[key] = np.asarray(self.degree_bounds(alpha, beta), dtype=np.int64)
        return self._bounds_arr[key]

    # derived graphs ----------------------------------------------------
    def subgraph(self, edge_ids: Iterable[int]) -> "BipartiteGraph":
        """New graph over the same vertex set keeping only ``edge_ids``."""
        ids = sorted(set(edge_ids))
        return BipartiteGraph(
            self.upper_count,
            self.lower_count,
            [self.endpoints(e) for e in ids],
            self.attrs[ids] if ids else np.empty((0, self.dims)),
            dims=self.dims,
            upper_labels=self.upper_labels,
            lower_labels=self.lower_labels,
        )

    def project(self, dims: Sequence[int]) -> "BipartiteGraph":
        """Same topology keeping only the listed attribute dimensions."""
        return BipartiteGraph(
            self.upper_count,
            self.lower_count,
            [self.endpoints(e) for e in range(self.m)],
            self.attrs[:, list(dims)],
            dims=len(dims),
            upper_labels=self.upper_labels,
            lower_labels=self.lower_labels,
        )

    def with_attrs(self, attrs: np.ndarray) -> "BipartiteGraph":
        return BipartiteGraph(
            self.upper_count,
            self.lower_count,
            [self.endpoints(e) for e in range(self.m)],
            attrs,
            upper_labels=self.upper_labels,
            lower_labels=self.lower_labels,
        )


class WorkingGraph:
    """Mutable edge subset of a :class:`BipartiteGraph`; single-owner scratch."""

    __slots__ = ("graph", "alive", "deg", "size")

    def __init__(self, graph: BipartiteGraph, alive: bytearray, deg: list[int], size: int):
        self.graph = graph
        self.alive = alive
        self.deg = deg
        self.size = size

    @classmethod
    def from_edges(cls, graph: BipartiteGraph, edge_ids: Iterable[int]) -> "WorkingGraph":
        alive = bytearray(graph.m)
        deg = [0] * graph.n
        size = 0
        eu, ev = graph.eu, graph.ev
        for e in edge_ids:
            if not alive[e]:
                alive[e] = 1
                deg[eu[e]] += 1
                deg[ev[e]] += 1
                size += 1
        return cls(graph, alive, deg, size)

    @classmethod
    def from_mask(cls, graph: BipartiteGraph, mask: np.ndarray) -> "WorkingGraph":
        mask = np.asarray(mask, dtype=bool)
        deg = np.zeros(graph.n, dtype=np.int64)
        if graph.m:
            ends = np.concatenate([np.asarray(graph.eu)[mask], np.asarray(graph.ev)[mask]])
            deg = np.bincount(ends, minlength=graph.n)
        return cls(graph, bytearray(mask.astype(np.uint8).tobytes()), deg.tolist(), int(mask.sum()))

    def copy(self) -> "WorkingGraph":
        return WorkingGraph(self.graph, bytearray(self.alive), list(self.deg), self.size)

    def has_edge(self, e: int) -> bool:
        return bool(self.alive[e])

    def edge_ids(self) -> list[int]:
        return [e for e, a in enumerate(self.alive) if a]

    def remove_edge(self, e: int) -> None:
        if self.alive[e]:
            self.alive[e] = 0
            self.deg[self.graph.eu[e]] -= 1
            self.deg[self.graph.ev[e]] -= 1
            self.size -= 1

    def restore_edge(self, e: int) -> None:
        if not self.alive[e]:
            self.alive[e] = 1
            self.deg[self.graph.eu[e]] += 1
            self.deg[self.graph.ev[e]] += 1
            self.size += 1

    def __len__(self) -> int:
        return self.size


def filtered_view(G: BipartiteGraph, I: ThresholdBox | None = None) -> WorkingGraph:
    """Working copy holding exactly the edges admitted by ``I``."""
    if I is None:
        I = ThresholdBox.vacuous(G.dims)
    if I.dims != G.dims:
        raise ValueError(f"threshold box has {I.dims} dims, graph has {G.dims}")
    return WorkingGraph.from_mask(G, I.mask(G.attrs))


# ----------------------------------------------------------------------
# edge-list files

def _parse_value(tok: str, lineno: int) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise GraphFormatError(f"attribute {tok!r} is not a number", lineno) from None
    if not math.isfinite(x):
        raise GraphFormatError(f"non-finite attribute {tok!r}", lineno)
    if x <= 0:
        raise GraphFormatError(f"non-positive attribute {tok!r}", lineno)
    return x


def _parse_header(line: str) -> int | None:
    body = line.lstrip("#%").strip().replace(" ", "")
    if body.startswith("d="):
        try:
            d = int(body[2:])
        except ValueError:
            return None
        if d < 1:
            raise GraphFormatError(f"bad dimensionality header {line.strip()!r}", 1)
        return d
    return None


def load_edge_list(stream: IO[str] | Iterable[str], dims: int | None = None) -> BipartiteGraph:
    """Parse ``<upper> <lower> <a1> ... <ad>`` lines into a graph.

    An optional ``# d=<k>`` header fixes the dimensionality, otherwise the
    first data line decides it. Lines starting with ``#`` or ``%`` are
    comments. Labels are arbitrary tokens; indices are assigned per layer in
    order of first appearance.
    """
    upper: dict[str, int] = {}
    lower: dict[str, int] = {}
    pairs: list[tuple[int, int]] = []
    rows: list[list[float]] = []
    seen: dict[tuple[int, int], int] = {}
    d = dims
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line[0] in "#%":
            hd = _parse_header(line)
            if hd is not None:
                if rows:
                    raise GraphFormatError("dimensionality header after data", lineno)
                if d is not None and d != hd:
                    raise GraphFormatError(f"header says d={hd}, expected d={d}", lineno)
                d = hd
            continue
        toks = line.split()
        if d is None:
            d = len(toks) - 2
            if d < 1:
                raise GraphFormatError("data line needs two labels and at least one attribute", lineno)
        if len(toks) != d + 2:
            raise GraphFormatError(f"expected {d + 2} tokens, got {len(toks)}", lineno)
        values = [_parse_value(t, lineno) for t in toks[2:]]
        u = upper.setdefault(toks[0], len(upper))
        v = lower.setdefault(toks[1], len(lower))
        if (u, v) in seen:
            raise GraphFormatError(f"duplicate edge {toks[0]} {toks[1]} (first on line {seen[(u, v)]})", lineno)
        seen[(u, v)] = lineno
        pairs.append((u, v))
        rows.append(values)
    if d is None:
        raise GraphFormatError("empty input without a '# d=<k>' header")
    return BipartiteGraph(
        len(upper),
        len(lower),
        pairs,
        np.array(rows, dtype=np.float64).reshape(len(rows), d),
        dims=d,
        upper_labels=list(upper),
        lower_labels=list(lower),
    )


def load_topology(stream: IO[str] | Iterable[str]) -> BipartiteGraph:
    """Read only the first two tokens of every data line (KONECT ``out.*``
    files carry optional weight/timestamp columns). Repeated pairs collapse
    into one edge. Attributes are all ones with ``dims=1``."""
    upper: dict[str, int] = {}
    lower: dict[str, int] = {}
    pairs: dict[tuple[int, int], None] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        toks = line.split()
        if len(toks) < 2:
            raise GraphFormatError("expected at least two labels", lineno)
        u = upper.setdefault(toks[0], len(upper))
        v = lower.setdefault(toks[1], len(lower))
        pairs.setdefault((u, v))
    return BipartiteGraph(
        len(upper), len(lower), list(pairs), dims=1,
        upper_labels=list(upper), lower_labels=list(lower),
    )


def format_number(x: float) -> str:
    if float(x).is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(float(x))


def write_edge_list(G: BipartiteGraph, stream: IO[str]) -> None:
    stream.write(f"# d={G.dims}\n")
    nu = G.upper_count
    for u, v, row in zip(G.eu, G.ev, G.attrs.tolist()):
        vals = " ".join(format_number(x) for x in row)
        stream.write(f"{G.upper_labels[u]} {G.lower_labels[v - nu]} {vals}\n")


# ----------------------------------------------------------------------
# synthetic data

def generate_attributes(
    topology: BipartiteGraph, d: int, lo: float, hi: float, seed: int, *, integral: bool = False
) -> BipartiteGraph:
    """Independent uniform attributes on ``[lo, hi]`` for every edge.

    Deterministic in ``(topology, d, lo, hi, seed, integral)``. With
    ``integral`` the draw is uniform over the integers in ``[lo, hi]``,
    which produces ties and keeps skyline sizes small.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if not (lo > 0 and math.isfinite(lo)):
        raise ValueError(f"lo must be a finite positive number, got {lo}")
    if not (hi >= lo and math.isfinite(hi)):
        raise ValueError(f"hi must be finite and >= lo, got {hi}")
    rng = np.random.default_rng(np.uint64(seed % 2**64))
    if integral:
        a, b = math.ceil(lo), math.floor(hi)
        if a > b:
            raise ValueError(f"no integer lies in [{lo}, {hi}]")
        attrs = rng.integers(a, b, size=(topology.m, d), endpoint=True).astype(np.float64)
    elif hi == lo:
        attrs = np.full((topology.m, d), float(lo))
    else:
        attrs = rng.uniform(lo, hi, size=(topology.m, d))
        np.clip(attrs, lo, hi, out=attrs)
    return topology.with_attrs(attrs)


def random_topology(upper: int, lower: int, edges: int, seed: int) -> BipartiteGraph:
    """Uniform random bipartite graph with exactly ``edges`` distinct edges."""
    total = upper * lower
    if upper < 1 or lower < 1:
        raise ValueError("both layers need at least one vertex")
    if not 0 <= edges <= total:
        raise ValueError(f"cannot place {edges} distinct edges on {upper}x{lower} vertices")
    rng = np.random.default_rng(seed)
    if edges > total // 2:
        cells = rng.choice(total, size=edges, replace=False)
    else:
        chosen: set[int] = set()
        while len(chosen) < edges:
            draw = rng.integers(0, total, size=2 * (edges - len(chosen)))
            for c in draw.tolist():
                if len(chosen) == edges:
                    break
                chosen.add(c)
        cells = np.fromiter(chosen, dtype=np.int64)
        cells.sort()
        rng.shuffle(cells)
    pairs = [(int(c) // lower, int(c) % lower) for c in cells]
    return BipartiteGraph(upper, lower, pairs, dims=1)


def sample_edges(G: BipartiteGraph, fraction: float, seed: int) -> BipartiteGraph:
    """Keep a uniform random ``fraction`` of the edges (vertex set unchanged)."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    k = int(round(G.m * fraction))
    rng = np.random.default_rng(seed)
    keep = rng.choice(G.m, size=k, replace=False)
    return G.subgraph(keep.tolist())
