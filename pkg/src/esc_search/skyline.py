"""Significance vectors, dominance and skyline maintenance.

Vectors are plain tuples of floats. A :class:`ThresholdBox` holds one lower
bound per dimension (strict or not) and is how every search routine narrows
the edge universe it works on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


def significance(attrs: Iterable[Sequence[float]]) -> tuple[float, ...]:
    """Component-wise minimum over a non-empty collection of attribute vectors."""
    attrs = list(attrs)
    if not attrs:
        raise ValueError("significance of an empty edge set is undefined")
    return tuple(float(min(col)) for col in zip(*attrs))


def _check_dims(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} != {len(b)}")


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff ``a`` is >= ``b`` everywhere and > somewhere."""
    _check_dims(a, b)
    strict = False
    for x, y in zip(a, b):
        if x < y:
            return False
        if x > y:
            strict = True
    return strict


def covers(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff ``a`` dominates or equals ``b``."""
    return all(x >= y for x, y in zip(a, b))


class SkylineSet:
    """A set of pairwise non-dominated vectors.

    ``add`` keeps the invariant: a vector covered by a member is dropped,
    otherwise it goes in and evicts everything it dominates.
    """

    __slots__ = ("_items",)

    def __init__(self, vectors: Iterable[Sequence[float]] = ()):
        self._items: set[tuple] = set()
        for v in vectors:
            self.add(v)

    def add(self, v: Sequence[float]) -> bool:
        v = tuple(v)
        for s in self._items:
            if covers(s, v):
                return False
        self._items = {s for s in self._items if not dominates(v, s)}
        self._items.add(v)
        return True

    def covers(self, v: Sequence[float]) -> bool:
        return any(covers(s, v) for s in self._items)

    def __contains__(self, v) -> bool:
        return tuple(v) in self._items

    def __iter__(self) -> Iterator[tuple]:
        return iter(sorted(self._items))

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other) -> bool:
        if isinstance(other, SkylineSet):
            return self._items == other._items
        try:
            return self._items == {tuple(v) for v in other}
        except TypeError:
            return NotImplemented

    def __repr__(self) -> str:
        return f"SkylineSet({sorted(self._items)!r})"

    def as_set(self) -> frozenset:
        return frozenset(self._items)


def insert_skyline(S: Iterable[Sequence[float]], v: Sequence[float]) -> SkylineSet:
    """Return a new skyline set equal to ``S`` with ``v`` inserted."""
    out = SkylineSet(S)
    out.add(v)
    return out


def skyline(vectors: Iterable[Sequence[float]]) -> SkylineSet:
    return SkylineSet(vectors)


def check_lemma1_order(results: Iterable[Sequence[float]]) -> bool:
    """2-d skyline shape: sorted by the first component ascending, the first
    components strictly increase and the second strictly decrease."""
    pts = sorted(tuple(r) for r in results)
    for (a1, a2), (b1, b2) in zip(pts, pts[1:]):
        if not (a1 < b1 and a2 > b2):
            return False
    return True


def divide_space(corners: Iterable[Sequence[float]], p: Sequence[float]) -> set[tuple]:
    """Split every corner covered by ``p`` into one corner per dimension.

    A corner ``c`` stands for the open region ``{x : x > c}``. When
    ``c <= p`` component-wise, the part of that region not dominated by
    ``p`` is the union of the regions of ``c`` with coordinate ``i``
    raised to ``p[i]``. Uncovered corners pass through.
    """
    p = tuple(p)
    out: set[tuple] = set()
    for c in corners:
        c = tuple(c)
        _check_dims(c, p)
        if covers(p, c):
            for i in range(len(c)):
                out.add(c[:i] + (p[i],) + c[i + 1:])
        else:
            out.add(c)
    return out


def minimal_corners(corners: Iterable[tuple]) -> set[tuple]:
    """Drop corners whose region is contained in another corner's region."""
    cs = sorted(set(corners))
    keep = []
    for c in cs:
        if not any(covers(c, k) for k in keep):
            keep = [k for k in keep if not covers(k, c)]
            keep.append(c)
    return set(keep)


@dataclass(frozen=True)
class ThresholdBox:
    """Per-dimension lower bounds; ``strict[i]`` selects ``>`` over ``>=``."""

    bounds: tuple[float, ...]
    strict: tuple[bool, ...]

    def __post_init__(self):
        if len(self.bounds) != len(self.strict):
            raise ValueError("bounds and strict flags differ in length")
        for b in self.bounds:
            if not np.isfinite(b) or b < 0:
                raise ValueError(f"threshold bound must be finite and >= 0, got {b}")

    @classmethod
    def vacuous(cls, dims: int) -> "ThresholdBox":
        return cls((0.0,) * dims, (False,) * dims)

    @classmethod
    def at_least(cls, values: Sequence[float]) -> "ThresholdBox":
        return cls(tuple(float(v) for v in values), (False,) * len(values))

    @property
    def dims(self) -> int:
        return len(self.bounds)

    def tighten(self, dim: int, bound: float, strict: bool = False) -> "ThresholdBox":
        """Intersect with ``X[dim] > bound`` (strict) or ``X[dim] >= bound``."""
        old_b, old_s = self.bounds[dim], self.strict[dim]
        if bound < old_b or (bound == old_b and old_s):
            return self
        bounds = list(self.bounds)
        flags = list(self.strict)
        bounds[dim] = float(bound)
        flags[dim] = bool(strict)
        return ThresholdBox(tuple(bounds), tuple(flags))

    def admits(self, vec: Sequence[float]) -> bool:
        _check_dims(vec, self.bounds)
        for x, b, s in zip(vec, self.bounds, self.strict):
            if (x <= b) if s else (x < b):
                return False
        return True

    def mask(self, attrs: np.ndarray) -> np.ndarray:
        """Boolean row mask of an ``(m, d)`` attribute array."""
        if attrs.shape[1] != self.dims:
            raise ValueError(f"dimension mismatch: box has {self.dims}, attrs have {attrs.shape[1]}")
        keep = np.ones(attrs.shape[0], dtype=bool)
        for i, (b, s) in enumerate(zip(self.bounds, self.strict)):
            keep &= (attrs[:, i] > b) if s else (attrs[:, i] >= b)
        return keep


def brute_skyline(vectors: Iterable[Sequence[float]]) -> set[tuple]:
    """Quadratic reference skyline, used to cross-check :class:`SkylineSet`."""
    vs = {tuple(v) for v in vectors}
    return {v for v in vs if not any(dominates(w, v) for w in vs)}

