"""Bit-packed graphs and triangle sets with colex slot indexing.

Edge ``(u, v)`` with ``u < v`` lives in slot ``v*(v-1)/2 + u`` and triple
``(u, v, w)`` with ``u < v < w`` in slot ``C(w,3) + C(v,2) + u``.  Both orders
are prefix-stable: the slots of a graph on ``n`` vertices are the first slots
of the same graph viewed on ``n + 1`` vertices.

All containers are immutable; the ``with_*`` helpers return modified copies.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Sequence

import numpy as np


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def num_triples(n: int) -> int:
    return n * (n - 1) * (n - 2) // 6


# ---------------------------------------------------------------------------
# index arithmetic
# ---------------------------------------------------------------------------


def edge_index(u: int, v: int, n: int | None = None) -> int:
    """Colex slot of the pair ``{u, v}``; ``u < v`` is required."""
    if u == v:
        raise ValueError(f"self-loop ({u}, {v}) has no edge slot")
    if not 0 <= u < v:
        raise ValueError(f"expected 0 <= u < v, got ({u}, {v})")
    if n is not None and v >= n:
        raise ValueError(f"vertex {v} out of range for n={n}")
    return v * (v - 1) // 2 + u


def edge_unindex(i: int) -> tuple[int, int]:
    if i < 0:
        raise ValueError(f"negative edge index {i}")
    v = int((1 + (1 + 8 * i) ** 0.5) / 2)
    while v * (v - 1) // 2 > i:
        v -= 1
    while (v + 1) * v // 2 <= i:
        v += 1
    return i - v * (v - 1) // 2, v


def triple_index(u: int, v: int, w: int, n: int | None = None) -> int:
    if not 0 <= u < v < w:
        raise ValueError(f"expected 0 <= u < v < w, got ({u}, {v}, {w})")
    if n is not None and w >= n:
        raise ValueError(f"vertex {w} out of range for n={n}")
    return comb(w, 3) + comb(v, 2) + u


def triple_unindex(j: int) -> tuple[int, int, int]:
    if j < 0:
        raise ValueError(f"negative triple index {j}")
    w = int(round((6 * j) ** (1 / 3))) + 1
    while comb(w, 3) > j:
        w -= 1
    while comb(w + 1, 3) <= j:
        w += 1
    rest = j - comb(w, 3)
    u, v = edge_unindex(rest)
    return u, v, w


def edge_indices(us, vs) -> np.ndarray:
    """Vectorised :func:`edge_index` for arrays with ``us < vs`` elementwise."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    return vs * (vs - 1) // 2 + us


def edge_unindex_array(idx) -> tuple[np.ndarray, np.ndarray]:
    idx = np.asarray(idx, dtype=np.int64)
    v = np.floor((1.0 + np.sqrt(1.0 + 8.0 * idx)) / 2.0).astype(np.int64)
    for _ in range(2):
        v -= (v * (v - 1) // 2 > idx).astype(np.int64)
        v += ((v + 1) * v // 2 <= idx).astype(np.int64)
    return idx - v * (v - 1) // 2, v


def _c3(w: np.ndarray) -> np.ndarray:
    return w * (w - 1) * (w - 2) // 6


def triple_unindex_array(idx) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    idx = np.asarray(idx, dtype=np.int64)
    w = np.floor(np.cbrt(6.0 * idx)).astype(np.int64) + 1
    for _ in range(3):
        w -= (_c3(w) > idx).astype(np.int64)
        w += (_c3(w + 1) <= idx).astype(np.int64)
    u, v = edge_unindex_array(idx - _c3(w))
    return u, v, w


def triple_indices(us, vs, ws) -> np.ndarray:
    us, vs, ws = (np.asarray(a, dtype=np.int64) for a in (us, vs, ws))
    return _c3(ws) + vs * (vs - 1) // 2 + us


def triangle_edges(t: Sequence[int] | int, n: int | None = None) -> tuple[int, int, int]:
    """The three edge slots of a triple, sorted ascending.

    ``t`` is either a vertex triple or a triple slot index.
    """
    if isinstance(t, (int, np.integer)):
        u, v, w = triple_unindex(int(t))
    else:
        u, v, w = sorted(int(a) for a in t)
        if u == v or v == w:
            raise ValueError(f"degenerate triple {tuple(t)}")
    if n is not None and w >= n:
        raise ValueError(f"vertex {w} out of range for n={n}")
    return tuple(sorted((edge_index(u, v), edge_index(u, w), edge_index(v, w))))


def triangle_edges_array(tidx) -> np.ndarray:
    """(k, 3) array of edge slots for an array of triple slots."""
    u, v, w = triple_unindex_array(tidx)
    out = np.empty((u.size, 3), dtype=np.int64)
    out[:, 0] = edge_indices(u, v)
    out[:, 1] = edge_indices(u, w)
    out[:, 2] = edge_indices(v, w)
    return out


# ---------------------------------------------------------------------------
# bit containers
# ---------------------------------------------------------------------------


def _pack(mask: np.ndarray) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool).ravel()
    nwords = (mask.size + 63) // 64
    buf = np.zeros(nwords * 8, dtype=np.uint8)
    packed = np.packbits(mask, bitorder="little")
    buf[: packed.size] = packed
    words = buf.view("<u8").astype(np.uint64)
    words.flags.writeable = False
    return words


def _unpack(words: np.ndarray, size: int) -> np.ndarray:
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, count=size, bitorder="little").astype(bool)


class _BitSet:
    """Fixed-size bitset over ``size`` slots, packed into 64-bit words."""

    __slots__ = ("n", "words")

    def __init__(self, n: int, words: np.ndarray):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        words = np.asarray(words, dtype=np.uint64)
        if words.size != (self._slots(n) + 63) // 64:
            raise ValueError("word count does not match slot count")
        if words.flags.writeable:
            words = words.copy()
            words.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "words", words)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @staticmethod
    def _slots(n: int) -> int:
        raise NotImplementedError

    @property
    def size(self) -> int:
        return self._slots(self.n)

    @classmethod
    def from_mask(cls, n: int, mask):
        mask = np.asarray(mask, dtype=bool)
        if mask.size != cls._slots(n):
            raise ValueError(f"mask of length {mask.size} for {cls._slots(n)} slots")
        return cls(n, _pack(mask))

    @classmethod
    def from_indices(cls, n: int, idx: Iterable[int]):
        mask = np.zeros(cls._slots(n), dtype=bool)
        idx = np.asarray(list(idx) if not isinstance(idx, np.ndarray) else idx, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= mask.size):
            raise ValueError("slot index out of range")
        mask[idx] = True
        return cls.from_mask(n, mask)

    @classmethod
    def from_key(cls, n: int, key: int):
        size = cls._slots(n)
        if key < 0 or key >> size:
            raise ValueError(f"key {key} is not a valid encoding for n={n}")
        nwords = (size + 63) // 64
        words = np.frombuffer(int(key).to_bytes(nwords * 8, "little"), dtype="<u8")
        return cls(n, words.astype(np.uint64))

    @classmethod
    def empty(cls, n: int):
        return cls(n, np.zeros((cls._slots(n) + 63) // 64, dtype=np.uint64))

    @classmethod
    def full(cls, n: int):
        return cls.from_mask(n, np.ones(cls._slots(n), dtype=bool))

    def mask(self) -> np.ndarray:
        return _unpack(self.words, self.size)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask())

    @property
    def key(self) -> int:
        """Canonical integer encoding: bit ``i`` is slot ``i``."""
        return int.from_bytes(np.ascontiguousarray(self.words, dtype="<u8").tobytes(), "little")

    def count(self) -> int:
        return int(sum(int(w).bit_count() for w in self.words))

    def __len__(self) -> int:
        return self.count()

    def __contains__(self, i: int) -> bool:
        i = int(i)
        if not 0 <= i < self.size:
            return False
        return bool((int(self.words[i >> 6]) >> (i & 63)) & 1)

    def with_slots(self, idx, present: bool = True):
        mask = self.mask()
        mask[np.asarray(idx, dtype=np.int64)] = present
        return type(self).from_mask(self.n, mask)

    def issubset(self, other: "_BitSet") -> bool:
        self._check_compatible(other)
        return not np.any(self.words & ~other.words)

    def union(self, other):
        self._check_compatible(other)
        return type(self)(self.n, self.words | other.words)

    def intersection(self, other):
        self._check_compatible(other)
        return type(self)(self.n, self.words & other.words)

    def difference(self, other):
        self._check_compatible(other)
        return type(self)(self.n, self.words & ~other.words)

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __le__ = issubset

    def _check_compatible(self, other):
        if self.n != other.n:
            raise ValueError(f"vertex counts differ: {self.n} vs {other.n}")

    def __eq__(self, other):
        if not isinstance(other, _BitSet) or other._slots is not self._slots:
            return NotImplemented
        return self.n == other.n and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((type(self).__name__, self.n, self.words.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, count={self.count()})"


class Graph(_BitSet):
    """Simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ()

    @staticmethod
    def _slots(n: int) -> int:
        return num_pairs(n)

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]]):
        idx = []
        for u, v in pairs:
            u, v = int(u), int(v)
            if u > v:
                u, v = v, u
            idx.append(edge_index(u, v, n))
        return cls.from_indices(n, idx)

    @classmethod
    def from_adjacency(cls, adj):
        adj = np.asarray(adj, dtype=bool)
        n = adj.shape[0]
        u, v = edge_unindex_array(np.arange(num_pairs(n)))
        return cls.from_mask(n, adj[u, v])

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.full(n)

    def num_edges(self) -> int:
        return self.count()

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return edge_index(u, v, self.n) in self

    def edges(self) -> list[tuple[int, int]]:
        u, v = edge_unindex_array(self.indices())
        return list(zip(u.tolist(), v.tolist()))

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        u, v = edge_unindex_array(self.indices())
        adj[u, v] = True
        adj[v, u] = True
        return adj

    def with_edges(self, idx, present: bool = True) -> "Graph":
        return self.with_slots(idx, present)

    def complement(self) -> "Graph":
        return type(self).from_mask(self.n, ~self.mask())

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``i`` renamed to ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise ValueError("perm must be a permutation of range(n)")
        adj = self.adjacency()
        out = np.zeros_like(adj)
        out[np.ix_(perm, perm)] = adj
        return Graph.from_adjacency(out)


class EdgeSet(Graph):
    """Edge indicator of the union of a triangle set's edges."""

    __slots__ = ()


class TriangleSet(_BitSet):
    """Set of vertex triples on ``0..n-1``."""

    __slots__ = ()

    @staticmethod
    def _slots(n: int) -> int:
        return num_triples(n)

    @classmethod
    def from_triples(cls, n: int, triples: Iterable[Sequence[int]]):
        idx = []
        for t in triples:
            u, v, w = sorted(int(a) for a in t)
            idx.append(triple_index(u, v, w, n))
        return cls.from_indices(n, idx)

    def triples(self) -> list[tuple[int, int, int]]:
        u, v, w = triple_unindex_array(self.indices())
        return list(zip(u.tolist(), v.tolist(), w.tolist()))


def edge_union(x: TriangleSet) -> EdgeSet:
    """``E(x)``: every edge covered by at least one selected triple."""
    mask = np.zeros(num_pairs(x.n), dtype=bool)
    idx = x.indices()
    if idx.size:
        mask[triangle_edges_array(idx).ravel()] = True
    return EdgeSet.from_mask(x.n, mask)


def wedge_set(G: Graph, u: int, v: int) -> list[int]:
    """Vertices adjacent to both ``u`` and ``v``."""
    if u == v:
        raise ValueError("wedge set needs two distinct vertices")
    if not (0 <= u < G.n and 0 <= v < G.n):
        raise ValueError("vertex out of range")
    adj = G.adjacency()
    common = adj[u] & adj[v]
    common[[u, v]] = False
    return np.flatnonzero(common).tolist()


def common_neighbor_counts(G: Graph) -> np.ndarray:
    """(n, n) matrix of ``|W_G(i, j)|``; the diagonal holds degrees."""
    a = G.adjacency().astype(np.float64)
    return np.rint(a @ a).astype(np.int64)


def is_uniformly_2star_dense(G: Graph, c: float) -> bool:
    """True iff every vertex pair has at least ``c*(n-2)`` common neighbours."""
    n = G.n
    if n < 2:
        return True
    cn = common_neighbor_counts(G)
    iu = np.triu_indices(n, 1)
    return bool(np.all(cn[iu] >= c * (n - 2)))


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def format_graph(G: Graph, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    edges = G.edges()
    lines.append(f"{G.n} {len(edges)}")
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"``.

    Lines starting with ``#`` are ignored.  Self-loops, ``u > v``, duplicate
    edges, out-of-range vertices and a wrong edge count raise ``ValueError``.
    """
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError("missing 'n m' header line")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header declares {m} edges, found {len(body)}")
    seen = set()
    for k, row in enumerate(body, start=2):
        if len(row) != 2:
            raise ValueError(f"line {k}: expected 'u v'")
        u, v = int(row[0]), int(row[1])
        if u == v:
            raise ValueError(f"line {k}: self-loop {u}")
        if u > v:
            raise ValueError(f"line {k}: endpoints must satisfy u < v")
        i = edge_index(u, v, n)
        if i in seen:
            raise ValueError(f"line {k}: duplicate edge ({u}, {v})")
        seen.add(i)
    return Graph.from_indices(n, sorted(seen))


def write_graph(path, G: Graph, comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(G, comments))


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())
