"""Samplers for G(n,p), RGT(n,p,p'), planted variants, GPS and RIG."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import (
    Graph,
    TriangleSet,
    edge_indices,
    num_pairs,
    num_triples,
    triangle_edges_array,
)


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class ModelParams:
    n: int
    p: float
    p_prime: float = 0.0
    k: int = 0
    q: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        for name in ("p", "p_prime", "q"):
            _check_prob(name, getattr(self, name))
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k must lie in [0, n], got {self.k}")

    def as_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "p_prime": self.p_prime, "k": self.k, "q": self.q, "seed": self.seed}


@dataclass(frozen=True)
class PlantedSignal:
    """Ordered ``(edge index, probability)`` pairs; each edge resampled in turn."""

    entries: tuple[tuple[int, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        entries = tuple((int(e), float(pr)) for e, pr in self.entries)
        seen = set()
        for e, pr in entries:
            if e < 0:
                raise ValueError(f"invalid edge index {e}")
            if e in seen:
                raise ValueError(f"duplicate edge {e} in planted signal")
            seen.add(e)
            _check_prob("signal probability", pr)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def clique(cls, S: Sequence[int], q: float) -> "PlantedSignal":
        """Every pair inside ``S`` resampled at the constant density ``q``."""
        return cls(tuple((int(e), q) for e in _pairs_within(S)))

    def __len__(self):
        return len(self.entries)


def _pairs_within(S: Sequence[int]) -> np.ndarray:
    s = np.unique(np.asarray(S, dtype=np.int64))
    if s.size < 2:
        return np.empty(0, dtype=np.int64)
    iu, ju = np.triu_indices(s.size, 1)
    return np.sort(edge_indices(s[iu], s[ju]))


def sample_er(n: int, p: float, rng: np.random.Generator) -> Graph:
    _check_prob("p", p)
    return Graph.from_mask(n, rng.random(num_pairs(n)) < p)


def sample_triples(n: int, p_prime: float, rng: np.random.Generator) -> np.ndarray:
    """Slots of an i.i.d. Bern(p') subset of all triples, ascending.

    Uses geometric gaps between hits, so the cost scales with the number of
    selected triples rather than with ``C(n, 3)``.
    """
    _check_prob("p_prime", p_prime)
    total = num_triples(n)
    if p_prime == 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    if p_prime == 1.0:
        return np.arange(total, dtype=np.int64)
    mean = total * p_prime
    batch = int(mean + 6.0 * np.sqrt(mean) + 16)
    hits = []
    pos = -1
    while True:
        gaps = rng.geometric(p_prime, size=batch)
        cum = pos + np.cumsum(gaps)
        inside = cum[cum < total]
        hits.append(inside)
        if inside.size < cum.size:
            break
        pos = int(cum[-1])
    return np.concatenate(hits).astype(np.int64)


def add_random_triangles(G: Graph, p_prime: float, rng: np.random.Generator) -> tuple[Graph, TriangleSet]:
    """Add the three edges of each triple independently with probability ``p_prime``."""
    tidx = sample_triples(G.n, p_prime, rng)
    T = TriangleSet.from_indices(G.n, tidx)
    if tidx.size == 0:
        return G, T
    mask = G.mask()
    mask[triangle_edges_array(tidx).ravel()] = True
    return Graph.from_mask(G.n, mask), T


def sample_rgt(n: int, p: float, p_prime: float, rng: np.random.Generator) -> tuple[Graph, TriangleSet]:
    """G(n,p) with each triple's edges added independently w.p. ``p_prime``.

    Returns the graph together with the indicator of the added triples.
    """
    G = sample_er(n, p, rng)
    return add_random_triangles(G, p_prime, rng)


def plant_dense_subgraph(G: Graph, S: Sequence[int], q: float, rng: np.random.Generator) -> Graph:
    """Erase the edges inside ``S`` and include each independently w.p. ``q``."""
    _check_prob("q", q)
    if len(S) and (min(S) < 0 or max(S) >= G.n):
        raise ValueError("planted set has vertices out of range")
    inside = _pairs_within(S)
    mask = G.mask()
    mask[inside] = rng.random(inside.size) < q
    return Graph.from_mask(G.n, mask)


def plant_random(G: Graph, k: int, q: float, rng: np.random.Generator) -> tuple[Graph, np.ndarray]:
    """Plant at a uniformly random ``k``-subset; returns the graph and the subset."""
    if not 0 <= k <= G.n:
        raise ValueError(f"k must lie in [0, {G.n}]")
    S = np.sort(rng.choice(G.n, size=k, replace=False))
    return plant_dense_subgraph(G, S, q, rng), S


def gps_apply(G: Graph, sig: PlantedSignal, rng: np.random.Generator) -> Graph:
    """Resample each listed edge, in order, to be present with its own probability."""
    if not len(sig):
        return G
    edges = np.fromiter((e for e, _ in sig.entries), dtype=np.int64, count=len(sig))
    probs = np.fromiter((pr for _, pr in sig.entries), dtype=np.float64, count=len(sig))
    if edges.max() >= G.size:
        raise ValueError("planted signal references an edge outside the graph")
    mask = G.mask()
    mask[edges] = rng.random(edges.size) < probs
    return Graph.from_mask(G.n, mask)


def resample_edge(G: Graph, e: int, q: float, rng: np.random.Generator) -> Graph:
    """The single-edge resampling channel ``Res_e^q``."""
    return gps_apply(G, PlantedSignal(((e, q),)), rng)


def sample_rig(n: int, d: int, delta: float, rng: np.random.Generator) -> Graph:
    """Random intersection graph: vertex ``i`` owns a Bern(delta) subset of ``[d]``."""
    _check_prob("delta", delta)
    if d < 0:
        raise ValueError("d must be non-negative")
    if d == 0 or n < 2:
        return Graph.empty(n)
    member = (rng.random((n, d)) < delta).astype(np.float32)
    overlap = member @ member.T
    return Graph.from_adjacency(overlap > 0.5)


def rig_edge_density(d: int, delta: float) -> float:
    """Exact edge probability ``1 - (1 - delta^2)^d`` of the intersection graph."""
    return float(-np.expm1(d * np.log1p(-delta * delta))) if delta < 1 else (1.0 if d > 0 else 0.0)
