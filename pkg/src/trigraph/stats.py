"""Signed triangle statistic, the ER-vs-RGT test, and Monte Carlo moments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .graph import Graph, edge_index, num_pairs


def signed_triangle_count(G: Graph, q: float) -> float:
    """``sum over triples {i,j,k} of (A_ij - q)(A_jk - q)(A_ik - q)``.

    Expanded as ``T - q W + q^2 (n-2) m - q^3 C(n,3)`` with ``T`` triangles,
    ``W`` two-paths and ``m`` edges, so only the triangle count needs a
    kernel.
    """
    n = G.n
    if n < 3:
        return 0.0
    adj = G.adjacency()
    deg = adj.sum(axis=1).astype(np.int64)
    m = int(deg.sum() // 2)
    wedges = int((deg * (deg - 1) // 2).sum())
    tri = _kernels.triangle_count(adj)
    return tri - q * wedges + q * q * (n - 2) * m - q**3 * comb(n, 3)


def tau_edge_delta(G: Graph, q: float, u: int, v: int) -> float:
    """Change in the signed count when the pair ``(u, v)`` is toggled."""
    if u > v:
        u, v = v, u
    adj = G.adjacency()
    others = np.ones(G.n, dtype=bool)
    others[[u, v]] = False
    s = float(np.sum((adj[u, others] - q) * (adj[v, others] - q)))
    return -s if adj[u, v] else s


def rgt_edge_density(p: float, p_prime: float, n: int) -> float:
    """Edge density ``p + (1-p)(1 - (1-p')^(n-2))`` of RGT(n, p, p')."""
    if p_prime >= 1.0:
        return 1.0 if n > 2 else p
    return 1.0 - (1.0 - p) * math.exp((n - 2) * math.log1p(-p_prime))


def rgt_tau_mean(n: int, p: float, p_prime: float) -> float:
    """Exact mean of the signed count under RGT(n, p, p') at ``q = rgt_edge_density``.

    Given its own triple is not added, the three edges of a triple are
    independent with mean ``q - p'(1-p)(1-p')^(n-3)``.
    """
    q = rgt_edge_density(p, p_prime, n)
    off = p_prime * (1 - p) * (1 - p_prime) ** (n - 3)
    per = p_prime * (1 - q) ** 3 - (1 - p_prime) * off**3
    return comb(n, 3) * per


def er_tau_variance(n: int, q: float) -> float:
    return comb(n, 3) * q**3 * (1 - q) ** 3


@dataclass(frozen=True)
class TestOutcome:
    statistic_value: float
    threshold: float
    decision: str  # "null" or "alternative"
    replicate_id: int = 0

    __test__ = False  # keep pytest from collecting this class


def er_vs_rgt_threshold(n: int, p: float, p_prime: float) -> float:
    q = rgt_edge_density(p, p_prime, n)
    return comb(n, 3) * p_prime * (1 - q) ** 3 / 2


def er_vs_rgt_test(G: Graph, n: int, p: float, p_prime: float, replicate_id: int = 0) -> TestOutcome:
    """Declare "alternative" (RGT) when the signed count exceeds half its RGT mean."""
    if G.n != n:
        raise ValueError(f"graph has {G.n} vertices, expected {n}")
    q = rgt_edge_density(p, p_prime, n)
    tau = signed_triangle_count(G, q)
    thr = er_vs_rgt_threshold(n, p, p_prime)
    return TestOutcome(tau, thr, "alternative" if tau > thr else "null", replicate_id)


def moment_estimator(
    sampler: Callable[[np.random.Generator], object],
    statistic: Callable[[object], float],
    replicates: int,
    rng: np.random.Generator,
) -> tuple[float, float, float]:
    """Sample mean, unbiased variance and standard error of the mean.

    Replicate ``i`` draws from the ``i``-th child stream spawned from ``rng``.
    """
    if replicates < 2:
        raise ValueError("need at least two replicates")
    vals = np.array([statistic(sampler(child)) for child in rng.spawn(replicates)], dtype=np.float64)
    var = float(vals.var(ddof=1))
    return float(vals.mean()), var, math.sqrt(var / replicates)


def marginal_influence_exact(
    G: Graph,
    A: Sequence[int],
    e: int,
    p: float,
    p_prime: float,
) -> float:
    """Largest shift of ``P(Y_e = 1 | Y_A)`` over conditionings of the edges in ``A``.

    ``Y`` is the edge union of ``X ~ mu_G``; its law is enumerated exactly
    (n <= 6).  Conditionings of zero probability are skipped.
    """
    from .oracle import edge_cover_law

    if G.n > 6:
        raise NotImplementedError("exact marginal influence needs n <= 6")
    A = sorted({int(a) for a in A} - {int(e)})
    if not A or p_prime == 0.0:
        return 0.0
    law = edge_cover_law(G, p, p_prime).probs
    keys = np.arange(law.size, dtype=np.int64)
    amask = sum(1 << a for a in A)
    proj = keys & amask
    ye = (keys >> e) & 1
    tot = np.bincount(proj, weights=law, minlength=1 << num_pairs(G.n))
    hit = np.bincount(proj, weights=law * ye, minlength=tot.size)
    ok = tot > 1e-300
    cond = hit[ok] / tot[ok]
    return float(cond.max() - cond.min())


def accuracy(outcomes: Sequence[TestOutcome], truths: Sequence[str]) -> float:
    right = sum(o.decision == t for o, t in zip(outcomes, truths))
    return right / len(outcomes)


def first_edge(n: int) -> int:
    return edge_index(0, 1, n)
