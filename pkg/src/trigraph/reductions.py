"""Forward (triangle-adding) and reverse (triangle-removing) graph maps.

The reverse map draws a triangle set ``X ~ mu_G`` and redraws every edge of
``E(X)`` as Bern(p).  Applied to RGT(n, p, p') it returns exactly G(n, p); a
planted edge survives it with probability ``p_e``, which sets the planted
density map ``g(q) = q * p_e``.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .gibbs import DEFAULT_C_MIX, GibbsSpec, _resolve_steps, glauber_sample_state
from .graph import Graph, TriangleSet, edge_index, edge_union
from .models import ModelParams, add_random_triangles, sample_rgt
from .rng import make_rng


def default_workers() -> int:
    return max(1, int(os.environ.get("TRIGRAPH_WORKERS", "1")))


def p_star_default(n: int) -> float:
    """Operating point ``1 / (n ln n)`` of the reverse map."""
    return 1.0 / (n * math.log(n))


def forward_transition(G: Graph, p_prime: float, rng: np.random.Generator) -> Graph:
    """Add the three edges of each vertex triple independently with probability ``p_prime``."""
    return add_random_triangles(G, p_prime, rng)[0]


@dataclass
class ReverseResult:
    graph: Graph
    triangles: TriangleSet
    steps: int


def reverse_transition_detail(
    G: Graph,
    p: float,
    p_prime: float,
    rng: np.random.Generator,
    backend: str = "mcmc",
    steps="AUTO",
    c_mix: float = DEFAULT_C_MIX,
) -> ReverseResult:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if backend == "exact":
        from .oracle import sample_mu_g_exact

        X = sample_mu_g_exact(G, p, p_prime, rng)
        used = 0
    elif backend == "mcmc":
        spec = GibbsSpec.build(G, p, p_prime)
        used = _resolve_steps(spec, steps, c_mix)
        X = glauber_sample_state(spec, used, rng).triangles(spec)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    cover = edge_union(X).indices()
    mask = G.mask()
    mask[cover] = rng.random(cover.size) < p
    out = Graph.from_mask(G.n, mask)
    return ReverseResult(out, X, used)


def reverse_transition(
    G: Graph,
    p: float,
    p_prime: float,
    rng: np.random.Generator,
    backend: str = "mcmc",
    steps="AUTO",
    c_mix: float = DEFAULT_C_MIX,
) -> Graph:
    """Remove triangles: keep ``G`` off ``E(X)`` for ``X ~ mu_G``, redraw ``E(X)`` at density ``p``.

    ``backend="exact"`` samples ``X`` by enumeration (n <= 6); the default
    runs Glauber dynamics for ``steps`` updates.
    """
    return reverse_transition_detail(G, p, p_prime, rng, backend, steps, c_mix).graph


def reverse_full(
    G: Graph,
    p: float,
    p_prime: float,
    rng: np.random.Generator,
    p_star: float | None = None,
    backend: str = "mcmc",
    steps="AUTO",
    c_mix: float = DEFAULT_C_MIX,
) -> Graph:
    """Top triangle density up to ``p_star`` with the forward map, then reverse at ``p_star``."""
    if p_star is None:
        p_star = p_star_default(G.n)
    if p_prime > p_star:
        raise ValueError(f"p_prime={p_prime} exceeds p_star={p_star}")
    p_delta = (p_star - p_prime) / (1.0 - p_prime)
    H = forward_transition(G, p_delta, rng)
    return reverse_transition(H, p, p_star, rng, backend, steps, c_mix)


def param_map_f(q: float, p_prime: float, n: int) -> float:
    """Planted density after the forward map: ``q + (1-q)(1 - (1-p')^(n-2))``."""
    if p_prime >= 1.0:
        return 1.0 if n > 2 else q
    hit = -math.expm1((n - 2) * math.log1p(-p_prime))
    return q + (1.0 - q) * hit


def param_map_g(q: float, p_e: float) -> float:
    """Planted density after the reverse map."""
    return q * p_e


def param_map_g_full(q: float, p_prime: float, p_star: float, n: int, p_e: float) -> float:
    """Planted density after :func:`reverse_full` (``p_e`` taken at ``p_star``)."""
    p_delta = (p_star - p_prime) / (1.0 - p_prime)
    return param_map_f(q, p_delta, n) * p_e


def _pe_replicate(args) -> tuple[int, int]:
    n, p, p_prime, master, i, e, backend, c_mix = args
    rng = make_rng(master, i)
    G, _ = sample_rgt(n, p, p_prime, rng)
    G = G.with_edges([e])
    res = reverse_transition_detail(G, p, p_prime, rng, backend=backend, c_mix=c_mix)
    return int(e in res.graph), res.steps


def estimate_pe(
    params: ModelParams,
    replicates: int,
    rng: np.random.Generator,
    e: int | None = None,
    backend: str = "mcmc",
    c_mix: float = DEFAULT_C_MIX,
    workers: int | None = None,
) -> tuple[float, float, int]:
    """Monte Carlo survival probability of a forced edge under the reverse map.

    Each replicate draws ``G ~ RGT(n, p, p')``, adds edge ``e`` (default: the
    first edge slot) and records whether ``e`` is still present after the
    reverse map.  Replicate ``i`` uses stream ``i`` of a master seed drawn from
    ``rng``, so the result does not depend on ``workers``.  Returns
    ``(estimate, binomial stderr, total Glauber steps)``.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    e = edge_index(0, 1, params.n) if e is None else int(e)
    master = int(rng.integers(0, 2**63 - 1))
    jobs = [(params.n, params.p, params.p_prime, master, i, e, backend, c_mix) for i in range(replicates)]
    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_pe_replicate, jobs, chunksize=max(1, replicates // (4 * workers))))
    else:
        results = [_pe_replicate(j) for j in jobs]
    hits = sum(r[0] for r in results)
    steps = sum(r[1] for r in results)
    est = hits / replicates
    return est, math.sqrt(est * (1.0 - est) / replicates), steps


@dataclass
class ReductionReport:
    input_params: ModelParams
    output_params: ModelParams | None
    p_e_estimate: float | None = None
    p_e_stderr: float | None = None
    gibbs_steps_used: int = 0
    direction: str = "reverse"
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["input_params"] = self.input_params.as_dict()
        d["output_params"] = None if self.output_params is None else self.output_params.as_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
