"""The triangle Gibbs measure mu_G and its Glauber dynamics.

mu_G puts weight ``(p'/(1-p'))^|x| * p^(-e(x))`` on every set ``x`` of
triangles whose edges all lie in ``G`` and zero elsewhere.  The chain keeps,
for each edge, the number of selected triangles covering it, which makes the
single-site conditional an O(1) lookup.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .graph import (
    Graph,
    TriangleSet,
    edge_indices,
    num_pairs,
    triple_indices,
)

CHUNK = 1 << 20
DEFAULT_C_MIX = 8.0


def debug_enabled() -> bool:
    return os.environ.get("TRIGRAPH_DEBUG", "").strip().lower() not in ("", "0", "false", "no")


def _log_activity(p_prime: float) -> float:
    if p_prime == 0.0:
        return -math.inf
    return math.log(p_prime) - math.log1p(-p_prime)


@dataclass(frozen=True, eq=False)
class GibbsSpec:
    G: Graph
    p: float
    p_prime: float
    candidate_triples: np.ndarray  # ascending triple slots with E(t) in G
    cand_edges: np.ndarray  # (N, 3) edge slots per candidate

    @classmethod
    def build(cls, G: Graph, p: float, p_prime: float) -> "GibbsSpec":
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {p}")
        if not 0.0 <= p_prime < 1.0:
            raise ValueError(f"p_prime must lie in [0, 1), got {p_prime}")
        verts = _kernels.enumerate_triangles(G.adjacency())
        u, v, w = verts[:, 0], verts[:, 1], verts[:, 2]
        tri = triple_indices(u, v, w)
        edges = np.empty((tri.size, 3), dtype=np.int64)
        edges[:, 0] = edge_indices(u, v)
        edges[:, 1] = edge_indices(u, w)
        edges[:, 2] = edge_indices(v, w)
        for a in (tri, edges):
            a.flags.writeable = False
        return cls(G, float(p), float(p_prime), tri, edges)

    @property
    def n(self) -> int:
        return self.G.n

    @property
    def num_candidates(self) -> int:
        return int(self.candidate_triples.size)

    @property
    def log_activity(self) -> float:
        return _log_activity(self.p_prime)

    def switch_on_probs(self) -> np.ndarray:
        """``P(X_t = 1 | rest)`` indexed by the number of uncovered edges of ``t``."""
        la = self.log_activity
        out = np.zeros(4)
        if la == -math.inf:
            return out
        lp = math.log(self.p)
        for j in range(4):
            z = la - j * lp
            out[j] = 1.0 / (1.0 + math.exp(-z)) if z > -700 else 0.0
        return out

    def marginal_bounds(self) -> tuple[float, float]:
        """Lower and upper limits of any single-site conditional."""
        probs = self.switch_on_probs()
        return float(probs[0]), float(probs[3])

    def position(self, t: int) -> int:
        """Candidate position of triple slot ``t``, or -1."""
        i = int(np.searchsorted(self.candidate_triples, t))
        if i < self.num_candidates and self.candidate_triples[i] == t:
            return i
        return -1


class ChainState:
    """Current triangle set of one chain plus per-edge cover counts."""

    __slots__ = ("x", "mult")

    def __init__(self, x: np.ndarray, mult: np.ndarray):
        self.x = x
        self.mult = mult

    @classmethod
    def empty(cls, spec: GibbsSpec) -> "ChainState":
        return cls(np.zeros(spec.num_candidates, dtype=np.uint8), np.zeros(num_pairs(spec.n), dtype=np.int32))

    @classmethod
    def from_triangles(cls, spec: GibbsSpec, x: TriangleSet) -> "ChainState":
        sel = np.isin(spec.candidate_triples, x.indices())
        if int(sel.sum()) != x.count():
            raise ValueError("triangle set is not supported on the graph")
        state = cls.empty(spec)
        state.x[sel] = 1
        np.add.at(state.mult, spec.cand_edges[sel].ravel(), 1)
        return state

    def copy(self) -> "ChainState":
        return ChainState(self.x.copy(), self.mult.copy())

    def size(self) -> int:
        return int(self.x.sum())

    def num_edges(self) -> int:
        return int(np.count_nonzero(self.mult))

    def triangles(self, spec: GibbsSpec) -> TriangleSet:
        return TriangleSet.from_indices(spec.n, spec.candidate_triples[self.x.astype(bool)])

    def edge_indicator(self) -> np.ndarray:
        return self.mult > 0

    def recount(self, spec: GibbsSpec) -> np.ndarray:
        """Cover counts recomputed from scratch."""
        m = np.zeros_like(self.mult)
        np.add.at(m, spec.cand_edges[self.x.astype(bool)].ravel(), 1)
        return m


def log_weight(spec: GibbsSpec, x: TriangleSet) -> float:
    """Unnormalised log mu_G(x); ``-inf`` off the support."""
    idx = x.indices()
    if idx.size == 0:
        return 0.0
    if not np.all(np.isin(idx, spec.candidate_triples)):
        return -math.inf
    la = spec.log_activity
    if la == -math.inf:
        return -math.inf
    rows = np.searchsorted(spec.candidate_triples, idx)
    e = np.unique(spec.cand_edges[rows].ravel()).size
    return idx.size * la - e * math.log(spec.p)


def uncovered_edges(spec: GibbsSpec, state: ChainState, pos: int) -> int:
    """Edges of candidate ``pos`` not covered by any other selected triangle."""
    cur = int(state.x[pos])
    return int(sum(1 for e in spec.cand_edges[pos] if state.mult[e] - cur == 0))


def conditional_marginal(spec: GibbsSpec, state: ChainState, t: int) -> float:
    """``mu_G(X_t = 1 | X_~t)`` for triple slot ``t``; 0 for non-candidates."""
    pos = spec.position(t)
    if pos < 0:
        return 0.0
    return float(spec.switch_on_probs()[uncovered_edges(spec, state, pos)])


def glauber_step(spec: GibbsSpec, state: ChainState, rng: np.random.Generator) -> ChainState:
    """Resample one uniformly chosen candidate from its conditional (in place)."""
    N = spec.num_candidates
    if N == 0:
        return state
    pick = rng.integers(0, N, size=1)
    u = rng.random(1)
    if debug_enabled():
        lo, hi = spec.marginal_bounds()
        c = spec.switch_on_probs()[uncovered_edges(spec, state, int(pick[0]))]
        assert lo <= c <= hi, "conditional marginal outside [p', p'p^-3/(1-p'+p'p^-3)]"
    _kernels.glauber_run(spec.cand_edges, state.x, state.mult, spec.switch_on_probs(), pick, u, 0, state.x[:0].astype(np.int64))
    return state


def auto_steps(num_candidates: int, c_mix: float = DEFAULT_C_MIX) -> int:
    """Burn-in ``ceil(c_mix * N * ln N)``, with ``ln N`` floored at 1."""
    N = num_candidates
    if N == 0:
        return 0
    return int(math.ceil(c_mix * N * max(math.log(N), 1.0)))


def _resolve_steps(spec: GibbsSpec, steps, c_mix: float) -> int:
    if steps is None or (isinstance(steps, str) and steps.upper() == "AUTO"):
        return auto_steps(spec.num_candidates, c_mix)
    steps = int(steps)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    return steps


def run_chain(
    spec: GibbsSpec,
    state: ChainState,
    steps: int,
    rng: np.random.Generator,
    thin: int = 0,
    counts: np.ndarray | None = None,
) -> int:
    """Advance ``state`` by ``steps`` updates; optionally accumulate snapshots."""
    N = spec.num_candidates
    if N == 0 or steps == 0:
        return 0
    probs = spec.switch_on_probs()
    if counts is None:
        counts = np.zeros(N if thin else 0, dtype=np.int64)
    taken = 0
    done = 0
    # chunk boundaries are multiples of thin so the snapshot cadence is preserved
    chunk = CHUNK if not thin else max(thin, (CHUNK // thin) * thin)
    while done < steps:
        k = min(chunk, steps - done)
        picks = rng.integers(0, N, size=k)
        uniforms = rng.random(k)
        taken += _kernels.glauber_run(spec.cand_edges, state.x, state.mult, probs, picks, uniforms, thin, counts)
        done += k
    if debug_enabled():
        assert np.array_equal(state.recount(spec), state.mult), "cover counts drifted"
    return taken


def glauber_sample(
    spec: GibbsSpec,
    steps="AUTO",
    rng: np.random.Generator | None = None,
    c_mix: float = DEFAULT_C_MIX,
) -> TriangleSet:
    """Run the chain from the empty set and return the final triangle set."""
    if rng is None:
        raise ValueError("rng is required")
    if spec.n * spec.p_prime > 0.5:
        warnings.warn(
            f"n*p' = {spec.n * spec.p_prime:.3g} > 0.5; the mixing guarantee does not apply",
            RuntimeWarning,
            stacklevel=2,
        )
    state = ChainState.empty(spec)
    run_chain(spec, state, _resolve_steps(spec, steps, c_mix), rng)
    return state.triangles(spec)


def glauber_sample_state(spec: GibbsSpec, steps, rng: np.random.Generator, c_mix: float = DEFAULT_C_MIX) -> ChainState:
    state = ChainState.empty(spec)
    run_chain(spec, state, _resolve_steps(spec, steps, c_mix), rng)
    return state


def estimate_marginals(
    spec: GibbsSpec,
    samples: int,
    rng: np.random.Generator,
    burn_in="AUTO",
    thin: int | None = None,
    batches: int = 50,
    c_mix: float = DEFAULT_C_MIX,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-candidate ``P(X_t = 1)`` from one long chain.

    After burn-in a snapshot is kept every ``thin`` steps (default: one sweep,
    ``N`` steps).  The standard error is the larger of the batch-means
    estimate and the i.i.d. binomial one.
    """
    N = spec.num_candidates
    if N == 0:
        return np.zeros(0), np.zeros(0)
    thin = N if thin is None else int(thin)
    batches = max(2, min(batches, samples))
    per = samples // batches
    state = ChainState.empty(spec)
    run_chain(spec, state, _resolve_steps(spec, burn_in, c_mix), rng)
    means = np.empty((batches, N))
    for b in range(batches):
        counts = np.zeros(N, dtype=np.int64)
        taken = run_chain(spec, state, per * thin, rng, thin=thin, counts=counts)
        means[b] = counts / taken
    est = means.mean(axis=0)
    se_batch = means.std(axis=0, ddof=1) / math.sqrt(batches)
    se_iid = np.sqrt(est * (1 - est) / (per * batches))
    return est, np.maximum(se_batch, se_iid)


def glauber_trace(
    spec: GibbsSpec,
    samples: int,
    stat: Callable[[ChainState], float],
    rng: np.random.Generator,
    burn_in="AUTO",
    thin: int | None = None,
    c_mix: float = DEFAULT_C_MIX,
) -> np.ndarray:
    """Values of ``stat`` at ``samples`` thinned snapshots of one chain."""
    N = spec.num_candidates
    thin = max(N, 1) if thin is None else int(thin)
    state = ChainState.empty(spec)
    run_chain(spec, state, _resolve_steps(spec, burn_in, c_mix), rng)
    out = np.empty(samples)
    for i in range(samples):
        run_chain(spec, state, thin, rng)
        out[i] = stat(state)
    return out
