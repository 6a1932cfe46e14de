"""Brute-force distributions and Markov kernels on tiny vertex counts.

Graphs are keyed by their raw edge-bit integer and triangle sets by their
raw triple-bit integer; no isomorphism classes are collapsed.  Laws over
graphs are dense arrays of length ``2**C(n,2)`` and kernels dense
``2**C(n,2) x 2**C(n,2)`` matrices, which bounds kernel-level work to n <= 5
and distribution-level work to n <= 6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .gibbs import ChainState, GibbsSpec
from .graph import Graph, TriangleSet, edge_index, num_pairs, num_triples, triangle_edges

MAX_DIST_N = 6
MAX_KERNEL_N = 5
NORM_TOL = 1e-12


def _require_n(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise NotImplementedError(f"{what} is only supported for n <= {limit}, got n={n}")
    if n < 0:
        raise ValueError("n must be non-negative")


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a.astype(np.uint64)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class ExactDist:
    """Probability table over every encoding of ``n``-vertex graphs or triangle sets."""

    n: int
    kind: str  # "graph" or "triangles"
    probs: np.ndarray

    def __post_init__(self):
        bits = num_pairs(self.n) if self.kind == "graph" else num_triples(self.n)
        if self.kind not in ("graph", "triangles"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.probs.shape != (1 << bits,):
            raise ValueError("probability table has the wrong length")

    def __getitem__(self, key: int) -> float:
        return float(self.probs[key])

    def total(self) -> float:
        return float(self.probs.sum())

    def check(self, tol: float = NORM_TOL) -> None:
        if np.any(self.probs < -tol):
            raise ValueError("negative probability")
        if abs(self.total() - 1.0) > tol:
            raise ValueError(f"probabilities sum to {self.total()!r}")

    def as_dict(self) -> dict[int, float]:
        nz = np.flatnonzero(self.probs)
        return {int(k): float(self.probs[k]) for k in nz}

    def edge_marginals(self) -> np.ndarray:
        """``P(slot i is set)`` for every slot."""
        keys = np.arange(self.probs.size, dtype=np.uint64)
        bits = num_pairs(self.n) if self.kind == "graph" else num_triples(self.n)
        return np.array([self.probs[(keys >> np.uint64(i)) & np.uint64(1) == 1].sum() for i in range(bits)])

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.choice(self.probs.size, p=self.probs / self.probs.sum()))


@dataclass(frozen=True, eq=False)
class ExactKernel:
    """Row-stochastic matrix over graph encodings (rows: input, columns: output)."""

    n: int
    matrix: np.ndarray

    def row(self, key: int) -> ExactDist:
        return ExactDist(self.n, "graph", self.matrix[key].copy())

    def apply(self, dist: ExactDist) -> ExactDist:
        if dist.n != self.n or dist.kind != "graph":
            raise ValueError("kernel and distribution live on different spaces")
        return ExactDist(self.n, "graph", dist.probs @ self.matrix)

    def then(self, other: "ExactKernel") -> "ExactKernel":
        """This kernel followed by ``other``."""
        return ExactKernel(self.n, self.matrix @ other.matrix)

    def max_row_error(self) -> float:
        return float(np.max(np.abs(self.matrix.sum(axis=1) - 1.0)))


# ---------------------------------------------------------------------------
# enumeration tables
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _triple_edge_masks(n: int) -> np.ndarray:
    out = np.empty(num_triples(n), dtype=np.int64)
    for t in range(out.size):
        a, b, c = triangle_edges(t)
        out[t] = (1 << a) | (1 << b) | (1 << c)
    return out


@lru_cache(maxsize=None)
def subset_tables(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For every triangle-set key: edge-union key, ``|x|`` and ``e(x)``."""
    _require_n(n, MAX_DIST_N, "triangle-set enumeration")
    emask = np.zeros(1, dtype=np.int64)
    for m in _triple_edge_masks(n):
        emask = np.concatenate([emask, emask | m])
    size = _popcount(np.arange(emask.size, dtype=np.int64))
    ecount = _popcount(emask)
    for a in (emask, size, ecount):
        a.flags.writeable = False
    return emask, size, ecount


def _log_activity(p_prime: float) -> float:
    return -math.inf if p_prime == 0 else math.log(p_prime) - math.log1p(-p_prime)


def _mu_g_probs(g_key: int, n: int, p: float, p_prime: float) -> np.ndarray:
    emask, size, ecount = subset_tables(n)
    supported = (emask & ~np.int64(g_key)) == 0
    la = _log_activity(p_prime)
    logw = np.full(emask.size, -math.inf)
    with np.errstate(invalid="ignore"):
        lw = size * la - ecount * math.log(p)
    lw = np.where(size == 0, 0.0, lw)
    logw[supported] = lw[supported]
    return np.exp(logw - logsumexp(logw))


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------


def exact_er(n: int, p: float) -> ExactDist:
    _require_n(n, MAX_DIST_N, "exact_er")
    m = num_pairs(n)
    k = _popcount(np.arange(1 << m, dtype=np.int64))
    with np.errstate(divide="ignore"):
        logp = np.where(k > 0, k * np.log(p) if p > 0 else -np.inf, 0.0)
        logq = np.where(m - k > 0, (m - k) * np.log1p(-p) if p < 1 else -np.inf, 0.0)
    return ExactDist(n, "graph", np.exp(logp + logq))


def _added_edge_law(n: int, p_prime: float) -> np.ndarray:
    """Law of ``E(T)`` for an i.i.d. Bern(p') triangle set ``T``."""
    emask, size, _ = subset_tables(n)
    T = num_triples(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.exp(
            np.where(size > 0, size * (math.log(p_prime) if p_prime > 0 else -math.inf), 0.0)
            + np.where(T - size > 0, (T - size) * (math.log1p(-p_prime) if p_prime < 1 else -math.inf), 0.0)
        )
    return np.bincount(emask, weights=w, minlength=1 << num_pairs(n))


def exact_forward_kernel(n: int, p_prime: float) -> ExactKernel:
    """``G -> G + E(T)`` with ``T`` i.i.d. Bern(p') over triples."""
    _require_n(n, MAX_KERNEL_N, "exact_forward_kernel")
    r = _added_edge_law(n, p_prime)
    size = r.size
    keys = np.arange(size, dtype=np.int64)
    K = np.zeros((size, size))
    for E in np.flatnonzero(r):
        K[keys, keys | E] += r[E]
    return ExactKernel(n, K)


def exact_rgt(n: int, p: float, p_prime: float) -> ExactDist:
    """RGT(n, p, p') by pushing G(n, p) through the triangle-adding channel."""
    _require_n(n, MAX_KERNEL_N, "exact_rgt")
    base = exact_er(n, p).probs
    r = _added_edge_law(n, p_prime)
    keys = np.arange(base.size, dtype=np.int64)
    out = np.zeros_like(base)
    for E in np.flatnonzero(r):
        np.add.at(out, keys | E, base * r[E])
    return ExactDist(n, "graph", out)


def exact_mu_g(G: Graph, p: float, p_prime: float) -> ExactDist:
    """mu_G over all triangle-set keys, normalised in log space."""
    _require_n(G.n, MAX_DIST_N, "exact_mu_g")
    return ExactDist(G.n, "triangles", _mu_g_probs(G.key, G.n, p, p_prime))


def sample_mu_g_exact(G: Graph, p: float, p_prime: float, rng: np.random.Generator) -> TriangleSet:
    return TriangleSet.from_key(G.n, exact_mu_g(G, p, p_prime).sample(rng))


def edge_cover_law(G: Graph, p: float, p_prime: float) -> ExactDist:
    """``L_G(Y)``: law of the edge union of ``X ~ mu_G``."""
    mu = exact_mu_g(G, p, p_prime)
    emask, _, _ = subset_tables(G.n)
    return ExactDist(G.n, "graph", np.bincount(emask, weights=mu.probs, minlength=1 << num_pairs(G.n)))


def _superset_sums(h: np.ndarray, bits: int) -> np.ndarray:
    h = h.copy()
    for b in range(bits):
        v = h.reshape(-1, 2, 1 << b)
        v[:, 0, :] += v[:, 1, :]
    return h


def exact_reverse_kernel(n: int, p: float, p_prime: float) -> ExactKernel:
    """Row ``G``: draw ``X ~ mu_G``, keep ``G`` off ``E(X)``, redraw ``E(X)`` as Bern(p)."""
    _require_n(n, MAX_KERNEL_N, "exact_reverse_kernel")
    m = num_pairs(n)
    size = 1 << m
    emask, _, ecount = subset_tables(n)
    keys = np.arange(size, dtype=np.int64)
    ratio_pow = ((1.0 - p) / p) ** _popcount(keys)
    p_pow = p ** ecount.astype(np.float64)
    K = np.zeros((size, size))
    for g in range(size):
        mu = _mu_g_probs(g, n, p, p_prime)
        nz = mu > 0
        # h[E] = sum over x with E(x) = E of mu(x) p^e(x); H[D] = sum over E containing D
        h = np.bincount(emask[nz], weights=mu[nz] * p_pow[nz], minlength=size)
        H = _superset_sums(h, m)
        D = keys[(keys & ~g) == 0]
        K[g, g ^ D] = ratio_pow[D] * H[D]
    return ExactKernel(n, K)


def exact_resample_kernel(n: int, e: int, q: float) -> ExactKernel:
    """``Res_e^q``: edge ``e`` redrawn as Bern(q), everything else kept."""
    _require_n(n, MAX_KERNEL_N, "exact_resample_kernel")
    size = 1 << num_pairs(n)
    keys = np.arange(size, dtype=np.int64)
    K = np.zeros((size, size))
    K[keys, keys | (1 << e)] += q
    K[keys, keys & ~(1 << e)] += 1.0 - q
    return ExactKernel(n, K)


def exact_reverse_full_kernel(n: int, p: float, p_prime: float, p_star: float) -> ExactKernel:
    """Add triangles at ``(p*-p')/(1-p')`` then reverse at ``p*``."""
    if p_prime > p_star:
        raise ValueError("p_prime exceeds p_star")
    p_delta = (p_star - p_prime) / (1.0 - p_prime)
    return exact_forward_kernel(n, p_delta).then(exact_reverse_kernel(n, p, p_star))


def tv_distance(a: ExactDist, b: ExactDist) -> float:
    """Half the L1 distance between two tables on the same space."""
    if a.n != b.n or a.kind != b.kind:
        raise ValueError("distributions live on different spaces")
    return 0.5 * float(np.abs(a.probs - b.probs).sum())


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------


def reverse_identity_error(n: int, p: float, p_prime: float) -> float:
    """TV between the reverse map applied to RGT(n,p,p') and G(n,p)."""
    return tv_distance(exact_reverse_kernel(n, p, p_prime).apply(exact_rgt(n, p, p_prime)), exact_er(n, p))


def verify_posterior(n: int, p: float, p_prime: float) -> float:
    """Max ``|Q(G'|G) - P(G'|G)|`` between the reverse kernel and the Bayes posterior.

    ``P(G'|G)`` is computed from G(n,p) and the forward kernel; only rows with
    positive RGT probability are compared.
    """
    prior = exact_er(n, p).probs
    F = exact_forward_kernel(n, p_prime).matrix
    Q = exact_reverse_kernel(n, p, p_prime).matrix
    joint = prior[:, None] * F  # [G', G]
    marg = joint.sum(axis=0)
    rows = np.flatnonzero(marg > 0)
    post = joint[:, rows] / marg[rows]
    return float(np.max(np.abs(Q[rows, :] - post.T)))


def exact_glauber_kernel(spec: GibbsSpec) -> tuple[np.ndarray, np.ndarray]:
    """One-step Glauber transition matrix over candidate subsets.

    Built from the sampler's own conditional rule.  Returns the matrix and,
    for each local state, its full triangle-set key.
    """
    N = spec.num_candidates
    if N > 12:
        raise NotImplementedError("too many candidate triangles for an exact kernel")
    size = 1 << N
    probs = spec.switch_on_probs()
    K = np.zeros((size, size))
    full_keys = np.zeros(size, dtype=np.int64)
    for s in range(size):
        x = np.array([(s >> i) & 1 for i in range(N)], dtype=np.uint8)
        full_keys[s] = sum(1 << int(spec.candidate_triples[i]) for i in range(N) if x[i])
        state = ChainState(x, np.zeros(num_pairs(spec.n), dtype=np.int32))
        state.mult = state.recount(spec)
        for i in range(N):
            cur = int(x[i])
            j = sum(1 for e in spec.cand_edges[i] if state.mult[e] - cur == 0)
            on = probs[j]
            K[s, s | (1 << i)] += on / N
            K[s, s & ~(1 << i)] += (1.0 - on) / N
    return K, full_keys


def glauber_balance_error(G: Graph, p: float, p_prime: float) -> tuple[float, float]:
    """(stationarity L1 error, max detailed-balance violation) against exact mu_G."""
    spec = GibbsSpec.build(G, p, p_prime)
    if spec.num_candidates == 0:
        return 0.0, 0.0
    K, full_keys = exact_glauber_kernel(spec)
    mu = exact_mu_g(G, p, p_prime).probs[full_keys]
    stat = float(np.abs(mu @ K - mu).sum())
    flow = mu[:, None] * K
    return stat, float(np.max(np.abs(flow - flow.T)))


def marginal_bound_violations(n: int, p: float, p_prime: float, slack: float = 1e-12) -> tuple[int, int]:
    """Count single-site conditionals outside ``[p', p'p^-3/(1-p'+p'p^-3)]``.

    Every graph on ``n`` vertices, every candidate triangle and every
    configuration of the remaining candidates is checked; conditionals are
    formed from the unnormalised weights directly.  Returns
    ``(violations, checks)``.
    """
    _require_n(n, 4, "marginal_bound_violations")
    emask, size, ecount = subset_tables(n)
    la = _log_activity(p_prime)
    lp = math.log(p)
    logw = size * la - ecount * lp
    a = p_prime * p**-3
    lo, hi = p_prime, a / (1.0 - p_prime + a)
    violations = checks = 0
    for g in range(1 << num_pairs(n)):
        cands = [t for t, m in enumerate(_triple_edge_masks(n)) if (m & ~g) == 0]
        for t in cands:
            others = [c for c in cands if c != t]
            for s in range(1 << len(others)):
                base = sum(1 << others[i] for i in range(len(others)) if (s >> i) & 1)
                w_on, w_off = logw[base | (1 << t)], logw[base]
                c = 1.0 / (1.0 + math.exp(w_off - w_on))
                checks += 1
                if c < lo * (1 - slack) or c > hi * (1 + slack):
                    violations += 1
    return violations, checks


def exact_pe(n: int, p: float, p_prime: float, e: int = 0) -> float:
    """``1 - (1-p) E_{G~RGT}[mu_{G+e}(Y_e = 1)]``, computed exactly."""
    rgt = exact_rgt(n, p, p_prime).probs
    emask, _, _ = subset_tables(n)
    covers_e = (emask >> e) & 1 == 1
    total = 0.0
    for g in np.flatnonzero(rgt):
        mu = _mu_g_probs(int(g) | (1 << e), n, p, p_prime)
        total += rgt[g] * mu[covers_e].sum()
    return 1.0 - (1.0 - p) * total


def exact_commutation_gap(n: int, p: float, p_prime: float, e: int, q: float) -> float:
    """TV between ``A(Res_e^q(P))`` and ``Res_e^{q p_e}(A(P))`` for ``P = RGT(n,p,p')``."""
    _require_n(n, 4, "exact_commutation_gap")
    P = exact_rgt(n, p, p_prime)
    A = exact_reverse_kernel(n, p, p_prime)
    pe = exact_pe(n, p, p_prime, e)
    lhs = A.apply(exact_resample_kernel(n, e, q).apply(P))
    rhs = exact_resample_kernel(n, e, q * pe).apply(A.apply(P))
    return tv_distance(lhs, rhs)


def default_edge(n: int) -> int:
    return edge_index(0, 1, n)
