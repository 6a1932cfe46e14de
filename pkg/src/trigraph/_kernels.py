"""Inner loops: Glauber updates, triangle enumeration, triangle statistics.

Each loop-shaped kernel is compiled by numba when available (see
``trigraph._accel``); with numba disabled the very same source runs as
ordinary Python.  Where a vectorised formulation exists, a ``*_numpy``
variant is provided and used as the fallback instead of the Python loop.
All random numbers are drawn by the caller and passed in, so both backends
consume identical streams and produce identical chains.
"""

import numpy as np

from ._accel import HAVE_NUMBA, njit


@njit
def glauber_run(cand_edges, x, mult, probs, picks, uniforms, thin, counts):
    """Run ``len(picks)`` single-site updates in place.

    ``probs[j]`` is the conditional probability of switching a triple on when
    ``j`` of its edges are covered by no other selected triple.  When
    ``thin > 0`` the state is added into ``counts`` after every ``thin``-th
    step; the return value is the number of such snapshots.
    """
    steps = picks.shape[0]
    taken = 0
    for s in range(steps):
        t = picks[s]
        cur = np.int64(x[t])
        e0 = cand_edges[t, 0]
        e1 = cand_edges[t, 1]
        e2 = cand_edges[t, 2]
        j = 0
        if mult[e0] - cur == 0:
            j += 1
        if mult[e1] - cur == 0:
            j += 1
        if mult[e2] - cur == 0:
            j += 1
        new = 1 if uniforms[s] < probs[j] else 0
        if new != cur:
            d = new - cur
            mult[e0] += d
            mult[e1] += d
            mult[e2] += d
            x[t] = new
        if thin > 0 and (s + 1) % thin == 0:
            for i in range(x.shape[0]):
                counts[i] += x[i]
            taken += 1
    return taken


@njit
def _enumerate_triangles_loop(adj):
    n = adj.shape[0]
    cap = 1024
    out = np.empty((cap, 3), dtype=np.int64)
    k = 0
    for w in range(n):
        for v in range(w):
            if not adj[v, w]:
                continue
            for u in range(v):
                if adj[u, v] and adj[u, w]:
                    if k == cap:
                        cap *= 2
                        grown = np.empty((cap, 3), dtype=np.int64)
                        grown[:k] = out[:k]
                        out = grown
                    out[k, 0] = u
                    out[k, 1] = v
                    out[k, 2] = w
                    k += 1
    return out[:k].copy()


def _enumerate_triangles_numpy(adj):
    n = adj.shape[0]
    chunks = []
    for w in range(n):
        for v in np.flatnonzero(adj[:w, w]):
            us = np.flatnonzero(adj[:v, v] & adj[:v, w])
            if us.size:
                blk = np.empty((us.size, 3), dtype=np.int64)
                blk[:, 0] = us
                blk[:, 1] = v
                blk[:, 2] = w
                chunks.append(blk)
    if not chunks:
        return np.empty((0, 3), dtype=np.int64)
    return np.concatenate(chunks)


def enumerate_triangles(adj: np.ndarray) -> np.ndarray:
    """All triangles of the graph as vertex triples, in ascending colex order."""
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    if HAVE_NUMBA:
        return _enumerate_triangles_loop(adj)
    return _enumerate_triangles_numpy(adj)


@njit
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit
def _triangle_count_rows(rows, adj):
    """Triangles via common-neighbour popcounts of packed adjacency rows."""
    n = rows.shape[0]
    nw = rows.shape[1]
    total = 0
    for v in range(n):
        for u in range(v):
            if adj[u, v]:
                c = 0
                for k in range(nw):
                    c += _popcount64(rows[u, k] & rows[v, k])
                total += c
    return total // 3


def _pack_rows(adj):
    n = adj.shape[0]
    nw = (n + 63) // 64
    buf = np.zeros((n, nw * 8), dtype=np.uint8)
    packed = np.packbits(adj, axis=1, bitorder="little")
    buf[:, : packed.shape[1]] = packed
    return np.ascontiguousarray(buf).view("<u8").astype(np.uint64)


def _triangle_count_numpy(adj):
    a = adj.astype(np.float64)
    return int(round(np.einsum("ij,ji->", a @ a, a) / 6.0))


def triangle_count(adj: np.ndarray) -> int:
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    if adj.shape[0] < 3:
        return 0
    if HAVE_NUMBA:
        return int(_triangle_count_rows(_pack_rows(adj), adj))
    return _triangle_count_numpy(adj)


def triangle_count_numpy(adj: np.ndarray) -> int:
    return _triangle_count_numpy(np.asarray(adj, dtype=np.bool_))


def triangle_count_packed(adj: np.ndarray) -> int:
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    return int(_triangle_count_rows(_pack_rows(adj), adj))
