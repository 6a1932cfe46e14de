import itertools
import math

import numpy as np
import pytest

from trigraph import oracle
from trigraph.graph import Graph, TriangleSet, edge_union, num_pairs, num_triples
from trigraph.rng import make_rng


def brute_mu_g(G, p, pp):
    """Independent enumeration of mu_G from its defining weights."""
    N = num_triples(G.n)
    w = np.zeros(1 << N)
    for key in range(1 << N):
        x = TriangleSet.from_key(G.n, key)
        cover = edge_union(x)
        if not cover.issubset(G):
            continue
        w[key] = (pp / (1 - pp)) ** x.count() * p ** (-cover.count())
    return w / w.sum()


def brute_rgt(n, p, pp):
    N, m = num_triples(n), num_pairs(n)
    out = np.zeros(1 << m)
    for base in range(1 << m):
        pb = p ** bin(base).count("1") * (1 - p) ** (m - bin(base).count("1"))
        for key in range(1 << N):
            x = TriangleSet.from_key(n, key)
            px = pp ** x.count() * (1 - pp) ** (N - x.count())
            out[base | edge_union(x).key] += pb * px
    return out


class TestDistributions:
    def test_er_n2(self):
        d = oracle.exact_er(2, 0.3)
        assert d[0] == pytest.approx(0.7) and d[1] == pytest.approx(0.3)

    def test_er_normalised(self):
        assert oracle.exact_er(5, 0.37).total() == pytest.approx(1, abs=1e-12)

    def test_rgt_n3(self):
        d = oracle.exact_rgt(3, 0.5, 0.2)
        assert d[0] == pytest.approx(0.8 * 0.125)
        assert d[7] == pytest.approx(0.3)

    @pytest.mark.parametrize("n,p,pp", [(3, 0.4, 0.3), (4, 0.5, 0.1)])
    def test_rgt_matches_brute(self, n, p, pp):
        assert np.allclose(oracle.exact_rgt(n, p, pp).probs, brute_rgt(n, p, pp), atol=1e-14)

    @pytest.mark.parametrize("edges", [None, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)], [(0, 1)]])
    def test_mu_g_matches_brute(self, edges):
        G = Graph.complete(4) if edges is None else Graph.from_edges(4, edges)
        assert np.allclose(oracle.exact_mu_g(G, 0.4, 0.15).probs, brute_mu_g(G, 0.4, 0.15), atol=1e-14)

    def test_mu_g_zero_pprime(self):
        d = oracle.exact_mu_g(Graph.complete(4), 0.5, 0.0)
        assert d[0] == 1.0

    def test_sampling(self):
        d = oracle.exact_er(3, 0.5)
        rng = make_rng(0)
        keys = [d.sample(rng) for _ in range(4000)]
        assert abs(np.mean([k == 7 for k in keys]) - 0.125) < 4 * math.sqrt(0.125 * 0.875 / 4000)

    def test_size_limit(self):
        with pytest.raises(NotImplementedError):
            oracle.exact_rgt(7, 0.5, 0.1)
        with pytest.raises(NotImplementedError):
            oracle.exact_reverse_kernel(6, 0.5, 0.1)


class TestTV:
    def test_identity(self):
        d = oracle.exact_er(3, 0.3)
        assert oracle.tv_distance(d, d) == 0.0

    def test_disjoint(self):
        a = oracle.exact_er(3, 0.0)
        b = oracle.exact_er(3, 1.0)
        assert oracle.tv_distance(a, b) == pytest.approx(1.0)

    def test_symmetric_and_triangle(self):
        a, b, c = (oracle.exact_er(3, p) for p in (0.2, 0.5, 0.7))
        assert oracle.tv_distance(a, b) == pytest.approx(oracle.tv_distance(b, a))
        assert oracle.tv_distance(a, c) <= oracle.tv_distance(a, b) + oracle.tv_distance(b, c) + 1e-15

    def test_mismatch(self):
        with pytest.raises(ValueError):
            oracle.tv_distance(oracle.exact_er(3, 0.5), oracle.exact_er(4, 0.5))


class TestKernels:
    @pytest.mark.parametrize("n", [3, 4])
    def test_rows_stochastic(self, n):
        assert oracle.exact_forward_kernel(n, 0.2).max_row_error() < 1e-12
        assert oracle.exact_reverse_kernel(n, 0.5, 0.2).max_row_error() < 1e-12
        assert oracle.exact_resample_kernel(n, 0, 0.3).max_row_error() < 1e-12

    def test_forward_kernel_gives_rgt(self):
        K = oracle.exact_forward_kernel(4, 0.1)
        assert oracle.tv_distance(K.apply(oracle.exact_er(4, 0.5)), oracle.exact_rgt(4, 0.5, 0.1)) < 1e-14

    @pytest.mark.parametrize("n,p,pp", [(3, 0.5, 0.2), (4, 0.5, 0.1), (4, 0.3, 0.05), (4, 0.8, 0.4)])
    def test_reverse_identity(self, n, p, pp):
        assert oracle.reverse_identity_error(n, p, pp) < 1e-10

    def test_posterior(self):
        assert oracle.verify_posterior(4, 0.3, 0.1) < 1e-12

    def test_reverse_full_identity(self):
        n, p, pp, ps = 4, 0.5, 0.02, 0.1
        K = oracle.exact_reverse_full_kernel(n, p, pp, ps)
        assert oracle.tv_distance(K.apply(oracle.exact_rgt(n, p, pp)), oracle.exact_er(n, p)) < 1e-12

    def test_glauber_balance(self):
        s, d = oracle.glauber_balance_error(Graph.complete(4), 0.5, 0.1)
        assert s < 1e-12 and d < 1e-12

    def test_marginal_bounds(self):
        v, c = oracle.marginal_bound_violations(4, 0.5, 0.1)
        assert v == 0 and c > 0


class TestPe:
    def test_no_triangles_means_certain_survival(self):
        assert oracle.exact_pe(4, 0.5, 0.0) == pytest.approx(1.0)

    def test_decreases_with_pprime(self):
        a, b = oracle.exact_pe(4, 0.5, 0.05), oracle.exact_pe(4, 0.5, 0.2)
        assert 1 > a > b > 0

    def test_gap_zero_without_triangles(self):
        assert oracle.exact_commutation_gap(4, 0.5, 0.0, 0, 0.9) == pytest.approx(0, abs=1e-14)

    def test_gap_at_ambient_density_is_not_zero(self):
        # resampling e at q = p does not make the two orders agree: the right-hand
        # side resamples at p * p_e, and Res_e^p removes the triangle-induced
        # correlation of e with the other edges.  Zero only without triangles.
        assert oracle.exact_commutation_gap(4, 0.5, 0.0, 0, 0.5) == pytest.approx(0, abs=1e-14)
        assert oracle.exact_commutation_gap(4, 0.5, 0.01, 0, 0.5) > 1e-3
