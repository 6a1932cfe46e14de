import itertools
import math
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trigraph import oracle
from trigraph.graph import Graph, edge_index, num_pairs
from trigraph.models import sample_er, sample_rgt
from trigraph.stats import (
    TestOutcome,
    accuracy,
    er_tau_variance,
    er_vs_rgt_test,
    marginal_influence_exact,
    moment_estimator,
    rgt_edge_density,
    rgt_tau_mean,
    signed_triangle_count,
    tau_edge_delta,
)


def brute_tau(G, q):
    A = G.adjacency().astype(float)
    return sum(
        (A[i, j] - q) * (A[j, k] - q) * (A[i, k] - q) for i, j, k in itertools.combinations(range(G.n), 3)
    )


def exact_mean(dist, f):
    return sum(pr * f(Graph.from_key(dist.n, k)) for k, pr in enumerate(dist.probs) if pr > 0)


graphs = st.integers(3, 10).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.booleans(), min_size=num_pairs(n), max_size=num_pairs(n)))
)


class TestSignedCount:
    def test_empty_graph(self):
        assert signed_triangle_count(Graph.empty(5), 0.5) == pytest.approx(-comb(5, 3) * 0.125)

    def test_complete_graph(self):
        assert signed_triangle_count(Graph.complete(5), 0.5) == pytest.approx(comb(5, 3) * 0.125)

    def test_tiny(self):
        assert signed_triangle_count(Graph.complete(2), 0.3) == 0.0

    @settings(max_examples=60, deadline=None)
    @given(graphs, st.floats(0, 1))
    def test_matches_brute_force(self, data, q):
        n, mask = data
        G = Graph.from_mask(n, mask)
        assert signed_triangle_count(G, q) == pytest.approx(brute_tau(G, q), abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(graphs, st.floats(0, 1), st.randoms())
    def test_relabel_invariant(self, data, q, r):
        n, mask = data
        G = Graph.from_mask(n, mask)
        perm = list(range(n))
        r.shuffle(perm)
        assert signed_triangle_count(G.relabel(perm), q) == pytest.approx(signed_triangle_count(G, q), abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(graphs, st.floats(0, 1), st.data())
    def test_edge_delta_identity(self, data, q, draw):
        n, mask = data
        G = Graph.from_mask(n, mask)
        u, v = sorted(draw.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True)))
        e = edge_index(u, v)
        H = G.with_edges([e], e not in G)
        delta = signed_triangle_count(H, q) - signed_triangle_count(G, q)
        assert tau_edge_delta(G, q, u, v) == pytest.approx(delta, abs=1e-9)

    def test_er_mean_zero_exact(self):
        assert exact_mean(oracle.exact_er(4, 0.3), lambda G: signed_triangle_count(G, 0.3)) == pytest.approx(0, abs=1e-14)

    def test_er_variance_exact(self):
        d = oracle.exact_er(4, 0.3)
        var = exact_mean(d, lambda G: signed_triangle_count(G, 0.3) ** 2)
        assert var == pytest.approx(er_tau_variance(4, 0.3), rel=1e-12)

    @pytest.mark.parametrize("n,p,pp", [(4, 0.3, 0.1), (5, 0.5, 0.05), (4, 0.7, 0.3)])
    def test_rgt_mean_exact(self, n, p, pp):
        q = rgt_edge_density(p, pp, n)
        got = exact_mean(oracle.exact_rgt(n, p, pp), lambda G: signed_triangle_count(G, q))
        assert rgt_tau_mean(n, p, pp) == pytest.approx(got, rel=1e-10)

    def test_rgt_density_exact(self):
        d = oracle.exact_rgt(4, 0.3, 0.1)
        got = exact_mean(d, lambda G: G.num_edges()) / 6
        assert rgt_edge_density(0.3, 0.1, 4) == pytest.approx(got, rel=1e-12)


def test_rgt_density_high_precision():
    from fractions import Fraction

    exact = 1 - Fraction(7, 10) * Fraction(148, 150) ** 148
    assert rgt_edge_density(0.3, 2 / 150, 150) == pytest.approx(float(exact), rel=1e-12)


def test_test_outcome_fields(rng):
    G = sample_er(30, 0.4, rng)
    o = er_vs_rgt_test(G, 30, 0.3, 0.05, replicate_id=9)
    assert isinstance(o, TestOutcome) and o.replicate_id == 9
    assert o.decision == ("alternative" if o.statistic_value > o.threshold else "null")
    with pytest.raises(ValueError):
        er_vs_rgt_test(G, 31, 0.3, 0.05)


def test_test_separates_at_strong_signal(rng):
    # sparse base graph, many triangles: signal-to-noise about 5
    n, p, pp = 100, 0.01, 0.003
    q = rgt_edge_density(p, pp, n)
    outs, truths = [], []
    for i in range(40):
        null = i % 2 == 0
        G = sample_er(n, q, rng) if null else sample_rgt(n, p, pp, rng)[0]
        outs.append(er_vs_rgt_test(G, n, p, pp))
        truths.append("null" if null else "alternative")
    assert accuracy(outs, truths) >= 0.9


def test_moment_estimator(rng):
    mean, var, se = moment_estimator(lambda r: r.random(), lambda x: x, 4000, rng)
    assert abs(mean - 0.5) <= 4 * se
    assert var == pytest.approx(1 / 12, rel=0.1)
    with pytest.raises(ValueError):
        moment_estimator(lambda r: 0.0, lambda x: x, 1, rng)


class TestInfluence:
    def test_zero_without_triangles(self):
        assert marginal_influence_exact(Graph.complete(4), [1, 2], 0, 0.5, 0.0) == 0.0

    def test_positive_on_shared_triangle(self):
        # edges of one triangle are coupled through it
        val = marginal_influence_exact(Graph.complete(4), [edge_index(0, 2)], edge_index(0, 1), 0.5, 0.1)
        assert 0 < val < 1

    def test_bounded_by_small_pprime(self):
        a = marginal_influence_exact(Graph.complete(5), [edge_index(2, 3)], edge_index(0, 1), 0.5, 0.01)
        b = marginal_influence_exact(Graph.complete(5), [edge_index(2, 3)], edge_index(0, 1), 0.5, 0.1)
        assert a < b
