import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trigraph import _kernels, oracle
from trigraph.gibbs import (
    ChainState,
    GibbsSpec,
    auto_steps,
    conditional_marginal,
    estimate_marginals,
    glauber_sample,
    glauber_step,
    glauber_trace,
    log_weight,
    run_chain,
)
from trigraph.graph import Graph, TriangleSet, edge_union, num_pairs, triple_index
from trigraph.rng import make_rng


def K(n):
    return GibbsSpec.build(Graph.complete(n), 0.5, 0.1)


class TestSpec:
    def test_candidates_of_complete_graph(self):
        spec = K(5)
        assert spec.num_candidates == 10
        assert np.array_equal(spec.candidate_triples, np.arange(10))

    def test_no_candidates_without_triangles(self):
        G = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
        assert GibbsSpec.build(G, 0.5, 0.1).num_candidates == 0

    @pytest.mark.parametrize("p,pp", [(0.0, 0.1), (1.0, 0.1), (0.5, 1.0), (0.5, -0.1)])
    def test_rejects(self, p, pp):
        with pytest.raises(ValueError):
            GibbsSpec.build(Graph.complete(3), p, pp)

    def test_bounds(self):
        lo, hi = K(4).marginal_bounds()
        a = 0.1 * 8
        assert lo == pytest.approx(0.1) and hi == pytest.approx(a / (0.9 + a))


class TestLogWeight:
    def test_empty(self):
        assert log_weight(K(4), TriangleSet.empty(4)) == 0.0

    def test_single(self):
        expect = math.log(0.1 / 0.9) + 3 * math.log(2)
        assert log_weight(K(3), TriangleSet.from_triples(3, [(0, 1, 2)])) == pytest.approx(expect)

    def test_shared_edge(self):
        x = TriangleSet.from_triples(4, [(0, 1, 2), (0, 1, 3)])
        assert log_weight(K(4), x) == pytest.approx(2 * math.log(1 / 9) + 5 * math.log(2))

    def test_off_support(self):
        spec = GibbsSpec.build(Graph.from_edges(3, [(0, 1), (1, 2)]), 0.5, 0.1)
        assert log_weight(spec, TriangleSet.from_triples(3, [(0, 1, 2)])) == -math.inf


class TestConditional:
    def test_isolated_triangle(self):
        spec = K(3)
        state = ChainState.empty(spec)
        a = 0.1 / 0.9 * 8
        assert conditional_marginal(spec, state, 0) == pytest.approx(a / (1 + a))

    def test_one_uncovered_edge(self):
        # two of three edges already covered: odds (p'/(1-p')) / p
        spec = K(4)
        x = TriangleSet.from_triples(4, [(0, 1, 3), (0, 2, 3)])
        state = ChainState.from_triangles(spec, x)
        c = conditional_marginal(spec, state, triple_index(1, 2, 3))
        assert c == pytest.approx(0.2 / 1.1)
        assert c == pytest.approx(0.181818181818, abs=1e-9)

    def test_non_candidate(self):
        spec = GibbsSpec.build(Graph.from_edges(4, [(0, 1), (1, 2), (0, 2)]), 0.5, 0.1)
        assert conditional_marginal(spec, ChainState.empty(spec), triple_index(0, 1, 3)) == 0.0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**10 - 1), st.integers(0, 9), st.floats(0.1, 0.9), st.floats(0.01, 0.3))
    def test_matches_weight_ratio(self, bits, t, p, pp):
        spec = GibbsSpec.build(Graph.complete(5), p, pp)
        x = TriangleSet.from_mask(5, [(bits >> i) & 1 for i in range(10)])
        on = x.with_slots([t], True)
        off = x.with_slots([t], False)
        state = ChainState.from_triangles(spec, off)
        c = conditional_marginal(spec, state, t)
        diff = log_weight(spec, on) - log_weight(spec, off)
        assert c == pytest.approx(1 / (1 + math.exp(-diff)), rel=1e-10)
        j = sum(1 for e in spec.cand_edges[t] if state.mult[e] == 0)
        assert diff == pytest.approx(spec.log_activity - j * math.log(p), rel=1e-12, abs=1e-12)


class TestChain:
    def test_counts_stay_consistent(self, rng):
        spec = K(7)
        state = ChainState.empty(spec)
        for _ in range(20):
            run_chain(spec, state, 97, rng)
            assert np.array_equal(state.recount(spec), state.mult)
            assert np.array_equal(state.edge_indicator(), edge_union(state.triangles(spec)).mask())

    def test_single_step(self, rng):
        spec = K(5)
        state = ChainState.empty(spec)
        for _ in range(200):
            glauber_step(spec, state, rng)
        assert np.array_equal(state.recount(spec), state.mult)

    def test_single_candidate_law(self, rng):
        spec = K(3)
        a = 0.1 / 0.9 * 8
        est, se = estimate_marginals(spec, 20_000, rng, thin=1)
        assert abs(est[0] - a / (1 + a)) <= 4 * se[0]

    def test_reproducible(self):
        spec = GibbsSpec.build(Graph.complete(6), 0.5, 0.05)
        a = glauber_sample(spec, 500, make_rng(3))
        b = glauber_sample(spec, 500, make_rng(3))
        assert a == b

    def test_no_candidates(self, rng):
        spec = GibbsSpec.build(Graph.empty(5), 0.5, 0.1)
        assert glauber_sample(spec, "AUTO", rng).count() == 0

    def test_tiny_pprime_mostly_empty(self, rng):
        G = Graph.complete(5)
        spec = GibbsSpec.build(G, 0.5, 1e-4)
        assert oracle.exact_mu_g(G, 0.5, 1e-4)[0] > 0.99
        sizes = glauber_trace(spec, 20_000, lambda s: s.size(), rng, thin=100)
        assert np.mean(sizes == 0) >= 0.99

    def test_warns_outside_regime(self, rng):
        spec = GibbsSpec.build(Graph.complete(10), 0.5, 0.1)
        with pytest.warns(RuntimeWarning):
            glauber_sample(spec, 10, rng)

    def test_auto_steps(self):
        assert auto_steps(0) == 0
        assert auto_steps(1) == 8
        assert auto_steps(100) == math.ceil(8 * 100 * math.log(100))


@pytest.mark.parametrize("n", [20, 40])
def test_edge_marginal_bracket(n, rng):
    # on K_n with p' = 1/(n ln n) the cover probability of an edge is O(n p')
    pp = 1 / (n * math.log(n))
    spec = GibbsSpec.build(Graph.complete(n), 0.5, pp)
    cover = glauber_trace(spec, 300, lambda s: float(s.mult[0] > 0), rng)
    ratio = cover.mean() / (n * pp)
    assert 0.2 <= ratio <= 5.0


def test_edge_count_concentrates(rng):
    n = 40
    pp = 1 / (n * math.log(n))
    spec = GibbsSpec.build(Graph.complete(n), 0.5, pp)
    edges = glauber_trace(spec, 400, lambda s: float(s.num_edges()), rng)
    assert edges.std() <= 0.5 * edges.mean()


def test_marginals_match_exact_small(rng):
    G = Graph.complete(4).with_edges([0], False)
    spec = GibbsSpec.build(G, 0.4, 0.08)
    est, se = estimate_marginals(spec, 40_000, rng)
    exact = oracle.exact_mu_g(G, 0.4, 0.08).edge_marginals()[spec.candidate_triples]
    assert np.all(np.abs(est - exact) <= 4.5 * se)


def test_python_and_compiled_chains_agree():
    run = _kernels.glauber_run
    py = getattr(run, "py_func", run)
    spec = K(8)
    r = make_rng(11)
    picks = r.integers(0, spec.num_candidates, 5000)
    u = r.random(5000)
    probs = spec.switch_on_probs()
    s1, s2 = ChainState.empty(spec), ChainState.empty(spec)
    c1 = np.zeros(spec.num_candidates, dtype=np.int64)
    c2 = c1.copy()
    t1 = run(spec.cand_edges, s1.x, s1.mult, probs, picks, u, 7, c1)
    t2 = py(spec.cand_edges, s2.x, s2.mult, probs, picks, u, 7, c2)
    assert t1 == t2
    assert np.array_equal(s1.x, s2.x) and np.array_equal(s1.mult, s2.mult) and np.array_equal(c1, c2)
