import json
import math
from fractions import Fraction

import numpy as np
import pytest

from trigraph import oracle
from trigraph.graph import Graph, edge_union
from trigraph.models import ModelParams, sample_rgt
from trigraph.reductions import (
    ReductionReport,
    estimate_pe,
    forward_transition,
    p_star_default,
    param_map_f,
    param_map_g,
    param_map_g_full,
    reverse_full,
    reverse_transition,
    reverse_transition_detail,
)
from trigraph.rng import make_rng


class TestParamMaps:
    def test_f_identity_at_zero(self):
        assert param_map_f(0.4, 0.0, 100) == 0.4

    def test_f_high_precision(self):
        exact = Fraction(1, 2) + Fraction(1, 2) * (1 - Fraction(999, 1000) ** 98)
        assert param_map_f(0.5, 1e-3, 100) == pytest.approx(float(exact), rel=1e-14)

    def test_f_tiny_pprime_no_cancellation(self):
        assert param_map_f(0.0, 1e-15, 1000) == pytest.approx(998e-15, rel=1e-9)

    def test_g(self):
        assert param_map_g(0.8, 0.9) == pytest.approx(0.72)

    def test_g_full_reduces_to_g(self):
        assert param_map_g_full(0.7, 0.01, 0.01, 50, 0.9) == pytest.approx(0.63)

    def test_p_star(self):
        assert p_star_default(100) == pytest.approx(1 / (100 * math.log(100)))


class TestTransitions:
    def test_forward_is_superset(self, rng):
        G = Graph.from_edges(6, [(0, 1)])
        H = forward_transition(G, 0.2, rng)
        assert G.issubset(H)

    def test_reverse_only_touches_covered_edges(self, rng):
        G, _ = sample_rgt(12, 0.5, 0.02, rng)
        res = reverse_transition_detail(G, 0.5, 0.02, rng)
        touched = res.graph.mask() != G.mask()
        assert not np.any(touched & ~edge_union(res.triangles).mask())

    def test_reverse_exact_vs_mcmc_edge_law(self, rng):
        # on RGT(4) input both backends should return G(4, p) edge counts
        n, p, pp, reps = 4, 0.5, 0.1, 3000
        for backend in ("exact", "mcmc"):
            m = [
                reverse_transition(sample_rgt(n, p, pp, rng)[0], p, pp, rng, backend=backend).num_edges()
                for _ in range(reps)
            ]
            assert abs(np.mean(m) - 3.0) <= 4 * math.sqrt(1.5 / reps)

    def test_bad_backend(self, rng):
        with pytest.raises(ValueError):
            reverse_transition(Graph.complete(4), 0.5, 0.1, rng, backend="gpu")

    def test_reverse_full_rejects_large_pprime(self, rng):
        with pytest.raises(ValueError):
            reverse_full(Graph.complete(10), 0.5, 0.5, rng)

    def test_reverse_full_runs(self, rng):
        G, _ = sample_rgt(20, 0.5, 0.001, rng)
        assert reverse_full(G, 0.5, 0.001, rng).n == 20


class TestPe:
    def test_worker_count_does_not_change_result(self):
        params = ModelParams(12, 0.5, 0.02)
        a = estimate_pe(params, 40, make_rng(3), workers=1)
        b = estimate_pe(params, 40, make_rng(3), workers=2)
        assert a == b

    def test_exact_backend_against_oracle(self):
        n, p, pp, reps = 4, 0.5, 0.2, 4000
        est, se, _ = estimate_pe(ModelParams(n, p, pp), reps, make_rng(8), backend="exact")
        assert abs(est - oracle.exact_pe(n, p, pp)) <= 4 * max(se, 1e-3)

    def test_requires_replicates(self):
        with pytest.raises(ValueError):
            estimate_pe(ModelParams(5, 0.5, 0.1), 0, make_rng(0))


def test_report_json():
    r = ReductionReport(ModelParams(10, 0.5, 0.01), ModelParams(10, 0.5), 0.9, 0.01, 123)
    d = json.loads(r.to_json())
    assert d["input_params"]["p_prime"] == 0.01 and d["gibbs_steps_used"] == 123
