"""Named verification pipelines shared by the CLI and the acceptance suite.

Each function returns a plain dict: scalar summaries plus, where useful, a
list of row dicts suitable for CSV output.
"""

from __future__ import annotations

import math

import numpy as np

from . import oracle
from .gibbs import GibbsSpec, estimate_marginals
from .graph import Graph, is_uniformly_2star_dense, num_pairs
from .models import ModelParams, plant_random, rig_edge_density, sample_er, sample_rgt, sample_rig
from .reductions import estimate_pe, forward_transition, p_star_default, param_map_f, param_map_g
from .rng import make_rng
from .stats import (
    accuracy,
    er_tau_variance,
    er_vs_rgt_test,
    rgt_edge_density,
    rgt_tau_mean,
)
from ._kernels import triangle_count


def reverse_identity(cases=((3, 0.5, 0.2), (4, 0.5, 0.1), (4, 0.3, 0.05))) -> dict:
    rows = [{"n": n, "p": p, "pprime": pp, "tv": oracle.reverse_identity_error(n, p, pp)} for n, p, pp in cases]
    return {"max_tv": max(r["tv"] for r in rows), "rows": rows}


def posterior(ns=(3, 4), p: float = 0.3, p_prime: float = 0.1) -> dict:
    rows = [{"n": n, "p": p, "pprime": p_prime, "max_error": oracle.verify_posterior(n, p, p_prime)} for n in ns]
    return {"max_error": max(r["max_error"] for r in rows), "rows": rows}


def glauber_balance_all(n: int = 4, p: float = 0.5, p_prime: float = 0.1) -> dict:
    """Stationarity and detailed balance of the exact one-step kernel on every graph."""
    worst_stat = worst_db = 0.0
    for key in range(1 << num_pairs(n)):
        s, d = oracle.glauber_balance_error(Graph.from_key(n, key), p, p_prime)
        worst_stat, worst_db = max(worst_stat, s), max(worst_db, d)
    return {"stationarity_l1": worst_stat, "detailed_balance": worst_db}


def glauber_marginals(
    n: int = 5, p: float = 0.5, p_prime: float = 0.05, samples: int = 200_000, seed: int = 0
) -> dict:
    G = Graph.complete(n)
    spec = GibbsSpec.build(G, p, p_prime)
    est, se = estimate_marginals(spec, samples, make_rng(seed))
    exact_all = oracle.exact_mu_g(G, p, p_prime).edge_marginals()
    exact = exact_all[spec.candidate_triples]
    z = np.abs(est - exact) / se
    rows = [
        {"triple_index": int(t), "estimate": float(a), "exact": float(b), "stderr": float(s), "z": float(zz)}
        for t, a, b, s, zz in zip(spec.candidate_triples, est, exact, se, z)
    ]
    return {"max_z": float(z.max()), "rows": rows}


def marginal_smallness(n: int = 4, settings=((0.5, 0.1), (0.3, 0.05), (0.7, 0.2))) -> dict:
    total_v = total_c = 0
    for p, pp in settings:
        v, c = oracle.marginal_bound_violations(n, p, pp)
        total_v += v
        total_c += c
    return {"violations": total_v, "checks": total_c}


def er_rgt_test(n: int = 150, p: float = 0.3, p_prime: float | None = None, trials: int = 200, seed: int = 0) -> dict:
    """Signed-triangle test on ``trials`` ER graphs at the matched density and ``trials`` RGT graphs."""
    p_prime = 2.0 / n if p_prime is None else p_prime
    q = rgt_edge_density(p, p_prime, n)
    outcomes, truths, rows = [], [], []
    for i in range(2 * trials):
        rng = make_rng(seed, i)
        truth = "null" if i < trials else "alternative"
        G = sample_er(n, q, rng) if truth == "null" else sample_rgt(n, p, p_prime, rng)[0]
        o = er_vs_rgt_test(G, n, p, p_prime, replicate_id=i)
        outcomes.append(o)
        truths.append(truth)
        rows.append({"trial": i, "truth": truth, "tau": o.statistic_value, "threshold": o.threshold, "decision": o.decision})
    tau_null = np.array([o.statistic_value for o, t in zip(outcomes, truths) if t == "null"])
    tau_alt = np.array([o.statistic_value for o, t in zip(outcomes, truths) if t == "alternative"])
    return {
        "q": q,
        "accuracy": accuracy(outcomes, truths),
        "mean_tau_null": float(tau_null.mean()),
        "mean_tau_alt": float(tau_alt.mean()),
        "stderr_tau_alt": float(tau_alt.std(ddof=1) / math.sqrt(trials)),
        "null_bound": 4.0 * math.sqrt(er_tau_variance(n, q) / trials),
        "alt_target": math.comb(n, 3) * p_prime * (1 - q) ** 3,
        "alt_exact_mean": rgt_tau_mean(n, p, p_prime),
        "rows": rows,
    }


def forward_density(
    n: int = 500, k: int = 5, q: float = 0.8, p: float = 0.5, p_prime: float | None = None,
    replicates: int = 2000, seed: int = 0,
) -> dict:
    """In-S edge density after the forward map applied to a planted ER graph."""
    p_prime = p_star_default(n) if p_prime is None else p_prime
    inside = 0
    for i in range(replicates):
        rng = make_rng(seed, i)
        G, S = plant_random(sample_er(n, p, rng), k, q, rng)
        H = forward_transition(G, p_prime, rng)
        adj = H.adjacency()
        inside += int(np.triu(adj[np.ix_(S, S)], 1).sum())
    pairs = replicates * k * (k - 1) // 2
    dens = inside / pairs
    target = param_map_f(q, p_prime, n)
    se = math.sqrt(target * (1 - target) / pairs)
    return {"density": dens, "target": target, "stderr": se, "z": (dens - target) / se}


def pe_scaling(n: int = 100, p: float = 0.5, replicates: int = 500, seed: int = 0, workers: int | None = None) -> dict:
    """``p_e`` at ``p' = 1/(n ln n)`` and at half that value."""
    pp = p_star_default(n)
    pe1, se1, steps1 = estimate_pe(ModelParams(n, p, pp), replicates, make_rng(seed, 0), workers=workers)
    pe2, se2, steps2 = estimate_pe(ModelParams(n, p, pp / 2), replicates, make_rng(seed, 1), workers=workers)
    return {
        "pprime": pp,
        "pe": pe1,
        "pe_stderr": se1,
        "pe_half": pe2,
        "pe_half_stderr": se2,
        "bound": 10 * n * pp,
        "drop": (1 - pe1) - (1 - pe2),
        "drop_threshold": 2 * math.sqrt(se1**2 + se2**2),
        "gibbs_steps": steps1 + steps2,
    }


def round_trip(q: float, p_prime: float, n: int, p_e: float) -> dict:
    fg = param_map_f(param_map_g(q, p_e), p_prime, n)
    gf = param_map_g(param_map_f(q, p_prime, n), p_e)
    return {"f_of_g": fg, "g_of_f": gf, "err_fg": abs(fg - q), "err_gf": abs(gf - q)}


def commutation_curve(
    n: int = 4, p: float = 0.5, q: float = 0.9, pprimes=(0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2), e: int = 0
) -> dict:
    rows = [{"pprime": pp, "q": q, "gap": oracle.exact_commutation_gap(n, p, pp, e, q)} for pp in pprimes]
    gaps = {r["pprime"]: r["gap"] for r in rows}
    return {"gaps": gaps, "rows": rows}


def two_star(n: int = 200, p: float = 0.5, samples: int = 100, seed: int = 0) -> dict:
    c = p * p / 2
    pp = p_star_default(n)
    er_ok = sum(is_uniformly_2star_dense(sample_er(n, p, make_rng(seed, i)), c) for i in range(samples))
    rgt_ok = sum(
        is_uniformly_2star_dense(sample_rgt(n, p, pp, make_rng(seed, samples + i))[0], c) for i in range(samples)
    )
    return {"c": c, "er_dense": er_ok, "rgt_dense": rgt_ok, "samples": samples}


def rig_matched_rgt(n: int, d: int, delta: float) -> tuple[float, float]:
    """RGT parameters matched to RIG(n, d, delta) in the dense-intersection regime."""
    tri = d * delta**3 * (1 - delta) ** (n - 3)
    p = -math.expm1(-d * delta**2 + (n - 2) * tri)
    return p, -math.expm1(-tri)


def rig_density(n: int = 50, d: int = 10_000, delta: float = 0.01, replicates: int = 500, seed: int = 0) -> dict:
    m = num_pairs(n)
    dens = np.empty(replicates)
    tri_rig = np.empty(replicates)
    tri_rgt = np.empty(replicates)
    p_m, pp_m = rig_matched_rgt(n, d, delta)
    for i in range(replicates):
        G = sample_rig(n, d, delta, make_rng(seed, i))
        dens[i] = G.num_edges() / m
        tri_rig[i] = triangle_count(G.adjacency())
        H = sample_rgt(n, p_m, pp_m, make_rng(seed, replicates + i))[0]
        tri_rgt[i] = triangle_count(H.adjacency())
    target = rig_edge_density(d, delta)
    se = float(dens.std(ddof=1) / math.sqrt(replicates))
    return {
        "density": float(dens.mean()),
        "target": target,
        "stderr": se,
        "z": (float(dens.mean()) - target) / se,
        "matched_rgt": {"p": p_m, "pprime": pp_m},
        "triangles_rig": float(tri_rig.mean()),
        "triangles_rgt": float(tri_rgt.mean()),
    }


EXPERIMENTS = {
    "reverse-identity": reverse_identity,
    "posterior": posterior,
    "glauber-balance": glauber_balance_all,
    "glauber-marginals": glauber_marginals,
    "marginal-smallness": marginal_smallness,
    "er-rgt-test": er_rgt_test,
    "forward-density": forward_density,
    "pe-scaling": pe_scaling,
    "commutation-curve": commutation_curve,
    "two-star": two_star,
    "rig-density": rig_density,
}
