"""Compare the numba-compiled kernels with their pure Python / numpy fallbacks.

    python benchmarks/bench_kernels.py [--n 60] [--steps 200000] [--repeat 3]

Compiled versions are warmed up once before timing.  Fallback timings call
the uncompiled Python source (``py_func``) or the ``*_numpy`` variant, which
is what runs under ``TRIGRAPH_DISABLE_NUMBA=1``.
"""

import argparse
import math
import timeit

import numpy as np

from trigraph import _accel, _kernels
from trigraph.gibbs import ChainState, GibbsSpec
from trigraph.graph import Graph
from trigraph.models import sample_er
from trigraph.rng import make_rng


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_glauber(n, steps, repeat):
    spec = GibbsSpec.build(Graph.complete(n), 0.5, 1 / (n * math.log(n)))
    r = make_rng(0)
    picks = r.integers(0, spec.num_candidates, steps)
    u = r.random(steps)
    probs = spec.switch_on_probs()
    empty = np.zeros(0, dtype=np.int64)

    def call(fn):
        s = ChainState.empty(spec)
        return lambda: fn(spec.cand_edges, s.x, s.mult, probs, picks, u, 0, empty)

    fast = _kernels.glauber_run
    slow = getattr(fast, "py_func", fast)
    call(fast)()
    # the Python loop is slow; time a tenth of the steps and scale
    k = max(1, steps // 10)
    s = ChainState.empty(spec)
    t_slow = best(lambda: slow(spec.cand_edges, s.x, s.mult, probs, picks[:k], u[:k], 0, empty), repeat) * steps / k
    return best(call(fast), repeat), t_slow


def bench_enumerate(n, repeat):
    adj = sample_er(n, 0.5, make_rng(1)).adjacency()
    fast = _kernels._enumerate_triangles_loop
    fast(adj)
    return best(lambda: fast(adj), repeat), best(lambda: _kernels._enumerate_triangles_numpy(adj), repeat)


def bench_count(n, repeat):
    adj = sample_er(n, 0.5, make_rng(2)).adjacency()
    _kernels.triangle_count_packed(adj)
    return best(lambda: _kernels.triangle_count_packed(adj), repeat), best(lambda: _kernels.triangle_count_numpy(adj), repeat)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--count-n", type=int, default=1000)
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba unavailable or disabled; both columns time the fallback")
    rows = [
        (f"glauber_run K_{args.n}, {args.steps} steps", *bench_glauber(args.n, args.steps, args.repeat)),
        (f"enumerate_triangles G({args.n}, 0.5)", *bench_enumerate(args.n, args.repeat)),
        (f"triangle_count G({args.count_n}, 0.5)", *bench_count(args.count_n, args.repeat)),
    ]
    print(f"{'kernel':<42}{'numba (s)':>12}{'fallback (s)':>14}{'speedup':>10}")
    for name, fast, slow in rows:
        print(f"{name:<42}{fast:>12.4f}{slow:>14.4f}{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
