"""Command-line entry point: ``trigraph {sample,reduce,gibbs,test,oracle,experiment}``.

Exit codes: 0 success, 1 I/O failure, 2 usage or parameter error, 3 a
verification check failed.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import os
import sys

from . import __version__, experiments, oracle
from ._accel import backend
from .gibbs import GibbsSpec, estimate_marginals
from .graph import format_graph, read_graph, write_graph
from .models import ModelParams, plant_random, sample_er, sample_rgt, sample_rig
from .reductions import (
    ReductionReport,
    estimate_pe,
    forward_transition,
    p_star_default,
    param_map_f,
    param_map_g,
    param_map_g_full,
    reverse_transition_detail,
)
from .rng import make_rng

EXIT_IO = 1
EXIT_USAGE = 2
EXIT_FAIL = 3

TOLERANCES = {
    "reverse-identity": 1e-9,
    "posterior": 1e-9,
    "glauber-balance": 1e-12,
    "commutation": 1e-12,
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# probability expressions such as "1/(n*ln(n))" or "2/n"
# ---------------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"ln": math.log, "log": math.log, "sqrt": math.sqrt, "exp": math.exp}


def parse_prob(text: str | None, n: int | None, name: str = "probability") -> float | None:
    """Evaluate a decimal or an arithmetic expression in ``n``."""
    if text is None:
        return None
    try:
        return float(text)
    except ValueError:
        pass

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "n":
            if n is None:
                raise UsageError(f"{name}: expression uses n but --n is not known")
            return float(n)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and len(node.args) == 1:
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise UsageError(f"{name}: unsupported expression {text!r}")

    try:
        value = ev(ast.parse(text, mode="eval"))
    except SyntaxError as exc:
        raise UsageError(f"{name}: cannot parse {text!r}") from exc
    except (ZeroDivisionError, ValueError) as exc:
        raise UsageError(f"{name}: {exc}") from exc
    return value


def _prob(args, attr: str, n: int | None, required: bool = False, default=None) -> float | None:
    raw = getattr(args, attr)
    if raw is None:
        if required:
            raise UsageError(f"--{attr.replace('_', '-')} is required")
        return default
    val = parse_prob(raw, n, "--" + attr.replace("_", "-"))
    if not 0.0 <= val <= 1.0:
        raise UsageError(f"--{attr.replace('_', '-')} must lie in [0, 1], got {val}")
    return val


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _header_comment(args, extra: dict | None = None) -> str:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    if extra:
        params.update(extra)
    return f"# trigraph {__version__} backend={backend()} seed={getattr(args, 'seed', None)} params={json.dumps(params, sort_keys=True, default=str)}"


def _write_csv(path: str | None, args, columns: list[str], rows: list[dict], trailer: list[str] = (), extra=None) -> None:
    buf = io.StringIO()
    buf.write(_header_comment(args, extra) + "\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    for line in trailer:
        buf.write(f"# {line}\n")
    _emit(path, buf.getvalue())


def _emit(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_sample(args) -> int:
    n = args.n
    rng = make_rng(args.seed)
    if args.model == "er":
        G = sample_er(n, _prob(args, "p", n, required=True), rng)
    elif args.model == "rgt":
        G = sample_rgt(n, _prob(args, "p", n, required=True), _prob(args, "pprime", n, required=True), rng)[0]
    else:
        if args.d is None:
            raise UsageError("--d is required for --model rig")
        G = sample_rig(n, args.d, _prob(args, "delta", n, required=True), rng)
    comments = [_header_comment(args)[2:]]
    if args.plant_k:
        q = _prob(args, "plant_q", n, required=True)
        if args.plant_k > n:
            raise UsageError("--plant-k exceeds --n")
        G, S = plant_random(G, args.plant_k, q, rng)
        comments.append("planted " + " ".join(map(str, S.tolist())))
    if args.out in (None, "-"):
        sys.stdout.write(format_graph(G, comments))
    else:
        write_graph(args.out, G, comments)
    return 0


def cmd_reduce(args) -> int:
    G = read_graph(args.graph)
    n = G.n
    p = _prob(args, "p", n, required=True)
    pp = _prob(args, "pprime", n, required=True)
    q = _prob(args, "q", n, default=0.0)
    rng = make_rng(args.seed)
    inp = ModelParams(n, p, pp, q=q, seed=args.seed)
    pe = pe_se = None
    steps = 0
    if args.direction == "forward":
        out = forward_transition(G, pp, rng)
        out_params = ModelParams(n, p, pp, q=param_map_f(q, pp, n), seed=args.seed)
    else:
        if not 0.0 < p < 1.0:
            raise UsageError("--p must lie in (0, 1) for the reverse map")
        p_work = pp
        if args.direction == "reverse-full":
            p_star = _prob(args, "pprime_star", n, default=p_star_default(n))
            if pp > p_star:
                raise UsageError(f"--pprime {pp} exceeds --pprime-star {p_star}")
            p_delta = (p_star - pp) / (1.0 - pp)
            G = forward_transition(G, p_delta, rng)
            p_work = p_star
        res = reverse_transition_detail(G, p, p_work, rng, backend=args.backend, c_mix=args.c_mix)
        out, steps = res.graph, res.steps
        if args.pe_replicates > 0:
            pe, pe_se, pe_steps = estimate_pe(
                ModelParams(n, p, p_work), args.pe_replicates, make_rng(args.seed, 1),
                backend=args.backend, c_mix=args.c_mix, workers=args.workers,
            )
            steps += pe_steps
            if args.direction == "reverse":
                q_out = param_map_g(q, pe)
            else:
                q_out = param_map_g_full(q, pp, p_work, n, pe)
            out_params = ModelParams(n, p, 0.0, q=q_out, seed=args.seed)
        else:
            out_params = None
    comments = [_header_comment(args)[2:]]
    if args.out in (None, "-"):
        sys.stdout.write(format_graph(out, comments))
    else:
        write_graph(args.out, out, comments)
    if args.report:
        rep = ReductionReport(inp, out_params, pe, pe_se, steps, args.direction)
        with open(args.report, "w") as fh:
            fh.write(rep.to_json() + "\n")
    return 0


def cmd_gibbs(args) -> int:
    G = read_graph(args.graph)
    n = G.n
    p = _prob(args, "p", n, required=True)
    pp = _prob(args, "pprime", n, required=True)
    if not 0.0 < p < 1.0 or pp >= 1.0:
        raise UsageError("need 0 < p < 1 and p' < 1")
    spec = GibbsSpec.build(G, p, pp)
    steps = args.steps if args.steps.upper() == "AUTO" else int(args.steps)
    est, se = estimate_marginals(spec, args.samples, make_rng(args.seed), burn_in=steps, c_mix=args.c_mix)
    rows = [{"triple_index": int(t), "estimate": float(a), "stderr": float(s)} for t, a, s in zip(spec.candidate_triples, est, se)]
    _write_csv(args.out, args, ["triple_index", "estimate", "stderr"], rows)
    return 0


def cmd_test(args) -> int:
    n = args.n
    p = _prob(args, "p", n, required=True)
    pp = _prob(args, "pprime", n, required=True)
    res = experiments.er_rgt_test(n, p, pp, args.trials, args.seed)
    summary = f"summary accuracy={res['accuracy']!r} mean_tau_null={res['mean_tau_null']!r} mean_tau_alt={res['mean_tau_alt']!r}"
    _write_csv(args.out, args, ["trial", "truth", "tau", "threshold", "decision"], res["rows"], [summary])
    print(summary, file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    n = args.n
    p = _prob(args, "p", n, required=True)
    pp = _prob(args, "pprime", n, required=True)
    check = args.check
    tol = TOLERANCES[check]
    if check == "reverse-identity":
        err = oracle.reverse_identity_error(n, p, pp)
        ok = err <= tol
        print(f"check=reverse-identity n={n} p={p} pprime={pp} max_error={err:.3e} tolerance={tol:.0e}")
    elif check == "posterior":
        err = oracle.verify_posterior(n, p, pp)
        ok = err <= tol
        print(f"check=posterior n={n} p={p} pprime={pp} max_error={err:.3e} tolerance={tol:.0e}")
    elif check == "glauber-balance":
        res = experiments.glauber_balance_all(n, p, pp)
        err = max(res["detailed_balance"], res["stationarity_l1"])
        ok = err <= tol
        print(f"check=glauber-balance n={n} p={p} pprime={pp} max_error={err:.3e} tolerance={tol:.0e}")
    else:
        q = _prob(args, "q", n, default=0.9)
        e = oracle.default_edge(n)
        g0 = oracle.exact_commutation_gap(n, p, 0.0, e, q)
        g_small = oracle.exact_commutation_gap(n, p, pp / 10, e, q)
        g = oracle.exact_commutation_gap(n, p, pp, e, q)
        ok = g0 <= tol and g_small < g
        print(f"check=commutation n={n} p={p} q={q} gap(0)={g0:.3e} gap({pp / 10:g})={g_small:.6g} gap({pp:g})={g:.6g}")
    print("PASS" if ok else "FAIL")
    return 0 if ok else EXIT_FAIL


def cmd_experiment(args) -> int:
    fn = experiments.EXPERIMENTS[args.name]
    kwargs = json.loads(args.params) if args.params else {}
    if args.seed is not None and "seed" in fn.__code__.co_varnames:
        kwargs.setdefault("seed", args.seed)
    res = fn(**kwargs)
    rows = res.pop("rows", None)
    if rows:
        _write_csv(args.out, args, list(rows[0].keys()), rows, [f"summary {json.dumps(res, sort_keys=True, default=str)}"])
    else:
        _emit(args.out, _header_comment(args) + "\n" + json.dumps(res, sort_keys=True, default=str, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="trigraph", description="Random graphs with triangles: samplers, reductions and exact checks.")
    ap.add_argument("--version", action="version", version=f"trigraph {__version__} ({backend()})")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    workers_default = int(os.environ.get("TRIGRAPH_WORKERS", "1"))

    s = sub.add_parser("sample", help="sample a graph")
    s.add_argument("--model", choices=["er", "rgt", "rig"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p")
    s.add_argument("--pprime")
    s.add_argument("--d", type=int)
    s.add_argument("--delta")
    s.add_argument("--plant-k", type=int, default=0)
    s.add_argument("--plant-q")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    r = sub.add_parser("reduce", help="apply the forward or reverse map to a graph")
    r.add_argument("--direction", choices=["forward", "reverse", "reverse-full"], required=True)
    r.add_argument("--graph", required=True)
    r.add_argument("--p", required=True)
    r.add_argument("--pprime", required=True)
    r.add_argument("--pprime-star")
    r.add_argument("--q", help="planted density of the input, used for the report")
    r.add_argument("--pe-replicates", type=int, default=0)
    r.add_argument("--backend", choices=["mcmc", "exact"], default="mcmc")
    r.add_argument("--c-mix", type=float, default=8.0)
    r.add_argument("--workers", type=int, default=workers_default)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out")
    r.add_argument("--report")
    r.set_defaults(func=cmd_reduce)

    g = sub.add_parser("gibbs", help="estimate per-triangle marginals of mu_G")
    g.add_argument("--graph", required=True)
    g.add_argument("--p", required=True)
    g.add_argument("--pprime", required=True)
    g.add_argument("--steps", default="AUTO")
    g.add_argument("--samples", type=int, default=10_000)
    g.add_argument("--c-mix", type=float, default=8.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gibbs)

    t = sub.add_parser("test", help="signed-triangle ER vs RGT test")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--p", required=True)
    t.add_argument("--pprime", required=True)
    t.add_argument("--trials", type=int, default=200)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out")
    t.set_defaults(func=cmd_test)

    o = sub.add_parser("oracle", help="exact small-n identity checks")
    o.add_argument("--check", choices=sorted(TOLERANCES), required=True)
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--p", required=True)
    o.add_argument("--pprime", required=True)
    o.add_argument("--q")
    o.set_defaults(func=cmd_oracle)

    x = sub.add_parser("experiment", help="run a named verification pipeline")
    x.add_argument("--name", choices=sorted(experiments.EXPERIMENTS), required=True)
    x.add_argument("--params", help="JSON object of keyword arguments")
    x.add_argument("--seed", type=int)
    x.add_argument("--workers", type=int, default=workers_default)
    x.add_argument("--out")
    x.set_defaults(func=cmd_experiment)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "n", None) is not None and args.n < 0:
        ap.error("--n must be non-negative")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"trigraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotImplementedError as exc:
        print(f"trigraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"trigraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"trigraph: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
