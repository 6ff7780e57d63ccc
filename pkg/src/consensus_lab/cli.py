"""Command-line interface.

Exit codes: 0 success, 1 an asserted property failed (bound violated,
monotonicity violated, expected ordering absent), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import chain as chain_mod
from . import coupon as coupon_mod
from . import dgr as dgr_mod
from . import experiments as exp_mod
from .errors import (CapacityError, GraphParseError, InvalidParameterError,
                     ReplicationTimeout)
from .graphs import FAMILIES, load_graph
from .process import estimate


def _add_graph_args(sub):
    sub.add_argument("--graph", metavar="FILE", help="edge-list file (first line n, then 'u v' lines)")
    sub.add_argument("--family", choices=sorted(FAMILIES), help="generated family instead of --graph")
    sub.add_argument("--n", type=int, help="family size")
    sub.add_argument("--r", type=int, help="family pendant parameter (sundew/lollipop)")


def _add_common_args(sub, reps_default=10000):
    sub.add_argument("--m", type=int, default=2, help="number of strategies")
    sub.add_argument("--p", type=float, default=0.0, help="higher-strategy win probability")
    sub.add_argument("--reps", type=int, default=reps_default, help="Monte Carlo replications")
    sub.add_argument("--seed", type=int, default=0, help="RNG seed")
    sub.add_argument("--init", default="uniform",
                     help="uniform | nonempty | fixed:K (K vertices on strategy 1, rest on m)")


def _add_out_args(sub):
    sub.add_argument("--out", metavar="FILE", help="output path (default stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="consensus-lab",
                                     description="Pairwise-consensus process laboratory")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="Monte Carlo winner/time estimate on a graph")
    _add_graph_args(sim)
    _add_common_args(sim)
    _add_out_args(sim)

    exact = subs.add_parser("exact", help="exact absorption law and expected time (small m^n)")
    _add_graph_args(exact)
    exact.add_argument("--m", type=int, default=2)
    exact.add_argument("--p", type=float, default=0.0)
    exact.add_argument("--init", default="uniform", help="uniform | nonempty")
    _add_out_args(exact)

    dgr = subs.add_parser("dgr", help="delayed gambler's ruin expected times, per-k table")
    dgr.add_argument("--n", type=int, required=True)
    dgr.add_argument("--p", type=float, default=0.0)
    dgr.add_argument("--gamma", default="ones",
                     help="ones | complete | const:X | comma-separated values")
    _add_out_args(dgr)

    surv = subs.add_parser("survivor", help="closed-form surviving-strategy distribution")
    surv.add_argument("--n", type=int, required=True)
    surv.add_argument("--m", type=int, required=True)
    surv.add_argument("--p", type=float, required=True)
    _add_out_args(surv)

    cp = subs.add_parser("coupon", help="coupon-collector simulations")
    cp.add_argument("--model", choices=("multipass", "connected", "slow"), default="multipass")
    cp.add_argument("--coupling", choices=sorted(coupon_mod.COUPLINGS), default="single")
    cp.add_argument("--types", type=int, required=True, help="number of coupon types n")
    cp.add_argument("--rate", type=int, required=True, help="inverse per-type rate N")
    cp.add_argument("--q", type=float, default=1.0, help="geometric target parameter")
    cp.add_argument("--slow-q", type=float, help="keep probability of the slow types")
    cp.add_argument("--slow-types", type=int, default=1, help="number of slow types (model=slow)")
    cp.add_argument("--index-map", default="disjoint", choices=("disjoint", "pairs", "shared"))
    cp.add_argument("--reps", type=int, default=10000)
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--per-run", action="store_true", help="emit one row per replication")
    _add_out_args(cp)

    bench = subs.add_parser("bench", help="MC estimate with exact reference when feasible")
    _add_graph_args(bench)
    _add_common_args(bench)
    _add_out_args(bench)

    vb = subs.add_parser("verify-bound", help="check mean+3SE < n^2 log n + n at p=0")
    _add_graph_args(vb)
    vb.add_argument("--suite-max-n", type=int, default=128,
                    help="largest size of the standard suite (used when no graph given)")
    vb.add_argument("--reps", type=int, default=10000)
    vb.add_argument("--seed", type=int, default=0)
    _add_out_args(vb)

    cr = subs.add_parser("compare-regular", help="exact E[T] over curated regular graphs")
    cr.add_argument("--n", type=int, default=6)
    cr.add_argument("--p-grid", default="0,0.1,0.2,0.3,0.4,0.5")
    _add_out_args(cr)

    sl = subs.add_parser("sundew-lollipop", help="paired-seed sundew vs lollipop comparison")
    sl.add_argument("--n", type=int, required=True)
    sl.add_argument("--r", type=int, required=True)
    sl.add_argument("--reps", type=int, default=10000)
    sl.add_argument("--seed", type=int, default=0)
    _add_out_args(sl)

    scan = subs.add_parser("scan-monotonicity", help="symmetric-sum monotonicity scan over lambda")
    scan.add_argument("--n", type=int, required=True)
    scan.add_argument("--gamma", default="ones")
    scan.add_argument("--grid-step", type=float, default=0.01)
    scan.add_argument("--tol", type=float, default=1e-9)
    scan.add_argument("--single-k", type=int, help="scan E_k alone instead of the symmetric sums")
    _add_out_args(scan)

    return parser


def _build_graph(args):
    if getattr(args, "graph", None):
        return args.graph, load_graph(args.graph)
    if getattr(args, "family", None):
        if args.n is None:
            raise InvalidParameterError("--family needs --n")
        name = f"{args.family}_{args.n}" + (f"_{args.r}" if args.r is not None else "")
        return name, FAMILIES[args.family](args.n, args.r)
    raise InvalidParameterError("give either --graph FILE or --family NAME --n INT")


def _parse_init(init, n, m):
    if init in ("uniform", "nonempty"):
        return init
    if init.startswith("fixed:"):
        k = int(init.split(":", 1)[1])
        if not 0 <= k <= n:
            raise InvalidParameterError(f"fixed:K needs 0 <= K <= {n}")
        return [1] * k + [m] * (n - k)
    raise InvalidParameterError(f"unknown init {init!r}")


def _parse_gammas(spec, n):
    if spec == "ones":
        return tuple([1.0] * (n - 1))
    if spec == "complete":
        return tuple(dgr_mod.complete_graph_gammas(n))
    if spec.startswith("const:"):
        return tuple([float(spec.split(":", 1)[1])] * (n - 1))
    values = tuple(float(tok) for tok in spec.split(","))
    if len(values) != n - 1:
        raise InvalidParameterError(f"--gamma list needs {n - 1} values")
    return values


def _emit(args, rows, fieldnames):
    if args.format == "json":
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in fieldnames})
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_simulate(args):
    name, graph = _build_graph(args)
    init = _parse_init(args.init, graph.n, args.m)
    stats = estimate(graph, args.p, args.m, args.reps, args.seed, init=init)
    row = {"graph_id": name, "n": graph.n, "edges": graph.num_edges, "p": args.p,
           "m": args.m, "init": args.init, "replications": stats.replications,
           "time_mean": stats.time_mean, "time_var": stats.time_var,
           "stderr": stats.stderr, "seed": stats.seed}
    for l in range(1, args.m + 1):
        row[f"winner_{l}"] = stats.winner_counts[l - 1]
    _emit(args, [row], list(row))
    return 0


def _cmd_exact(args):
    name, graph = _build_graph(args)
    if args.init not in ("uniform", "nonempty"):
        raise InvalidParameterError("exact supports --init uniform|nonempty")
    ch = chain_mod.build_chain(graph, args.m, args.p)
    e_t = chain_mod.expected_absorption_time(ch, init=args.init)
    dist = chain_mod.absorption_distribution(ch, init=args.init)
    row = {"graph_id": name, "n": graph.n, "edges": graph.num_edges, "p": args.p,
           "m": args.m, "init": args.init, "E_T": e_t}
    for l in range(1, args.m + 1):
        row[f"P_S_{l}"] = float(dist[l - 1])
    _emit(args, [row], list(row))
    return 0


def _dgr_table(n, p, gammas):
    params = dgr_mod.DgrParams(n, p, gammas)
    times = dgr_mod.expected_time_closed_vector(params)
    lam = params.lam
    return [{"k": k, "lambda": lam, "E_k": float(times[k]),
             "E_sym": float(times[k] + times[n - k])} for k in range(n + 1)]


def _cmd_dgr(args):
    if args.p == 1.0:
        raise InvalidParameterError("p=1 has no finite expected absorption time parameterization")
    gammas = _parse_gammas(args.gamma, args.n)
    rows = _dgr_table(args.n, args.p, gammas)
    _emit(args, rows, ["k", "lambda", "E_k", "E_sym"])
    return 0


def _cmd_survivor(args):
    dist = dgr_mod.survivor_distribution(args.n, args.m, args.p)
    rows = [{"l": l, "probability": float(dist[l - 1])} for l in range(1, args.m + 1)]
    _emit(args, rows, ["l", "probability"])
    return 0


def _cmd_coupon(args):
    n, big_n, reps, seed = args.types, args.rate, args.reps, args.seed
    if args.model == "multipass":
        spec = coupon_mod.CouponSpec(n, big_n)
        times = coupon_mod.multipass_times(spec, args.coupling, reps, seed)
        bound = coupon_mod.collector_bound(n, big_n, 1.0)
    elif args.model == "connected":
        spec = coupon_mod.CouponSpec(
            n, big_n, coupon_mod.ConnectedGeometrics(args.q, args.index_map))
        times = coupon_mod.connected_geometrics_times(spec, reps, seed, coupling=args.coupling)
        bound = coupon_mod.collector_bound(n, big_n, args.q)
    else:
        if args.slow_q is None:
            raise InvalidParameterError("model=slow needs --slow-q")
        spec = coupon_mod.CouponSpec(n, big_n, coupon_mod.IndependentGeometric(args.q),
                                     slow_types=frozenset(range(args.slow_types)),
                                     slow_q=args.slow_q)
        fast, slow, last = coupon_mod.slow_type_runs(spec, reps, seed)
        if args.per_run:
            rows = [{"rep": r, "time_fast": int(fast[r]), "time_slow": int(slow[r]),
                     "last_is_slow": int(last[r])} for r in range(reps)]
            _emit(args, rows, ["rep", "time_fast", "time_slow", "last_is_slow"])
        else:
            row = {"model": "slow", "n": n, "N": big_n, "q": args.q, "slow_q": args.slow_q,
                   "reps": reps, "seed": seed,
                   "fast_mean": float(fast.mean()), "slow_mean": float(slow.mean()),
                   "diff_mean": float((slow - fast).mean()),
                   "last_is_slow_freq": float(last.mean())}
            _emit(args, [row], list(row))
        return 0
    if args.per_run:
        rows = [{"rep": r, "time": int(times[r])} for r in range(reps)]
        _emit(args, rows, ["rep", "time"])
    else:
        mean = float(times.mean())
        se = float(times.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
        row = {"model": args.model, "coupling": args.coupling, "n": n, "N": big_n,
               "q": args.q if args.model == "connected" else 1.0,
               "reps": reps, "seed": seed, "mean": mean, "stderr": se, "bound": bound}
        _emit(args, [row], list(row))
    return 0


_BENCH_FIELDS = ["graph_id", "n", "edges", "p", "init", "estimate", "stderr", "theory", "ratio"]


def _bench_row_dict(row):
    return {k: getattr(row, k) for k in _BENCH_FIELDS}


def _cmd_bench(args):
    name, graph = _build_graph(args)
    init = args.init
    if init.startswith("fixed:"):
        raise InvalidParameterError("bench supports --init uniform|nonempty")
    row = exp_mod.run_bench_row(name, graph, args.p, args.m, args.reps, args.seed, init=init)
    _emit(args, [_bench_row_dict(row)], _BENCH_FIELDS)
    return 0


def _cmd_verify_bound(args):
    if getattr(args, "graph", None) or getattr(args, "family", None):
        graphs = [_build_graph(args)]
    else:
        graphs = exp_mod.standard_suite(args.suite_max_n)
    report = exp_mod.verify_upper_bound(graphs, args.reps, args.seed)
    _emit(args, [_bench_row_dict(r) for r in report.rows], _BENCH_FIELDS)
    if not report.passed:
        print(f"BOUND VIOLATED on: {', '.join(report.failures)}", file=sys.stderr)
        return 1
    return 0


def _cmd_compare_regular(args):
    p_grid = [float(tok) for tok in args.p_grid.split(",")]
    comp = exp_mod.regular_graph_comparison(args.n, p_grid)
    rows = []
    for i, name in enumerate(comp.names):
        for j, p in enumerate(comp.p_grid):
            rows.append({"graph_id": name, "n": args.n, "p": p,
                         "E_T": float(comp.times[i, j]),
                         "is_minimal": int(comp.minimal_graph(j) == name)})
    _emit(args, rows, ["graph_id", "n", "p", "E_T", "is_minimal"])
    return 0 if comp.complete_is_strictly_minimal else 1


def _cmd_sundew_lollipop(args):
    comp = exp_mod.sundew_vs_lollipop(args.n, args.r, args.reps, args.seed)
    row = {"n": comp.n, "r": comp.r, "edges": comp.edges, "reps": comp.replications,
           "seed": comp.seed, "sundew_mean": comp.sundew_mean,
           "sundew_stderr": comp.sundew_stderr, "lollipop_mean": comp.lollipop_mean,
           "lollipop_stderr": comp.lollipop_stderr, "diff_mean": comp.diff_mean,
           "diff_stderr": comp.diff_stderr, "separation": comp.separation,
           "normalized_gap": comp.normalized_gap}
    _emit(args, [row], list(row))
    separated = comp.diff_mean > 0 and comp.separation >= 3.0
    return 0 if separated else 1


def _cmd_scan_monotonicity(args):
    gammas = _parse_gammas(args.gamma, args.n)
    grid = np.round(np.arange(0.0, 1.0 + args.grid_step / 2, args.grid_step), 12)
    if args.single_k is not None:
        report = dgr_mod.scan_single_term(args.n, gammas, args.single_k, grid, args.tol)
    else:
        report = dgr_mod.symmetric_sum_scan(args.n, gammas, grid, args.tol)
    rows = []
    for lam in grid:
        p = lam / (1.0 + lam)
        for entry in _dgr_table(args.n, p, gammas):
            if entry["k"] in report.ks:
                rows.append(entry)
    _emit(args, rows, ["k", "lambda", "E_k", "E_sym"])
    if report.violations:
        for v in report.violations:
            print(f"VIOLATION k={v.k}: drop {v.drop:.3e} between lambda "
                  f"{v.lam_from} and {v.lam_to}", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "exact": _cmd_exact,
    "dgr": _cmd_dgr,
    "survivor": _cmd_survivor,
    "coupon": _cmd_coupon,
    "bench": _cmd_bench,
    "verify-bound": _cmd_verify_bound,
    "compare-regular": _cmd_compare_regular,
    "sundew-lollipop": _cmd_sundew_lollipop,
    "scan-monotonicity": _cmd_scan_monotonicity,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (InvalidParameterError, GraphParseError, CapacityError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ReplicationTimeout as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
