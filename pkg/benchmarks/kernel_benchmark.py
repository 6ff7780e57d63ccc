#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the same seeded workloads on every importable backend and reports
throughput plus the speedup. Outputs match bit-for-bit by construction;
this script also asserts that.

Usage: python benchmarks/kernel_benchmark.py [--reps N]
"""

import argparse
import time

import numpy as np

from consensus_lab import graphs
from consensus_lab.kernels import available_backends, backend_module


def bench_consensus(mod, reps):
    g = graphs.make_sundew(64, 16)
    eu = np.fromiter((u for u, _ in g.edges), dtype=np.int32)
    ev = np.fromiter((v for _, v in g.edges), dtype=np.int32)
    winners = np.zeros(reps, dtype=np.int32)
    times = np.zeros(reps, dtype=np.int64)
    dummy = np.zeros(1, dtype=np.int32)
    t0 = time.perf_counter()
    mod.consensus_batch(eu, ev, g.n, 2, 0.0, 1, dummy, 10**9, 42, 0, reps,
                        winners, times)
    elapsed = time.perf_counter() - t0
    return elapsed, int(times.sum()), (winners.copy(), times.copy())


def bench_coupon(mod, reps):
    times = np.zeros(reps, dtype=np.int64)
    t0 = time.perf_counter()
    mod.multipass_batch(0, 50, 50, 7, 0, reps, times)
    elapsed = time.perf_counter() - t0
    return elapsed, int(times.sum()), times.copy()


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=None,
                        help="replications (default: 2000 consensus / 20000 coupon, "
                             "scaled down for the pure backend)")
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    results = {}
    for workload, bench, default_reps in (
            ("consensus sundew(64,16) p=0", bench_consensus, 2000),
            ("coupon single-arrival n=50", bench_coupon, 20000)):
        print(f"\n{workload}:")
        outputs = {}
        rates = {}
        for name in backends:
            reps = args.reps or default_reps
            if name == "python":
                reps = max(10, reps // 20)
            elapsed, steps, out = bench(backend_module(name), reps)
            rates[name] = steps / elapsed
            outputs[name] = (reps, out)
            print(f"  {name:7s} {reps:7d} reps  {elapsed:8.3f} s  {steps / elapsed:12.3e} steps/s")
        if "c" in rates and "python" in rates:
            print(f"  speedup (c over python): {rates['c'] / rates['python']:.1f}x")
        results[workload] = outputs

    # equality spot check on the overlapping replication range
    if len(backends) > 1:
        for workload, outputs in results.items():
            reps = min(r for r, _ in outputs.values())
            outs = []
            for _, out in outputs.values():
                outs.append([np.asarray(o)[:reps] for o in (out if isinstance(out, tuple) else (out,))])
            for arrays in zip(*outs):
                base = arrays[0]
                for other in arrays[1:]:
                    assert (base == other).all(), f"backend mismatch in {workload}"
        print("\nbackend outputs identical on overlapping replications")


if __name__ == "__main__":
    main()
