"""Pairwise-consensus dynamics and the seeded Monte Carlo harness.

One step samples an edge uniformly; unequal endpoints both adopt the
higher strategy with probability p, the lower with probability 1-p. The
stabilisation time T counts every edge sample, significant or not.

``estimate`` fans replications over a thread pool; replication r always
draws from the stream derived from (seed, r) and results are reduced in
replication order, so outputs are bit-identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConsensusTimeout, InvalidParameterError, ReplicationTimeout
from .graphs import Graph
from .rng import Stream

DEFAULT_STEP_CAP = 10**9


@dataclass(frozen=True)
class StrategyState:
    """Assignment of a strategy in {1..m} to each vertex."""

    strategies: np.ndarray
    m: int

    def __post_init__(self):
        arr = np.asarray(self.strategies, dtype=np.int32)
        object.__setattr__(self, "strategies", arr)
        if self.m < 1:
            raise InvalidParameterError("m must be >= 1")
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidParameterError("strategies must be a nonempty vector")
        if arr.min() < 1 or arr.max() > self.m:
            raise InvalidParameterError(f"strategies must lie in 1..{self.m}")

    @property
    def n(self) -> int:
        return int(self.strategies.size)

    def is_consensus(self) -> bool:
        return bool((self.strategies == self.strategies[0]).all())


@dataclass(frozen=True)
class SimStats:
    """Monte Carlo summary: winner tallies and stabilisation-time moments."""

    replications: int
    winner_counts: tuple[int, ...]   # index l-1 counts wins of strategy l
    time_mean: float
    time_var: float                  # unbiased sample variance
    seed: int

    @property
    def stderr(self) -> float:
        if self.replications < 1:
            return 0.0
        return float(np.sqrt(self.time_var / self.replications))

    def winner_freq(self, l: int) -> float:
        return self.winner_counts[l - 1] / self.replications

    def to_dict(self) -> dict:
        return {
            "replications": self.replications,
            "winner_counts": list(self.winner_counts),
            "time_mean": self.time_mean,
            "time_var": self.time_var,
            "stderr": self.stderr,
            "seed": self.seed,
        }


def init_uniform(n: int, m: int, rng: Stream) -> StrategyState:
    """State with i.i.d. uniform strategies in {1..m}."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    strategies = np.fromiter((1 + rng.below(m) for _ in range(n)), dtype=np.int32, count=n)
    return StrategyState(strategies, m)


def init_nonempty(n: int, m: int, rng: Stream) -> StrategyState:
    """Uniform state conditioned on at least one vertex playing strategy 1.

    Strategy 1 is the one that survives surely at p=0, so for m=2 this is
    the usual "at least one active vertex" conditioning. Rejection-sampled:
    whole vectors are redrawn until one contains a 1.
    """
    while True:
        state = init_uniform(n, m, rng)
        if (state.strategies == 1).any():
            return state


def step(graph: Graph, state: StrategyState, p: float, rng: Stream):
    """One edge sample. Returns (new state, significant flag)."""
    _check_p(p)
    if state.n != graph.n:
        raise InvalidParameterError("state length does not match graph")
    strategies = state.strategies.copy()
    significant = _step_inplace(graph.edges, strategies, p, rng)
    return StrategyState(strategies, state.m), significant


def _step_inplace(edges, strategies, p, rng) -> bool:
    # Draw discipline matches the kernels: one edge draw, then one unit
    # draw only when the endpoints differ.
    i = rng.below(len(edges))
    u, v = edges[i]
    a = int(strategies[u])
    b = int(strategies[v])
    if a == b:
        return False
    hi = a if a > b else b
    win = hi if rng.unit() < p else a + b - hi
    strategies[u] = win
    strategies[v] = win
    return True


def run_to_consensus(graph: Graph, state: StrategyState, p: float, rng: Stream,
                     step_cap: int = DEFAULT_STEP_CAP):
    """Run until all vertices agree; returns (surviving strategy, T).

    T counts every edge sample. Raises ConsensusTimeout past step_cap.
    """
    _check_p(p)
    if step_cap < 1:
        raise InvalidParameterError("step_cap must be positive")
    if state.n != graph.n:
        raise InvalidParameterError("state length does not match graph")
    strategies = state.strategies.copy()
    counts = np.bincount(strategies, minlength=state.m + 1)
    present = int((counts[1:] > 0).sum())
    t = 0
    edges = graph.edges
    while present > 1:
        if t >= step_cap:
            raise ConsensusTimeout(t, StrategyState(strategies, state.m))
        t += 1
        i = rng.below(len(edges))
        u, v = edges[i]
        a = int(strategies[u])
        b = int(strategies[v])
        if a == b:
            continue
        hi = a if a > b else b
        win = hi if rng.unit() < p else a + b - hi
        lose = a + b - win
        strategies[u] = win
        strategies[v] = win
        counts[lose] -= 1
        counts[win] += 1
        if counts[lose] == 0:
            present -= 1
    return int(strategies[0]), t


def coarse_grain(state: StrategyState, l: int) -> StrategyState:
    """Merge strategies {<=l} into 1 and {>l} into 2."""
    if not 1 <= l < state.m:
        raise InvalidParameterError(f"need 1 <= l < m (got l={l}, m={state.m})")
    merged = np.where(state.strategies <= l, 1, 2).astype(np.int32)
    return StrategyState(merged, 2)


def resolve_workers(workers=None) -> int:
    """Worker count: argument or cpu count, capped by CONSENSUS_LAB_THREADS."""
    count = workers if workers is not None else (os.cpu_count() or 1)
    cap = os.environ.get("CONSENSUS_LAB_THREADS")
    if cap:
        count = min(count, max(1, int(cap)))
    return max(1, count)


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p must be in [0, 1], got {p}")


def _resolve_init(init, n, m):
    """Map an init spec to (mode id, fixed array)."""
    if init == "uniform":
        return kernels.INIT_UNIFORM, np.zeros(1, dtype=np.int32)
    if init in ("nonempty", "conditioned-nonempty"):
        return kernels.INIT_NONEMPTY, np.zeros(1, dtype=np.int32)
    if isinstance(init, StrategyState):
        init = init.strategies
    if isinstance(init, (list, tuple, np.ndarray)):
        arr = np.asarray(init, dtype=np.int32)
        StrategyState(arr, m)  # validates range
        if arr.size != n:
            raise InvalidParameterError("fixed init state length does not match graph")
        return kernels.INIT_FIXED, arr.copy()
    raise InvalidParameterError(f"unknown init mode {init!r}")


def simulate_batch(graph: Graph, p: float, m: int, replications: int, seed: int,
                   init="uniform", step_cap: int = DEFAULT_STEP_CAP, workers=None):
    """Run replications; returns (winners, times) int arrays indexed by replication.

    Raises ReplicationTimeout listing every replication that hit step_cap.
    """
    _check_p(p)
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    if replications < 1:
        raise InvalidParameterError("replications must be >= 1")
    if step_cap < 1:
        raise InvalidParameterError("step_cap must be positive")
    init_mode, fixed = _resolve_init(init, graph.n, m)

    edges_u = np.fromiter((u for u, _ in graph.edges), dtype=np.int32, count=graph.num_edges)
    edges_v = np.fromiter((v for _, v in graph.edges), dtype=np.int32, count=graph.num_edges)
    out_winner = np.zeros(replications, dtype=np.int32)
    out_time = np.zeros(replications, dtype=np.int64)

    def run_chunk(lo, hi):
        kernels.impl.consensus_batch(edges_u, edges_v, graph.n, m, float(p),
                                     init_mode, fixed, step_cap, seed, lo, hi,
                                     out_winner, out_time)

    _run_chunked(run_chunk, replications, workers)

    if (out_winner == 0).any():
        raise ReplicationTimeout(np.flatnonzero(out_winner == 0).tolist(), step_cap)
    return out_winner, out_time


def _run_chunked(run_chunk, total, workers=None):
    """Split [0, total) into contiguous chunks, one per worker."""
    count = min(resolve_workers(workers), total)
    if count <= 1:
        run_chunk(0, total)
        return
    bounds = np.linspace(0, total, count + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=count) as pool:
        futures = [pool.submit(run_chunk, int(bounds[i]), int(bounds[i + 1]))
                   for i in range(count)]
        for f in futures:
            f.result()


def summarize(winners, times, m: int, seed: int) -> SimStats:
    """Reduce per-replication results in fixed order into SimStats."""
    reps = int(times.size)
    counts = np.bincount(winners, minlength=m + 1)[1:m + 1]
    total = int(times.sum())
    mean = total / reps
    if reps > 1:
        dev = times.astype(np.float64) - mean
        # np.sum (pairwise, single-threaded) keeps the reduction bit-deterministic
        var = float(np.sum(dev * dev) / (reps - 1))
    else:
        var = 0.0
    return SimStats(replications=reps, winner_counts=tuple(int(c) for c in counts),
                    time_mean=mean, time_var=var, seed=seed)


def estimate(graph: Graph, p: float, m: int, replications: int, seed: int,
             init="uniform", step_cap: int = DEFAULT_STEP_CAP, workers=None) -> SimStats:
    """Monte Carlo estimate of winner distribution and stabilisation time."""
    winners, times = simulate_batch(graph, p, m, replications, seed,
                                    init=init, step_cap=step_cap, workers=workers)
    return summarize(winners, times, m, seed)
