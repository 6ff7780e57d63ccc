"""Desk-scale experiment drivers: bound checks, family comparisons, benches.

Asymptotic claims are exercised as monotone trends over size ladders or as
inequalities with Monte Carlo error bars, never as fixed-tolerance
equalities. Paired comparisons reuse the same per-replication streams on
both graphs, so comparison tables are deterministic for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import chain as chain_mod
from .coupon import harmonic_interp
from .errors import InvalidParameterError
from .graphs import Graph, make_complete, make_cycle, make_family, make_jellyfish, \
    make_lollipop, make_path, make_sundew
from .process import simulate_batch, summarize

CHAIN_FEASIBLE = 4096  # m^n up to this: exact reference values are attached


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment invocation; validates family parameters on build()."""

    experiment: str
    family: str = "complete"
    n: int = 8
    r: int | None = None
    p: float = 0.0
    m: int = 2
    replications: int = 1000
    seed: int = 0
    init: str = "uniform"
    out: str | None = None

    def build_graph(self) -> Graph:
        return make_family(self.family, self.n, self.r)


@dataclass(frozen=True)
class BenchRow:
    """One line of a bench/bound report (CSV headers = field names)."""

    graph_id: str
    n: int
    edges: int
    p: float
    init: str
    estimate: float
    stderr: float
    theory: float | None = None
    ratio: float | None = None


def theorem3_bound(n: int) -> float:
    """The p=0 stabilisation-time bound n^2 log n + n (natural log)."""
    return n * n * math.log(n) + n


def standard_suite(max_n: int = 128) -> list[tuple[str, Graph]]:
    """The graph families the p=0 bound is checked on."""
    sizes = [s for s in (16, 64, 128) if s <= max_n]
    suite = []
    for s in sizes:
        suite.append((f"path_{s}", make_path(s)))
        suite.append((f"cycle_{s}", make_cycle(s)))
        suite.append((f"complete_{s}", make_complete(s)))
        suite.append((f"sundew_{s}_{s // 4}", make_sundew(s, s // 4)))
        suite.append((f"lollipop_{s}_{s // 4}", make_lollipop(s, s // 4)))
        if s >= 16:
            suite.append((f"jellyfish_{s}", make_jellyfish(s)))
    return suite


def run_bench_row(name: str, graph: Graph, p: float, m: int, reps: int, seed: int,
                  init: str = "uniform", theory: float | None = None,
                  workers=None) -> BenchRow:
    """MC estimate on one graph; attaches the exact value when feasible."""
    winners, times = simulate_batch(graph, p, m, reps, seed, init=init, workers=workers)
    stats = summarize(winners, times, m, seed)
    if theory is None and m**graph.n <= CHAIN_FEASIBLE:
        ch = chain_mod.build_chain(graph, m, p)
        theory = chain_mod.expected_absorption_time(ch, init=_chain_init(init))
    ratio = None if theory in (None, 0.0) else stats.time_mean / theory
    return BenchRow(graph_id=name, n=graph.n, edges=graph.num_edges, p=p, init=init,
                    estimate=stats.time_mean, stderr=stats.stderr,
                    theory=theory, ratio=ratio)


def _chain_init(init: str) -> str:
    if init in ("nonempty", "conditioned-nonempty"):
        return "nonempty"
    if init == "uniform":
        return "uniform"
    raise InvalidParameterError(f"chain reference values support uniform/nonempty, not {init!r}")


@dataclass(frozen=True)
class BoundReport:
    rows: tuple[BenchRow, ...]
    failures: tuple[str, ...]  # graphs whose estimate + 3*SE reached the bound

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_upper_bound(graphs, reps: int, seed: int, workers=None) -> BoundReport:
    """Check mean + 3*SE < n^2 log n + n at p=0 on each (name, graph)."""
    rows = []
    failures = []
    for name, graph in graphs:
        bound = theorem3_bound(graph.n)
        winners, times = simulate_batch(graph, 0.0, 2, reps, seed,
                                        init="nonempty", workers=workers)
        stats = summarize(winners, times, 2, seed)
        rows.append(BenchRow(graph_id=name, n=graph.n, edges=graph.num_edges,
                             p=0.0, init="nonempty", estimate=stats.time_mean,
                             stderr=stats.stderr, theory=bound,
                             ratio=stats.time_mean / bound))
        if stats.time_mean + 3.0 * stats.stderr >= bound:
            failures.append(name)
    return BoundReport(rows=tuple(rows), failures=tuple(failures))


@dataclass(frozen=True)
class PairedComparison:
    """Paired-seed comparison of the sundew and lollipop on (n, r)."""

    n: int
    r: int
    edges: int
    replications: int
    seed: int
    sundew_mean: float
    sundew_stderr: float
    lollipop_mean: float
    lollipop_stderr: float
    diff_mean: float      # sundew - lollipop, paired per replication
    diff_stderr: float
    normalized_gap: float  # diff_mean / edges; the asymptotic prediction is log 2

    @property
    def separation(self) -> float:
        if self.diff_stderr == 0.0:
            return 0.0 if self.diff_mean == 0.0 else math.inf
        return self.diff_mean / self.diff_stderr


def sundew_vs_lollipop(n: int, r: int, reps: int, seed: int, workers=None) -> PairedComparison:
    sd = make_sundew(n, r)
    lp = make_lollipop(n, r)
    assert sd.num_edges == lp.num_edges
    w_sd, t_sd = simulate_batch(sd, 0.0, 2, reps, seed, init="nonempty", workers=workers)
    w_lp, t_lp = simulate_batch(lp, 0.0, 2, reps, seed, init="nonempty", workers=workers)
    s_sd = summarize(w_sd, t_sd, 2, seed)
    s_lp = summarize(w_lp, t_lp, 2, seed)
    diff = t_sd - t_lp
    diff_mean = float(diff.sum()) / reps
    dev = diff.astype(np.float64) - diff_mean
    diff_var = float(np.sum(dev * dev) / (reps - 1)) if reps > 1 else 0.0
    diff_se = math.sqrt(diff_var / reps)
    return PairedComparison(n=n, r=r, edges=sd.num_edges, replications=reps, seed=seed,
                            sundew_mean=s_sd.time_mean, sundew_stderr=s_sd.stderr,
                            lollipop_mean=s_lp.time_mean, lollipop_stderr=s_lp.stderr,
                            diff_mean=diff_mean, diff_stderr=diff_se,
                            normalized_gap=diff_mean / sd.num_edges)


def path_time(n: int, reps: int, seed: int, workers=None) -> BenchRow:
    """p=0 stabilisation-time estimate on the n-path, against n*h(n)."""
    graph = make_path(n)
    theory = n * harmonic_interp(n)
    return run_bench_row(f"path_{n}", graph, 0.0, 2, reps, seed,
                         init="nonempty", theory=theory, workers=workers)


# --- curated connected regular graphs, exact comparison ---------------------

def _graph_from_edges(n, edges):
    return Graph(n, tuple(edges))


def regular_graphs(n: int) -> list[tuple[str, Graph]]:
    """Curated connected regular graphs on n vertices (small n only)."""
    if n == 3:
        return [("K_3", make_complete(3))]
    if n == 4:
        return [("C_4", make_cycle(4)), ("K_4", make_complete(4))]
    if n == 5:
        return [("C_5", make_cycle(5)), ("K_5", make_complete(5))]
    if n == 6:
        prism = _graph_from_edges(6, [(0, 1), (1, 2), (0, 2),
                                      (3, 4), (4, 5), (3, 5),
                                      (0, 3), (1, 4), (2, 5)])
        k33 = _graph_from_edges(6, [(u, v) for u in (0, 1, 2) for v in (3, 4, 5)])
        octahedron = _graph_from_edges(
            6, [(u, v) for u in range(6) for v in range(u + 1, 6)
                if (u, v) not in ((0, 3), (1, 4), (2, 5))])
        return [("C_6", make_cycle(6)), ("prism", prism), ("K_3,3", k33),
                ("octahedron", octahedron), ("K_6", make_complete(6))]
    raise InvalidParameterError(f"no curated regular-graph list for n={n}")


@dataclass(frozen=True)
class RegularComparison:
    n: int
    p_grid: tuple[float, ...]
    names: tuple[str, ...]
    times: np.ndarray = field(repr=False)  # shape (len(names), len(p_grid))

    def minimal_graph(self, j: int) -> str:
        return self.names[int(np.argmin(self.times[:, j]))]

    @property
    def complete_is_strictly_minimal(self) -> bool:
        k_idx = self.names.index(f"K_{self.n}")
        others = np.delete(self.times, k_idx, axis=0)
        return bool((self.times[k_idx] < others.min(axis=0)).all()) if others.size else True


def regular_graph_comparison(n: int, p_grid) -> RegularComparison:
    """Exact E[T] (m=2, uniform init) for the curated regular graphs."""
    graphs = regular_graphs(n)
    p_grid = tuple(float(p) for p in p_grid)
    times = np.zeros((len(graphs), len(p_grid)))
    for i, (_, graph) in enumerate(graphs):
        for j, p in enumerate(p_grid):
            ch = chain_mod.build_chain(graph, 2, p)
            times[i, j] = chain_mod.expected_absorption_time(ch, init="uniform")
    return RegularComparison(n=n, p_grid=p_grid,
                             names=tuple(name for name, _ in graphs), times=times)


def jellyfish_bound_ratios(sizes, reps: int, seed: int, workers=None) -> list[float]:
    """estimate / (n^2 log n) for jellyfish graphs; approaches 1 from below."""
    ratios = []
    for n in sizes:
        graph = make_jellyfish(n)
        _, times = simulate_batch(graph, 0.0, 2, reps, seed, init="nonempty",
                                  workers=workers)
        ratios.append(float(times.mean()) / (n * n * math.log(n)))
    return ratios
