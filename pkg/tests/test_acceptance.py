"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test prints one PASS/FAIL line (visible under pytest -v -s or in the
captured output). Monte Carlo criteria state their replication counts and
error bars explicitly; exact criteria pin absolute/relative tolerances.
"""

import math
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest

from consensus_lab import chain as chain_mod
from consensus_lab import coupon as coupon_mod
from consensus_lab import dgr as dgr_mod
from consensus_lab import experiments as exp_mod
from consensus_lab.cli import cli_main
from consensus_lab.graphs import make_complete, make_path, make_star
from consensus_lab.process import estimate, simulate_batch, summarize


@contextmanager
def criterion(num, title, budget_s=None):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num}: FAIL - {title}")
        raise
    elapsed = time.perf_counter() - start
    print(f"ACCEPTANCE {num}: PASS - {title} ({elapsed:.1f}s)")
    if budget_s is not None:
        assert elapsed < budget_s, f"runtime budget exceeded: {elapsed:.1f}s >= {budget_s}s"


def test_criterion_01_theorem1_exactness():
    """survivor_distribution == chain oracle on K/P/star, n<=5, m<=3, p grid."""
    with criterion(1, "closed-form survivor law equals exact chain on all small instances",
                   budget_s=60):
        p_grid = [round(0.1 * i, 10) for i in range(11)]
        for n in range(1, 6):
            graphs = [make_complete(n), make_path(n), make_star(n)]
            for m in (1, 2, 3):
                for p in p_grid:
                    closed = dgr_mod.survivor_distribution(n, m, p)
                    dists = [chain_mod.absorption_distribution(
                        chain_mod.build_chain(g, m, p)) for g in graphs]
                    for dist in dists:
                        assert np.max(np.abs(dist - closed)) <= 1e-10
                    for dist in dists[1:]:  # graph-independence
                        assert np.max(np.abs(dist - dists[0])) <= 1e-10


def test_criterion_02_p_half_uniformity():
    """All survivor probabilities equal 1/m at p = 1/2."""
    with criterion(2, "p=1/2 gives the uniform survivor law to 1e-12"):
        for n in (1, 2, 5, 30, 200):
            for m in (1, 2, 3, 7):
                dist = dgr_mod.survivor_distribution(n, m, 0.5)
                assert np.max(np.abs(dist - 1.0 / m)) <= 1e-12
        for g in (make_complete(4), make_path(4), make_star(4)):
            dist = chain_mod.absorption_distribution(chain_mod.build_chain(g, 3, 0.5))
            assert np.max(np.abs(dist - 1.0 / 3.0)) <= 1e-12


def test_criterion_03_dgr_closed_form_vs_solver():
    """200 random instances: 1e-10 relative agreement, 1e-9 recurrence residual."""
    with criterion(3, "closed form matches tridiagonal solver on 200 random instances",
                   budget_s=60):
        rng = np.random.default_rng(20240801)
        for _ in range(200):
            n = int(rng.integers(2, 501))
            lam = float(rng.uniform(0.0, 0.99))
            gammas = tuple(rng.uniform(0.05, 1.0, n - 1))
            params = dgr_mod.DgrParams(n, lam / (1 + lam), gammas)
            closed = dgr_mod.expected_time_closed_vector(params)
            solved = dgr_mod.expected_time_solve(params)
            assert np.max(np.abs(closed - solved) / (1.0 + np.abs(solved))) <= 1e-10
            for times in (closed, solved):
                res = dgr_mod.recurrence_residuals(params, times)
                assert (res <= 1e-9 * (1.0 + np.abs(times[1:-1]))).all()


def test_criterion_04_constant_delay_special_case():
    """gammas = 1-r reproduces the displayed constant-delay formula to 1e-12."""
    with criterion(4, "constant-delay closed form matches the displayed formula"):
        for r in (0.0, 0.3, 0.9):
            for n in (2, 3, 10, 41, 100):
                gammas = (1.0 - r,) * (n - 1)
                for lam in (0.0, 0.1, 0.2, 0.4, 0.6, 0.8, 0.9, 0.99):
                    p = lam / (1 + lam)
                    times = dgr_mod.expected_time_closed_vector(
                        dgr_mod.DgrParams(n, p, gammas))
                    for k in range(1, n):
                        if lam == 0.0:
                            want = (n - k) / (1.0 - r)
                        else:
                            log_lam = math.log(lam)
                            want = ((1 + lam) / (1 - lam) / (1 - r)
                                    * (n * math.expm1(k * log_lam)
                                       / math.expm1(n * log_lam) - k))
                        assert times[k] == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_criterion_05_complete_graph_cross_oracle():
    """DGR-based consensus time equals full-chain E[T] on K_n, n in 3..8."""
    with criterion(5, "complete-graph consensus time agrees with the exact chain",
                   budget_s=120):
        for n in range(3, 9):
            g = make_complete(n)
            for pi in range(6):
                p = round(0.1 * pi, 10)
                via_dgr = dgr_mod.complete_graph_expected_consensus_time(n, p)
                ch = chain_mod.build_chain(g, 2, p)
                via_chain = chain_mod.expected_absorption_time(ch)
                assert abs(via_dgr - via_chain) <= 1e-9


def test_criterion_06_symmetric_sum_monotonicity():
    """Zero violations for the symmetric scans; the E_1 dip IS detected."""
    with criterion(6, "symmetric sums monotone on the grid; single-term dip detected",
                   budget_s=240):
        grid = np.round(np.arange(0.0, 1.0000001, 0.01), 10)
        for n in range(2, 51):
            report = dgr_mod.symmetric_sum_scan(n, (1.0,) * (n - 1), grid, tolerance=1e-9)
            assert report.is_monotone, (n, report.violations[:2])
            report = dgr_mod.symmetric_sum_scan(
                n, tuple(dgr_mod.complete_graph_gammas(n)), grid, tolerance=1e-9)
            assert report.is_monotone, (n, report.violations[:2])
        single = dgr_mod.scan_single_term(3, (1.0, 1.0), 1, grid, tolerance=1e-9)
        assert not single.is_monotone
        assert abs(single.violations[0].lam_from - 0.366) < 0.02


def test_criterion_07_complete_graph_fastest_regular_n6():
    """Exact E[T] of K_6 strictly minimal among curated 6-vertex regular graphs."""
    with criterion(7, "K_6 beats every curated regular graph at each p"):
        comp = exp_mod.regular_graph_comparison(6, [round(0.1 * i, 10) for i in range(6)])
        assert comp.complete_is_strictly_minimal
        for j in range(len(comp.p_grid)):
            assert comp.minimal_graph(j) == "K_6"


def test_criterion_08_collector_inequalities():
    """Multipass and connected-geometrics means respect the harmonic bounds."""
    with criterion(8, "collector means within the harmonic-number bounds at 1e5 reps",
                   budget_s=120):
        reps, n, big_n, q = 10**5, 10, 14, 0.5
        bound_1 = coupon_mod.collector_bound(n, big_n)
        spec = coupon_mod.CouponSpec(n, big_n)
        for name in ("single", "independent", "bundled"):
            times = coupon_mod.multipass_times(spec, name, reps, 101)
            mean = float(times.mean())
            se = float(times.std(ddof=1)) / math.sqrt(reps)
            assert mean <= bound_1 + 3 * se, name
            if name == "single":  # the equality case
                assert abs(mean - bound_1) <= 3 * se

        bound_q = coupon_mod.collector_bound(n, big_n, q)
        for index_map in ("disjoint", "pairs", "shared"):
            spec_g = coupon_mod.CouponSpec(
                n, big_n, coupon_mod.ConnectedGeometrics(q, index_map))
            times = coupon_mod.connected_geometrics_times(spec_g, reps, 103)
            mean = float(times.mean())
            se = float(times.std(ddof=1)) / math.sqrt(reps)
            assert mean <= bound_q + 3 * se, index_map
            if index_map == "disjoint":  # independent targets: equality case
                assert abs(mean - bound_q) <= 3 * se


def test_criterion_09_stabilisation_upper_bound():
    """mean + 3*SE < n^2 log n + n across the standard suite at p=0."""
    with criterion(9, "p=0 stabilisation bound holds across the standard suite",
                   budget_s=600):
        report = exp_mod.verify_upper_bound(exp_mod.standard_suite(128),
                                            reps=10**4, seed=2024)
        assert report.passed, report.failures
        assert len(report.rows) == 18


def test_criterion_10_sundew_slower_than_lollipop():
    """Paired-seed separation >= 3 SE; normalized gap in [0.4, 1.0] * log 2."""
    with criterion(10, "sundew beats lollipop with the predicted normalized gap"):
        for n, r in ((60, 20), (96, 32)):
            comp = exp_mod.sundew_vs_lollipop(n, r, 10**4, 515)
            assert comp.diff_mean > 0, (n, r)
            assert comp.separation >= 3.0, (n, r)
            if r == 32:
                gap = comp.normalized_gap
                assert 0.4 * math.log(2) <= gap <= 1.0 * math.log(2), gap


def test_criterion_11_mc_matches_exact():
    """Wherever both run (m^n <= 4096): |MC - exact| <= 4 SE for T and winners."""
    with criterion(11, "Monte Carlo agrees with the exact chain on feasible instances"):
        cases = [
            (make_complete(5), 2, 0.0, "uniform"),
            (make_complete(5), 2, 0.3, "uniform"),
            (make_path(4), 3, 0.2, "uniform"),
            (make_star(6), 2, 0.5, "nonempty"),
            (make_complete(8), 2, 0.1, "nonempty"),
        ]
        reps = 3 * 10**4
        for g, m, p, init in cases:
            assert m**g.n <= 4096
            ch = chain_mod.build_chain(g, m, p)
            exact_t = chain_mod.expected_absorption_time(ch, init=init)
            exact_w = chain_mod.absorption_distribution(ch, init=init)
            stats = estimate(g, p, m, reps, 999, init=init)
            assert abs(stats.time_mean - exact_t) <= 4 * stats.stderr + 1e-12
            for l in range(1, m + 1):
                se_w = math.sqrt(max(exact_w[l - 1] * (1 - exact_w[l - 1]), 1e-12) / reps)
                assert abs(stats.winner_freq(l) - exact_w[l - 1]) <= 4 * se_w


def test_criterion_12_bit_identical_determinism(tmp_path):
    """Same seed, different worker counts: identical SimStats and CSV bytes."""
    with criterion(12, "seeded runs are bit-identical for any worker count"):
        g = make_complete(12)
        runs = [estimate(g, 0.2, 3, 8000, 42, init="nonempty", workers=w)
                for w in (1, 2, 5)]
        assert runs[0] == runs[1] == runs[2]
        winners_a, times_a = simulate_batch(g, 0.2, 3, 8000, 42,
                                            init="nonempty", workers=1)
        winners_b, times_b = simulate_batch(g, 0.2, 3, 8000, 42,
                                            init="nonempty", workers=4)
        assert (winners_a == winners_b).all() and (times_a == times_b).all()
        assert summarize(winners_a, times_a, 3, 42) == runs[0]

        csv_bytes = []
        for threads in ("1", "3"):
            out = tmp_path / f"det_{threads}.csv"
            os.environ["CONSENSUS_LAB_THREADS"] = threads
            try:
                code = cli_main(["simulate", "--family", "lollipop", "--n", "24",
                                 "--r", "6", "--m", "2", "--p", "0.25",
                                 "--reps", "5000", "--seed", "7",
                                 "--init", "nonempty", "--out", str(out)])
            finally:
                del os.environ["CONSENSUS_LAB_THREADS"]
            assert code == 0
            csv_bytes.append(out.read_bytes())
        assert csv_bytes[0] == csv_bytes[1]
