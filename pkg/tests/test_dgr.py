"""Delayed gambler's ruin closed forms, solver, and monotonicity scans."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from consensus_lab.dgr import (DgrParams, complete_graph_expected_consensus_time,
                               complete_graph_gammas, expected_time_closed,
                               expected_time_closed_vector, expected_time_solve,
                               recurrence_residuals, ruin_probability,
                               scan_single_term, survivor_distribution,
                               symmetric_sum_scan)
from consensus_lab.errors import InvalidParameterError


def test_params_validation():
    with pytest.raises(InvalidParameterError):
        DgrParams(5, 1.0, (1.0,) * 4)  # p=1 rejected
    with pytest.raises(InvalidParameterError):
        DgrParams(5, 0.3, (1.0,) * 3)  # wrong gamma count
    with pytest.raises(InvalidParameterError):
        DgrParams(5, 0.3, (0.0, 1, 1, 1))  # gamma must be positive
    with pytest.raises(InvalidParameterError):
        DgrParams(5, 0.3, (1.2, 1, 1, 1))  # gamma must be <= 1
    assert DgrParams(3, 0.25, (0.5, 0.5)).lam == pytest.approx(1 / 3)


# --- ruin probability --------------------------------------------------------

def test_ruin_symmetric_walk():
    params = DgrParams(10, 0.5, (1.0,) * 9)
    assert ruin_probability(params, 3) == pytest.approx(0.3, abs=0)


def test_ruin_boundaries():
    params = DgrParams(7, 0.2, (0.5,) * 6)
    assert ruin_probability(params, 0) == 0.0
    assert ruin_probability(params, 7) == 1.0


def _birth_death_absorption(n, p, gammas):
    """Independent oracle: dense linear solve on the explicit chain."""
    size = n + 1
    full = np.zeros((size, size))
    full[0, 0] = full[n, n] = 1.0
    for k in range(1, n):
        g = gammas[k - 1]
        full[k, k - 1] = p * g
        full[k, k + 1] = (1 - p) * g
        full[k, k] = 1 - g
    q = full[1:n, 1:n]
    r = full[1:n, [0, n]]
    x = np.linalg.solve(np.eye(n - 1) - q, r)
    hit_n = np.zeros(size)
    hit_n[n] = 1.0
    hit_n[1:n] = x[:, 1]
    times = np.zeros(size)
    times[1:n] = np.linalg.solve(np.eye(n - 1) - q, np.ones(n - 1))
    return hit_n, times


def test_ruin_matches_birth_death_solve():
    n, p = 5, 0.3
    gammas = (0.4, 0.9, 0.2, 0.55)
    params = DgrParams(n, p, gammas)
    hit_n, _ = _birth_death_absorption(n, p, gammas)
    for k in range(n + 1):
        assert ruin_probability(params, k) == pytest.approx(hit_n[k], abs=1e-12)


def test_ruin_independent_of_gammas():
    base = DgrParams(8, 0.35, (1.0,) * 7)
    delayed = DgrParams(8, 0.35, (0.07, 0.3, 1.0, 0.5, 0.9, 0.11, 0.6))
    for k in range(9):
        assert ruin_probability(base, k) == ruin_probability(delayed, k)


def test_ruin_p_above_half():
    n = 400
    params = DgrParams(n, 0.9, (1.0,) * (n - 1))
    assert 0.0 <= ruin_probability(params, 1) < 1e-100  # heavy down-drift
    # from n-1 the chance of reaching n is (1-lam^(n-1))/(1-lam^n) -> 1/lam
    assert ruin_probability(params, n - 1) == pytest.approx(0.1 / 0.9, rel=1e-12)


# --- expected times ----------------------------------------------------------

def test_solve_n2_single_transient():
    for p in (0.0, 0.3, 0.5, 0.9):
        for g in (1.0, 0.25):
            params = DgrParams(2, p, (g,))
            times = expected_time_solve(params)
            assert times[1] == pytest.approx(1.0 / g, rel=1e-14)
            assert expected_time_closed(params, 1) == pytest.approx(1.0 / g, rel=1e-12)


def test_closed_lambda_zero_is_reciprocal_gamma_suffix():
    gammas = (0.5, 0.25, 0.8, 0.1)
    params = DgrParams(5, 0.0, gammas)
    times = expected_time_closed_vector(params)
    for k in range(1, 5):
        assert times[k] == pytest.approx(sum(1.0 / g for g in gammas[k - 1:]), rel=1e-13)


def test_classical_symmetric_k_times_n_minus_k():
    params = DgrParams(10, 0.5, (1.0,) * 9)
    times = expected_time_solve(params)
    for k in range(11):
        assert times[k] == pytest.approx(k * (10 - k), rel=1e-12)
    assert times[5] == pytest.approx(25.0, rel=1e-12)


def _gut_reference(n, r, lam, k):
    """Displayed constant-delay formula, evaluated with expm1 for stability."""
    if lam == 0.0:
        return (n - k) / (1.0 - r)
    log_lam = math.log(lam)
    ratio = n * math.expm1(k * log_lam) / math.expm1(n * log_lam) - k
    return ratio * (1.0 + lam) / (1.0 - lam) / (1.0 - r)


@pytest.mark.parametrize("r", [0.0, 0.3, 0.9])
def test_gut_constant_delays(r):
    for n in (2, 5, 17, 100):
        gammas = (1.0 - r,) * (n - 1)
        for lam in (0.0, 0.1, 0.4, 0.7, 0.9, 0.99):
            p = lam / (1 + lam)
            times = expected_time_closed_vector(DgrParams(n, p, gammas))
            for k in range(n + 1):
                want = _gut_reference(n, r, lam, k) if 0 < k < n else 0.0
                assert times[k] == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_closed_matches_birth_death_times():
    n, p = 6, 0.3
    gammas = (0.4, 0.9, 0.2, 0.55, 1.0)
    _, times_oracle = _birth_death_absorption(n, p, gammas)
    times = expected_time_closed_vector(DgrParams(n, p, gammas))
    assert np.max(np.abs(times - times_oracle)) < 1e-10


@given(st.integers(min_value=2, max_value=60),
       st.floats(min_value=0.0, max_value=0.99),
       st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=80, deadline=None)
def test_closed_vs_solve_property(n, lam, gamma_seed):
    rng = np.random.default_rng(gamma_seed)
    gammas = tuple(rng.uniform(0.05, 1.0, n - 1))
    p = lam / (1 + lam)
    params = DgrParams(n, p, gammas)
    closed = expected_time_closed_vector(params)
    solved = expected_time_solve(params)
    assert np.max(np.abs(closed - solved) / (1.0 + np.abs(solved))) < 1e-10
    for times in (closed, solved):
        res = recurrence_residuals(params, times)
        assert (res <= 1e-9 * (1.0 + np.abs(times[1:-1]))).all()


def test_closed_continuous_through_lambda_one():
    n = 12
    gammas = tuple(complete_graph_gammas(n))
    lo = expected_time_closed_vector(DgrParams(n, (1 - 1e-6) / (2 - 1e-6), gammas))
    mid = expected_time_closed_vector(DgrParams(n, 0.5, gammas))
    hi = expected_time_closed_vector(DgrParams(n, (1 + 1e-6) / (2 + 1e-6), gammas))
    for other in (lo, hi):
        rel = np.abs(other[1:-1] - mid[1:-1]) / mid[1:-1]
        assert rel.max() < 1e-3


def test_mirror_p_above_half_matches_solver():
    n = 30
    rng = np.random.default_rng(5)
    gammas = tuple(rng.uniform(0.1, 1.0, n - 1))
    for p in (0.6, 0.75, 0.95):
        params = DgrParams(n, p, gammas)
        closed = expected_time_closed_vector(params)
        solved = expected_time_solve(params)
        assert np.max(np.abs(closed - solved) / (1.0 + solved)) < 1e-10


# --- complete-graph specialization ------------------------------------------

def test_complete_graph_gammas_small():
    # 2k(n-k)/(n(n-1)) at n=4: (1/2, 2/3, 1/2)
    got = complete_graph_gammas(4)
    want = [Fraction(2 * k * (4 - k), 12) for k in (1, 2, 3)]
    assert got == pytest.approx([float(w) for w in want], abs=0)
    assert complete_graph_gammas(2)[0] == 1.0


@pytest.mark.parametrize("n", [3, 10, 57, 100])
def test_complete_graph_gammas_symmetric(n):
    g = complete_graph_gammas(n)
    assert np.max(np.abs(g - g[::-1])) == 0.0
    assert np.argmax(g) in (n // 2 - 1, n // 2)  # peak at the middle state


def test_complete_time_fixed_boundaries():
    assert complete_graph_expected_consensus_time(6, 0.2, init=("fixed", 0)) == 0.0
    assert complete_graph_expected_consensus_time(6, 0.2, init=("fixed", 6)) == 0.0


def test_complete_time_conditioned_rescales():
    n = 7
    base = complete_graph_expected_consensus_time(n, 0.3)
    cond = complete_graph_expected_consensus_time(n, 0.3, init="conditioned")
    assert cond == pytest.approx(base / (1 - 2.0**-n), rel=1e-14)


def test_complete_time_monotone_in_p():
    grid = np.linspace(0.0, 0.5, 51)
    for n in (5, 20, 50):
        values = [complete_graph_expected_consensus_time(n, float(p)) for p in grid]
        assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


# --- survivor distribution ---------------------------------------------------

def test_survivor_p_half_uniform():
    dist = survivor_distribution(6, 4, 0.5)
    assert np.max(np.abs(dist - 0.25)) < 1e-15


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_survivor_p0_min_wins(n):
    assert survivor_distribution(n, 2, 0.0, l=1) == pytest.approx(1 - 2.0**-n, abs=1e-14)


def test_survivor_sums_to_one():
    for n in (1, 3, 7, 40, 800):
        for m in (2, 3, 6):
            for p in np.linspace(0, 1, 9):
                dist = survivor_distribution(n, m, float(p))
                assert abs(dist.sum() - 1.0) < 1e-12
                assert (dist >= -1e-15).all()


def test_survivor_p1_max_wins():
    assert survivor_distribution(4, 3, 1.0, l=3) == pytest.approx(1 - (2 / 3) ** 4, abs=1e-14)


def test_survivor_single_l_matches_vector():
    dist = survivor_distribution(5, 3, 0.2)
    for l in (1, 2, 3):
        assert survivor_distribution(5, 3, 0.2, l=l) == dist[l - 1]
    with pytest.raises(InvalidParameterError):
        survivor_distribution(5, 3, 0.2, l=4)


def test_survivor_large_n_finite():
    dist = survivor_distribution(5000, 3, 0.2)
    assert np.isfinite(dist).all()
    assert abs(dist.sum() - 1.0) < 1e-12


# --- monotonicity scans ------------------------------------------------------

def _classical_symmetric_sum(n, lam, k):
    if lam == 1.0:
        return 2.0 * k * (n - k)
    return (n * (1 + lam) / (1 - lam)
            * (1 - lam**k) * (1 - lam**(n - k)) / (1 - lam**n))


def test_symmetric_sum_matches_classical_display():
    n = 8
    grid = np.round(np.arange(0.0, 1.001, 0.01), 10)
    report = symmetric_sum_scan(n, (1.0,) * (n - 1), grid)
    assert report.is_monotone
    for i, k in enumerate(report.ks):
        for j, lam in enumerate(grid):
            assert report.values[i, j] == pytest.approx(
                _classical_symmetric_sum(n, float(lam), k), rel=1e-9)


def test_symmetric_scan_complete_gammas_no_violations():
    grid = np.round(np.arange(0.0, 1.001, 0.01), 10)
    for n in (2, 3, 17, 50):
        report = symmetric_sum_scan(n, tuple(complete_graph_gammas(n)), grid)
        assert report.is_monotone, report.violations[:3]


def test_random_symmetric_gammas_no_violations():
    grid = np.round(np.arange(0.0, 1.001, 0.02), 10)
    rng = np.random.default_rng(11)
    for n in (6, 13, 40):
        half = rng.uniform(0.05, 1.0, n // 2)
        full = np.concatenate([half, half[::-1]] if n % 2 == 1
                              else [half[:-1], half[-1:], half[:-1][::-1]])
        report = symmetric_sum_scan(n, tuple(full), grid)
        assert report.is_monotone


def test_asymmetric_gammas_rejected():
    with pytest.raises(InvalidParameterError):
        symmetric_sum_scan(4, (0.2, 0.5, 0.9), np.array([0.0, 0.5, 1.0]))


def test_grid_validation():
    with pytest.raises(InvalidParameterError):
        symmetric_sum_scan(4, (1.0, 1.0, 1.0), np.array([0.0, 1.2]))
    with pytest.raises(InvalidParameterError):
        symmetric_sum_scan(4, (1.0, 1.0, 1.0), np.array([0.5, 0.5]))


def test_single_term_counterexample_detected():
    """E_1 alone at n=3 peaks near lam = (sqrt(3)-1)/2 and then decreases."""
    grid = np.round(np.arange(0.0, 1.001, 0.01), 10)
    report = scan_single_term(3, (1.0, 1.0), 1, grid)
    assert not report.is_monotone
    first_drop = report.violations[0].lam_from
    peak = (math.sqrt(3) - 1) / 2
    assert abs(first_drop - peak) < 0.02
    # the symmetric sum at the same n has no such dip
    assert symmetric_sum_scan(3, (1.0, 1.0), grid).is_monotone


@pytest.mark.parametrize("alpha", [1.5, 2.0, 5.0, 10.0])
def test_bias_ratio_kernel_decreasing(alpha):
    """(1-lam)/(1+lam) * (1+lam^a)/(1-lam^a) decreases on (0, 1)."""
    lams = np.linspace(0.01, 0.99, 197)
    vals = ((1 - lams) / (1 + lams)) * ((1 + lams**alpha) / (1 - lams**alpha))
    assert (np.diff(vals) < 0).all()
    assert (vals > 0).all()
