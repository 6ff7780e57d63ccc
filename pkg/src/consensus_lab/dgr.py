"""Gambler's ruin with per-state delays: absorption laws in closed form.

The walk lives on {0..n} with absorbing ends. From interior state k it
moves with probability gamma_k (else stays put); conditioned on moving it
goes up with probability 1-p and down with probability p. With
lam = p/(1-p), the expected absorption times are

    E_k = ((1+lam)/(1-lam)) * (S_n*(1-lam^k)/(1-lam^n)
          - sum_{i<k} (1/gamma_i)*(1-lam^{k-i})),
    S_n = sum_{i=1}^{n-1} (1/gamma_i)*(1-lam^{n-i}).

``expected_time_closed`` evaluates an algebraically identical all-positive
rearrangement of this (no cancellation), and delegates to the tridiagonal
solver inside a small window around lam = 1 where the closed form has its
removable singularity. ``expected_time_solve`` is the independent direct
solve of the defining recurrence

    gamma_k*E_k = 1 + gamma_k*(p*E_{k-1} + (1-p)*E_{k+1}).

On the complete graph with two strategies the consensus process is
exactly this walk with gamma_k = 2k(n-k)/(n(n-1)), where k counts the
vertices playing the lower strategy (which wins each interaction with
probability 1-p).

Convention note for ``survivor_distribution``: the pair adopts the higher
strategy with probability p, so at p=0 the minimum of the initial
strategies survives: P(S<=l) = 1 - ((m-l)/m)^n. The closed form below is
oriented to match that dynamics (and is validated against the exact chain
oracle in the tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidParameterError

LAMBDA_SWITCH = 1e-3  # |lam - 1| below this: use the solver, not the closed form


@dataclass(frozen=True)
class DgrParams:
    """Walk specification: bound n, bias p, delay vector gamma_1..gamma_{n-1}."""

    n: int
    p: float
    gammas: tuple[float, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError("n must be >= 1")
        if not 0.0 <= self.p < 1.0:
            raise InvalidParameterError(f"p must be in [0, 1) (p=1 rejected), got {self.p}")
        gammas = tuple(float(g) for g in self.gammas)
        object.__setattr__(self, "gammas", gammas)
        if len(gammas) != self.n - 1:
            raise InvalidParameterError(f"need {self.n - 1} gamma values, got {len(gammas)}")
        for g in gammas:
            if not 0.0 < g <= 1.0:
                raise InvalidParameterError(f"gammas must lie in (0, 1], got {g}")

    @property
    def lam(self) -> float:
        return self.p / (1.0 - self.p)

    def is_symmetric(self, rtol: float = 1e-12) -> bool:
        g = self.gammas
        return all(math.isclose(g[i], g[-1 - i], rel_tol=rtol) for i in range(len(g) // 2))


def _check_k(params: DgrParams, k: int):
    if not 0 <= k <= params.n:
        raise InvalidParameterError(f"k must be in 0..{params.n}, got {k}")


def ruin_probability(params: DgrParams, k: int) -> float:
    """Probability the walk started at k is absorbed at n (not 0).

    Independent of the delay vector; equals (1-lam^k)/(1-lam^n), with the
    symmetric-walk limit k/n at p = 1/2.
    """
    _check_k(params, k)
    n = params.n
    if params.p == 0.5:
        return k / n
    lam = params.lam
    if lam == 0.0:
        return 1.0 if k > 0 else 0.0
    if lam < 1.0:
        return math.expm1(k * math.log(lam)) / math.expm1(n * math.log(lam))
    mu = 1.0 / lam
    log_mu = math.log(mu)
    return math.exp((n - k) * log_mu) * math.expm1(k * log_mu) / math.expm1(n * log_mu)


def expected_time_solve(params: DgrParams) -> np.ndarray:
    """E_0..E_n by direct tridiagonal solve of the defining recurrence."""
    n = params.n
    out = np.zeros(n + 1)
    if n < 2:
        return out
    size = n - 1
    p = params.p
    ab = np.zeros((3, size))
    ab[0, 1:] = -(1.0 - p)   # superdiagonal
    ab[1, :] = 1.0           # diagonal
    ab[2, :-1] = -p          # subdiagonal
    rhs = 1.0 / np.asarray(params.gammas)
    out[1:n] = solve_banded((1, 1), ab, rhs)
    return out


def expected_time_closed_vector(params: DgrParams) -> np.ndarray:
    """E_0..E_n via the closed form (solver-delegated near lam = 1)."""
    lam = params.lam
    if abs(lam - 1.0) <= LAMBDA_SWITCH:
        return expected_time_solve(params)
    if params.p > 0.5:
        # mirror: relabel state k as n-k, which swaps the roles of up and
        # down and reverses the delay vector
        mirrored = DgrParams(params.n, 1.0 - params.p, params.gammas[::-1])
        return expected_time_closed_vector(mirrored)[::-1].copy()

    n = params.n
    out = np.zeros(n + 1)
    if n < 2:
        return out
    inv_g = 1.0 / np.asarray(params.gammas)        # index i-1 holds 1/gamma_i
    pows = lam ** np.arange(n + 1, dtype=np.float64)
    one_minus = 1.0 - pows

    # prefix[k] = sum_{i=1}^{k-1} (1/gamma_i) * lam^{k-i} * (1-lam^i)
    prefix = np.zeros(n + 1)
    for k in range(2, n + 1):
        prefix[k] = lam * (prefix[k - 1] + inv_g[k - 2] * one_minus[k - 1])
    # suffix[k] = sum_{i=k}^{n-1} (1/gamma_i) * (1-lam^{n-i})
    suffix = np.zeros(n + 2)
    for k in range(n - 1, 0, -1):
        suffix[k] = suffix[k + 1] + inv_g[k - 1] * one_minus[n - k]

    scale = (1.0 + lam) / (1.0 - lam) / one_minus[n]
    ks = np.arange(n + 1)
    out = scale * (prefix * one_minus[n - ks] + suffix[: n + 1] * one_minus[ks])
    out[0] = 0.0
    out[n] = 0.0
    return out


def expected_time_closed(params: DgrParams, k: int) -> float:
    """Expected absorption time from state k (closed form)."""
    _check_k(params, k)
    return float(expected_time_closed_vector(params)[k])


def recurrence_residuals(params: DgrParams, times: np.ndarray) -> np.ndarray:
    """|gamma_k E_k - 1 - gamma_k (p E_{k-1} + (1-p) E_{k+1})| at interior k."""
    e = np.asarray(times, dtype=np.float64)
    if e.shape != (params.n + 1,):
        raise InvalidParameterError(f"times must have length {params.n + 1}")
    if params.n < 2:
        return np.zeros(0)
    g = np.asarray(params.gammas)
    p = params.p
    interior = e[1:-1]
    return np.abs(g * interior - 1.0 - g * (p * e[:-2] + (1.0 - p) * e[2:]))


def complete_graph_gammas(n: int) -> np.ndarray:
    """Significant-edge probabilities on the complete graph: 2k(n-k)/(n(n-1))."""
    if n < 2:
        raise InvalidParameterError("n must be >= 2")
    k = np.arange(1, n, dtype=np.float64)
    return 2.0 * k * (n - k) / (n * (n - 1))


def complete_graph_expected_consensus_time(n: int, p: float, init="binomial") -> float:
    """Expected consensus time on K_n with two strategies.

    init: "binomial" mixes E_k with Binomial(n, 1/2) weights (uniform
    random start); "conditioned" additionally requires at least one vertex
    on the lower strategy; ("fixed", k) starts from exactly k such
    vertices.
    """
    if n < 2:
        raise InvalidParameterError("n must be >= 2")
    params = DgrParams(n, p, tuple(complete_graph_gammas(n)))
    times = expected_time_closed_vector(params)
    if isinstance(init, tuple) and len(init) == 2 and init[0] == "fixed":
        k = int(init[1])
        _check_k(params, k)
        return float(times[k])
    weights = np.array([math.comb(n, k) for k in range(n + 1)], dtype=np.float64)
    weights /= 2.0**n
    base = float(weights @ times)
    if init == "binomial":
        return base
    if init in ("conditioned", "nonempty"):
        # E_0 = 0, so conditioning on k >= 1 just rescales
        return base / (1.0 - 2.0**-n)
    raise InvalidParameterError(f"unknown init {init!r}")


def survivor_distribution(n: int, m: int, p: float, l: int | None = None):
    """Graph-independent law of the surviving strategy.

    Returns the vector (P(S=1), ..., P(S=m)), or the single probability
    when l is given. p may be any value in [0, 1] here; p = 1/2 gives the
    uniform law.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p must be in [0, 1], got {p}")
    if l is not None and not 1 <= l <= m:
        raise InvalidParameterError(f"l must be in 1..{m}, got {l}")

    if p == 0.5:
        dist = np.full(m, 1.0 / m)
    else:
        # bases of the cumulative law; normalized by the largest so the
        # n-th powers stay finite for any n
        thresholds = np.arange(m + 1, dtype=np.float64)
        bases = m * (1.0 - p) - thresholds * (1.0 - 2.0 * p)
        ratios = (bases / bases.max()) ** n
        cdf = (ratios[0] - ratios) / (ratios[0] - ratios[m])
        dist = np.diff(cdf)
    return dist if l is None else float(dist[l - 1])


@dataclass(frozen=True)
class Violation:
    k: int
    lam_from: float
    lam_to: float
    drop: float


@dataclass(frozen=True)
class MonotonicityReport:
    """Per-k absorption-time curves over a lambda grid plus any decreases."""

    lambda_grid: np.ndarray = field(repr=False)
    ks: tuple[int, ...]
    values: np.ndarray = field(repr=False)   # shape (len(ks), len(grid))
    violations: tuple[Violation, ...]
    tolerance: float

    @property
    def is_monotone(self) -> bool:
        return not self.violations


def _scan_grid(n, gammas, lambda_grid, ks, combine, tolerance):
    grid = np.asarray(lambda_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidParameterError("lambda_grid must hold at least two points")
    if (np.diff(grid) <= 0).any():
        raise InvalidParameterError("lambda_grid must be strictly increasing")
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise InvalidParameterError("lambda_grid must stay within [0, 1]")
    values = np.empty((len(ks), grid.size))
    for j, lam in enumerate(grid):
        p = lam / (1.0 + lam)
        times = expected_time_closed_vector(DgrParams(n, p, tuple(gammas)))
        for i, k in enumerate(ks):
            values[i, j] = combine(times, k)
    violations = []
    for i, k in enumerate(ks):
        drops = np.diff(values[i])
        for j in np.flatnonzero(drops < -tolerance):
            violations.append(Violation(k=k, lam_from=float(grid[j]),
                                        lam_to=float(grid[j + 1]),
                                        drop=float(-drops[j])))
    return MonotonicityReport(lambda_grid=grid, ks=tuple(ks), values=values,
                              violations=tuple(violations), tolerance=tolerance)


def symmetric_sum_scan(n: int, gammas, lambda_grid, tolerance: float = 1e-9) -> MonotonicityReport:
    """Scan E_k + E_{n-k} over a lambda grid for monotone increase.

    Requires a symmetric delay vector (gamma_i = gamma_{n-i}); without that
    symmetry the sums need not be monotone and the scan refuses to run.
    """
    params = DgrParams(n, 0.0, tuple(gammas))  # validates n and gammas
    if not params.is_symmetric():
        raise InvalidParameterError("symmetric_sum_scan requires gamma_i = gamma_{n-i}")
    ks = tuple(range(1, n // 2 + 1))
    if not ks:
        raise InvalidParameterError("n must be >= 2 to have interior states")
    return _scan_grid(n, gammas, lambda_grid, ks,
                      lambda times, k: float(times[k] + times[n - k]), tolerance)


def scan_single_term(n: int, gammas, k: int, lambda_grid,
                     tolerance: float = 1e-9) -> MonotonicityReport:
    """Scan a single E_k over a lambda grid (no symmetry requirement)."""
    params = DgrParams(n, 0.0, tuple(gammas))
    _check_k(params, k)
    return _scan_grid(n, gammas, lambda_grid, (k,),
                      lambda times, kk: float(times[kk]), tolerance)
