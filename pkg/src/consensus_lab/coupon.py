"""Coupon-collector variants: multipass arrivals, geometric targets built
from shared coins, and slow-type coupled pairs.

The processes all share one clock: at each step some subset of the n types
may arrive, with per-type marginal probability 1/N (N = ``rate_denom``).
The arrival coupling fixes the joint law of that subset. Targets are
either one coupon per type, or geometric(q) counts realized lazily from
per-group Bernoulli sequences: types in the same group read the same
sequence, so their targets coincide; singleton groups give independent
targets. Custom injective index maps are accepted as callables and run on
the pure-Python path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import kernels
from .errors import InvalidParameterError
from .process import _run_chunked  # shared deterministic chunking
from .rng import Stream


# ---------------------------------------------------------------------------
# harmonic numbers and their piecewise-linear interpolation

_HARMONIC_CACHE = [0.0]


def harmonic(n: int) -> float:
    """n-th harmonic number H_n (H_0 = 0)."""
    if n < 0:
        raise InvalidParameterError("harmonic needs n >= 0")
    while len(_HARMONIC_CACHE) <= n:
        _HARMONIC_CACHE.append(_HARMONIC_CACHE[-1] + 1.0 / len(_HARMONIC_CACHE))
    return _HARMONIC_CACHE[n]


def harmonic_interp(x: float) -> float:
    """h(x): equals H_n at integers, linear in between; concave."""
    if x < 0:
        raise InvalidParameterError("harmonic_interp needs x >= 0")
    lo = math.floor(x)
    frac = x - lo
    if frac == 0.0:
        return harmonic(int(lo))
    return harmonic(int(lo)) + frac / (lo + 1.0)


@dataclass(frozen=True)
class HarmonicTable:
    """Cached H_1..H_max plus the interpolation rule."""

    max_n: int

    def __post_init__(self):
        if self.max_n < 1:
            raise InvalidParameterError("max_n must be >= 1")
        harmonic(self.max_n)  # warm the cache

    def value(self, n: int) -> float:
        if n > self.max_n:
            raise InvalidParameterError(f"table caches up to H_{self.max_n}")
        return harmonic(n)

    def interp(self, x: float) -> float:
        if x > self.max_n:
            raise InvalidParameterError(f"table caches up to H_{self.max_n}")
        return harmonic_interp(x)


def collector_bound(n: int, rate_denom: float, q: float = 1.0) -> float:
    """The upper bound N*H_n/q on the expected completion time."""
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    if rate_denom <= 0 or not 0.0 < q <= 1.0:
        raise InvalidParameterError("need rate_denom > 0 and q in (0, 1]")
    return rate_denom * harmonic(n) / q


# ---------------------------------------------------------------------------
# arrival couplings (explicit strategy objects with verified marginals)

@dataclass(frozen=True)
class ArrivalCoupling:
    """Joint law of which types arrive in one step; marginals are 1/N each."""

    name: str
    kernel_id: int

    def validate(self, n: int, rate_denom: int) -> None:
        if rate_denom < 1:
            raise InvalidParameterError("rate_denom must be >= 1")
        if self.kernel_id == kernels.COUPLING_SINGLE and rate_denom < n:
            # mutually exclusive arrivals need total probability n/N <= 1
            raise InvalidParameterError(
                f"single-arrival coupling needs rate_denom >= n (got N={rate_denom}, n={n})")


SINGLE_ARRIVAL = ArrivalCoupling("single", kernels.COUPLING_SINGLE)
INDEPENDENT_ARRIVALS = ArrivalCoupling("independent", kernels.COUPLING_INDEPENDENT)
BUNDLED_ARRIVALS = ArrivalCoupling("bundled", kernels.COUPLING_BUNDLED)

COUPLINGS = {
    c.name: c for c in (SINGLE_ARRIVAL, INDEPENDENT_ARRIVALS, BUNDLED_ARRIVALS)
}


def resolve_coupling(coupling) -> ArrivalCoupling:
    if isinstance(coupling, ArrivalCoupling):
        return coupling
    try:
        return COUPLINGS[coupling]
    except KeyError:
        raise InvalidParameterError(
            f"unknown coupling {coupling!r}; choose from {sorted(COUPLINGS)}") from None


# ---------------------------------------------------------------------------
# target models and the experiment spec

@dataclass(frozen=True)
class SingleTarget:
    """One coupon of each type (classical)."""


@dataclass(frozen=True)
class IndependentGeometric:
    """Independent geometric(q) target per type."""

    q: float

    def __post_init__(self):
        _check_q(self.q)


@dataclass(frozen=True)
class ConnectedGeometrics:
    """Geometric(q) targets tied together by a shared-coin index map.

    index_map: "disjoint" | "pairs" | "shared", a length-n sequence of
    group labels, or a callable (type, k) -> coin index (1-based k) that
    must be injective per type.
    """

    q: float
    index_map: Union[str, tuple, Callable] = "disjoint"

    def __post_init__(self):
        _check_q(self.q)


def _check_q(q):
    if not 0.0 < q <= 1.0:
        raise InvalidParameterError(f"q must be in (0, 1], got {q}")


TargetModel = Union[SingleTarget, IndependentGeometric, ConnectedGeometrics]


@dataclass(frozen=True)
class CouponSpec:
    """Collector experiment description.

    n types, per-type arrival probability 1/rate_denom per step
    (rate_denom >= n), a target model, and optionally a set of slow types
    {0..s-1} kept with probability slow_q instead of q.
    """

    n: int
    rate_denom: int
    target_model: TargetModel = SingleTarget()
    slow_types: frozenset = frozenset()
    slow_q: float | None = None

    def __post_init__(self):
        if self.n < 0:
            raise InvalidParameterError("n must be >= 0")
        if self.rate_denom < max(self.n, 1):
            raise InvalidParameterError("need rate_denom >= n (and >= 1)")
        object.__setattr__(self, "slow_types", frozenset(self.slow_types))
        if self.slow_types:
            s = len(self.slow_types)
            if self.slow_types != frozenset(range(s)):
                raise InvalidParameterError(
                    "slow_types must be {0..s-1}; relabel types so the slow ones come first")
            if self.slow_q is None:
                raise InvalidParameterError("slow_types set but slow_q missing")


def _resolve_groups(n: int, index_map):
    """Group label per type for the built-in maps; None for callables."""
    if callable(index_map):
        return None
    if isinstance(index_map, str):
        if index_map == "disjoint":
            return list(range(n))
        if index_map == "pairs":
            return [j // 2 for j in range(n)]
        if index_map == "shared":
            return [0] * n
        raise InvalidParameterError(
            f"unknown index_map {index_map!r}; use disjoint|pairs|shared, labels, or a callable")
    labels = list(index_map)
    if len(labels) != n:
        raise InvalidParameterError(f"index_map labels must have length {n}")
    compact = {}
    groups = []
    for lab in labels:
        if lab not in compact:
            compact[lab] = len(compact)
        groups.append(compact[lab])
    return groups


# ---------------------------------------------------------------------------
# single-run simulators (draw-for-draw identical to the batch kernels)

def _draw_arrivals(coupling: ArrivalCoupling, n, rate_denom, skip, rng):
    """Types arriving this step, in increasing order; ``skip[j]`` suppresses
    the draw for completed types (their arrivals no longer matter)."""
    if coupling.kernel_id == kernels.COUPLING_SINGLE:
        x = rng.below(rate_denom)
        return (x,) if x < n and not skip[x] else ()
    if coupling.kernel_id == kernels.COUPLING_INDEPENDENT:
        out = []
        for j in range(n):
            if not skip[j] and rng.below(rate_denom) == 0:
                out.append(j)
        return tuple(out)
    if rng.below(rate_denom) == 0:
        return tuple(j for j in range(n) if not skip[j])
    return ()


def simulate_multipass(spec: CouponSpec, coupling, rng: Stream) -> int:
    """One run of the unit-target collector; returns the completion time."""
    if not isinstance(spec.target_model, SingleTarget):
        raise InvalidParameterError("simulate_multipass needs a SingleTarget spec")
    coupling = resolve_coupling(coupling)
    coupling.validate(spec.n, spec.rate_denom)
    n, big_n = spec.n, spec.rate_denom
    collected = [False] * n
    remaining = n
    t = 0
    while remaining > 0:
        t += 1
        for j in _draw_arrivals(coupling, n, big_n, collected, rng):
            collected[j] = True
            remaining -= 1
    return t


class _LazyTargets:
    """Lazily revealed per-group coin sequences; shared within a group.

    For a callable map the coins are memoized per index; injectivity per
    type is enforced on the fly.
    """

    def __init__(self, n, q, index_map, rng):
        self.q = q
        self.rng = rng
        self.arrivals = [0] * n
        self.groups = _resolve_groups(n, index_map)
        if self.groups is None:
            self.index_map = index_map
            self.coins = {}
            self.seen = [set() for _ in range(n)]
            self.first_success = [0] * n   # per type for callable maps
        else:
            n_groups = max(self.groups, default=-1) + 1
            self.revealed = [0] * n_groups
            self.group_first = [0] * n_groups

    def receive(self, j) -> bool:
        """Deliver one coupon of type j; True when type j completes."""
        self.arrivals[j] += 1
        if self.q >= 1.0:
            return True
        k = self.arrivals[j]
        if self.groups is None:
            idx = self.index_map(j, k)
            if idx in self.seen[j]:
                raise InvalidParameterError(
                    f"index_map not injective for type {j}: index {idx} repeated")
            self.seen[j].add(idx)
            if idx not in self.coins:
                self.coins[idx] = self.rng.unit() < self.q
            if self.coins[idx] and self.first_success[j] == 0:
                self.first_success[j] = k
            return self.first_success[j] != 0 and k >= self.first_success[j]
        g = self.groups[j]
        if k > self.revealed[g]:
            self.revealed[g] += 1
            if self.rng.unit() < self.q and self.group_first[g] == 0:
                self.group_first[g] = self.revealed[g]
        return self.group_first[g] != 0 and k >= self.group_first[g]


def simulate_connected_geometrics(spec: CouponSpec, rng: Stream,
                                  coupling=SINGLE_ARRIVAL) -> int:
    """One run of the geometric-target collector; returns the completion time."""
    model = spec.target_model
    if isinstance(model, IndependentGeometric):
        q, index_map = model.q, "disjoint"
    elif isinstance(model, ConnectedGeometrics):
        q, index_map = model.q, model.index_map
    else:
        raise InvalidParameterError("spec needs a geometric target model")
    coupling = resolve_coupling(coupling)
    coupling.validate(spec.n, spec.rate_denom)
    n, big_n = spec.n, spec.rate_denom
    targets = _LazyTargets(n, q, index_map, rng)
    done = [False] * n
    remaining = n
    t = 0

    def receive(j):
        nonlocal remaining
        if targets.receive(j):
            done[j] = True
            remaining -= 1

    # arrival draws interleave with reveal draws exactly as in the kernels
    while remaining > 0:
        t += 1
        if coupling.kernel_id == kernels.COUPLING_SINGLE:
            x = rng.below(big_n)
            if x < n and not done[x]:
                receive(x)
        elif coupling.kernel_id == kernels.COUPLING_INDEPENDENT:
            for j in range(n):
                if not done[j] and rng.below(big_n) == 0:
                    receive(j)
        else:
            if rng.below(big_n) == 0:
                for j in range(n):
                    if not done[j]:
                        receive(j)
    return t


@dataclass(frozen=True)
class SlowTypeRun:
    time_fast: int      # completion time with every type kept at rate q
    time_slow: int      # completion time with slow types kept at rate slow_q
    last_is_slow: bool  # slow process finished on a slow type


def simulate_slow_type(spec: CouponSpec, rng: Stream) -> SlowTypeRun:
    """One coupled run of the fast/slow pair (shared arrivals and coins)."""
    q, q_slow, s = _slow_params(spec)
    n, big_n = spec.n, spec.rate_denom
    got_a = [False] * n
    got_b = [False] * n
    rem_a = rem_b = n
    t = t_a = 0
    last_b = -1
    while rem_b > 0 or rem_a > 0:
        t += 1
        x = rng.below(big_n)
        if x >= n or (got_a[x] and got_b[x]):
            continue
        u = rng.unit()
        if u < q and not got_a[x]:
            got_a[x] = True
            rem_a -= 1
            if rem_a == 0:
                t_a = t
        if u < (q_slow if x < s else q) and not got_b[x]:
            got_b[x] = True
            rem_b -= 1
            if rem_b == 0:
                last_b = x
    return SlowTypeRun(t_a, t, 0 <= last_b < s)


def _slow_params(spec: CouponSpec):
    if not isinstance(spec.target_model, IndependentGeometric):
        raise InvalidParameterError(
            "slow-type runs use IndependentGeometric targets (keep probability q)")
    if not spec.slow_types:
        raise InvalidParameterError("spec.slow_types is empty")
    q = spec.target_model.q
    q_slow = spec.slow_q
    if not 0.0 < q_slow <= q < 1.0:
        raise InvalidParameterError(f"need 0 < slow_q <= q < 1, got slow_q={q_slow}, q={q}")
    return q, q_slow, len(spec.slow_types)


def last_slow_probability(n: int, q: float, q_slow: float) -> float:
    """prod_{k=1}^{n-1} k*q/(k*q + q_slow): chance the one slow type finishes last."""
    out = 1.0
    for k in range(1, n):
        out *= k * q / (k * q + q_slow)
    return out


# ---------------------------------------------------------------------------
# batch runners (kernel-backed, deterministic per replication index)

def multipass_times(spec: CouponSpec, coupling, reps: int, seed: int,
                    workers=None) -> np.ndarray:
    """Completion times of ``reps`` independent multipass runs."""
    if not isinstance(spec.target_model, SingleTarget):
        raise InvalidParameterError("multipass_times needs a SingleTarget spec")
    coupling = resolve_coupling(coupling)
    coupling.validate(spec.n, spec.rate_denom)
    out = np.zeros(reps, dtype=np.int64)
    _run_chunked(lambda lo, hi: kernels.impl.multipass_batch(
        coupling.kernel_id, spec.n, spec.rate_denom, seed, lo, hi, out),
        reps, workers)
    return out


def connected_geometrics_times(spec: CouponSpec, reps: int, seed: int,
                               coupling=SINGLE_ARRIVAL, workers=None) -> np.ndarray:
    """Completion times of ``reps`` geometric-target runs."""
    model = spec.target_model
    if isinstance(model, IndependentGeometric):
        q, index_map = model.q, "disjoint"
    elif isinstance(model, ConnectedGeometrics):
        q, index_map = model.q, model.index_map
    else:
        raise InvalidParameterError("spec needs a geometric target model")
    coupling = resolve_coupling(coupling)
    coupling.validate(spec.n, spec.rate_denom)
    out = np.zeros(reps, dtype=np.int64)
    groups = _resolve_groups(spec.n, index_map)
    if groups is None:
        # callable index maps take the pure path, one stream per replication
        for r in range(reps):
            out[r] = simulate_connected_geometrics(spec, Stream(seed, r), coupling)
        return out
    group_arr = np.asarray(groups, dtype=np.int32)
    _run_chunked(lambda lo, hi: kernels.impl.connected_geometrics_batch(
        group_arr, spec.n, spec.rate_denom, q, coupling.kernel_id, seed, lo, hi, out),
        reps, workers)
    return out


def slow_type_runs(spec: CouponSpec, reps: int, seed: int, workers=None):
    """(fast times, slow times, last-is-slow flags) over ``reps`` coupled runs."""
    q, q_slow, s = _slow_params(spec)
    fast = np.zeros(reps, dtype=np.int64)
    slow = np.zeros(reps, dtype=np.int64)
    last = np.zeros(reps, dtype=np.uint8)
    _run_chunked(lambda lo, hi: kernels.impl.slow_type_batch(
        spec.n, spec.rate_denom, q, q_slow, s, seed, lo, hi, fast, slow, last),
        reps, workers)
    return fast, slow, last


def realize_targets(spec: CouponSpec, rng: Stream) -> np.ndarray:
    """Eagerly realize the target vector (Y_1..Y_n); for distribution tests."""
    model = spec.target_model
    if isinstance(model, SingleTarget):
        return np.ones(spec.n, dtype=np.int64)
    if isinstance(model, IndependentGeometric):
        q, index_map = model.q, "disjoint"
    else:
        q, index_map = model.q, model.index_map
    targets = _LazyTargets(spec.n, q, index_map, rng)
    out = np.zeros(spec.n, dtype=np.int64)
    for j in range(spec.n):
        while not targets.receive(j):
            pass
        out[j] = targets.arrivals[j]
    return out
