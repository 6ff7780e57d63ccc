"""Exact absorbing-chain analysis of the consensus process on small instances.

States are the m^n strategy assignments encoded as little-endian
mixed-radix integers (digit v = strategy of vertex v minus 1). The m
constant states are absorbing; everything else is transient. Absorption
probabilities and expected absorption times come from sparse linear
solves of (I - Q) systems, with a dense LAPACK path for small chains and
an iterative path (residual <= 1e-12, direct-factorization backstop) for
larger ones. The two backends cross-check each other in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, InvalidParameterError
from .graphs import Graph

STATE_GUARD = 2_000_000
DENSE_LIMIT = 4096
RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class AbsorbingChain:
    graph: Graph
    m: int
    p: float
    transition: sp.csr_matrix = field(repr=False)
    absorbing_ids: np.ndarray = field(repr=False)
    transient_ids: np.ndarray = field(repr=False)

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]


def encode_state(strategies, m: int) -> int:
    """Mixed-radix little-endian id of a strategy vector (values 1..m)."""
    sid = 0
    for v, s in enumerate(strategies):
        sid += (int(s) - 1) * m**v
    return sid


def decode_state(sid: int, n: int, m: int) -> np.ndarray:
    out = np.empty(n, dtype=np.int32)
    for v in range(n):
        out[v] = sid % m + 1
        sid //= m
    return out


def build_chain(graph: Graph, m: int, p: float) -> AbsorbingChain:
    """Assemble the one-step transition matrix of the edge-sampling process."""
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p must be in [0, 1], got {p}")
    n = graph.n
    num_states = m**n
    if num_states > STATE_GUARD:
        raise CapacityError(f"m^n = {num_states} exceeds state guard {STATE_GUARD}")

    num_edges = graph.num_edges
    ids = np.arange(num_states, dtype=np.int64)
    rows, cols, data = [], [], []
    significant = np.zeros(num_states, dtype=np.int64)

    for u, v in graph.edges:
        du = (ids // m**u) % m
        dv = (ids // m**v) % m
        mask = du != dv
        significant += mask
        hi = np.maximum(du, dv)
        lo = np.minimum(du, dv)
        src = ids[mask]
        to_hi = src + (hi[mask] - du[mask]) * m**u + (hi[mask] - dv[mask]) * m**v
        to_lo = src + (lo[mask] - du[mask]) * m**u + (lo[mask] - dv[mask]) * m**v
        rows.append(src)
        cols.append(to_hi)
        data.append(np.full(src.size, p / num_edges))
        rows.append(src)
        cols.append(to_lo)
        data.append(np.full(src.size, (1.0 - p) / num_edges))

    # residual self mass: non-significant edges leave the state unchanged
    if num_edges > 0:
        diag = (num_edges - significant) / num_edges
    else:  # single-vertex graph
        diag = np.ones(num_states)
    rows.append(ids)
    cols.append(ids)
    data.append(diag)

    transition = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(num_states, num_states),
    ).tocsr()
    transition.sum_duplicates()

    absorbing = _constant_state_ids(n, m)
    transient_mask = np.ones(num_states, dtype=bool)
    transient_mask[absorbing] = False
    return AbsorbingChain(graph=graph, m=m, p=p, transition=transition,
                          absorbing_ids=absorbing,
                          transient_ids=ids[transient_mask])


def _constant_state_ids(n: int, m: int) -> np.ndarray:
    weight = sum(m**v for v in range(n))  # id of the all-2 state is 1*weight
    return np.array([d * weight for d in range(m)], dtype=np.int64)


def validate_chain(chain: AbsorbingChain, tol: float = 1e-12) -> None:
    """Check stochastic rows, the absorbing set, and full absorption."""
    t = chain.transition
    row_sums = np.asarray(t.sum(axis=1)).ravel()
    if not np.allclose(row_sums, 1.0, rtol=0.0, atol=tol):
        raise RuntimeError("transition rows do not sum to 1")
    for sid in chain.absorbing_ids:
        row = t.getrow(int(sid))
        if row.nnz != 1 or abs(row[0, int(sid)] - 1.0) > tol:
            raise RuntimeError(f"state {sid} is not absorbing")
    # reachability sweep: state s reaches absorption iff it has an arrow
    # into the current reach set
    reach = np.zeros(chain.num_states, dtype=bool)
    reach[chain.absorbing_ids] = True
    t_bool = t.astype(bool)
    t_bool.eliminate_zeros()
    frontier = reach.copy()
    while frontier.any():
        hit = np.asarray(t_bool @ frontier).ravel().astype(bool)
        frontier = hit & ~reach
        reach |= frontier
    if not reach.all():
        raise RuntimeError("some transient state cannot reach absorption")


def _transient_system(chain: AbsorbingChain):
    t = chain.transition
    trans = chain.transient_ids
    q = t[trans][:, trans]
    a = sp.identity(trans.size, format="csr") - q
    return a


def _solve(a: sp.csr_matrix, b: np.ndarray, backend: str = "auto") -> np.ndarray:
    """Solve the substochastic system a x = b to residual <= RESIDUAL_TOL."""
    size = a.shape[0]
    b = np.atleast_2d(b.T).T  # ensure (size, k)
    if size == 0:
        return np.zeros_like(b)
    if backend == "dense" or (backend == "auto" and size <= DENSE_LIMIT):
        return np.linalg.solve(a.toarray(), b)
    x = np.empty_like(b, dtype=np.float64)
    lu = None
    for j in range(b.shape[1]):
        col = b[:, j]
        scale = 1.0 + float(np.abs(col).max(initial=0.0))
        sol, info = spla.lgmres(a, col, rtol=1e-14, atol=RESIDUAL_TOL * scale * 1e-2,
                                maxiter=2000)
        if info != 0 or float(np.abs(a @ sol - col).max()) > RESIDUAL_TOL * scale:
            if lu is None:
                lu = spla.splu(a.tocsc())
            sol = lu.solve(col)
        x[:, j] = sol
    return x


def _init_vector(chain: AbsorbingChain, init) -> np.ndarray:
    num_states = chain.num_states
    if isinstance(init, str):
        if init == "uniform":
            return np.full(num_states, 1.0 / num_states)
        if init in ("nonempty", "conditioned-nonempty"):
            vec = np.full(num_states, 1.0 / num_states)
            vec[_no_strategy_one_ids(chain)] = 0.0
            total = vec.sum()
            if total <= 0:
                raise InvalidParameterError("no admissible states for nonempty init")
            return vec / total
        raise InvalidParameterError(f"unknown init {init!r}")
    vec = np.asarray(init, dtype=np.float64)
    if vec.shape != (num_states,):
        raise InvalidParameterError(f"init must have length {num_states}")
    if vec.min() < 0 or abs(vec.sum() - 1.0) > 1e-9:
        raise InvalidParameterError("init must be a probability distribution")
    return vec


def _no_strategy_one_ids(chain: AbsorbingChain) -> np.ndarray:
    """Ids of states in which no vertex plays strategy 1 (digit 0)."""
    n = chain.graph.n
    m = chain.m
    ids = np.arange(chain.num_states, dtype=np.int64)
    has_one = np.zeros(chain.num_states, dtype=bool)
    for v in range(n):
        has_one |= (ids // m**v) % m == 0
    return ids[~has_one]


def absorption_distribution(chain: AbsorbingChain, init="uniform",
                            backend: str = "auto") -> np.ndarray:
    """Exact P(S = l) for l = 1..m from the given initial distribution."""
    vec = _init_vector(chain, init)
    a = _transient_system(chain)
    r = chain.transition[chain.transient_ids][:, chain.absorbing_ids].toarray()
    x = _solve(a, r, backend=backend)
    result = vec[chain.transient_ids] @ x + vec[chain.absorbing_ids]
    total = result.sum()
    if abs(total - 1.0) > 1e-10:
        raise RuntimeError(f"absorption probabilities sum to {total}, not 1")
    return result


def expected_absorption_time(chain: AbsorbingChain, init="uniform",
                             backend: str = "auto") -> float:
    """Exact E[T] (edge-sampling steps) from the given initial distribution."""
    vec = _init_vector(chain, init)
    a = _transient_system(chain)
    t = _solve(a, np.ones(chain.transient_ids.size), backend=backend)
    return float(vec[chain.transient_ids] @ t[:, 0])


def expected_time_by_survivor(chain: AbsorbingChain, init="uniform",
                              backend: str = "auto") -> np.ndarray:
    """Exact E[T * 1{S=l}] for l = 1..m; sums to E[T].

    Joint observable used by the strategy-relabeling symmetry tests.
    """
    vec = _init_vector(chain, init)
    a = _transient_system(chain)
    r = chain.transition[chain.transient_ids][:, chain.absorbing_ids].toarray()
    x = _solve(a, r, backend=backend)
    h = _solve(a, x, backend=backend)
    return vec[chain.transient_ids] @ h
