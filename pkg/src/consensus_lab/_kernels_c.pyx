# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled simulation kernels.

Mirror of ``_kernels_py`` with identical draw discipline; see that module
for semantics. Batch loops release the GIL so replication chunks can run
on a thread pool.
"""

from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t
from libc.stdlib cimport malloc, free

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t cl_mulhi64(uint64_t a, uint64_t b) {
        return (uint64_t)(((unsigned __int128)a * b) >> 64);
    }
    """
    uint64_t cl_mulhi64(uint64_t a, uint64_t b) nogil

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double UNIT = 1.0 / 9007199254740992.0

INIT_UNIFORM = 0
INIT_NONEMPTY = 1
INIT_FIXED = 2

COUPLING_SINGLE = 0
COUPLING_INDEPENDENT = 1
COUPLING_BUNDLED = 2


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t stream_state(uint64_t seed, uint64_t index) nogil:
    return mix64(seed + GOLDEN * (index + 1))


def consensus_batch(int32_t[::1] edges_u, int32_t[::1] edges_v,
                    int n, int m, double p, int init_mode,
                    int32_t[::1] fixed_state, int64_t step_cap,
                    uint64_t seed, int64_t rep_start, int64_t rep_end,
                    int32_t[::1] out_winner, int64_t[::1] out_time):
    cdef int64_t num_edges = edges_u.shape[0]
    cdef int64_t r, t
    cdef uint64_t st, ei
    cdef int32_t *strat = <int32_t *> malloc(n * sizeof(int32_t))
    cdef int64_t *counts = <int64_t *> malloc((m + 1) * sizeof(int64_t))
    cdef int v, a, b, hi, win, lose, present, winner, has_one
    cdef bint timed_out
    if strat == NULL or counts == NULL:
        free(strat)
        free(counts)
        raise MemoryError()
    try:
        with nogil:
            for r in range(rep_start, rep_end):
                st = stream_state(seed, <uint64_t> r)

                for v in range(m + 1):
                    counts[v] = 0
                if init_mode == 2:  # fixed
                    for v in range(n):
                        strat[v] = fixed_state[v]
                        counts[strat[v]] += 1
                else:
                    while True:
                        has_one = 0
                        for v in range(n):
                            st = st + GOLDEN
                            strat[v] = 1 + <int32_t> cl_mulhi64(mix64(st), <uint64_t> m)
                            if strat[v] == 1:
                                has_one = 1
                        if init_mode == 0 or has_one:
                            break
                    for v in range(n):
                        counts[strat[v]] += 1
                present = 0
                for v in range(1, m + 1):
                    if counts[v] > 0:
                        present += 1

                t = 0
                winner = strat[0]
                timed_out = False
                while present > 1:
                    if t >= step_cap:
                        timed_out = True
                        break
                    t += 1
                    st = st + GOLDEN
                    ei = cl_mulhi64(mix64(st), <uint64_t> num_edges)
                    a = strat[edges_u[ei]]
                    b = strat[edges_v[ei]]
                    if a == b:
                        continue
                    hi = a if a > b else b
                    st = st + GOLDEN
                    if ((mix64(st) >> 11) * UNIT) < p:
                        win = hi
                    else:
                        win = a + b - hi
                    lose = a + b - win
                    strat[edges_u[ei]] = win
                    strat[edges_v[ei]] = win
                    counts[lose] -= 1
                    counts[win] += 1
                    if counts[lose] == 0:
                        present -= 1
                    winner = win

                out_winner[r] = 0 if timed_out else winner
                out_time[r] = t
    finally:
        free(strat)
        free(counts)


def multipass_batch(int coupling, int n, int64_t rate_denom, uint64_t seed,
                    int64_t rep_start, int64_t rep_end, int64_t[::1] out_time):
    cdef int64_t r, t
    cdef uint64_t st, x
    cdef int j, remaining
    cdef uint8_t *collected = <uint8_t *> malloc(n * sizeof(uint8_t) if n > 0 else 1)
    if collected == NULL:
        raise MemoryError()
    try:
        with nogil:
            for r in range(rep_start, rep_end):
                st = stream_state(seed, <uint64_t> r)
                for j in range(n):
                    collected[j] = 0
                remaining = n
                t = 0
                while remaining > 0:
                    t += 1
                    if coupling == 0:  # single
                        st = st + GOLDEN
                        x = cl_mulhi64(mix64(st), <uint64_t> rate_denom)
                        if x < <uint64_t> n and not collected[x]:
                            collected[x] = 1
                            remaining -= 1
                    elif coupling == 1:  # independent
                        for j in range(n):
                            if collected[j]:
                                continue
                            st = st + GOLDEN
                            if cl_mulhi64(mix64(st), <uint64_t> rate_denom) == 0:
                                collected[j] = 1
                                remaining -= 1
                    else:  # bundled
                        st = st + GOLDEN
                        if cl_mulhi64(mix64(st), <uint64_t> rate_denom) == 0:
                            remaining = 0
                out_time[r] = t
    finally:
        free(collected)


def connected_geometrics_batch(int32_t[::1] groups, int n, int64_t rate_denom,
                               double q, int coupling, uint64_t seed,
                               int64_t rep_start, int64_t rep_end,
                               int64_t[::1] out_time):
    cdef int64_t r, t
    cdef uint64_t st, x
    cdef int j, g, remaining, n_groups, lo, hi_excl
    cdef bint arrived_all
    n_groups = 0
    for j in range(n):
        if groups[j] + 1 > n_groups:
            n_groups = groups[j] + 1
    cdef int64_t *arrivals = <int64_t *> malloc(n * sizeof(int64_t) if n > 0 else 1)
    cdef uint8_t *done = <uint8_t *> malloc(n * sizeof(uint8_t) if n > 0 else 1)
    cdef int64_t *revealed = <int64_t *> malloc(n_groups * sizeof(int64_t) if n_groups > 0 else 1)
    cdef int64_t *first_success = <int64_t *> malloc(n_groups * sizeof(int64_t) if n_groups > 0 else 1)
    if arrivals == NULL or done == NULL or revealed == NULL or first_success == NULL:
        free(arrivals); free(done); free(revealed); free(first_success)
        raise MemoryError()
    try:
        with nogil:
            for r in range(rep_start, rep_end):
                st = stream_state(seed, <uint64_t> r)
                for j in range(n):
                    arrivals[j] = 0
                    done[j] = 0
                for g in range(n_groups):
                    revealed[g] = 0
                    first_success[g] = 0
                remaining = n
                t = 0
                while remaining > 0:
                    t += 1
                    # realize this step's arrivals, then process them in type order
                    if coupling == 0:  # single
                        st = st + GOLDEN
                        x = cl_mulhi64(mix64(st), <uint64_t> rate_denom)
                        if x < <uint64_t> n:
                            lo = <int> x
                            hi_excl = lo + 1
                        else:
                            lo = 0
                            hi_excl = 0
                        for j in range(lo, hi_excl):
                            if done[j]:
                                continue
                            remaining -= _cg_receive(j, groups, arrivals, done,
                                                     revealed, first_success, q, &st)
                    elif coupling == 1:  # independent
                        for j in range(n):
                            if done[j]:
                                continue
                            st = st + GOLDEN
                            if cl_mulhi64(mix64(st), <uint64_t> rate_denom) == 0:
                                remaining -= _cg_receive(j, groups, arrivals, done,
                                                         revealed, first_success, q, &st)
                    else:  # bundled
                        st = st + GOLDEN
                        arrived_all = cl_mulhi64(mix64(st), <uint64_t> rate_denom) == 0
                        if arrived_all:
                            for j in range(n):
                                if done[j]:
                                    continue
                                remaining -= _cg_receive(j, groups, arrivals, done,
                                                         revealed, first_success, q, &st)
                out_time[r] = t
    finally:
        free(arrivals); free(done); free(revealed); free(first_success)


cdef inline int _cg_receive(int j, int32_t[::1] groups, int64_t *arrivals,
                            uint8_t *done, int64_t *revealed,
                            int64_t *first_success, double q,
                            uint64_t *st) nogil:
    """Deliver one coupon of (uncompleted) type j; return 1 if j completes."""
    cdef int g
    arrivals[j] += 1
    if q >= 1.0:
        done[j] = 1
        return 1
    g = groups[j]
    if arrivals[j] > revealed[g]:
        revealed[g] += 1
        st[0] = st[0] + GOLDEN
        if ((mix64(st[0]) >> 11) * UNIT) < q and first_success[g] == 0:
            first_success[g] = revealed[g]
    if first_success[g] != 0 and arrivals[j] >= first_success[g]:
        done[j] = 1
        return 1
    return 0


def slow_type_batch(int n, int64_t rate_denom, double q, double q_slow,
                    int slow_count, uint64_t seed, int64_t rep_start,
                    int64_t rep_end, int64_t[::1] out_fast,
                    int64_t[::1] out_slow, uint8_t[::1] out_last_is_slow):
    cdef int64_t r, t, t_a
    cdef uint64_t st, x
    cdef int rem_a, rem_b, last_b, j
    cdef double u
    cdef bint keep_b
    cdef uint8_t *got_a = <uint8_t *> malloc(n * sizeof(uint8_t) if n > 0 else 1)
    cdef uint8_t *got_b = <uint8_t *> malloc(n * sizeof(uint8_t) if n > 0 else 1)
    if got_a == NULL or got_b == NULL:
        free(got_a); free(got_b)
        raise MemoryError()
    try:
        with nogil:
            for r in range(rep_start, rep_end):
                st = stream_state(seed, <uint64_t> r)
                for j in range(n):
                    got_a[j] = 0
                    got_b[j] = 0
                rem_a = n
                rem_b = n
                t = 0
                t_a = 0
                last_b = -1
                while rem_b > 0 or rem_a > 0:
                    t += 1
                    st = st + GOLDEN
                    x = cl_mulhi64(mix64(st), <uint64_t> rate_denom)
                    if x >= <uint64_t> n:
                        continue
                    if got_a[x] and got_b[x]:
                        continue
                    st = st + GOLDEN
                    u = (mix64(st) >> 11) * UNIT
                    if u < q and not got_a[x]:
                        got_a[x] = 1
                        rem_a -= 1
                        if rem_a == 0:
                            t_a = t
                    keep_b = u < (q_slow if <int> x < slow_count else q)
                    if keep_b and not got_b[x]:
                        got_b[x] = 1
                        rem_b -= 1
                        if rem_b == 0:
                            last_b = <int> x
                out_fast[r] = t_a
                out_slow[r] = t
                out_last_is_slow[r] = 1 if (0 <= last_b and last_b < slow_count) else 0
    finally:
        free(got_a); free(got_b)
