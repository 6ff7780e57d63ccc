"""Pure-Python simulation kernels.

Fallback backend used when the compiled extension is unavailable. Every
function here is draw-for-draw identical to its counterpart in
``_kernels_c.pyx``: same generator, same draw order, same branch points.
The test suite asserts bit-identical outputs between the two backends.

All batch functions fill caller-provided output arrays over the
replication index range [rep_start, rep_end); replication ``r`` always
uses the stream derived from (seed, r), so any chunking of the range
produces identical results.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_UNIT = 1.0 / 9007199254740992.0

# init modes for consensus_batch
INIT_UNIFORM = 0
INIT_NONEMPTY = 1
INIT_FIXED = 2

# arrival couplings for the collector kernels
COUPLING_SINGLE = 0
COUPLING_INDEPENDENT = 1
COUPLING_BUNDLED = 2


def _mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _stream_state(seed, index):
    return _mix64((seed + _GOLDEN * (index + 1)) & _MASK64)


def consensus_batch(edges_u, edges_v, n, m, p, init_mode, fixed_state,
                    step_cap, seed, rep_start, rep_end, out_winner, out_time):
    """Run consensus replications; fill winner (0 = step cap hit) and time."""
    eu = [int(x) for x in edges_u]
    ev = [int(x) for x in edges_v]
    num_edges = len(eu)
    fixed = [int(x) for x in fixed_state] if init_mode == INIT_FIXED else None
    mix = _mix64

    for r in range(rep_start, rep_end):
        st = _stream_state(seed, r)

        counts = [0] * (m + 1)
        if init_mode == INIT_FIXED:
            strat = fixed[:]
            for s in strat:
                counts[s] += 1
        else:
            while True:
                strat = []
                for _ in range(n):
                    st = (st + _GOLDEN) & _MASK64
                    strat.append(1 + ((mix(st) * m) >> 64))
                if init_mode == INIT_UNIFORM or 1 in strat:
                    break
            for s in strat:
                counts[s] += 1
        present = sum(1 for c in counts if c > 0)

        t = 0
        winner = strat[0]
        timed_out = False
        while present > 1:
            if t >= step_cap:
                timed_out = True
                break
            t += 1
            st = (st + _GOLDEN) & _MASK64
            ei = (mix(st) * num_edges) >> 64
            a = strat[eu[ei]]
            b = strat[ev[ei]]
            if a == b:
                continue
            hi = a if a > b else b
            st = (st + _GOLDEN) & _MASK64
            if ((mix(st) >> 11) * _UNIT) < p:
                win = hi
            else:
                win = a + b - hi
            lose = a + b - win
            strat[eu[ei]] = win
            strat[ev[ei]] = win
            counts[lose] -= 1
            counts[win] += 1
            if counts[lose] == 0:
                present -= 1
            winner = win

        out_winner[r] = 0 if timed_out else winner
        out_time[r] = t


def multipass_batch(coupling, n, rate_denom, seed, rep_start, rep_end, out_time):
    """Collector with unit targets; per-type arrival probability 1/rate_denom."""
    mix = _mix64
    big_n = rate_denom
    for r in range(rep_start, rep_end):
        st = _stream_state(seed, r)
        collected = [False] * n
        remaining = n
        t = 0
        while remaining > 0:
            t += 1
            if coupling == COUPLING_SINGLE:
                st = (st + _GOLDEN) & _MASK64
                x = (mix(st) * big_n) >> 64
                if x < n and not collected[x]:
                    collected[x] = True
                    remaining -= 1
            elif coupling == COUPLING_INDEPENDENT:
                for j in range(n):
                    if collected[j]:
                        continue
                    st = (st + _GOLDEN) & _MASK64
                    if ((mix(st) * big_n) >> 64) == 0:
                        collected[j] = True
                        remaining -= 1
            else:  # COUPLING_BUNDLED
                st = (st + _GOLDEN) & _MASK64
                if ((mix(st) * big_n) >> 64) == 0:
                    remaining = 0
        out_time[r] = t


def connected_geometrics_batch(groups, n, rate_denom, q, coupling,
                               seed, rep_start, rep_end, out_time):
    """Collector with geometric targets built from per-group shared coins.

    Types in the same group read the same Bernoulli(q) sequence, so their
    targets coincide; singleton groups give independent targets. q >= 1
    skips the coin entirely (target 1, classical collector).
    """
    mix = _mix64
    big_n = rate_denom
    grp = [int(g) for g in groups]
    n_groups = (max(grp) + 1) if n > 0 else 0

    for r in range(rep_start, rep_end):
        st = _stream_state(seed, r)
        arrivals = [0] * n          # coupons received per type
        done = [False] * n
        revealed = [0] * n_groups   # revealed prefix length per group
        first_success = [0] * n_groups  # 0 = none in the revealed prefix
        remaining = n
        t = 0

        def receive(j, st):
            # deliver one coupon of (uncompleted) type j; returns (completed, st)
            arrivals[j] += 1
            if q >= 1.0:
                done[j] = True
                return 1, st
            g = grp[j]
            if arrivals[j] > revealed[g]:
                revealed[g] += 1
                st = (st + _GOLDEN) & _MASK64
                if ((mix(st) >> 11) * _UNIT) < q and first_success[g] == 0:
                    first_success[g] = revealed[g]
            if first_success[g] != 0 and arrivals[j] >= first_success[g]:
                done[j] = True
                return 1, st
            return 0, st

        while remaining > 0:
            t += 1
            if coupling == COUPLING_SINGLE:
                st = (st + _GOLDEN) & _MASK64
                x = (mix(st) * big_n) >> 64
                if x < n and not done[x]:
                    finished, st = receive(x, st)
                    remaining -= finished
            elif coupling == COUPLING_INDEPENDENT:
                for j in range(n):
                    if done[j]:
                        continue
                    st = (st + _GOLDEN) & _MASK64
                    if ((mix(st) * big_n) >> 64) == 0:
                        finished, st = receive(j, st)
                        remaining -= finished
            else:  # COUPLING_BUNDLED
                st = (st + _GOLDEN) & _MASK64
                if ((mix(st) * big_n) >> 64) == 0:
                    for j in range(n):
                        if done[j]:
                            continue
                        finished, st = receive(j, st)
                        remaining -= finished
        out_time[r] = t


def slow_type_batch(n, rate_denom, q, q_slow, slow_count, seed, rep_start, rep_end,
                    out_fast, out_slow, out_last_is_slow):
    """Coupled pair of thinned collectors differing only on the slow types.

    Process A keeps every arrival with probability q; process B keeps
    arrivals of types < slow_count with probability q_slow < q and others
    with q. One shared uniform per kept-candidate arrival couples the keep
    decisions (B's kept set is a subset of A's).
    """
    mix = _mix64
    big_n = rate_denom
    for r in range(rep_start, rep_end):
        st = _stream_state(seed, r)
        got_a = [False] * n
        got_b = [False] * n
        rem_a = n
        rem_b = n
        t = 0
        t_a = 0
        last_b = -1
        while rem_b > 0 or rem_a > 0:
            t += 1
            st = (st + _GOLDEN) & _MASK64
            x = (mix(st) * big_n) >> 64
            if x >= n:
                continue
            if got_a[x] and got_b[x]:
                continue
            st = (st + _GOLDEN) & _MASK64
            u = (mix(st) >> 11) * _UNIT
            if u < q and not got_a[x]:
                got_a[x] = True
                rem_a -= 1
                if rem_a == 0:
                    t_a = t
            keep_b = u < (q_slow if x < slow_count else q)
            if keep_b and not got_b[x]:
                got_b[x] = True
                rem_b -= 1
                if rem_b == 0:
                    last_b = x
        out_fast[r] = t_a
        out_slow[r] = t
        out_last_is_slow[r] = 1 if (0 <= last_b < slow_count) else 0
