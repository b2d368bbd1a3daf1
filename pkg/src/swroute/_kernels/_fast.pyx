# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: mirror swroute._kernels.pure exactly (same tie-breaks).

The sequencing DP uses a dense (N+1) * 2^N table and covers up to 20
clusters; larger inputs fall back to the pure implementation.
"""

import numpy as np

from . import pure

cdef double INF = float("inf")
cdef int MAX_DENSE = 20


def _matrix(tmat, int n):
    out = np.empty((n + 1, n + 1), dtype=np.float64)
    for i in range(n + 1):
        row = tmat[i]
        for j in range(n + 1):
            out[i, j] = row[j]
    return out


def _i64(seq, int size):
    out = np.zeros(size, dtype=np.int64)
    for i, v in enumerate(seq):
        if i >= size:
            break
        out[i] = int(v)
    return out


def _u64(seq, int size):
    out = np.zeros(size, dtype=np.uint64)
    for i, v in enumerate(seq):
        if i >= size:
            break
        out[i] = int(v)
    return out


def dp_solve(
    n, tmat, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
    capacity, initial_load, pick_offset, drop_offset, n_waiting,
    gamma1, gamma2, alpha1, alpha2,
):
    if n > MAX_DENSE:
        return pure.dp_solve(
            n, tmat, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
            capacity, initial_load, pick_offset, drop_offset, n_waiting,
            gamma1, gamma2, alpha1, alpha2,
        )
    cdef int N = n
    cdef unsigned long long size = 1ULL << N

    t = _matrix(tmat, N)
    arange = np.arange(size, dtype=np.uint64)
    pc = np.zeros(size, dtype=np.uint8)
    for b in range(N):
        pc += ((arange >> np.uint64(b)) & np.uint64(1)).astype(np.uint8)
    order = np.argsort(pc, kind="stable")[::-1].astype(np.uint64).copy()

    value = np.full((N + 1) * size, np.inf, dtype=np.float64)
    nxt = np.full((N + 1) * size, -1, dtype=np.int32)
    pick_in = np.zeros(size, dtype=np.int64)
    drop_in = np.zeros(size, dtype=np.int64)
    net_in = np.zeros(size, dtype=np.int64)

    examined = _dp_run(
        N, t, _i64(lp, N + 1), _i64(ld, N + 1), _i64(lnet, N + 1),
        _u64(req_mask, N + 1), _i64(flo_p, N + 1), _i64(fhi_p, N + 1),
        _i64(flo_d, N + 1), _i64(fhi_d, N + 1),
        int(capacity), int(initial_load), int(pick_offset), int(drop_offset),
        float(n_waiting), float(gamma1), float(gamma2), float(alpha1), float(alpha2),
        order, value, nxt, pick_in, drop_in, net_in,
    )

    cost = float(value[0])
    seq = []
    cdef unsigned long long mask = 0
    cdef unsigned long long full = size - 1
    cdef int cur = 0, cand
    if cost != float("inf"):
        while mask != full:
            cand = nxt[(<unsigned long long> cur) * size + mask]
            seq.append(cand)
            mask |= 1ULL << (cand - 1)
            cur = cand
    return cost, seq, int(examined)


cdef long long _dp_run(
    int N, double[:, ::1] t,
    long long[::1] lp, long long[::1] ld, long long[::1] lnet,
    unsigned long long[::1] req,
    long long[::1] lo_p, long long[::1] hi_p,
    long long[::1] lo_d, long long[::1] hi_d,
    long long cap, long long load0, long long poff, long long doff,
    double nw, double g1, double g2, double a1, double a2,
    unsigned long long[::1] order,
    double[::1] value, int[::1] nxt,
    long long[::1] pick_in, long long[::1] drop_in, long long[::1] net_in,
) nogil:
    cdef unsigned long long size = 1ULL << N
    cdef unsigned long long full = size - 1
    cdef unsigned long long mask, low, bit, idx, oi, rest
    cdef int i, cur, cand, bestn
    cdef long long load, fp, fd, examined = 0
    cdef double mult, bestv, tot

    for mask in range(1, size):
        low = mask & (~mask + 1ULL)
        i = 0
        while not (low & 1ULL):
            low >>= 1
            i += 1
        low = 1ULL << i
        pick_in[mask] = pick_in[mask ^ low] + lp[i + 1]
        drop_in[mask] = drop_in[mask ^ low] + ld[i + 1]
        net_in[mask] = net_in[mask ^ low] + lnet[i + 1]

    for oi in range(size):
        mask = order[oi]
        for cur in range(0, N + 1):
            if cur == 0:
                if mask != 0:
                    continue
            elif not (mask >> (cur - 1)) & 1ULL:
                continue
            load = load0 + net_in[mask]
            if load > cap or load < 0:
                continue
            if cur > 0:
                rest = mask ^ (1ULL << (cur - 1))
                fp = poff + pick_in[rest]
                if fp < lo_p[cur] or fp > hi_p[cur]:
                    continue
                fd = doff + drop_in[rest]
                if fd < lo_d[cur] or fd > hi_d[cur]:
                    continue
            examined += 1
            idx = (<unsigned long long> cur) * size + mask
            if mask == full:
                value[idx] = 0.0
                continue
            mult = g1 + g2 * (a1 * (nw - pick_in[mask]) + a2 * (load0 + net_in[mask]))
            bestv = INF
            bestn = -1
            for cand in range(1, N + 1):
                bit = 1ULL << (cand - 1)
                if mask & bit:
                    continue
                if req[cand] & (~mask & full):
                    continue
                tot = value[(<unsigned long long> cand) * size + (mask | bit)]
                if tot == INF:
                    continue
                tot = t[cur, cand] * mult + tot
                if tot < bestv:
                    bestv = tot
                    bestn = cand
            if bestn >= 0:
                value[idx] = bestv
                nxt[idx] = bestn
    return examined


def count_sequences(
    n, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
    capacity, initial_load, pick_offset, drop_offset,
):
    if n > 62:
        return pure.count_sequences(
            n, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
            capacity, initial_load, pick_offset, drop_offset,
        )
    cdef int N = n
    return int(
        _count_rec(
            0, 0, int(initial_load), 0, 0, N,
            _i64(lp, N + 1), _i64(ld, N + 1), _i64(lnet, N + 1),
            _u64(req_mask, N + 1),
            _i64(flo_p, N + 1), _i64(fhi_p, N + 1),
            _i64(flo_d, N + 1), _i64(fhi_d, N + 1),
            int(capacity), int(pick_offset), int(drop_offset),
        )
    )


cdef long long _count_rec(
    int depth, unsigned long long mask, long long load, long long fp, long long fd,
    int N, long long[::1] lp, long long[::1] ld, long long[::1] lnet,
    unsigned long long[::1] req,
    long long[::1] lo_p, long long[::1] hi_p,
    long long[::1] lo_d, long long[::1] hi_d,
    long long cap, long long poff, long long doff,
) nogil:
    if depth == N:
        return 1
    cdef long long total = 0
    cdef long long new_load
    cdef unsigned long long full = (1ULL << N) - 1
    cdef int cand
    for cand in range(1, N + 1):
        if (mask >> (cand - 1)) & 1ULL:
            continue
        if req[cand] & (~mask & full):
            continue
        if poff + fp < lo_p[cand] or poff + fp > hi_p[cand]:
            continue
        if doff + fd < lo_d[cand] or doff + fd > hi_d[cand]:
            continue
        new_load = load + lnet[cand]
        if new_load > cap or new_load < 0:
            continue
        total += _count_rec(
            depth + 1, mask | (1ULL << (cand - 1)), new_load,
            fp + lp[cand], fd + ld[cand],
            N, lp, ld, lnet, req, lo_p, hi_p, lo_d, hi_d, cap, poff, doff,
        )
    return total


cdef struct BestState:
    double best_cost
    long long n_leaves


def fixed_points_best(
    n, tmat, ta, ready, start_time,
    lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
    capacity, initial_load, pick_offset, drop_offset, n_waiting,
    gamma1, gamma2, alpha1, alpha2,
):
    if n > 62:
        return pure.fixed_points_best(
            n, tmat, ta, ready, start_time, lp, ld, lnet, req_mask,
            flo_p, fhi_p, flo_d, fhi_d, capacity, initial_load,
            pick_offset, drop_offset, n_waiting, gamma1, gamma2, alpha1, alpha2,
        )
    cdef int N = n
    t = _matrix(tmat, N)
    rdy = np.empty(N + 1, dtype=np.float64)
    for i in range(N + 1):
        rdy[i] = float(ready[i])
    seq = np.zeros(N + 1, dtype=np.int32)
    best_seq = np.zeros(N + 1, dtype=np.int32)

    cdef BestState state
    state.best_cost = INF
    state.n_leaves = 0
    _fixed_rec(
        0, 0, int(initial_load), 0, 0, float(start_time), 0.0,
        N, t, float(ta), rdy,
        _i64(lp, N + 1), _i64(ld, N + 1), _i64(lnet, N + 1),
        _u64(req_mask, N + 1),
        _i64(flo_p, N + 1), _i64(fhi_p, N + 1),
        _i64(flo_d, N + 1), _i64(fhi_d, N + 1),
        int(capacity), int(pick_offset), int(drop_offset), float(n_waiting),
        float(gamma1), float(gamma2), float(alpha1), float(alpha2),
        seq, best_seq, &state,
    )
    if state.best_cost == INF:
        return INF, None, int(state.n_leaves)
    return (
        float(state.best_cost),
        tuple(int(best_seq[i]) for i in range(N)),
        int(state.n_leaves),
    )


cdef void _fixed_rec(
    int depth, unsigned long long mask, long long load, long long fp, long long fd,
    double clock, double acc,
    int N, double[:, ::1] t, double ta, double[::1] ready,
    long long[::1] lp, long long[::1] ld, long long[::1] lnet,
    unsigned long long[::1] req,
    long long[::1] lo_p, long long[::1] hi_p,
    long long[::1] lo_d, long long[::1] hi_d,
    long long cap, long long poff, long long doff, double nw,
    double g1, double g2, double a1, double a2,
    int[::1] seq, int[::1] best_seq, BestState *state,
) nogil:
    if acc >= state.best_cost:
        return
    cdef int i, cand, prev
    if depth == N:
        state.n_leaves += 1
        state.best_cost = acc
        for i in range(N):
            best_seq[i] = seq[i]
        return
    cdef double mult = g1 + g2 * (a1 * (nw - fp) + a2 * load)
    cdef unsigned long long full = (1ULL << N) - 1
    cdef long long new_load
    cdef double dep
    prev = seq[depth - 1] if depth > 0 else 0
    for cand in range(1, N + 1):
        if (mask >> (cand - 1)) & 1ULL:
            continue
        if req[cand] & (~mask & full):
            continue
        if poff + fp < lo_p[cand] or poff + fp > hi_p[cand]:
            continue
        if doff + fd < lo_d[cand] or doff + fd > hi_d[cand]:
            continue
        new_load = load + lnet[cand]
        if new_load > cap or new_load < 0:
            continue
        dep = clock + t[prev, cand] + ta
        if ready[cand] > dep:
            dep = ready[cand]
        seq[depth] = cand
        _fixed_rec(
            depth + 1, mask | (1ULL << (cand - 1)), new_load,
            fp + lp[cand], fd + ld[cand], dep, acc + mult * (dep - clock),
            N, t, ta, ready, lp, ld, lnet, req, lo_p, hi_p, lo_d, hi_d,
            cap, poff, doff, nw, g1, g2, a1, a2, seq, best_seq, state,
        )
