"""Pure-Python kernels: subset-state sequencing DP and sequence enumeration.

These are the fallback implementations behind :mod:`swroute._kernels`; the
compiled module mirrors their semantics exactly (including tie-breaks).
Clusters 1..N map to bits 0..N-1 of the visited mask.

All take a flat argument convention so the compiled twin can share it:
  tmat        (N+1)x(N+1) edge times (structural DP: travel + stop overhead;
              enumeration brute: travel only)
  lp/ld/lnet  per-cluster pickup/dropoff/net loads, index 0 unused
  req_mask    per-cluster bitmask of pickup clusters that must precede it
  flo/fhi     allowed windows for finished pickup/dropoff counts (absolute)
  offsets     initial_load, pick_offset, drop_offset from the dynamic context
"""

INF = float("inf")
_NO_HI = 1 << 30


def _mask_tables(n, lp, lnet):
    """Per-mask finished-pickup and net-load sums, by low-bit recursion."""
    size = 1 << n
    pick_in = [0] * size
    net_in = [0] * size
    for mask in range(1, size):
        low = mask & -mask
        rest = mask ^ low
        i = low.bit_length()  # cluster id of the low bit
        pick_in[mask] = pick_in[rest] + lp[i]
        net_in[mask] = net_in[rest] + lnet[i]
    return pick_in, net_in


def dp_solve(
    n,
    tmat,
    lp,
    ld,
    lnet,
    req_mask,
    flo_p,
    fhi_p,
    flo_d,
    fhi_d,
    capacity,
    initial_load,
    pick_offset,
    drop_offset,
    n_waiting,
    gamma1,
    gamma2,
    alpha1,
    alpha2,
):
    """Backward recursion over (current cluster, visited mask) states.

    Returns (cost, sequence, examined) where examined counts states that
    passed every feasibility screen; cost is inf when no sequence exists.
    """
    cost, seq, examined, _, _ = _dp_core(
        n, tmat, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
        capacity, initial_load, pick_offset, drop_offset, n_waiting,
        gamma1, gamma2, alpha1, alpha2, want_table=False,
    )
    return cost, seq, examined


def dp_solve_with_table(
    n, tmat, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
    capacity, initial_load, pick_offset, drop_offset, n_waiting,
    gamma1, gamma2, alpha1, alpha2,
):
    """Like dp_solve but also returns {(L, mask): (value, next_L)}."""
    cost, seq, examined, value, nxt = _dp_core(
        n, tmat, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
        capacity, initial_load, pick_offset, drop_offset, n_waiting,
        gamma1, gamma2, alpha1, alpha2, want_table=True,
    )
    return cost, seq, examined, value, nxt


def _dp_core(
    n, tmat, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
    capacity, initial_load, pick_offset, drop_offset, n_waiting,
    gamma1, gamma2, alpha1, alpha2, want_table,
):
    size = 1 << n
    full = size - 1
    pick_in, net_in = _mask_tables(n, lp, lnet)
    drop_in = [0] * size
    for mask in range(1, size):
        low = mask & -mask
        drop_in[mask] = drop_in[mask ^ low] + ld[low.bit_length()]

    def feasible(cur, mask):
        load = initial_load + net_in[mask]
        if load > capacity or load < 0:
            return False
        if cur:
            rest = mask ^ (1 << (cur - 1))
            fp = pick_offset + pick_in[rest]
            if not (flo_p[cur] <= fp <= fhi_p[cur]):
                return False
            fd = drop_offset + drop_in[rest]
            if not (flo_d[cur] <= fd <= fhi_d[cur]):
                return False
        return True

    # value[L * size + mask]; inf marks infeasible/unreached
    value = [INF] * ((n + 1) * size)
    nxt = [-1] * ((n + 1) * size)
    examined = 0

    by_count = [[] for _ in range(n + 1)]
    for mask in range(size):
        by_count[bin(mask).count("1")].append(mask)

    for count in range(n, -1, -1):
        for mask in by_count[count]:
            currents = (
                [c for c in range(1, n + 1) if mask >> (c - 1) & 1] if mask else [0]
            )
            for cur in currents:
                if not feasible(cur, mask):
                    continue
                examined += 1
                idx = cur * size + mask
                if mask == full:
                    value[idx] = 0.0
                    continue
                mult = gamma1 + gamma2 * (
                    alpha1 * (n_waiting - pick_in[mask])
                    + alpha2 * (initial_load + net_in[mask])
                )
                best = INF
                best_next = -1
                for cand in range(1, n + 1):
                    bit = 1 << (cand - 1)
                    if mask & bit:
                        continue
                    if req_mask[cand] & ~mask:
                        continue
                    tail = value[cand * size + (mask | bit)]
                    if tail == INF:
                        continue
                    total = tmat[cur][cand] * mult + tail
                    if total < best:
                        best = total
                        best_next = cand
                if best_next >= 0:
                    value[idx] = best
                    nxt[idx] = best_next

    cost = value[0]  # L=0, mask=0
    seq = []
    if cost < INF:
        cur, mask = 0, 0
        while mask != full:
            cand = nxt[cur * size + mask]
            seq.append(cand)
            mask |= 1 << (cand - 1)
            cur = cand

    if not want_table:
        return cost, seq, examined, None, None

    table = {}
    for cur in range(n + 1):
        for mask in range(size):
            idx = cur * size + mask
            if value[idx] < INF:
                table[(cur, mask)] = (value[idx], nxt[idx])
    return cost, seq, examined, table, None


def _screens(n, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
             capacity, initial_load, pick_offset, drop_offset):
    """Shared prefix screen: may cluster `cand` be visited next?"""

    def ok(cand, mask, load, fp, fd):
        if req_mask[cand] & ~mask:
            return False
        if not (flo_p[cand] <= pick_offset + fp <= fhi_p[cand]):
            return False
        if not (flo_d[cand] <= drop_offset + fd <= fhi_d[cand]):
            return False
        new_load = load + lnet[cand]
        if new_load > capacity or new_load < 0:
            return False
        return True

    return ok


def feasible_sequences(
    n, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
    capacity, initial_load, pick_offset, drop_offset,
):
    """Yield every feasible visit order, in lexicographic cluster-id order."""
    ok = _screens(n, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
                  capacity, initial_load, pick_offset, drop_offset)
    seq = []

    def rec(mask, load, fp, fd):
        if len(seq) == n:
            yield tuple(seq)
            return
        for cand in range(1, n + 1):
            if mask >> (cand - 1) & 1:
                continue
            if not ok(cand, mask, load, fp, fd):
                continue
            seq.append(cand)
            yield from rec(mask | 1 << (cand - 1), load + lnet[cand],
                           fp + lp[cand], fd + ld[cand])
            seq.pop()

    yield from rec(0, initial_load, 0, 0)


def count_sequences(
    n, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
    capacity, initial_load, pick_offset, drop_offset,
):
    ok = _screens(n, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
                  capacity, initial_load, pick_offset, drop_offset)

    def rec(depth, mask, load, fp, fd):
        if depth == n:
            return 1
        total = 0
        for cand in range(1, n + 1):
            if mask >> (cand - 1) & 1 or not ok(cand, mask, load, fp, fd):
                continue
            total += rec(depth + 1, mask | 1 << (cand - 1), load + lnet[cand],
                         fp + lp[cand], fd + ld[cand])
        return total

    return rec(0, 0, initial_load, 0, 0)


def fixed_points_best(
    n,
    tmat,
    ta,
    ready,
    start_time,
    lp,
    ld,
    lnet,
    req_mask,
    flo_p,
    fhi_p,
    flo_d,
    fhi_d,
    capacity,
    initial_load,
    pick_offset,
    drop_offset,
    n_waiting,
    gamma1,
    gamma2,
    alpha1,
    alpha2,
):
    """Exhaustive best sequence at fixed routing points (realized timing).

    Walks the feasibility-pruned permutation tree, accumulating the exact
    time-weighted cost with waits folded at each stop, and returns
    (best_cost, best_sequence, n_leaves). Unlike the DP this evaluates
    whole sequences forward, so it serves as an independent check. The
    running cost is nondecreasing, which makes incumbent pruning exact;
    ties resolve to the lexicographically smallest sequence because
    candidates are scanned in ascending id order. n_leaves counts complete
    sequences reached after pruning, not all feasible ones.
    """
    ok = _screens(n, lp, ld, lnet, req_mask, flo_p, fhi_p, flo_d, fhi_d,
                  capacity, initial_load, pick_offset, drop_offset)
    best = [INF, None, 0]
    seq = []

    def rec(mask, load, fp, fd, clock, acc):
        if acc >= best[0]:
            return
        if len(seq) == n:
            best[2] += 1
            best[0] = acc
            best[1] = tuple(seq)
            return
        mult = gamma1 + gamma2 * (alpha1 * (n_waiting - fp) + alpha2 * load)
        for cand in range(1, n + 1):
            if mask >> (cand - 1) & 1:
                continue
            if not ok(cand, mask, load, fp, fd):
                continue
            dep = clock + tmat[0 if not seq else seq[-1]][cand] + ta
            if ready[cand] > dep:
                dep = ready[cand]
            seq.append(cand)
            rec(mask | 1 << (cand - 1), load + lnet[cand], fp + lp[cand],
                fd + ld[cand], dep, acc + mult * (dep - clock))
            seq.pop()

    rec(0, initial_load, 0, 0, start_time, 0.0)
    return best[0], best[1], best[2]
