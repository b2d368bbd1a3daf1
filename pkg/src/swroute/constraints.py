"""Feasibility screens shared by the sequencer, the oracle, and replanning.

The primary constraints (legitimacy, capacity, maximum position shift) are
evaluated either over whole visit orders (:func:`check_sequence`) or over
subset states (:func:`state_feasible`); both views are derived from one
table set so they cannot drift apart. Departure constraints are secondary:
they never reject, they only force waits (:func:`check_departures`).
"""

from dataclasses import dataclass
from functools import lru_cache

from .errors import Violation
from .model import cluster_loads, walk_times

_NO_HI = 1 << 30


@dataclass(frozen=True)
class SystemState:
    """Sequencer state: current cluster (0 = start) plus visited bitmask."""

    current: int
    visited: int  # bit i-1 set <=> cluster i visited

    @property
    def entropy(self):
        return bin(self.visited).count("1")

    def consistent(self, n_clusters):
        if self.current == 0:
            return self.visited == 0
        return bool(self.visited >> (self.current - 1) & 1)

    def is_terminal(self, n_clusters):
        return self.visited == (1 << n_clusters) - 1


@dataclass(frozen=True)
class ProblemTables:
    """Flat per-cluster tables feeding the kernels. Index 0 is unused."""

    n_clusters: int
    lp: tuple
    ld: tuple
    lnet: tuple
    req_mask: tuple  # pickup clusters that must precede each cluster
    flo_p: tuple  # allowed window for absolute finished pickups before visit
    fhi_p: tuple
    flo_d: tuple
    fhi_d: tuple
    capacity: int
    initial_load: int
    pick_offset: int
    drop_offset: int
    n_waiting: int

    def kernel_args(self):
        return (
            self.n_clusters, self.lp, self.ld, self.lnet, self.req_mask,
            self.flo_p, self.fhi_p, self.flo_d, self.fhi_d,
            self.capacity, self.initial_load, self.pick_offset, self.drop_offset,
        )


@lru_cache(maxsize=512)
def problem_tables(scenario):
    pattern = scenario.pattern
    n = pattern.size
    loads = cluster_loads(pattern)
    mps_p = scenario.config.mps_pickup
    mps_d = scenario.config.mps_dropoff

    lp = [0] * (n + 1)
    ld = [0] * (n + 1)
    lnet = [0] * (n + 1)
    req = [0] * (n + 1)
    flo_p = [0] * (n + 1)
    fhi_p = [_NO_HI] * (n + 1)
    flo_d = [0] * (n + 1)
    fhi_d = [_NO_HI] * (n + 1)

    n_waiting = 0
    for cluster in pattern.clusters:
        i = cluster.id
        picks = [k for k in cluster.pickups() if not scenario.is_onboard(k)]
        drops = list(cluster.dropoffs())
        lp[i] = len(picks)
        ld[i] = len(drops)
        lnet[i] = lp[i] - ld[i]
        n_waiting += lp[i]
        if picks:
            flo_p[i] = max(picks) - 1 - mps_p
            fhi_p[i] = min(picks) - 1 + mps_p
        if drops:
            flo_d[i] = max(drops) - 1 - mps_d
            fhi_d[i] = min(drops) - 1 + mps_d
        for k in drops:
            cp = pattern.pickup_cluster(k)
            if cp and not scenario.is_onboard(k):
                req[i] |= 1 << (cp - 1)

    return ProblemTables(
        n_clusters=n,
        lp=tuple(lp),
        ld=tuple(ld),
        lnet=tuple(lnet),
        req_mask=tuple(req),
        flo_p=tuple(flo_p),
        fhi_p=tuple(fhi_p),
        flo_d=tuple(flo_d),
        fhi_d=tuple(fhi_d),
        capacity=scenario.config.capacity,
        initial_load=len(scenario.onboard),
        pick_offset=scenario.pickups_done,
        drop_offset=scenario.dropoffs_done,
        n_waiting=n_waiting,
    )


def check_sequence(sequence, scenario):
    """All primary-constraint violations of a visit order (empty list = ok)."""
    t = problem_tables(scenario)
    pattern = scenario.pattern
    violations = []
    if sorted(sequence) != list(range(1, t.n_clusters + 1)):
        return [Violation("NotAPermutation", repr(list(sequence)))]

    visited = 0
    load = t.initial_load
    fp, fd = 0, 0
    for pos, cid in enumerate(sequence):
        cluster = pattern.cluster(cid)
        for k in cluster.dropoffs():
            cp = pattern.pickup_cluster(k)
            if scenario.is_onboard(k) or cp == 0:
                continue
            if not (visited >> (cp - 1) & 1):
                violations.append(Violation("LegitimacyViolation", str(k)))
        p_order = t.pick_offset + fp + 1
        d_order = t.drop_offset + fd + 1
        for k in cluster.pickups():
            if scenario.is_onboard(k):
                continue
            if abs(p_order - k) > scenario.config.mps_pickup:
                violations.append(Violation("MPSViolation", f"pickup {k}"))
        for k in cluster.dropoffs():
            if abs(d_order - k) > scenario.config.mps_dropoff:
                violations.append(Violation("MPSViolation", f"dropoff {k}"))
        load += t.lnet[cid]
        if load > t.capacity or load < 0:
            violations.append(Violation("CapacityExceeded", f"position {pos + 1}"))
        fp += t.lp[cid]
        fd += t.ld[cid]
        visited |= 1 << (cid - 1)
    return violations


def state_feasible(state, scenario):
    """Capacity and position-shift screens for one sequencer state."""
    t = problem_tables(scenario)
    load = t.initial_load
    fp, fd = 0, 0
    for i in range(1, t.n_clusters + 1):
        if state.visited >> (i - 1) & 1:
            load += t.lnet[i]
            if i != state.current:
                fp += t.lp[i]
                fd += t.ld[i]
    if load > t.capacity or load < 0:
        return False
    cur = state.current
    if cur:
        if not (t.flo_p[cur] <= t.pick_offset + fp <= t.fhi_p[cur]):
            return False
        if not (t.flo_d[cur] <= t.drop_offset + fd <= t.fhi_d[cur]):
            return False
    return True


def feasible_next_states(state, scenario):
    """All states reachable in one transition from a feasible state."""
    t = problem_tables(scenario)
    out = []
    for cand in range(1, t.n_clusters + 1):
        bit = 1 << (cand - 1)
        if state.visited & bit:
            continue
        if t.req_mask[cand] & ~state.visited:
            continue
        nxt = SystemState(cand, state.visited | bit)
        if state_feasible(nxt, scenario):
            out.append(nxt)
    return out


def check_departures(route, scenario):
    """Per-stop extra wait needed for walking pickups to board.

    Positive entries mean the stored departures leave before some passenger
    can arrive; a route produced by :func:`swroute.model.realize_route` (or
    by the placement solver) reports all zeros.
    """
    walks = walk_times(scenario, route.points)
    slacks = []
    for j, cid in enumerate(route.sequence):
        ready = route.start_time
        for k in scenario.pattern.cluster(cid).pickups():
            if scenario.is_onboard(k):
                continue
            arrival = scenario.request(k).request_time + walks[k][0]
            if arrival > ready:
                ready = arrival
        slacks.append(max(0.0, ready - route.departures[j]))
    return slacks
