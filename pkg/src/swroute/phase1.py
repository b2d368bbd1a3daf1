"""Sequencing at fixed routing points: exact subset-state dynamic program.

States are (current cluster, visited set); the backward recursion runs from
all terminal states down to the initial state, weighting each edge by the
current multiplier (shuttle weight plus per-second cost of everyone still
waiting or riding). Exact and deterministic: ties break to the smaller
next cluster id, so the traced sequence is the lexicographically smallest
optimal one.
"""

import math

from . import _kernels as kernels
from .constraints import problem_tables
from .errors import InfeasiblePattern
from .model import MAX_CLUSTERS, dist, walk_times


def time_matrix(points, scenario, include_overhead=True):
    """Edge times between routing points (plus per-stop overhead)."""
    n = scenario.pattern.size
    vs = scenario.vehicle.shuttle_speed
    ta = scenario.vehicle.stop_overhead if include_overhead else 0.0
    return [
        [dist(points[i], points[j]) / vs + ta for j in range(n + 1)]
        for i in range(n + 1)
    ]


def walking_cost(points, scenario):
    """Walk-time part of the objective; constant once points are fixed."""
    cfg = scenario.config
    total = 0.0
    for wp, wd in walk_times(scenario, points).values():
        total += cfg.alpha3_pickup * wp + cfg.alpha3_dropoff * wd
    return cfg.gamma2 * total


def sunk_cost(scenario):
    """Wait/ride time accrued before the plan clock starts (dynamic only).

    Added to sequencing and placement costs so values stay comparable with
    a full re-evaluation that uses absolute request times.
    """
    cfg = scenario.config
    start = scenario.start_time
    wait = 0.0
    ride = 0.0
    for req in scenario.requests:
        if scenario.is_onboard(req.id):
            picked = scenario.onboard_entry(req.id).picked_up_at
            wait += picked - req.request_time
            ride += start - picked
        elif scenario.pattern.pickup_cluster(req.id):
            wait += start - req.request_time
    return cfg.gamma2 * (cfg.alpha1 * wait + cfg.alpha2 * ride)


def segment_multiplier(state, scenario):
    """Cost multiplier of a segment leaving the given state: base shuttle
    weight plus weighted counts of waiting and riding passengers."""
    t = problem_tables(scenario)
    cfg = scenario.config
    waiting = t.n_waiting
    riding = t.initial_load
    for i in range(1, t.n_clusters + 1):
        if state.visited >> (i - 1) & 1:
            waiting -= t.lp[i]
            riding += t.lnet[i]
    return cfg.gamma1 + cfg.gamma2 * (cfg.alpha1 * waiting + cfg.alpha2 * riding)


def solve_sequence(points, scenario):
    """Optimal feasible visit order for fixed routing points.

    Returns (sequence, cost); cost includes the fixed walking term and any
    sunk dynamic cost so it matches a route re-evaluation whenever no
    departure waits bind (the recursion itself ignores departure coupling,
    which is a secondary constraint).
    """
    t = problem_tables(scenario)
    if t.n_clusters > MAX_CLUSTERS:
        raise InfeasiblePattern(f"{t.n_clusters} clusters exceed the {MAX_CLUSTERS} budget")
    cfg = scenario.config
    tmat = time_matrix(points, scenario)
    cost, seq, _ = kernels.dp_solve(
        t.n_clusters, tmat, t.lp, t.ld, t.lnet, t.req_mask,
        t.flo_p, t.fhi_p, t.flo_d, t.fhi_d,
        t.capacity, t.initial_load, t.pick_offset, t.drop_offset, t.n_waiting,
        cfg.gamma1, cfg.gamma2, cfg.alpha1, cfg.alpha2,
    )
    if math.isinf(cost):
        raise InfeasiblePattern("no feasible visit order for this pattern")
    return tuple(seq), cost + walking_cost(points, scenario) + sunk_cost(scenario)


def value_table(points, scenario):
    """Full {(current, visited-mask): (value, best next)} table (pure path);
    exposed for diagnostics and the recursion-consistency tests."""
    t = problem_tables(scenario)
    cfg = scenario.config
    tmat = time_matrix(points, scenario)
    _, _, examined, table, _ = kernels.dp_solve_with_table(
        t.n_clusters, tmat, t.lp, t.ld, t.lnet, t.req_mask,
        t.flo_p, t.fhi_p, t.flo_d, t.fhi_d,
        t.capacity, t.initial_load, t.pick_offset, t.drop_offset, t.n_waiting,
        cfg.gamma1, cfg.gamma2, cfg.alpha1, cfg.alpha2,
    )
    return table, examined
