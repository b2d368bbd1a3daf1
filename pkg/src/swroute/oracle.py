"""Exact baseline: enumerate feasible sequences, place each, keep the best.

Enumeration walks the permutation tree pruned by the same screens the
sequencer uses, so the two feasibility notions cannot drift apart. On top
of feasibility, prefixes are pruned by an additive lower bound (shortest
possible area-to-area hops weighted by the prefix's own multipliers)
against the incumbent; the first incumbent comes from placing the
bound-optimal sequence. Sound because every remaining term of a completion
is nonnegative and every hop is at least the pairwise area gap.
"""

import math
import time
from dataclasses import dataclass

from . import _kernels as kernels
from .constraints import problem_tables
from .errors import InfeasiblePattern
from .geometry import min_area_distance, scenario_areas
from .model import realize_route, walk_times
from .phase1 import sunk_cost, time_matrix, walking_cost
from .phase2 import build_placement, solve_placement


@dataclass(frozen=True)
class OracleResult:
    cost: float
    sequence: tuple
    points: tuple
    route: object
    proven: bool  # enumeration completed within the time cap
    explored: int  # complete sequences surviving the bound prune
    placed: int  # placement solves actually run
    wall_time: float


def enumerate_feasible_sequences(scenario):
    """(count, iterator) over all visit orders passing the primary screens."""
    t = problem_tables(scenario)
    count = kernels.count_sequences(*t.kernel_args())
    return count, kernels.feasible_sequences(*t.kernel_args())


class _Search:
    __slots__ = (
        "tables", "scenario", "areas", "gap_t", "ta", "cfg", "deadline",
        "best_cost", "best_seq", "best_pts", "explored", "placed",
        "timed_out", "seq", "ticks", "seeded",
    )

    def __init__(self, scenario, areas, gap_t, deadline):
        self.tables = problem_tables(scenario)
        self.scenario = scenario
        self.areas = areas
        self.gap_t = gap_t
        self.ta = scenario.vehicle.stop_overhead
        self.cfg = scenario.config
        self.deadline = deadline
        self.best_cost = math.inf
        self.best_seq = None
        self.best_pts = None
        self.explored = 0
        self.placed = 0
        self.timed_out = False
        self.seq = []
        self.ticks = 0
        self.seeded = None

    def offer(self, seq, counted=True):
        tup = tuple(seq)
        if counted:
            self.explored += 1
            if tup == self.seeded:
                return  # already placed as the incumbent seed
        self.placed += 1
        problem = build_placement(tup, self.scenario, self.areas)
        result = solve_placement(problem)
        if result.cost < self.best_cost:
            self.best_cost = result.cost
            self.best_seq = tup
            self.best_pts = result.points

    def run(self, prefix_bound):
        t = self.tables
        cfg = self.cfg

        def rec(mask, load, fp, fd, bound):
            self.ticks += 1
            if self.ticks % 256 == 0 and time.perf_counter() > self.deadline:
                self.timed_out = True
                return
            if bound >= self.best_cost:
                return
            depth = len(self.seq)
            if depth == t.n_clusters:
                self.offer(self.seq)
                return
            mult = cfg.gamma1 + cfg.gamma2 * (
                cfg.alpha1 * (t.n_waiting - fp) + cfg.alpha2 * load
            )
            prev = self.seq[-1] if self.seq else 0
            for cand in range(1, t.n_clusters + 1):
                bit = 1 << (cand - 1)
                if mask & bit:
                    continue
                if t.req_mask[cand] & ~mask:
                    continue
                if not (t.flo_p[cand] <= t.pick_offset + fp <= t.fhi_p[cand]):
                    continue
                if not (t.flo_d[cand] <= t.drop_offset + fd <= t.fhi_d[cand]):
                    continue
                new_load = load + t.lnet[cand]
                if new_load > t.capacity or new_load < 0:
                    continue
                self.seq.append(cand)
                rec(
                    mask | bit, new_load, fp + t.lp[cand], fd + t.ld[cand],
                    bound + mult * (self.gap_t[prev][cand] + self.ta),
                )
                self.seq.pop()
                if self.timed_out:
                    return

        rec(0, t.initial_load, 0, 0, prefix_bound)


def solve_exact(scenario, time_cap=3600.0):
    """Global optimum over (sequence, placement); proven unless capped."""
    t = problem_tables(scenario)
    areas = scenario_areas(scenario)
    n = t.n_clusters
    cfg = scenario.config
    vs = scenario.vehicle.shuttle_speed

    start = time.perf_counter()
    gap_t = [
        [min_area_distance(areas[i], areas[j]) / vs for j in range(n + 1)]
        for i in range(n + 1)
    ]

    search = _Search(scenario, areas, gap_t, start + time_cap)

    # seed the incumbent with the bound-optimal sequence (exact DP on gaps)
    gap_edges = [
        [gap_t[i][j] + scenario.vehicle.stop_overhead for j in range(n + 1)]
        for i in range(n + 1)
    ]
    seed_cost, seed_seq, _ = kernels.dp_solve(
        n, gap_edges, t.lp, t.ld, t.lnet, t.req_mask,
        t.flo_p, t.fhi_p, t.flo_d, t.fhi_d,
        t.capacity, t.initial_load, t.pick_offset, t.drop_offset, t.n_waiting,
        cfg.gamma1, cfg.gamma2, cfg.alpha1, cfg.alpha2,
    )
    if math.isinf(seed_cost):
        raise InfeasiblePattern("no feasible visit order exists")
    if n:
        search.offer(list(seed_seq), counted=False)
        search.seeded = tuple(seed_seq)

    search.run(sunk_cost(scenario))

    if search.best_seq is None:
        raise InfeasiblePattern("time cap expired before any sequence was placed")

    route = realize_route(search.best_seq, search.best_pts, scenario)
    return OracleResult(
        cost=route.cost,
        sequence=search.best_seq,
        points=tuple(search.best_pts),
        route=route,
        proven=not search.timed_out,
        explored=search.explored,
        placed=search.placed,
        wall_time=time.perf_counter() - start,
    )


def best_sequence_fixed_points(points, scenario):
    """Exhaustive best visit order when the routing points are fixed.

    Evaluates complete sequences forward with waits folded at each stop,
    which is the package's realized-route costing; independent of the
    sequencer's recursion and usable as its reference.
    """
    t = problem_tables(scenario)
    cfg = scenario.config
    tmat = time_matrix(points, scenario, include_overhead=False)
    walks = walk_times(scenario, points)

    ready = [-1e300] * (t.n_clusters + 1)
    for cluster in scenario.pattern.clusters:
        for k in cluster.pickups():
            if scenario.is_onboard(k):
                continue
            arrival = scenario.request(k).request_time + walks[k][0]
            if arrival > ready[cluster.id]:
                ready[cluster.id] = arrival

    cost, seq, _ = kernels.fixed_points_best(
        t.n_clusters, tmat, scenario.vehicle.stop_overhead, ready,
        scenario.start_time,
        t.lp, t.ld, t.lnet, t.req_mask,
        t.flo_p, t.fhi_p, t.flo_d, t.fhi_d,
        t.capacity, t.initial_load, t.pick_offset, t.drop_offset, t.n_waiting,
        cfg.gamma1, cfg.gamma2, cfg.alpha1, cfg.alpha2,
    )
    if seq is None:
        raise InfeasiblePattern("no feasible visit order exists")
    return cost + walking_cost(points, scenario) + sunk_cost(scenario), tuple(seq)
