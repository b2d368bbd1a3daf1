"""Synthetic instance generation for benchmarks and replay suites.

Requests are uniform in a square service box with the depot offset to its
southwest; radii follow the benchmark convention of 0.15/0.3 mile converted
to meters. Patterns below 2n clusters come from a greedy grouper that only
merges events with overlapping windows and keeps the pattern feasible.
"""

import numpy as np

from .errors import InfeasiblePattern, ScenarioValidationError
from .model import (
    Cluster,
    ClusteringPattern,
    RideRequest,
    Scenario,
    SolverConfig,
    VehicleParams,
    trivial_pattern,
    validate_scenario,
)
from .geometry import area_nonempty
from .model import cluster_windows

MILE = 1609.344

#: default service box edge, meters
BOX = 6000.0

#: depot offset from the box corner, meters
DEPOT = (-1500.0, -1500.0)


def default_vehicle():
    return VehicleParams(
        shuttle_speed=30 * 0.44704,
        walk_speed=3.1 * 0.44704,
        service_time=60.0,
        acceleration=2.25 * 0.44704,
    )


def _uniform_requests(rng, n, radius, box):
    requests = []
    for k in range(1, n + 1):
        while True:
            pickup = tuple(rng.uniform(0.0, box, size=2))
            dropoff = tuple(rng.uniform(0.0, box, size=2))
            if np.hypot(pickup[0] - dropoff[0], pickup[1] - dropoff[1]) > 2.5 * radius:
                break
        requests.append(RideRequest(k, pickup, dropoff, radius, radius))
    return requests


def _hub_requests(rng, n, n_clusters, radius, box):
    """Events gathered around shared hubs so that windows overlap and the
    greedy grouper can reach the requested cluster count (commuter-style
    demand with popular corners)."""
    sites = rng.uniform(0.1 * box, 0.9 * box, size=(n_clusters, 2))
    slots = np.tile(np.arange(n_clusters), (2 * n + n_clusters - 1) // n_clusters)[: 2 * n]
    rng.shuffle(slots)
    requests = []
    for k in range(1, n + 1):
        sp = int(slots[2 * k - 2])
        sd = int(slots[2 * k - 1])
        guard = 0
        while sd == sp or np.hypot(*(sites[sp] - sites[sd])) <= 3.5 * radius:
            sd = int(rng.integers(n_clusters))
            guard += 1
            if guard > 200:
                sites = rng.uniform(0.1 * box, 0.9 * box, size=(n_clusters, 2))
                guard = 0
        pickup = tuple(sites[sp] + rng.uniform(-0.5 * radius, 0.5 * radius, size=2))
        dropoff = tuple(sites[sd] + rng.uniform(-0.5 * radius, 0.5 * radius, size=2))
        requests.append(RideRequest(k, pickup, dropoff, radius, radius))
    return requests


def random_scenario(
    seed,
    n,
    n_clusters=None,
    radius=0.05 * MILE,
    box=BOX,
    gamma2=1.0,
    alpha3=0.1,
    mps=6,
    capacity=6,
    config_overrides=None,
):
    """Deterministic random instance; n_clusters < 2n engages the grouper."""
    params = dict(
        gamma2=gamma2,
        alpha3_pickup=alpha3,
        alpha3_dropoff=alpha3,
        capacity=capacity,
        mps_pickup=mps,
        mps_dropoff=mps,
    )
    params.update(config_overrides or {})
    config = SolverConfig(**params)
    grouped = n_clusters is not None and n_clusters < 2 * n
    for attempt in range(20):
        rng = np.random.default_rng(seed * 1000 + attempt if attempt else seed)
        if grouped:
            requests = _hub_requests(rng, n, n_clusters, radius, box)
        else:
            requests = _uniform_requests(rng, n, radius, box)
        scenario = Scenario(
            depot=DEPOT,
            requests=tuple(requests),
            pattern=trivial_pattern(requests),
            vehicle=default_vehicle(),
            config=config,
        )
        try:
            if grouped:
                scenario = group_pattern(scenario, n_clusters)
            return validate_scenario(scenario)
        except (InfeasiblePattern, ScenarioValidationError):
            if attempt == 19:
                raise
    raise InfeasiblePattern("generator retries exhausted")  # pragma: no cover


def _pattern_feasible(scenario):
    from .constraints import problem_tables
    from . import _kernels as kernels

    t = problem_tables(scenario)
    for _ in kernels.feasible_sequences(*t.kernel_args()):
        return True
    return False


def group_pattern(scenario, target):
    """Greedily merge clusters down to ``target``, keeping areas nonempty,
    pickup/dropoff pairs separated, and at least one feasible sequence."""
    from dataclasses import replace

    current = scenario
    while current.pattern.size > target:
        merged = None
        clusters = current.pattern.clusters
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                a, b = clusters[i], clusters[j]
                if {e.passenger for e in a.events} & {e.passenger for e in b.events}:
                    continue
                rest = [c for c in clusters if c is not a and c is not b]
                candidate = ClusteringPattern(
                    tuple(
                        [Cluster(idx + 1, c.events) for idx, c in enumerate(rest)]
                        + [Cluster(len(rest) + 1, a.events + b.events)]
                    )
                )
                trial = replace(current, pattern=candidate)
                if not area_nonempty(
                    cluster_windows(trial, candidate.clusters[-1]),
                    trial.config.eps_geom,
                ):
                    continue
                if not _pattern_feasible(trial):
                    continue
                merged = trial
                break
            if merged:
                break
        if merged is None:
            raise InfeasiblePattern(
                f"cannot reach {target} clusters (stuck at {current.pattern.size})"
            )
        current = merged
    return current


def random_replay(seed, batch_sizes, gap=900.0, **kwargs):
    """A replay: first batch is a scenario, later ones arrive ``gap`` apart."""
    rng = np.random.default_rng(seed)
    scenario = random_scenario(int(rng.integers(2**31)), batch_sizes[0], **kwargs)
    batches = []
    next_id = batch_sizes[0] + 1
    for b, size in enumerate(batch_sizes[1:], start=1):
        t_batch = b * gap
        sub = random_scenario(int(rng.integers(2**31)), size, **kwargs)
        requests = tuple(
            RideRequest(
                id=next_id + i,
                pickup=r.pickup,
                dropoff=r.dropoff,
                pickup_radius=r.pickup_radius,
                dropoff_radius=r.dropoff_radius,
                request_time=t_batch,
            )
            for i, r in enumerate(sub.requests)
        )
        next_id += size
        batches.append((t_batch, requests, None))
    return scenario, batches
