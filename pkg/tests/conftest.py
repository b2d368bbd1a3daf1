import pytest

from swroute.model import (
    Cluster,
    ClusteringPattern,
    Event,
    RideRequest,
    Scenario,
    SolverConfig,
    VehicleParams,
    trivial_pattern,
    validate_scenario,
)


def make_scenario(
    requests,
    depot=(0.0, 0.0),
    pattern=None,
    vehicle=None,
    onboard=(),
    frozen=(),
    **config,
):
    """Compact scenario builder for tests; defaults are unit-friendly."""
    vehicle = vehicle or VehicleParams(
        shuttle_speed=1.0, walk_speed=1.0, service_time=0.0
    )
    defaults = dict(
        gamma1=1.0, gamma2=1.0, alpha1=1.0, alpha2=1.0,
        alpha3_pickup=0.0, alpha3_dropoff=0.0,
        capacity=6, mps_pickup=6, mps_dropoff=6,
    )
    defaults.update(config)
    scenario = Scenario(
        depot=depot,
        requests=tuple(requests),
        pattern=pattern or trivial_pattern(requests, tuple(o.passenger for o in onboard)),
        vehicle=vehicle,
        config=SolverConfig(**defaults),
        onboard=tuple(onboard),
        frozen_pickups=tuple(frozen),
    )
    return validate_scenario(scenario)


def line_requests(coords, radius=0.0):
    """Requests with pickup/dropoff x-coordinates on the x-axis:
    coords = [(px, dx), ...]."""
    return [
        RideRequest(k, (px, 0.0), (dx, 0.0), radius, radius)
        for k, (px, dx) in enumerate(coords, start=1)
    ]


def pattern_of(groups):
    """Pattern from event shorthand: [['p1', 'd2'], ...]."""
    clusters = []
    for i, group in enumerate(groups):
        events = tuple(
            Event("pickup" if g[0] == "p" else "dropoff", int(g[1:])) for g in group
        )
        clusters.append(Cluster(i + 1, events))
    return ClusteringPattern(tuple(clusters))


@pytest.fixture
def one_passenger():
    return make_scenario(line_requests([(10.0, 20.0)]))


def placement_case(seed, n_free, radius=150.0):
    """A placement problem with exactly n_free adjustable areas (1..3).

    The returned (scenario, sequence) pair always has the identity order
    feasible, with the stated number of positive-radius windows.
    """
    import numpy as np

    rng = np.random.default_rng(seed)

    def pt(lo=500.0, hi=4500.0):
        return tuple(rng.uniform(lo, hi, 2))

    def far_pair():
        while True:
            a, b = pt(), pt()
            if (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 > (3 * radius) ** 2:
                return a, b

    if n_free == 1:
        p, d = far_pair()
        reqs = [RideRequest(1, p, d, radius, 0.0)]
    elif n_free == 2:
        p, d = far_pair()
        reqs = [RideRequest(1, p, d, radius, radius)]
    else:
        p1, d1 = far_pair()
        p2, d2 = far_pair()
        reqs = [
            RideRequest(1, p1, d1, radius, radius),
            RideRequest(2, p2, d2, radius, 0.0),
        ]
    vehicle = VehicleParams(13.4112, 1.385824, 60.0, 1.00584)
    scenario = make_scenario(
        reqs, depot=(-500.0, -500.0), vehicle=vehicle,
        alpha1=2.0, alpha2=1.0, alpha3_pickup=0.1, alpha3_dropoff=0.1,
    )
    sequence = tuple(range(1, scenario.pattern.size + 1))
    return scenario, sequence
