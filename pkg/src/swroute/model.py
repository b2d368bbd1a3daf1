"""Domain model: requests, clusters, scenarios, routes, and the cost function.

Internal units are SI (meters, seconds). Scenario documents may declare other
units (miles, mph, minutes, ...) and are converted once at ingestion.
"""

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .errors import InconsistentTimings, ScenarioValidationError, Violation

Point = tuple  # (x, y) in meters

PICKUP = "pickup"
DROPOFF = "dropoff"

#: membership tolerance for routing points on area boundaries, in meters
EPS_GEOM = 1e-6

#: hard cap on cluster count for the subset-state sequencer
MAX_CLUSTERS = 24

#: hard cap on shuttle capacity for the subset-state sequencer
MAX_CAPACITY = 15

_MPH = 0.44704  # meters per second

_LENGTH_UNITS = {"m": 1.0, "km": 1000.0, "mile": 1609.344, "mi": 1609.344}
_SPEED_UNITS = {"m/s": 1.0, "mps": 1.0, "km/h": 1000.0 / 3600.0, "kmh": 1000.0 / 3600.0, "mph": _MPH}
_TIME_UNITS = {"s": 1.0, "sec": 1.0, "min": 60.0, "h": 3600.0}
_ACCEL_UNITS = {"m/s^2": 1.0, "m/s2": 1.0, "mph/s": _MPH}


def dist(a, b):
    """Euclidean distance between two points."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class RideRequest:
    """One passenger's ride request.

    ``id`` is the absolute request order (1-based); smaller ids requested
    earlier. Radii are the maximum distances the passenger will walk before
    pickup / after dropoff.
    """

    id: int
    pickup: Point
    dropoff: Point
    pickup_radius: float = 0.0
    dropoff_radius: float = 0.0
    request_time: float = 0.0


@dataclass(frozen=True)
class Event:
    kind: str  # PICKUP or DROPOFF
    passenger: int

    def short(self):
        return ("p" if self.kind == PICKUP else "d") + str(self.passenger)


@dataclass(frozen=True)
class SpaceWindow:
    """Closed disk of feasible stop locations around a requested point."""

    center: Point
    radius: float

    def contains(self, point, tol=EPS_GEOM):
        return dist(self.center, point) <= self.radius + tol


@dataclass(frozen=True)
class Cluster:
    id: int
    events: tuple

    def pickups(self):
        return tuple(e.passenger for e in self.events if e.kind == PICKUP)

    def dropoffs(self):
        return tuple(e.passenger for e in self.events if e.kind == DROPOFF)


@dataclass(frozen=True)
class ClusterLoads:
    pickups: int
    dropoffs: int

    @property
    def net(self):
        return self.pickups - self.dropoffs


@dataclass(frozen=True)
class ClusteringPattern:
    """Partition of all pickup/dropoff events into visit clusters C_1..C_N."""

    clusters: tuple

    @property
    def size(self):
        return len(self.clusters)

    def cluster(self, cluster_id):
        return self.clusters[cluster_id - 1]

    def pickup_cluster(self, passenger):
        """Cluster id containing the passenger's pickup, or 0 if absent."""
        return _event_index(self).get((PICKUP, passenger), 0)

    def dropoff_cluster(self, passenger):
        return _event_index(self).get((DROPOFF, passenger), 0)


@lru_cache(maxsize=512)
def _event_index(pattern):
    index = {}
    for cluster in pattern.clusters:
        for event in cluster.events:
            index[(event.kind, event.passenger)] = cluster.id
    return index


@dataclass(frozen=True)
class VehicleParams:
    shuttle_speed: float  # m/s
    walk_speed: float  # m/s
    service_time: float = 0.0  # s
    acceleration: float = float("inf")  # m/s^2

    @property
    def stop_overhead(self):
        """Per-stop time: service plus the accel/decel correction v_s/(2a)."""
        if math.isinf(self.acceleration):
            return self.service_time
        return self.service_time + self.shuttle_speed / (2.0 * self.acceleration)


@dataclass(frozen=True)
class SolverConfig:
    gamma1: float = 1.0
    gamma2: float = 1.0
    alpha1: float = 2.0
    alpha2: float = 1.0
    alpha3_pickup: float = 0.1
    alpha3_dropoff: float = 0.1
    capacity: int = 6
    mps_pickup: int = 6
    mps_dropoff: int = 6
    h_max: int = 50
    eps_place: float = 1e-4
    eps_geom: float = EPS_GEOM
    place_iter_cap: int = 50000


@dataclass(frozen=True)
class OnboardPassenger:
    """A passenger already picked up when the plan starts (dynamic only)."""

    passenger: int
    picked_up_at: float  # absolute departure time of the executed pickup


@dataclass(frozen=True)
class Scenario:
    """Validated, immutable problem instance.

    For static routing the dynamic fields keep their neutral defaults. A
    replan builds a derived scenario whose depot is the shuttle position,
    whose clock starts at ``start_time``, and whose absolute pickup/dropoff
    counters seed the position-shift checks.
    """

    depot: Point
    requests: tuple
    pattern: ClusteringPattern
    vehicle: VehicleParams
    config: SolverConfig
    start_time: float = 0.0
    onboard: tuple = ()
    frozen_pickups: tuple = ()  # (passenger, (x, y)) pairs; see frozen_point()
    pickups_done: int = 0
    dropoffs_done: int = 0

    @property
    def n(self):
        return len(self.requests)

    def request(self, passenger):
        return _request_index(self)[passenger]

    def onboard_ids(self):
        return tuple(o.passenger for o in self.onboard)

    def is_onboard(self, passenger):
        return passenger in _onboard_index(self)

    def onboard_entry(self, passenger):
        return _onboard_index(self)[passenger]

    def frozen_point(self, passenger):
        """Negotiated pickup point a replan must keep, or None.

        The passenger still walks from the originally requested location;
        freezing only pins the stop, it does not shorten the walk.
        """
        for k, point in self.frozen_pickups:
            if k == passenger:
                return point
        return None


@lru_cache(maxsize=512)
def _request_index(scenario):
    return {r.id: r for r in scenario.requests}


@lru_cache(maxsize=512)
def _onboard_index(scenario):
    return {o.passenger: o for o in scenario.onboard}


@dataclass(frozen=True)
class PassengerBreakdown:
    passenger: int
    wait: float
    ride: float
    walk_pickup: float
    walk_dropoff: float
    pickup_order: int  # p_k; 0 when the pickup precedes this plan
    dropoff_order: int  # d_k


@dataclass(frozen=True)
class CostBreakdown:
    total: float
    shuttle_time: float  # sum of effective segment times incl. stop overhead
    wait_time: float
    ride_time: float
    walk_time: float


@dataclass(frozen=True)
class Route:
    """A fully timed route: visit order, routing points, and passenger times.

    ``points[i]`` is the routing point of cluster i (index 0 is the start
    point). ``departures[j]`` is the absolute departure time from the j-th
    visited stop; waits forced by walking passengers are already folded in.
    """

    sequence: tuple  # cluster ids in visit order
    points: tuple  # routing point per cluster id, index 0 = start
    travel_times: tuple  # pure motion time per segment, len == len(sequence)
    departures: tuple  # absolute departure per visited stop
    start_time: float
    passengers: tuple  # PassengerBreakdown, sorted by passenger id
    cost: float

    def departure_of_cluster(self, cluster_id):
        return self.departures[self.sequence.index(cluster_id)]

    def passenger(self, passenger_id):
        for entry in self.passengers:
            if entry.passenger == passenger_id:
                return entry
        raise KeyError(passenger_id)


def cluster_loads(pattern):
    """Per-cluster pickup/dropoff counts, in cluster-id order."""
    return [
        ClusterLoads(len(c.pickups()), len(c.dropoffs())) for c in pattern.clusters
    ]


def trivial_pattern(requests, onboard_ids=()):
    """One event per cluster: pickup of request k at 2j-1, dropoff at 2j.

    Onboard passengers (dynamic) contribute only their dropoff event.
    """
    clusters = []
    for req in requests:
        if req.id not in onboard_ids:
            clusters.append((Event(PICKUP, req.id),))
        clusters.append((Event(DROPOFF, req.id),))
    return ClusteringPattern(
        tuple(Cluster(i + 1, events) for i, events in enumerate(clusters))
    )


def walk_times(scenario, points):
    """Pickup/dropoff walking times implied by routing points.

    Returns ``{passenger: (walk_pickup, walk_dropoff)}``. Onboard passengers
    have no pickup walk inside this plan (it already happened).
    """
    vp = scenario.vehicle.walk_speed
    out = {}
    for req in scenario.requests:
        wp = 0.0
        cp = scenario.pattern.pickup_cluster(req.id)
        if cp and not scenario.is_onboard(req.id):
            wp = dist(points[cp], req.pickup) / vp
        wd = 0.0
        cd = scenario.pattern.dropoff_cluster(req.id)
        if cd:
            wd = dist(points[cd], req.dropoff) / vp
        out[req.id] = (wp, wd)
    return out


def realize_route(sequence, points, scenario):
    """Time a visit order at fixed routing points and build the Route.

    Departure from each stop is the later of (arrival + stop overhead) and
    the last walking pickup's arrival at the routing point, so the departure
    constraint holds by construction.
    """
    veh = scenario.vehicle
    ta = veh.stop_overhead
    walks = walk_times(scenario, points)

    departures = []
    travel = []
    t_prev = scenario.start_time
    p_prev = points[0]
    for cid in sequence:
        cluster = scenario.pattern.cluster(cid)
        seg = dist(p_prev, points[cid]) / veh.shuttle_speed
        dep = t_prev + seg + ta
        for k in cluster.pickups():
            if scenario.is_onboard(k):
                continue
            ready = scenario.request(k).request_time + walks[k][0]
            if ready > dep:
                dep = ready
        travel.append(seg)
        departures.append(dep)
        t_prev = dep
        p_prev = points[cid]

    passengers = _passenger_breakdown(sequence, departures, walks, scenario)
    route = Route(
        sequence=tuple(sequence),
        points=tuple(tuple(p) for p in points),
        travel_times=tuple(travel),
        departures=tuple(departures),
        start_time=scenario.start_time,
        passengers=passengers,
        cost=0.0,
    )
    return replace(route, cost=evaluate_cost(route, scenario).total)


def _passenger_breakdown(sequence, departures, walks, scenario):
    dep_of = {cid: departures[j] for j, cid in enumerate(sequence)}
    pickups_before = {}
    dropoffs_before = {}
    np_, nd = scenario.pickups_done, scenario.dropoffs_done
    for cid in sequence:
        cluster = scenario.pattern.cluster(cid)
        pickups_before[cid] = np_
        dropoffs_before[cid] = nd
        np_ += sum(1 for k in cluster.pickups() if not scenario.is_onboard(k))
        nd += len(cluster.dropoffs())

    out = []
    for req in sorted(scenario.requests, key=lambda r: r.id):
        k = req.id
        cp = scenario.pattern.pickup_cluster(k)
        cd = scenario.pattern.dropoff_cluster(k)
        wp, wd = walks[k]
        if scenario.is_onboard(k):
            picked = scenario.onboard_entry(k).picked_up_at
            wait = picked - req.request_time
            ride = dep_of[cd] - picked
            p_order = 0
        else:
            wait = dep_of[cp] - req.request_time
            ride = dep_of[cd] - dep_of[cp]
            p_order = pickups_before[cp] + 1
        out.append(
            PassengerBreakdown(
                passenger=k,
                wait=wait,
                ride=ride,
                walk_pickup=wp,
                walk_dropoff=wd,
                pickup_order=p_order,
                dropoff_order=dropoffs_before[cd] + 1,
            )
        )
    return tuple(out)


def evaluate_cost(route, scenario, tol=1e-9):
    """Weighted time cost of a route; the single costing used everywhere.

    total = gamma1 * sum of effective segment times (stop overhead and any
    forced waiting included) + gamma2 * per-passenger weighted wait, ride,
    and walk times.
    """
    cfg = scenario.config
    veh = scenario.vehicle
    ta = veh.stop_overhead

    shuttle = 0.0
    t_prev = route.start_time
    p_prev = route.points[0]
    for j, cid in enumerate(route.sequence):
        seg = dist(p_prev, route.points[cid]) / veh.shuttle_speed
        effective = route.departures[j] - t_prev
        if effective < seg + ta - tol:
            raise InconsistentTimings(
                f"stop {j}: departure {route.departures[j]:.6f} earlier than "
                f"arrival + overhead {t_prev + seg + ta:.6f}"
            )
        shuttle += effective
        t_prev = route.departures[j]
        p_prev = route.points[cid]

    walks = walk_times(scenario, route.points)
    passengers = _passenger_breakdown(
        route.sequence, route.departures, walks, scenario
    )
    wait = sum(p.wait for p in passengers)
    ride = sum(p.ride for p in passengers)
    walk = 0.0
    for p in passengers:
        walk += cfg.alpha3_pickup * p.walk_pickup + cfg.alpha3_dropoff * p.walk_dropoff

    total = cfg.gamma1 * shuttle + cfg.gamma2 * (
        cfg.alpha1 * wait + cfg.alpha2 * ride + walk
    )
    return CostBreakdown(
        total=total,
        shuttle_time=shuttle,
        wait_time=wait,
        ride_time=ride,
        walk_time=sum(p.walk_pickup + p.walk_dropoff for p in passengers),
    )


# ---------------------------------------------------------------------------
# scenario ingestion and validation
# ---------------------------------------------------------------------------


def _unit_factors(units):
    units = units or {}
    try:
        return {
            "length": _LENGTH_UNITS[units.get("length", "m")],
            "speed": _SPEED_UNITS[units.get("speed", "m/s")],
            "time": _TIME_UNITS[units.get("time", "s")],
            "accel": _ACCEL_UNITS[units.get("acceleration", "m/s^2")],
        }
    except KeyError as exc:
        raise ScenarioValidationError([Violation("UnknownUnit", str(exc))])


def _parse_event_ref(ref):
    kind = {"p": PICKUP, "d": DROPOFF}.get(ref[0])
    if kind is None or not ref[1:].isdigit():
        return None
    return Event(kind, int(ref[1:]))


def parse_scenario(raw):
    """Build an unvalidated Scenario from a scenario document (parsed JSON)."""
    f = _unit_factors(raw.get("units"))
    requests = []
    violations = []
    for item in raw.get("requests", []):
        try:
            requests.append(
                RideRequest(
                    id=int(item["id"]),
                    pickup=(item["pickup"][0] * f["length"], item["pickup"][1] * f["length"]),
                    dropoff=(item["dropoff"][0] * f["length"], item["dropoff"][1] * f["length"]),
                    pickup_radius=float(item.get("r_pickup", 0.0)) * f["length"],
                    dropoff_radius=float(item.get("r_dropoff", 0.0)) * f["length"],
                    request_time=float(item.get("t_request", 0.0)) * f["time"],
                )
            )
        except (KeyError, TypeError, IndexError) as exc:
            violations.append(Violation("MalformedRequest", repr(exc)))
    if violations:
        raise ScenarioValidationError(violations)

    veh_doc = raw.get("vehicle", {})
    vehicle = VehicleParams(
        shuttle_speed=float(veh_doc.get("shuttle_speed", 30.0 / f["speed"] * _MPH)) * f["speed"],
        walk_speed=float(veh_doc.get("walk_speed", 3.1 / f["speed"] * _MPH)) * f["speed"],
        service_time=float(veh_doc.get("service_time", 60.0 / f["time"])) * f["time"],
        acceleration=float(veh_doc.get("acceleration", 2.25 / f["accel"] * _MPH)) * f["accel"],
    )

    cfg_doc = raw.get("config", {})
    config = SolverConfig(
        gamma1=float(cfg_doc.get("gamma1", 1.0)),
        gamma2=float(cfg_doc.get("gamma2", 1.0)),
        alpha1=float(cfg_doc.get("alpha1", 2.0)),
        alpha2=float(cfg_doc.get("alpha2", 1.0)),
        alpha3_pickup=float(cfg_doc.get("alpha3_pickup", 0.1)),
        alpha3_dropoff=float(cfg_doc.get("alpha3_dropoff", 0.1)),
        capacity=int(cfg_doc.get("capacity", 6)),
        mps_pickup=int(cfg_doc.get("mps_pickup", 6)),
        mps_dropoff=int(cfg_doc.get("mps_dropoff", 6)),
        h_max=int(cfg_doc.get("h_max", 50)),
        eps_place=float(cfg_doc.get("eps_place", 1e-4)),
        eps_geom=float(cfg_doc.get("eps_geom", EPS_GEOM)),
        place_iter_cap=int(cfg_doc.get("place_iter_cap", 50000)),
    )

    depot_raw = raw.get("depot", (0.0, 0.0))
    depot = (depot_raw[0] * f["length"], depot_raw[1] * f["length"])

    pattern = None
    if raw.get("clusters"):
        clusters = []
        for i, refs in enumerate(raw["clusters"]):
            events = []
            for ref in refs:
                event = _parse_event_ref(str(ref))
                if event is None:
                    violations.append(Violation("UnknownEvent", str(ref)))
                else:
                    events.append(event)
            clusters.append(Cluster(i + 1, tuple(events)))
        if violations:
            raise ScenarioValidationError(violations)
        pattern = ClusteringPattern(tuple(clusters))
    else:
        pattern = trivial_pattern(requests)

    return Scenario(
        depot=depot,
        requests=tuple(sorted(requests, key=lambda r: r.id)),
        pattern=pattern,
        vehicle=vehicle,
        config=config,
    )


def check_scenario(scenario, allow_partial=False):
    """Collect invariant violations. ``allow_partial`` relaxes the static-only
    rules (contiguous ids, both events per passenger) for derived replan
    scenarios with onboard passengers and absolute counters."""
    from . import geometry  # deferred: geometry depends on model types

    v = []
    veh, cfg = scenario.vehicle, scenario.config
    if veh.shuttle_speed <= 0 or veh.walk_speed <= 0:
        v.append(Violation("NonPositiveSpeed"))
    if veh.acceleration <= 0:
        v.append(Violation("NonPositiveAcceleration"))
    if veh.service_time < 0:
        v.append(Violation("NegativeServiceTime"))
    if cfg.capacity < 1 or cfg.capacity > MAX_CAPACITY:
        v.append(Violation("BadCapacity", str(cfg.capacity)))
    if cfg.mps_pickup < 1 or cfg.mps_dropoff < 1:
        v.append(Violation("BadPositionShiftBound"))
    for name in ("gamma1", "gamma2", "alpha1", "alpha2", "alpha3_pickup", "alpha3_dropoff"):
        if getattr(cfg, name) < 0:
            v.append(Violation("BadWeight", name))

    ids = [r.id for r in scenario.requests]
    if not allow_partial and ids != list(range(1, len(ids) + 1)):
        v.append(Violation("BadRequestIds", repr(ids)))
    if allow_partial and (len(set(ids)) != len(ids) or any(i < 1 for i in ids)):
        v.append(Violation("BadRequestIds", repr(ids)))
    times = [r.request_time for r in scenario.requests]
    if any(t2 < t1 for t1, t2 in zip(times, times[1:])):
        v.append(Violation("BadRequestOrder", "ids not ordered by request time"))

    for r in scenario.requests:
        if r.pickup_radius < 0 or r.dropoff_radius < 0:
            v.append(Violation("NegativeRadius", f"request {r.id}"))
        elif dist(r.pickup, r.dropoff) <= r.pickup_radius + r.dropoff_radius:
            v.append(Violation("WalkDominates", f"request {r.id}"))

    if scenario.pattern.size > MAX_CLUSTERS:
        v.append(Violation("TooManyClusters", str(scenario.pattern.size)))

    known = set(ids)
    onboard = set(scenario.onboard_ids())
    seen = set()
    for cluster in scenario.pattern.clusters:
        if not cluster.events:
            v.append(Violation("EmptyCluster", str(cluster.id)))
        kinds = set()
        for event in cluster.events:
            if event.passenger not in known:
                v.append(Violation("UnknownEvent", event.short()))
                continue
            if (event.kind, event.passenger) in seen:
                v.append(Violation("DuplicateEvent", event.short()))
            seen.add((event.kind, event.passenger))
            kinds.add((event.kind, event.passenger))
        for k in {e.passenger for e in cluster.events}:
            if (PICKUP, k) in kinds and (DROPOFF, k) in kinds:
                v.append(Violation("SameClusterPickupDropoff", str(k)))

    for r in scenario.requests:
        need = [(DROPOFF, r.id)]
        if not (allow_partial and r.id in onboard):
            need.append((PICKUP, r.id))
        for kind, k in need:
            if (kind, k) not in seen:
                v.append(Violation("MissingEvent", ("p" if kind == PICKUP else "d") + str(k)))
    for kind, k in seen:
        if allow_partial and kind == PICKUP and k in onboard:
            v.append(Violation("DuplicateEvent", f"pickup of onboard passenger {k}"))

    if len(onboard) > cfg.capacity:
        v.append(Violation("BadCapacity", f"{len(onboard)} onboard > capacity"))

    if not v:
        for cluster in scenario.pattern.clusters:
            windows = cluster_windows(scenario, cluster)
            if not geometry.area_nonempty(windows, tol=cfg.eps_geom):
                v.append(Violation("EmptyArea", str(cluster.id)))
    return v


def cluster_windows(scenario, cluster):
    """Space windows whose intersection is the cluster's feasible area.

    A frozen pickup contributes a zero-radius window at the negotiated
    point so replanning cannot move it (no double walk).
    """
    windows = []
    for event in cluster.events:
        req = scenario.request(event.passenger)
        if event.kind == PICKUP:
            frozen = scenario.frozen_point(event.passenger)
            if frozen is not None:
                windows.append(SpaceWindow(tuple(frozen), 0.0))
            else:
                windows.append(SpaceWindow(req.pickup, req.pickup_radius))
        else:
            windows.append(SpaceWindow(req.dropoff, req.dropoff_radius))
    return windows


def validate_scenario(raw):
    """Parse and validate a scenario document; raises on any violation."""
    scenario = parse_scenario(raw) if isinstance(raw, dict) else raw
    violations = check_scenario(scenario)
    if violations:
        raise ScenarioValidationError(violations)
    return scenario


# ---------------------------------------------------------------------------
# route serialization (External interface: route JSON)
# ---------------------------------------------------------------------------


def route_to_doc(route, scenario):
    breakdown = evaluate_cost(route, scenario)
    return {
        "sequence": list(route.sequence),
        "routing_points": {str(i): list(p) for i, p in enumerate(route.points)},
        "timeline": [
            {
                "cluster": cid,
                "travel_time": route.travel_times[j],
                "departure": route.departures[j],
                "events": [e.short() for e in scenario.pattern.cluster(cid).events],
            }
            for j, cid in enumerate(route.sequence)
        ],
        "per_passenger": [
            {
                "id": p.passenger,
                "wait": p.wait,
                "ride": p.ride,
                "walk_pickup": p.walk_pickup,
                "walk_dropoff": p.walk_dropoff,
                "pickup_order": p.pickup_order,
                "dropoff_order": p.dropoff_order,
            }
            for p in route.passengers
        ],
        "cost": route.cost,
        "cost_breakdown": {
            "shuttle_time": breakdown.shuttle_time,
            "wait_time": breakdown.wait_time,
            "ride_time": breakdown.ride_time,
            "walk_time": breakdown.walk_time,
        },
        "start_time": route.start_time,
    }


def route_from_doc(doc):
    points = [None] * len(doc["routing_points"])
    for key, val in doc["routing_points"].items():
        points[int(key)] = tuple(val)
    passengers = tuple(
        PassengerBreakdown(
            passenger=p["id"],
            wait=p["wait"],
            ride=p["ride"],
            walk_pickup=p["walk_pickup"],
            walk_dropoff=p["walk_dropoff"],
            pickup_order=p["pickup_order"],
            dropoff_order=p["dropoff_order"],
        )
        for p in doc["per_passenger"]
    )
    return Route(
        sequence=tuple(doc["sequence"]),
        points=tuple(points),
        travel_times=tuple(t["travel_time"] for t in doc["timeline"]),
        departures=tuple(t["departure"] for t in doc["timeline"]),
        start_time=doc.get("start_time", 0.0),
        passengers=passengers,
        cost=doc["cost"],
    )
