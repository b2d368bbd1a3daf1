"""Dynamic routing: splice new request batches into an in-flight route.

A replan builds a derived static scenario: the start point is the shuttle's
interpolated position, passengers already on board keep only their dropoff
events (with the absolute pickup times carried along), and pickups that
were assigned but not yet executed are frozen at their negotiated points.
Request ids, pickup/dropoff counters, and the clock are all absolute, so
position-shift guarantees and time costs stay consistent across batches.
"""

import logging
from dataclasses import dataclass, replace

from . import altmin
from .errors import (
    FrozenPointConflict,
    ScenarioValidationError,
    Violation,
)
from .model import (
    Cluster,
    ClusteringPattern,
    OnboardPassenger,
    _parse_event_ref,
    check_scenario,
    trivial_pattern,
)


def pattern_from_refs(refs):
    """Clusters from event-reference lists like [["p3", "d1"], ...]."""
    clusters = []
    for i, group in enumerate(refs):
        events = []
        for ref in group:
            event = _parse_event_ref(str(ref))
            if event is None:
                raise ScenarioValidationError([Violation("UnknownEvent", str(ref))])
            events.append(event)
        clusters.append(Cluster(i + 1, tuple(events)))
    return ClusteringPattern(tuple(clusters))

log = logging.getLogger("swroute.dynamic")


@dataclass(frozen=True)
class FleetSnapshot:
    time: float
    position: tuple
    onboard: tuple  # OnboardPassenger, pickup executed but not the dropoff
    assigned: tuple  # (passenger, frozen pickup point), pickup still ahead
    served: tuple  # passenger ids fully served by now
    executed_stops: int  # prefix of the route departed by `time`
    requests_so_far: int
    pickups_done: int
    dropoffs_done: int


def shuttle_position(route, t_now):
    """Piecewise-linear position: moving at shuttle speed between stops,
    parked at the stop during overhead and forced waits."""
    if not route.sequence or t_now <= route.start_time:
        return tuple(route.points[0])
    t_prev = route.start_time
    p_prev = route.points[0]
    for j, cid in enumerate(route.sequence):
        target = route.points[cid]
        travel = route.travel_times[j]
        if t_now <= t_prev + travel:
            if travel <= 0.0:
                return tuple(target)
            frac = (t_now - t_prev) / travel
            return (
                p_prev[0] + frac * (target[0] - p_prev[0]),
                p_prev[1] + frac * (target[1] - p_prev[1]),
            )
        if t_now <= route.departures[j]:
            return tuple(target)
        t_prev = route.departures[j]
        p_prev = target
    return tuple(route.points[route.sequence[-1]])


def snapshot_at(route, scenario, t_now):
    """Classify progress of a timed route at wall-clock time ``t_now``."""
    executed = sum(1 for dep in route.departures if dep <= t_now)
    done = set(route.sequence[:executed])

    onboard = list(scenario.onboard)
    assigned = []
    served = []
    pickups_done = scenario.pickups_done
    dropoffs_done = scenario.dropoffs_done

    for req in scenario.requests:
        k = req.id
        cp = scenario.pattern.pickup_cluster(k)
        cd = scenario.pattern.dropoff_cluster(k)
        if scenario.is_onboard(k):
            picked_entry = scenario.onboard_entry(k)
            if cd in done:
                served.append(k)
                dropoffs_done += 1
                onboard.remove(picked_entry)
            continue
        if cp in done:
            pickups_done += 1
            if cd in done:
                served.append(k)
                dropoffs_done += 1
            else:
                onboard.append(
                    OnboardPassenger(k, route.departure_of_cluster(cp))
                )
        else:
            assigned.append((k, tuple(route.points[cp])))

    onboard.sort(key=lambda o: o.passenger)
    return FleetSnapshot(
        time=t_now,
        position=shuttle_position(route, t_now),
        onboard=tuple(onboard),
        assigned=tuple(assigned),
        served=tuple(sorted(served)),
        executed_stops=executed,
        requests_so_far=max((r.id for r in scenario.requests), default=0),
        pickups_done=pickups_done,
        dropoffs_done=dropoffs_done,
    )


@dataclass(frozen=True)
class ReplanResult:
    scenario: object  # the derived scenario the new route belongs to
    route: object
    solve: object  # full AltMin result


def build_replan_scenario(snapshot, new_requests, pattern_update, scenario):
    served = set(snapshot.served)
    remaining = [r for r in scenario.requests if r.id not in served]

    last_id = snapshot.requests_so_far
    for req in sorted(new_requests, key=lambda r: r.id):
        if req.id <= last_id:
            raise ScenarioValidationError(
                [Violation("BadRequestIds", f"new id {req.id} does not extend {last_id}")]
            )
        last_id = req.id
        remaining.append(req)
    remaining.sort(key=lambda r: r.id)

    onboard_ids = tuple(o.passenger for o in snapshot.onboard)
    pattern = pattern_update
    if pattern is None:
        pattern = trivial_pattern(remaining, onboard_ids)
    elif not isinstance(pattern, ClusteringPattern):
        pattern = pattern_from_refs(pattern)

    derived = replace(
        scenario,
        depot=tuple(snapshot.position),
        requests=tuple(remaining),
        pattern=pattern,
        start_time=snapshot.time,
        onboard=snapshot.onboard,
        frozen_pickups=tuple((k, tuple(p)) for k, p in snapshot.assigned),
        pickups_done=snapshot.pickups_done,
        dropoffs_done=snapshot.dropoffs_done,
    )

    violations = check_scenario(derived, allow_partial=True)
    if violations:
        frozen_ids = {k for k, _ in derived.frozen_pickups}
        for violation in violations:
            if violation.code == "EmptyArea":
                cluster = derived.pattern.cluster(int(violation.detail))
                if frozen_ids & set(cluster.pickups()):
                    raise FrozenPointConflict(str(violation))
        raise ScenarioValidationError(violations)
    return derived


def replan(snapshot, new_requests, pattern_update, scenario):
    """Re-solve from a snapshot with a batch of new requests spliced in."""
    derived = build_replan_scenario(snapshot, new_requests, pattern_update, scenario)
    solved = altmin.solve(derived)
    return ReplanResult(scenario=derived, route=solved.route, solve=solved)


# ---------------------------------------------------------------------------
# replay driver (CLI `replay` and the dynamic test suites)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BatchOutcome:
    time: float
    snapshot: object  # None for the first batch
    scenario: object
    route: object


@dataclass(frozen=True)
class ReplayResult:
    batches: tuple
    passenger_times: dict  # id -> realized PassengerBreakdown-like dict
    total_cost: float  # realized absolute cost over the whole horizon
    shuttle_time: float


def run_replay(scenario, batches):
    """Apply timed request batches to an evolving plan.

    ``scenario`` holds the first batch (clock 0). Later batches are
    (time, requests, pattern or None) triples, applied in order; a batch
    arriving after route completion starts from the final stop.
    """
    outcomes = []
    current_scenario = scenario
    current_route = altmin.solve(scenario).route
    outcomes.append(BatchOutcome(0.0, None, scenario, current_route))

    for t_batch, requests, pattern in batches:
        snap = snapshot_at(current_route, current_scenario, t_batch)
        result = replan(snap, requests, pattern, current_scenario)
        outcomes.append(BatchOutcome(t_batch, snap, result.scenario, result.route))
        current_scenario = result.scenario
        current_route = result.route

    return _summarize(outcomes)


def _summarize(outcomes):
    """Realized per-passenger times and total cost across all plans."""
    final = {}
    for idx, outcome in enumerate(outcomes):
        horizon = outcomes[idx + 1].time if idx + 1 < len(outcomes) else None
        for p in outcome.route.passengers:
            if horizon is None or _completed_by(outcome, p.passenger, horizon):
                final[p.passenger] = p

    shuttle = 0.0
    for idx, outcome in enumerate(outcomes):
        start = outcome.route.start_time
        end = outcome.route.departures[-1] if outcome.route.departures else start
        if idx + 1 < len(outcomes):
            end = min(end, outcomes[idx + 1].time)
        shuttle += max(0.0, end - start)

    last = outcomes[-1]
    cfg = last.scenario.config
    wait = sum(p.wait for p in final.values())
    ride = sum(p.ride for p in final.values())
    walk = sum(
        cfg.alpha3_pickup * p.walk_pickup + cfg.alpha3_dropoff * p.walk_dropoff
        for p in final.values()
    )
    total = cfg.gamma1 * shuttle + cfg.gamma2 * (
        cfg.alpha1 * wait + cfg.alpha2 * ride + walk
    )
    return ReplayResult(
        batches=tuple(outcomes),
        passenger_times={
            k: {
                "wait": p.wait,
                "ride": p.ride,
                "walk_pickup": p.walk_pickup,
                "walk_dropoff": p.walk_dropoff,
            }
            for k, p in sorted(final.items())
        },
        total_cost=total,
        shuttle_time=shuttle,
    )


def _completed_by(outcome, passenger, horizon):
    cd = outcome.scenario.pattern.dropoff_cluster(passenger)
    return cd and outcome.route.departure_of_cluster(cd) <= horizon
