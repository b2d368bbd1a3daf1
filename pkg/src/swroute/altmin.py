"""Alternating minimization: sequence <-> placement mega-iterations.

Routing points start at the area centroids. Each mega-iteration derives the
optimal sequence for the current points, stops as soon as any earlier
sequence repeats (the iterates can only cycle from there), otherwise
re-optimizes the points for the new sequence. The placement solver is warm
started from the current points, which keeps the recorded cost history
non-increasing up to the placement tolerance.
"""

import logging
from dataclasses import dataclass

from .errors import NonConvergence
from .geometry import scenario_areas
from .model import realize_route
from .phase1 import solve_sequence
from .phase2 import build_placement, solve_placement

log = logging.getLogger("swroute.altmin")


@dataclass(frozen=True)
class IterationRecord:
    index: int
    sequence: tuple
    sequence_cost: float  # phase-1 value at the incoming points
    placement_cost: float  # cost after re-placing, inf if the placer failed
    placement_evals: int
    error: str = ""


@dataclass(frozen=True)
class SolveResult:
    cost: float
    sequence: tuple
    points: tuple
    route: object
    history: tuple
    hbar: int
    termination: str  # "recurrence" | "iteration-cap"


def solve(scenario):
    """Run mega-iterations until a sequence repeats or h_max is reached."""
    areas = scenario_areas(scenario)
    points = [a.centroid() for a in areas]

    best_cost = float("inf")
    best_seq = None
    best_pts = None
    seen = []
    history = []
    hbar = 0
    termination = "iteration-cap"

    for h in range(1, scenario.config.h_max + 1):
        hbar = h
        sequence, seq_cost = solve_sequence(points, scenario)
        if sequence in seen:
            termination = "recurrence"
            break
        seen.append(sequence)

        problem = build_placement(sequence, scenario, areas)
        try:
            placed = solve_placement(problem, warm_start=points)
        except NonConvergence as exc:
            log.warning("iteration %d: placement did not converge: %s", h, exc)
            history.append(
                IterationRecord(h, sequence, seq_cost, float("inf"), 0, str(exc))
            )
            continue

        history.append(
            IterationRecord(h, sequence, seq_cost, placed.cost, placed.evaluations)
        )
        if placed.cost < best_cost:
            best_cost = placed.cost
            best_seq = sequence
            best_pts = placed.points
        points = [tuple(p) for p in placed.points]

    if best_seq is None:
        raise NonConvergence("no mega-iteration produced a placement")

    route = realize_route(best_seq, best_pts, scenario)
    return SolveResult(
        cost=route.cost,
        sequence=best_seq,
        points=tuple(best_pts),
        route=route,
        history=tuple(history),
        hbar=hbar,
        termination=termination,
    )


def optimality_gap(altmin_cost, oracle_cost):
    """Relative excess of the heuristic cost over the reference cost.

    Negative when the heuristic beat a time-capped reference.
    """
    return (altmin_cost - oracle_cost) / oracle_cost
