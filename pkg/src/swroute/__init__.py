"""Shuttle routing with space windows.

Public surface: scenario ingestion and costing (model), feasibility screens
(constraints), the two solver phases, the alternating orchestrator, the
exact enumeration oracle, and dynamic replanning.
"""

from ._kernels import BACKEND as kernel_backend
from .altmin import SolveResult, optimality_gap, solve
from .dynamic import FleetSnapshot, replan, run_replay, snapshot_at
from .errors import (
    FrozenPointConflict,
    GridTooLarge,
    InconsistentTimings,
    InfeasiblePattern,
    NonConvergence,
    ScenarioValidationError,
)
from .model import (
    Cluster,
    ClusteringPattern,
    Event,
    RideRequest,
    Route,
    Scenario,
    SolverConfig,
    SpaceWindow,
    VehicleParams,
    cluster_loads,
    evaluate_cost,
    realize_route,
    validate_scenario,
)
from .oracle import enumerate_feasible_sequences, solve_exact
from .phase1 import solve_sequence
from .phase2 import brute_place, build_placement, solve_placement

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Cluster",
    "ClusteringPattern",
    "Event",
    "FleetSnapshot",
    "FrozenPointConflict",
    "GridTooLarge",
    "InconsistentTimings",
    "InfeasiblePattern",
    "NonConvergence",
    "RideRequest",
    "Route",
    "Scenario",
    "ScenarioValidationError",
    "SolveResult",
    "SolverConfig",
    "SpaceWindow",
    "VehicleParams",
    "brute_place",
    "build_placement",
    "cluster_loads",
    "enumerate_feasible_sequences",
    "evaluate_cost",
    "kernel_backend",
    "optimality_gap",
    "realize_route",
    "replan",
    "run_replay",
    "snapshot_at",
    "solve",
    "solve_exact",
    "solve_placement",
    "solve_sequence",
    "validate_scenario",
]
