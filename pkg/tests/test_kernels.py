import itertools
import math

import pytest

import swroute._kernels as kernels
from swroute._kernels import pure
from conftest import line_requests, make_scenario, pattern_of
from swroute.constraints import check_sequence, problem_tables
from swroute.generator import random_scenario
from swroute.model import realize_route
from swroute.oracle import best_sequence_fixed_points
from swroute.phase1 import time_matrix
from swroute.geometry import scenario_areas

compiled = pytest.importorskip("swroute._kernels._fast")


def _scenarios():
    out = [
        make_scenario(line_requests([(1.0, 3.0), (2.0, 4.0)]), capacity=1),
        make_scenario(line_requests([(1.0, 4.0), (2.0, 5.0), (3.0, 6.0)]),
                      mps_pickup=2, mps_dropoff=2, capacity=2),
        random_scenario(11, 4),
        random_scenario(12, 4, n_clusters=6, radius=400.0),
    ]
    return out


def _dp_args(scenario, points):
    t = problem_tables(scenario)
    cfg = scenario.config
    return (
        t.n_clusters, time_matrix(points, scenario), t.lp, t.ld, t.lnet,
        t.req_mask, t.flo_p, t.fhi_p, t.flo_d, t.fhi_d,
        t.capacity, t.initial_load, t.pick_offset, t.drop_offset, t.n_waiting,
        cfg.gamma1, cfg.gamma2, cfg.alpha1, cfg.alpha2,
    )


@pytest.mark.parametrize("idx", range(4))
def test_dp_backends_agree(idx):
    sc = _scenarios()[idx]
    points = [a.centroid() for a in scenario_areas(sc)]
    args = _dp_args(sc, points)
    cost_p, seq_p, ex_p = pure.dp_solve(*args)
    cost_c, seq_c, ex_c = compiled.dp_solve(*args)
    assert cost_c == pytest.approx(cost_p, rel=1e-12)
    assert list(seq_c) == list(seq_p)
    assert ex_c == ex_p


@pytest.mark.parametrize("idx", range(4))
def test_count_backends_agree(idx):
    sc = _scenarios()[idx]
    t = problem_tables(sc)
    assert compiled.count_sequences(*t.kernel_args()) == pure.count_sequences(
        *t.kernel_args()
    )


@pytest.mark.parametrize("idx", range(4))
def test_fixed_points_backends_agree(idx):
    sc = _scenarios()[idx]
    points = [a.centroid() for a in scenario_areas(sc)]
    t = problem_tables(sc)
    cfg = sc.config
    tmat = time_matrix(points, sc, include_overhead=False)
    ready = [-1e300] * (t.n_clusters + 1)
    args = (
        t.n_clusters, tmat, sc.vehicle.stop_overhead, ready, 0.0,
        t.lp, t.ld, t.lnet, t.req_mask, t.flo_p, t.fhi_p, t.flo_d, t.fhi_d,
        t.capacity, t.initial_load, t.pick_offset, t.drop_offset, t.n_waiting,
        cfg.gamma1, cfg.gamma2, cfg.alpha1, cfg.alpha2,
    )
    cost_p, seq_p, _ = pure.fixed_points_best(*args)
    cost_c, seq_c, _ = compiled.fixed_points_best(*args)
    assert cost_c == pytest.approx(cost_p, rel=1e-12)
    assert tuple(seq_c) == tuple(seq_p)


def test_count_matches_naive_filter():
    for sc in _scenarios()[:3]:
        n = sc.pattern.size
        if n > 8:
            continue
        t = problem_tables(sc)
        naive = sum(
            1 for perm in itertools.permutations(range(1, n + 1))
            if not check_sequence(perm, sc)
        )
        assert kernels.count_sequences(*t.kernel_args()) == naive


def test_enumerator_yields_exactly_accepted():
    sc = make_scenario(line_requests([(1.0, 3.0), (2.0, 4.0)]), capacity=1)
    t = problem_tables(sc)
    got = set(kernels.feasible_sequences(*t.kernel_args()))
    expect = {
        perm for perm in itertools.permutations(range(1, 5))
        if not check_sequence(perm, sc)
    }
    assert got == expect


def test_fixed_points_matches_literal_bruteforce():
    # includes a case where the departure wait binds (large radius near depot)
    from swroute.model import RideRequest, VehicleParams

    veh = VehicleParams(shuttle_speed=10.0, walk_speed=1.0, service_time=5.0)
    reqs = [
        RideRequest(1, (20.0, 0.0), (400.0, 0.0), 150.0, 0.0),
        RideRequest(2, (300.0, 50.0), (600.0, 0.0), 0.0, 0.0),
    ]
    sc = make_scenario(reqs, vehicle=veh, alpha1=2.0, alpha3_pickup=0.1,
                       alpha3_dropoff=0.1, capacity=2)
    points = [a.centroid() for a in scenario_areas(sc)]
    best_cost, best_seq = best_sequence_fixed_points(points, sc)

    lit_cost, lit_seq = math.inf, None
    for perm in itertools.permutations(range(1, 5)):
        if check_sequence(perm, sc):
            continue
        cost = realize_route(perm, points, sc).cost
        if cost < lit_cost - 1e-12:
            lit_cost, lit_seq = cost, perm
    assert best_cost == pytest.approx(lit_cost, rel=1e-12)
    assert tuple(best_seq) == lit_seq


def test_backend_is_compiled_by_default():
    assert kernels.BACKEND == "compiled"
