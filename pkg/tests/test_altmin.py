import math

import pytest

from conftest import line_requests, make_scenario
from swroute import optimality_gap, solve
from swroute.constraints import check_departures, check_sequence
from swroute.generator import random_scenario
from swroute.geometry import scenario_areas


class TestSolve:
    def test_single_passenger_two_iterations(self, one_passenger):
        res = solve(one_passenger)
        assert res.hbar == 2
        assert res.termination == "recurrence"
        assert res.sequence == (1, 2)
        assert len(res.history) == 1

    def test_history_monotone(self):
        for seed in range(8):
            sc = random_scenario(seed, 3)
            res = solve(sc)
            costs = [h.placement_cost for h in res.history
                     if math.isfinite(h.placement_cost)]
            for a, b in zip(costs, costs[1:]):
                assert b <= a * (1.0 + sc.config.eps_place) + 1e-9

    def test_terminates_within_hmax(self):
        for seed in range(8):
            sc = random_scenario(seed, 4)
            res = solve(sc)
            assert res.hbar <= sc.config.h_max

    def test_deterministic_rerun(self):
        sc = random_scenario(21, 4)
        a = solve(sc)
        b = solve(sc)
        assert a.sequence == b.sequence
        assert a.points == b.points  # bitwise-identical floats
        assert a.cost == b.cost

    def test_result_is_consistent(self):
        sc = random_scenario(5, 3)
        res = solve(sc)
        assert not check_sequence(res.sequence, sc)
        areas = scenario_areas(sc)
        for cid in res.sequence:
            assert areas[cid].contains(res.points[cid], tol=1e-5)
        assert all(s <= 1e-6 for s in check_departures(res.route, sc))
        assert res.cost == res.route.cost

    def test_final_route_recosted(self):
        from swroute.model import evaluate_cost

        sc = random_scenario(9, 3)
        res = solve(sc)
        assert evaluate_cost(res.route, sc).total == pytest.approx(res.cost, rel=1e-12)


class TestOptimalityGap:
    def test_equal_costs(self):
        assert optimality_gap(3.0, 3.0) == 0.0

    def test_worst_published_row(self):
        # 0.388 / 4.538 = 8.5500%
        assert optimality_gap(4.926, 4.538) == pytest.approx(0.08550, abs=1e-5)

    def test_small_published_row(self):
        # 0.028 / 2.886 = 0.97020% from the rounded cost columns
        assert optimality_gap(2.914, 2.886) == pytest.approx(0.0097020, abs=1e-6)

    def test_negative_when_heuristic_wins(self):
        assert optimality_gap(2.0, 2.5) == pytest.approx(-0.2)
