"""Solver stack: LP plumbing, greedy heuristic, branch and bound, oracle.

The 4-node instances are small enough for the exhaustive oracle, so every
frozen completion time below is independently confirmed by two searchers
that share only the leaf LP evaluator.  Times in comments are microseconds.
"""

import dataclasses

import pytest

from ocsched.baselines import ideal_cct, strawman_schedule
from ocsched.collectives import CollectiveSpec, generate_steps
from ocsched.errors import TooLarge
from ocsched.milp import assignment_from_schedule, build_model
from ocsched.model import Scenario
from ocsched.simulate import simulate
from ocsched.solver import (
    SolverReport,
    branch_and_bound,
    brute_force_oracle,
    heuristic_schedule,
    solve_lp,
    step_chain_cuts,
)

US = 1e-6


def p4_scenario(k, **kw):
    return Scenario(nodes=4, ocs_count=k, bandwidth=400e9, t_recfg=200e-6, **kw)


def p4_steps(algorithm, size):
    steps, _ = generate_steps(CollectiveSpec(algorithm, 4, size))
    return steps


# Proven optima for the 4-node grid: algorithm, OCS count, bytes per node.
P4_OPTIMA = {
    ("rabenseifner", 1, 4e6): 520.0,
    ("rabenseifner", 1, 40e6): 1600.0,
    ("rabenseifner", 2, 4e6): 120.0,
    ("rabenseifner", 2, 40e6): 1000.0,
    ("pairwise", 1, 4e6): 460.0,
    ("pairwise", 1, 40e6): 1000.0,
    ("pairwise", 2, 4e6): 240.0,
    ("pairwise", 2, 40e6): 600.0,
    ("bruck", 1, 4e6): 280.0,
    ("bruck", 1, 40e6): 1000.0,
    ("bruck", 2, 4e6): 80.0,
    ("bruck", 2, 40e6): 600.0,
}


class TestSolveLP:
    def test_plain_relaxation_is_loose(self, ref_scenario, ref_steps):
        # fractional usage defuses the big-M chaining, collapsing the bound
        model = build_model(ref_scenario, ref_steps)
        status, obj, values = solve_lp(model)
        assert status == "optimal"
        assert obj == pytest.approx(0.0, abs=1e-9)
        assert values["cct"] == pytest.approx(0.0, abs=1e-9)

    def test_chain_cuts_restore_bandwidth_bound(self, ref_scenario, ref_steps):
        model = build_model(ref_scenario, ref_steps)
        cuts = step_chain_cuts(ref_scenario, ref_steps)
        status, obj, _ = solve_lp(model, {}, cuts)
        assert status == "optimal"
        assert obj == pytest.approx(700 * US, rel=1e-9)
        assert obj == pytest.approx(ideal_cct(ref_scenario, ref_steps), rel=1e-9)

    def test_unserved_step_is_infeasible(self, ref_scenario, ref_steps):
        model = build_model(ref_scenario, ref_steps)
        fixed = {"u_1_1": 0.0, "u_1_2": 0.0}
        status, obj, values = solve_lp(model, fixed)
        assert status == "infeasible"
        assert obj is None and values is None

    def test_conflict_with_pinned_variable(self, ref_steps):
        sc = Scenario(nodes=8, ocs_count=2, bandwidth=400e9, t_recfg=200e-6,
                      initial_configs=(1, 1))
        model = build_model(sc, ref_steps)
        status, _, _ = solve_lp(model, {"lc_1_1": 2.0})
        assert status == "infeasible"

    def test_fixed_pattern_reproduces_stop_and_go(self, ref_scenario, ref_steps):
        # freezing all combinatorial variables at the stop-and-go choice
        # leaves a timestamp LP whose optimum is that policy's 1500
        model = build_model(ref_scenario, ref_steps)
        sched = strawman_schedule(ref_scenario, ref_steps)
        vals = assignment_from_schedule(model, sched)
        fixed = {
            name: val for name, val in vals.items()
            if name.split("_")[0] in ("u", "r", "s", "lc")
        }
        status, obj, _ = solve_lp(model, fixed)
        assert status == "optimal"
        assert obj == pytest.approx(1500 * US, rel=1e-9)

    def test_values_cover_every_variable(self, ref_scenario, ref_steps):
        model = build_model(ref_scenario, ref_steps)
        _, _, values = solve_lp(model)
        assert set(values) == {v.name for v in model.variables}


class TestHeuristic:
    def test_reference_workload_reaches_optimum(self, ref_scenario, ref_steps):
        sched = heuristic_schedule(ref_scenario, ref_steps)
        assert simulate(ref_scenario, ref_steps, sched).ok
        assert sched.cct == pytest.approx(1200 * US, rel=1e-9)

    def test_deterministic(self, ref_scenario, ref_steps):
        a = heuristic_schedule(ref_scenario, ref_steps)
        b = heuristic_schedule(ref_scenario, ref_steps)
        assert a == b

    @pytest.mark.parametrize("algorithm", ["rabenseifner", "pairwise", "bruck"])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_never_worse_than_stop_and_go(self, algorithm, k):
        sc = p4_scenario(k)
        steps = p4_steps(algorithm, 40e6)
        greedy = heuristic_schedule(sc, steps)
        assert simulate(sc, steps, greedy).ok
        straw = strawman_schedule(sc, steps)
        assert greedy.cct <= straw.cct + 1e-12

    def test_cold_start_is_valid(self):
        sc = p4_scenario(2, initial_configs=(0, 0))
        steps = p4_steps("rabenseifner", 40e6)
        sched = heuristic_schedule(sc, steps)
        assert simulate(sc, steps, sched).ok
        # an empty OCS must reconfigure before it can carry anything
        assert sched.cct >= 200 * US + 1e-12

    def test_respects_sync_latency(self):
        sc = p4_scenario(2, sync_latency=50e-6)
        steps = p4_steps("rabenseifner", 40e6)
        sched = heuristic_schedule(sc, steps)
        assert simulate(sc, steps, sched).ok
        for i in range(1, len(steps)):
            starts = [
                sched.t_start[i][j]
                for j in range(sc.ocs_count) if sched.used[i][j]
            ]
            assert min(starts) >= sched.step_end[i - 1] + 50e-6 - 1e-12


class TestOracleAndSearch:
    @pytest.mark.parametrize(
        "algorithm,k,size", sorted(P4_OPTIMA), ids=lambda v: str(v)
    )
    def test_frozen_optima_two_ways(self, algorithm, k, size):
        expected = P4_OPTIMA[(algorithm, k, size)] * US
        sc = p4_scenario(k)
        steps = p4_steps(algorithm, size)

        oracle = brute_force_oracle(sc, steps)
        assert oracle.status == "optimal"
        assert oracle.cct == pytest.approx(expected, rel=1e-6)
        assert simulate(sc, steps, oracle.schedule).ok

        bnb = branch_and_bound(sc, steps)
        assert bnb.status == "optimal"
        assert bnb.cct == pytest.approx(expected, rel=1e-6)
        assert bnb.lower_bound == pytest.approx(bnb.cct, rel=1e-6)
        assert bnb.gap <= 1e-6
        assert simulate(sc, steps, bnb.schedule).ok

    def test_oracle_respects_pair_limit(self):
        sc = Scenario(nodes=8, ocs_count=3, bandwidth=400e9, t_recfg=200e-6)
        steps, _ = generate_steps(CollectiveSpec("pairwise", 8, 40e6))
        with pytest.raises(TooLarge):
            brute_force_oracle(sc, steps)  # 7 steps x 3 OCSes = 21 pairs

    def test_reference_workload_oracle(self, ref_scenario, ref_steps):
        report = brute_force_oracle(ref_scenario, ref_steps)
        assert report.status == "optimal"
        assert report.cct == pytest.approx(1200 * US, rel=1e-6)
        assert report.nodes > 0
        assert simulate(ref_scenario, ref_steps, report.schedule).ok

    def test_explicit_init_agreement(self):
        sc = p4_scenario(2, initial_configs=(1, 1))
        steps = p4_steps("rabenseifner", 40e6)
        oracle = brute_force_oracle(sc, steps)
        bnb = branch_and_bound(sc, steps)
        assert oracle.cct == pytest.approx(bnb.cct, rel=1e-6)

    def test_blank_init_agreement_and_penalty(self):
        sc = p4_scenario(2, initial_configs=(0, 0))
        steps = p4_steps("rabenseifner", 40e6)
        oracle = brute_force_oracle(sc, steps)
        bnb = branch_and_bound(sc, steps)
        assert oracle.cct == pytest.approx(bnb.cct, rel=1e-6)
        # starting empty can never beat scheduler-chosen preconfiguration
        free = P4_OPTIMA[("rabenseifner", 2, 40e6)] * US
        assert oracle.cct >= free - 1e-12

    def test_sync_latency_agreement(self):
        sc = p4_scenario(2, sync_latency=10e-6)
        steps = p4_steps("rabenseifner", 40e6)
        oracle = brute_force_oracle(sc, steps)
        bnb = branch_and_bound(sc, steps)
        assert oracle.cct == pytest.approx(bnb.cct, rel=1e-6)
        free = P4_OPTIMA[("rabenseifner", 2, 40e6)] * US
        assert oracle.cct >= free - 1e-12

    def test_budget_exhaustion_keeps_best_seed(self, ref_scenario, ref_steps):
        report = branch_and_bound(ref_scenario, ref_steps, time_budget=0.05)
        assert report.status == "heuristic"
        assert report.cct == pytest.approx(1200 * US, rel=1e-9)
        assert report.lower_bound <= report.cct + 1e-12
        assert 0.0 <= report.gap <= 1.0
        assert simulate(ref_scenario, ref_steps, report.schedule).ok

    def test_search_determinism(self):
        sc = p4_scenario(2)
        steps = p4_steps("bruck", 40e6)
        first = branch_and_bound(sc, steps)
        second = branch_and_bound(sc, steps)
        assert first.cct == second.cct
        assert first.nodes == second.nodes
        assert first.schedule == second.schedule

    def test_report_shape(self):
        sc = p4_scenario(2)
        steps = p4_steps("bruck", 4e6)
        report = branch_and_bound(sc, steps)
        assert isinstance(report, SolverReport)
        assert dataclasses.is_dataclass(report)
        assert report.wall_time >= 0.0
        assert report.source != ""
