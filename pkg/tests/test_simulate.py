"""Timeline builder and simulator, including fault injection.

The centerpiece is a hand-laid overlapped schedule for the reference
workload that finishes in 1200 us: OCSes take turns carrying traffic
while the idle one reconfigures toward an upcoming permutation.  The
builder must reproduce the hand-derived timestamps exactly and the
simulator must accept it, then reject every tampered variant.
"""

import dataclasses

import pytest

from ocsched.errors import DimensionMismatch, EmptySteps
from ocsched.model import Scenario, Schedule
from ocsched.simulate import config_trace, simulate
from ocsched.timeline import build_timeline

US = 1e-6
MB = 1e6


def overlap_choice():
    """used/reconf/volume matrices for the 1200 us overlapped schedule."""
    used = [
        [True, True],    # step 1 (cfg1): split 15/5 so OCS2 frees up early
        [False, True],   # step 2 (cfg2): OCS2 alone, OCS1 turns toward cfg3
        [True, False],   # step 3 (cfg3): OCS1 alone, OCS2 turns toward cfg2
        [True, False],   # step 4 (cfg3): OCS1 alone
        [False, True],   # step 5 (cfg2): OCS2 alone, OCS1 turns toward cfg1
        [True, True],    # step 6 (cfg1): 15/5 again, OCS2 catches up late
    ]
    reconf = [
        [False, False],
        [False, True],
        [True, False],
        [False, False],
        [False, True],
        [True, True],
    ]
    volume = [
        [15 * MB, 5 * MB],
        [0.0, 10 * MB],
        [5 * MB, 0.0],
        [5 * MB, 0.0],
        [0.0, 10 * MB],
        [15 * MB, 5 * MB],
    ]
    return used, reconf, volume


@pytest.fixture()
def overlap_schedule(ref_scenario, ref_steps):
    used, reconf, volume = overlap_choice()
    return build_timeline(ref_scenario, ref_steps, used, reconf, volume, [1, 1])


def mutate(sched, field, i, j, value):
    """Return a copy of a frozen Schedule with one matrix cell changed."""
    rows = [list(r) for r in getattr(sched, field)]
    rows[i][j] = value
    return dataclasses.replace(sched, **{field: tuple(tuple(r) for r in rows)})


class TestBuildTimeline:
    def test_overlap_timestamps(self, overlap_schedule):
        s = overlap_schedule
        us = [[round(t / US, 6) for t in row] for row in s.t_start]
        ue = [[round(t / US, 6) for t in row] for row in s.t_end]
        # OCS1 transmissions: 15 MB, then steps 3..4, then 15 MB tail.
        assert (us[0][0], ue[0][0]) == (0, 300)
        assert (us[2][0], ue[2][0]) == (500, 600)
        assert (us[3][0], ue[3][0]) == (600, 700)
        assert (us[5][0], ue[5][0]) == (900, 1200)
        # OCS2 transmissions: early 5 MB, both cfg2 steps, late 5 MB.
        assert (us[0][1], ue[0][1]) == (0, 100)
        assert (us[1][1], ue[1][1]) == (300, 500)
        assert (us[4][1], ue[4][1]) == (700, 900)
        assert (us[5][1], ue[5][1]) == (1100, 1200)

    def test_overlap_reconfigurations_hide(self, overlap_schedule):
        s = overlap_schedule
        rs = [[round(t / US, 6) for t in row] for row in s.t_recfg_s]
        re = [[round(t / US, 6) for t in row] for row in s.t_recfg_e]
        assert (rs[1][1], re[1][1]) == (100, 300)   # OCS2 -> cfg2
        assert (rs[2][0], re[2][0]) == (300, 500)   # OCS1 -> cfg3
        assert (rs[4][1], re[4][1]) == (500, 700)   # OCS2 -> cfg2
        assert (rs[5][0], re[5][0]) == (700, 900)   # OCS1 -> cfg1
        assert (rs[5][1], re[5][1]) == (900, 1100)  # OCS2 -> cfg1

    def test_overlap_cct_is_1200us(self, overlap_schedule):
        assert overlap_schedule.cct == pytest.approx(1200 * US, rel=1e-12)
        assert overlap_schedule.reconfig_count == 5

    def test_overlap_passes_simulation(self, ref_scenario, ref_steps, overlap_schedule):
        report = simulate(ref_scenario, ref_steps, overlap_schedule)
        assert report.ok, report.violations
        assert report.cct == pytest.approx(1200 * US, rel=1e-12)

    def test_sync_latency_inserts_gaps(self, ref_steps):
        sc = Scenario(nodes=8, ocs_count=2, bandwidth=400e9, t_recfg=200e-6,
                      sync_latency=10e-6)
        used, reconf, volume = overlap_choice()
        sched = build_timeline(sc, ref_steps, used, reconf, volume, [1, 1])
        assert simulate(sc, ref_steps, sched).ok
        # Five barriers after step 1 add at most 5 * 10 us.
        assert sched.cct >= 1200 * US
        assert sched.cct <= 1250 * US + 1e-12

    def test_transmit_waits_for_reconfig(self, ref_scenario, ref_steps):
        # Forcing OCS1 to reconfigure for step 2 without any headstart
        # pushes its step-2 start to its reconfiguration end.
        used = [[True, True]] * 6
        reconf = [[False, False]] + [
            [ref_steps[i].cfg != ref_steps[i - 1].cfg] * 2 for i in range(1, 6)
        ]
        volume = [[s.volume / 2] * 2 for s in ref_steps]
        sched = build_timeline(ref_scenario, ref_steps, used, reconf, volume, [1, 1])
        assert sched.t_start[1][0] == pytest.approx(sched.t_recfg_e[1][0])
        assert sched.cct == pytest.approx(1500 * US, rel=1e-12)

    def test_rejects_volume_without_use(self, ref_scenario, ref_steps):
        used, reconf, volume = overlap_choice()
        used[0][0] = False
        with pytest.raises(ValueError):
            build_timeline(ref_scenario, ref_steps, used, reconf, volume, [1, 1])

    def test_rejects_wrong_config_use(self, ref_scenario, ref_steps):
        # OCS1 never turns toward cfg2 yet claims step 2 traffic.
        used, reconf, volume = overlap_choice()
        used[1][0] = True
        volume[1][0] = 1 * MB
        volume[1][1] = 9 * MB
        with pytest.raises(ValueError):
            build_timeline(ref_scenario, ref_steps, used, reconf, volume, [1, 1])

    def test_rejects_shape_mismatch(self, ref_scenario, ref_steps):
        used, reconf, volume = overlap_choice()
        with pytest.raises(DimensionMismatch):
            build_timeline(ref_scenario, ref_steps[:-1], used, reconf, volume, [1, 1])


class TestSimulateFaults:
    def test_understated_cct_rejected(self, ref_scenario, ref_steps, overlap_schedule):
        # Claiming the bandwidth-only bound on a real timeline must fail.
        fake = dataclasses.replace(overlap_schedule, cct=700 * US)
        report = simulate(ref_scenario, ref_steps, fake)
        assert not report.ok
        assert any("claimed completion" in v for v in report.violations)

    def test_overstated_cct_warns(self, ref_scenario, ref_steps, overlap_schedule):
        padded = dataclasses.replace(overlap_schedule, cct=2000 * US)
        report = simulate(ref_scenario, ref_steps, padded)
        assert report.ok
        assert any("overstates" in w for w in report.warnings)

    def test_missing_volume_detected(self, ref_scenario, ref_steps, overlap_schedule):
        short = mutate(overlap_schedule, "volume", 0, 0, 14 * MB)
        report = simulate(ref_scenario, ref_steps, short)
        assert any("demands" in v for v in report.violations)

    def test_too_fast_transmission_detected(self, ref_scenario, ref_steps, overlap_schedule):
        hurried = mutate(overlap_schedule, "t_end", 0, 0, 200 * US)
        report = simulate(ref_scenario, ref_steps, hurried)
        assert any("volume needs" in v for v in report.violations)

    def test_port_overlap_detected(self, ref_scenario, ref_steps, overlap_schedule):
        # Start OCS2's step-2 reconfiguration during its step-1 transmission.
        eager = mutate(overlap_schedule, "t_recfg_s", 1, 1, 50 * US)
        eager = mutate(eager, "t_recfg_e", 1, 1, 250 * US)
        report = simulate(ref_scenario, ref_steps, eager)
        assert any("port busy" in v for v in report.violations)

    def test_skipped_reconfig_detected(self, ref_scenario, ref_steps, overlap_schedule):
        # Drop OCS2's turn toward cfg2: its step-2 traffic now runs on cfg1.
        lazy = mutate(overlap_schedule, "reconf", 1, 1, False)
        lazy = mutate(lazy, "t_recfg_e", 1, 1, lazy.t_recfg_s[1][1])
        report = simulate(ref_scenario, ref_steps, lazy)
        assert any("holds config" in v for v in report.violations)

    def test_barrier_jump_detected(self, ref_scenario, ref_steps, overlap_schedule):
        # Step 3 starting before step 2 finished breaks the step barrier.
        early = mutate(overlap_schedule, "t_start", 2, 0, 400 * US)
        early = mutate(early, "t_end", 2, 0, 500 * US)
        report = simulate(ref_scenario, ref_steps, early)
        assert any("barrier" in v for v in report.violations)

    def test_unassigned_traffic_detected(self, ref_scenario, ref_steps, overlap_schedule):
        rogue = mutate(overlap_schedule, "volume", 1, 0, 1 * MB)
        report = simulate(ref_scenario, ref_steps, rogue)
        assert any("without being assigned" in v for v in report.violations)

    def test_idle_assignment_warns(self, ref_scenario, ref_steps):
        used, reconf, volume = overlap_choice()
        used[1][0] = True   # assigned to step 2 but carries nothing
        reconf[1][0] = True
        sched = build_timeline(ref_scenario, ref_steps, used, reconf, volume, [1, 1])
        # The extra reconfiguration reroutes OCS1; put it back for step 3.
        report = simulate(ref_scenario, ref_steps, sched)
        assert any("transmits nothing" in w for w in report.warnings)

    def test_step_count_mismatch_raises(self, ref_scenario, ref_steps, overlap_schedule):
        with pytest.raises(DimensionMismatch):
            simulate(ref_scenario, ref_steps[:-1], overlap_schedule)

    def test_empty_steps_raise(self, ref_scenario, overlap_schedule):
        with pytest.raises(EmptySteps):
            simulate(ref_scenario, [], overlap_schedule)


class TestConfigTrace:
    def test_overlap_trace(self, ref_steps, overlap_schedule):
        traces = config_trace(overlap_schedule, ref_steps)
        t1 = [(round(t / US, 6), c) for t, c in traces[0]]
        t2 = [(round(t / US, 6), c) for t, c in traces[1]]
        assert t1 == [(0, 1), (500, 3), (900, 1)]
        assert t2 == [(0, 1), (300, 2), (700, 2), (1100, 1)]

    def test_static_schedule_trace(self, ref_steps):
        from ocsched.baselines import one_shot_schedule

        sc = Scenario(nodes=8, ocs_count=4, bandwidth=400e9, t_recfg=200e-6)
        sched = one_shot_schedule(sc, ref_steps)
        for trace, cfg in zip(config_trace(sched, ref_steps), sched.init_configs):
            assert trace == ((0.0, cfg),)
