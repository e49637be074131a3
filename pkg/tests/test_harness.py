import json
import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GOLDEN
from helpers import (
    BIN,
    DENSE,
    EVENTS,
    NORMAL,
    OBJ,
    PANDA,
    TABLE,
    UR10,
    after,
    before,
    clause,
    during,
    point,
    run_config,
    synthetic_log,
    tiny_world,
)
from robobdd import fixture_path
from robobdd.errors import CoordinationError, EmptySample, MissingEvent, UnresolvedBinding
from robobdd.harness import (
    EventTrace,
    RunConfig,
    XorShift64Star,
    eval_clause,
    evaluate_instance,
    execution_seed,
    hash64,
    outcome,
    run_suite,
    sample_world,
    simulate_pick_place,
    splitmix64,
    summarize_speeds,
    world_config,
)
from robobdd.harness.sim import crowding
from robobdd.harness.world import ObjectSpec, WorldConfig

M64 = (1 << 64) - 1


def ref_xorshift64star(state: int, n: int) -> list[int]:
    """Straight transcription with numpy uint64 arithmetic (wraps mod 2**64)."""
    x = np.uint64(state)
    out = []
    with np.errstate(over="ignore"):
        for _ in range(n):
            x ^= x >> np.uint64(12)
            x ^= x << np.uint64(25)
            x ^= x >> np.uint64(27)
            out.append(int(x * np.uint64(0x2545F4914F6CDD1D)))
    return out


def _instance(manifest, obj="ball", bin_="bin-blue"):
    for inst in manifest["instances"]:
        roles = inst["clauses"][-1]["roles"]
        if roles["object"].endswith("/" + obj) and roles["workspace"].endswith("/" + bin_):
            return inst
    raise KeyError((obj, bin_))


def _simulate(manifest, agent=PANDA, obj="ball", bin_="bin-blue", scale=1.0, slip=0.0, seed=1, rng="normal"):
    inst = _instance(manifest, obj, bin_)
    p = point(agent, rng, scale)
    cfg = world_config(inst["elements"], p, run_config([p], slip=slip))
    clauses = [{**c, "roles": {**c["roles"], "agent": agent}} if "agent" in c["roles"] else c for c in inst["clauses"]]
    sim = simulate_pick_place(sample_world(cfg, seed), inst, cfg, seed)
    return inst, clauses, cfg, sim


class TestRng:
    def test_splitmix_reference_value(self):
        # first output of splitmix64 seeded with 0
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_xorshift_matches_reference(self):
        r = XorShift64Star(12345)
        start = r.state
        assert [r.next_u64() for _ in range(500)] == ref_xorshift64star(start, 500)

    def test_zero_seed_has_live_state(self):
        assert XorShift64Star(0).state != 0

    @given(st.integers(0, M64), st.floats(-5, 5), st.floats(0.001, 5))
    def test_uniform_range(self, seed, lo, width):
        r = XorShift64Star(seed)
        for _ in range(20):
            assert 0.0 <= r.uniform() < 1.0
            v = r.uniform_range(lo, lo + width)
            assert lo <= v < lo + width

    def test_hash_is_order_sensitive(self):
        assert hash64("a", "b") != hash64("b", "a")
        assert hash64("ab") != hash64("a", "b")
        assert hash64(1, "x") == hash64(1, "x")


class TestSampleWorld:
    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, M64), rng_box=st.sampled_from([NORMAL, DENSE]))
    def test_inside_range(self, seed, rng_box, manifest):
        inst = manifest["instances"][0]
        p = point(PANDA, "normal" if rng_box == NORMAL else "dense")
        cfg = world_config(inst["elements"], p, run_config([p]))
        pos = sample_world(cfg, seed).object_positions
        xmin, ymin, xmax, ymax = rng_box
        assert np.all((pos[:, 0] >= xmin) & (pos[:, 0] < xmax) & (pos[:, 1] >= ymin) & (pos[:, 1] < ymax))
        assert np.array_equal(pos[:, 2], [o.half_extents[2] for o in cfg.objects])

    def test_same_seed_bitwise_identical(self):
        cfg = tiny_world()
        assert sample_world(cfg, 99).object_positions.tobytes() == sample_world(cfg, 99).object_positions.tobytes()
        assert sample_world(cfg, 99).object_positions.tobytes() != sample_world(cfg, 100).object_positions.tobytes()

    def test_objects_have_independent_streams(self):
        one = tiny_world()
        two = WorldConfig(objects=one.objects + (ObjectSpec("https://e.x/other", 1, (0.01,) * 3, NORMAL),),
                          workspaces=one.workspaces, agent=one.agent)
        assert np.array_equal(sample_world(one, 5).object_positions[0], sample_world(two, 5).object_positions[0])

    @pytest.mark.parametrize("kw", [dict(dt=0), dict(grasp_distance_threshold=0), dict(slip_probability=1.5)])
    def test_invalid_config(self, kw):
        with pytest.raises(ValueError):
            tiny_world(**kw)

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            ObjectSpec("https://e.x/o", 1, (0.1,) * 3, (0.5, 0, 0.5, 1))


class TestSimulation:
    def test_no_fault_grasp(self, manifest):
        inst, clauses, cfg, sim = _simulate(manifest)
        assert not sim.slipped
        held = next(c for c in clauses if c["predicate"] == "IsHeldBy")
        v = eval_clause(held, sim.trace, sim.log, cfg)
        assert v.status == "pass" and v.measured["distance"] <= cfg.grasp_distance_threshold
        assert all(r.verdict.status == "pass" for r in evaluate_instance(clauses, sim.trace, sim.log, cfg))

    def test_events_ordered_with_room_after(self, manifest):
        _, _, _, sim = _simulate(manifest)
        ts = [sim.trace[e] for e in EVENTS]
        assert ts == sorted(set(ts)) and ts[0] == 1
        assert ts[-1] < sim.log.n_steps - 1

    def test_speed_definition(self, manifest):
        _, _, cfg, sim = _simulate(manifest, agent=UR10)
        ee = sim.log.ee
        manual = [0.0] + [math.dist(ee[i], ee[i - 1]) / cfg.dt for i in range(1, len(ee))]
        assert np.allclose(sim.log.ee_speed(), manual, rtol=0, atol=1e-12)
        assert sim.log.max_ee_speed() <= 1.0 + 1e-9

    def test_held_object_tracks_ee(self, manifest):
        _, _, cfg, sim = _simulate(manifest, agent=UR10, obj="can")
        i = sim.log.object_index[_instance(manifest, "can")["clauses"][-1]["roles"]["object"]]
        hz = cfg.objects[i].half_extents[2]
        a, b = sim.trace[EVENTS[1]], sim.trace[EVENTS[3]]
        gap = sim.log.ee[a:b] - sim.log.objects[a:b, i]
        assert np.allclose(gap, [0, 0, hz])

    def test_slip_matches_golden(self, manifest):
        gold = json.loads((GOLDEN / "slip_trace.json").read_text())
        inst, _, _, sim = _simulate(manifest, obj="ball", slip=1.0, seed=gold["seed"])
        assert inst["id"] == gold["instance"]
        assert sim.slipped
        assert sim.trace.times == gold["events"]
        assert sim.log.n_steps == gold["n_steps"]
        i = sim.log.object_index[inst["clauses"][0]["roles"]["object"]]
        assert np.allclose(sim.log.objects[-1, i], gold["final_object"], atol=1e-12)
        assert sim.log.max_ee_speed() == pytest.approx(gold["max_ee_speed"], abs=1e-12)

    def test_slip_effects(self, manifest):
        inst, clauses, cfg, sim = _simulate(manifest, obj="cube", slip=1.0, seed=3)
        i = sim.log.object_index[inst["clauses"][0]["roles"]["object"]]
        start, end = sim.log.objects[0, i], sim.log.objects[-1, i]
        assert math.hypot(*(end - start)[:2]) == pytest.approx(0.1, abs=1e-12)
        assert end[2] == start[2]
        assert 1.5 * 0.5 - 1e-9 <= sim.log.max_ee_speed() <= 3.0 * 0.5 + 1e-9
        held = next(c for c in clauses if c["predicate"] == "IsHeldBy")
        v = eval_clause(held, sim.trace, sim.log, cfg)
        assert v.status == "fail" and v.measured["distance"] > cfg.grasp_distance_threshold

    def test_suction_never_slips(self, manifest):
        _, _, _, sim = _simulate(manifest, agent=UR10, slip=1.0)
        assert not sim.slipped

    def test_suction_tall_object_collides(self, manifest):
        _, clauses, cfg, sim = _simulate(manifest, agent=UR10, obj="box", scale=1.0)
        k = sim.log.workspace_index[clauses[-1]["roles"]["workspace"]]
        assert sim.log.bin_displacement[-1, k] > 0.05
        coll = next(c for c in clauses if c["predicate"] == "DoesNotCollide")
        assert eval_clause(coll, sim.trace, sim.log, cfg).status == "fail"

    def test_displacement_monotone(self, manifest):
        _, _, _, sim = _simulate(manifest, agent=UR10, obj="box", scale=1.0)
        assert np.all(np.diff(sim.log.bin_displacement, axis=0) >= 0)

    @pytest.mark.parametrize("agent,scale", [(PANDA, 1.0), (UR10, 0.8)])
    def test_conservation_without_contact(self, manifest, agent, scale):
        for obj in ("screw", "box"):
            _, _, _, sim = _simulate(manifest, agent=agent, obj=obj, scale=scale)
            assert not sim.log.bin_displacement.any()
            assert not sim.log.bin_offset.any()

    def test_missing_events_in_instance(self, manifest):
        inst = dict(_instance(manifest), events=EVENTS[:3])
        p = point()
        cfg = world_config(inst["elements"], p, run_config([p]))
        with pytest.raises(UnresolvedBinding):
            simulate_pick_place(sample_world(cfg, 0), inst, cfg, 0)

    def test_crowding(self):
        pos = np.array([[0, 0, 0], [0.05, 0, 0], [0, 0.09, 0], [0.2, 0, 0]], dtype=float)
        assert crowding(pos, 0) == 2
        assert crowding(pos, 3) == 0

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, M64), obj=st.sampled_from(["screw", "box"]), agent=st.sampled_from([PANDA, UR10]))
    def test_timing_soundness(self, seed, obj, agent, manifest):
        _, clauses, cfg, sim = _simulate(manifest, agent=agent, obj=obj, slip=0.3, seed=seed)
        for c in clauses:
            v = eval_clause(c, sim.trace, sim.log, cfg)
            tm = c["timing"]
            if tm["kind"] == "after-event":
                assert v.timesteps == (sim.trace[tm["event"]] + 1,)
            elif tm["kind"] == "before-event":
                assert v.timesteps == (sim.trace[tm["event"]] - 1,)
            else:
                assert v.timesteps == tuple(range(sim.trace[tm["start"]], sim.trace[tm["end"]] + 1))


class TestEvaluation:
    def test_given_holds_on_table(self, manifest):
        _, clauses, cfg, sim = _simulate(manifest, seed=11)
        given_ = next(c for c in clauses if c["section"] == "Given")
        assert given_["roles"]["workspace"].endswith("/table")
        assert eval_clause(given_, sim.trace, sim.log, cfg).status == "pass"

    def test_collision_threshold_above(self):
        cfg = tiny_world()
        trace = EventTrace({e: t for e, t in zip(EVENTS, (2, 4, 6, 8))})
        disp = np.concatenate([np.zeros(3), np.linspace(0, 0.06, 6), np.full(3, 0.06)])
        log = synthetic_log(12, displacement=disp)
        c = clause("DoesNotCollide", {"agent": PANDA, "workspace": BIN}, during(0, 3))
        v = eval_clause(c, trace, log, cfg)
        assert v.status == "fail" and v.measured["displacement"] == pytest.approx(0.06)

    def test_missing_event(self):
        cfg = tiny_world()
        trace = EventTrace({EVENTS[0]: 2})
        log = synthetic_log(10)
        with pytest.raises(MissingEvent) as ei:
            eval_clause(clause("IsHeldBy", {"object": OBJ, "agent": PANDA}, after(1)), trace, log, cfg)
        assert ei.value.event == EVENTS[1]

    def test_no_step_after_last(self):
        cfg = tiny_world()
        trace = EventTrace({EVENTS[0]: 9})
        with pytest.raises(CoordinationError):
            eval_clause(clause("IsHeldBy", {"object": OBJ, "agent": PANDA}, after(0)), trace, synthetic_log(10), cfg)

    def test_trace_must_increase(self):
        with pytest.raises(ValueError):
            EventTrace({EVENTS[0]: 5, EVENTS[1]: 5})

    def test_located_uses_shifted_bin(self):
        cfg = tiny_world()
        trace = EventTrace({EVENTS[0]: 1})
        obj = np.tile([0.0, 0.8, 0.1], (4, 1))  # outside the bin at rest, inside once pushed 0.1 in +y
        log = synthetic_log(4, obj=obj)
        c = clause("IsLocatedAt", {"object": OBJ, "workspace": BIN}, after(0))
        assert eval_clause(c, trace, log, cfg).status == "fail"
        log.bin_offset[2:, 0] = [0.0, 0.1]
        assert eval_clause(c, trace, log, cfg).status == "pass"

    def test_bin_height_scale_lowers_the_top(self):
        trace = EventTrace({EVENTS[0]: 1})
        obj = np.tile([0.0, 0.6, 0.22], (4, 1))
        c = clause("IsLocatedAt", {"object": OBJ, "workspace": BIN}, after(0))
        assert eval_clause(c, trace, synthetic_log(4, obj=obj), tiny_world(bin_height_scale=0.9)).status == "pass"
        assert eval_clause(c, trace, synthetic_log(4, obj=obj), tiny_world(bin_height_scale=0.8)).status == "fail"

    def test_gating_marks_place_skipped(self, manifest):
        _, clauses, cfg, sim = _simulate(manifest, obj="nut", slip=1.0, seed=4)
        results = evaluate_instance(clauses, sim.trace, sim.log, cfg)
        status = {r.label: r.verdict.status for r in results}
        assert status["IsHeldBy (Then #1)"] == "fail"
        assert status["IsLocatedAt (Then #3)"] == "skipped"
        assert outcome(results) == ("IsHeldBy (Then #1)", "IsHeldBy (Then #1)")

    def test_outcome_passed_iff_all_pass(self, manifest):
        _, clauses, cfg, sim = _simulate(manifest)
        results = evaluate_instance(clauses, sim.trace, sim.log, cfg)
        assert outcome(results) == ("passed", None)


class TestSuite:
    def test_repetitions_times_instances(self, manifest):
        rep = run_suite(manifest, run_config([point()], repetitions=10))
        (combo,) = rep.combinations
        assert len(combo.records) == 140

    def test_gripper_without_faults_all_pass(self, manifest):
        rep = run_suite(manifest, run_config([point(PANDA, "normal", 0.8), point(PANDA, "dense", 0.8)]))
        for c in rep.combinations:
            assert c.percentages["passed"] == 100.0

    def test_percentages_partition(self, manifest):
        pts = [point(a, r, s) for a in (PANDA, UR10) for r in ("normal", "dense") for s in (0.9, 1.0)]
        rep = run_suite(manifest, run_config(pts, repetitions=3, slip=0.2, seed=8))
        for c in rep.combinations:
            assert sum(c.percentages.values()) == pytest.approx(100.0, abs=0.01)
            assert sum(c.counts.values()) == len(c.records)

    def test_collision_monotone_in_scale(self, manifest):
        scales = (0.7, 0.8, 0.85, 0.9, 0.95, 1.0, 1.1)
        rep = run_suite(manifest, run_config([point(UR10, "normal", s) for s in scales], repetitions=3, seed=2))
        fails = [c.counts["DoesNotCollide (Then #2)"] for c in rep.combinations]
        assert fails == sorted(fails) and fails[0] == 0 and fails[-1] > 0

    def test_independent_of_workers(self, manifest):
        run = run_config([point(PANDA, "dense", 1.0), point(UR10, "normal", 0.9)], repetitions=4, slip=0.3, seed=17)
        a, b = run_suite(manifest, run, workers=1), run_suite(manifest, run, workers=3)
        assert a.to_json_text() == b.to_json_text()
        assert a.to_csv() == b.to_csv()

    def test_execution_seed_depends_on_everything(self):
        base = execution_seed(1, point(), "x-001", 0)
        assert len({base, execution_seed(2, point(), "x-001", 0), execution_seed(1, point(UR10), "x-001", 0),
                    execution_seed(1, point(scale=0.9), "x-001", 0), execution_seed(1, point(), "x-002", 0),
                    execution_seed(1, point(), "x-001", 1)}) == 6

    def test_csv_columns(self, manifest):
        rep = run_suite(manifest, run_config([point()]))
        lines = rep.to_csv().splitlines()
        assert lines[0] == "agent,position_range,bin_scale,instance,repetition,outcome,failing_clause,max_ee_speed"
        assert len(lines) == 15

    def test_unknown_agent(self, manifest):
        p = point(agent="https://my.url/models/lab/agent/ghost")
        with pytest.raises(UnresolvedBinding):
            run_suite(manifest, run_config([p]))


class TestRunConfig:
    def test_fixture_grid(self):
        run = RunConfig.load(fixture_path("run.json"), lambda s: s.replace("lab:", "https://my.url/models/lab/"))
        assert len(run.sweep) == 12 and run.repetitions == 10 and run.slip_probability == 0.1
        assert {p.agent for p in run.sweep} == {PANDA, UR10}
        assert {p.bin_height_scale for p in run.sweep} == {0.8, 0.9, 1.0}

    @pytest.mark.parametrize("reps", [0, -1, 1.5])
    def test_bad_repetitions(self, reps):
        with pytest.raises(ValueError):
            RunConfig([point()], repetitions=reps)

    def test_duplicate_combination(self):
        with pytest.raises(ValueError):
            RunConfig([point(), point()])

    def test_explicit_list_form(self):
        run = RunConfig.from_json({"sweep": [{"agent": PANDA, "position_range": list(DENSE), "bin_height_scale": 0.9}]})
        assert run.sweep[0].position_range == DENSE


class TestSpeedSummary:
    def test_single_value(self):
        s = summarize_speeds([0.7])
        assert s.min == s.q1 == s.median == s.q3 == s.max == 0.7

    def test_empty(self):
        with pytest.raises(EmptySample):
            summarize_speeds([])

    def test_quartiles_match_statistics_module(self):
        vals = [0.31, 0.9, 0.52, 1.4, 0.77, 0.5, 1.01]
        s = summarize_speeds(vals)
        q1, med, q3 = statistics.quantiles(vals, n=4, method="inclusive")
        assert (s.q1, s.median, s.q3) == pytest.approx((q1, med, q3))
        assert (s.min, s.max) == (min(vals), max(vals))

    def test_suction_median_at_nominal(self, manifest):
        rep = run_suite(manifest, run_config([point(UR10, "normal", 0.8)], repetitions=3))
        s = rep.speed_by_agent()[UR10]
        assert abs(s.median - 1.0) < 0.01

    def test_slips_raise_max_speed(self, manifest):
        rep = run_suite(manifest, run_config([point(PANDA, "dense", 0.8)], repetitions=3, slip=1.0))
        s = summarize_speeds(r.max_ee_speed for r in rep.records if r.slipped)
        assert s.max >= 1.5 * 0.5
        assert s.min > 0.5
