"""Run a manifest across a sweep and aggregate outcomes."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from robobdd.codegen import clause_labels
from robobdd.errors import EmptySample
from robobdd.harness.evaluate import ClauseResult, evaluate_instance, outcome
from robobdd.harness.rng import hash64
from robobdd.harness.sim import simulate_pick_place
from robobdd.harness.world import RunConfig, SweepPoint, WorldConfig, sample_world, world_config

CSV_COLUMNS = ("agent", "position_range", "bin_scale", "instance", "repetition",
               "outcome", "failing_clause", "max_ee_speed")


@dataclass
class ExecutionRecord:
    point: SweepPoint
    instance: str
    repetition: int
    seed: int
    results: list[ClauseResult]
    max_ee_speed: float
    slipped: bool = False

    @property
    def outcome(self) -> str:
        return outcome(self.results)[0]

    @property
    def failing_clause(self) -> str | None:
        return outcome(self.results)[1]

    @property
    def passed(self) -> bool:
        return self.failing_clause is None


@dataclass(frozen=True)
class SpeedSummary:
    n: int
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "min", "q1", "median", "q3", "max")}


def summarize_speeds(values) -> SpeedSummary:
    a = np.asarray(list(values), dtype=float)
    if a.size == 0:
        raise EmptySample("no executions to summarise")
    q = np.percentile(a, [0, 25, 50, 75, 100])
    return SpeedSummary(int(a.size), *(float(v) for v in q))


@dataclass
class CombinationReport:
    point: SweepPoint
    records: list[ExecutionRecord]
    categories: list[str]

    @property
    def counts(self) -> dict[str, int]:
        c = {k: 0 for k in self.categories}
        for r in self.records:
            c[r.outcome] = c.get(r.outcome, 0) + 1
        return c

    @property
    def percentages(self) -> dict[str, float]:
        n = len(self.records)
        return {k: 100.0 * v / n for k, v in self.counts.items()}

    def speed_summary(self) -> SpeedSummary | None:
        ok = [r.max_ee_speed for r in self.records if r.passed]
        return summarize_speeds(ok) if ok else None

    def to_json(self) -> dict:
        s = self.speed_summary()
        return {
            "agent": self.point.agent,
            "position_range": self.point.range_name,
            "bin_scale": self.point.bin_height_scale,
            "executions": len(self.records),
            "counts": self.counts,
            "percentages": self.percentages,
            "speed_passed": s.to_json() if s else None,
        }


@dataclass
class RunReport:
    combinations: list[CombinationReport]
    master_seed: int
    repetitions: int
    categories: list[str] = field(default_factory=list)

    @property
    def records(self) -> list[ExecutionRecord]:
        return [r for c in self.combinations for r in c.records]

    def speed_by_agent(self) -> dict[str, SpeedSummary | None]:
        out = {}
        for agent in sorted({c.point.agent for c in self.combinations}):
            ok = [r.max_ee_speed for r in self.records if r.point.agent == agent and r.passed]
            out[agent] = summarize_speeds(ok) if ok else None
        return out

    def to_json(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "repetitions": self.repetitions,
            "categories": self.categories,
            "combinations": [c.to_json() for c in self.combinations],
            "speed_by_agent": {a: (s.to_json() if s else None) for a, s in self.speed_by_agent().items()},
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow([r.point.agent, r.point.range_name, repr(r.point.bin_height_scale), r.instance,
                        r.repetition, r.outcome, r.failing_clause or "", repr(r.max_ee_speed)])
        return buf.getvalue()

    def table(self) -> str:
        """Plain-text outcome table, one row per combination."""
        cats = self.categories
        head = ["agent", "range", "scale", "n"] + cats
        rows = [head]
        for c in self.combinations:
            pct = c.percentages
            rows.append([c.point.agent.rsplit("/", 1)[-1], c.point.range_name, f"{c.point.bin_height_scale:g}",
                         str(len(c.records))] + [f"{pct[k]:.1f}" for k in cats])
        widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
        return "\n".join("  ".join(x.ljust(wd) for x, wd in zip(r, widths)).rstrip() for r in rows) + "\n"


def execution_seed(master_seed: int, point: SweepPoint, instance_id: str, repetition: int) -> int:
    return hash64(master_seed, point.agent, point.range_name, repr(point.bin_height_scale), instance_id, repetition)


def bind_agent(instance: dict, agent: str) -> list[dict]:
    """Clauses with every agent role rebound to the sweep agent."""
    out = []
    for c in instance["clauses"]:
        if "agent" in c["roles"]:
            c = {**c, "roles": {**c["roles"], "agent": agent}}
        out.append(c)
    return out


def execute(instance: dict, clauses: list[dict], cfg: WorldConfig, point: SweepPoint,
            repetition: int, seed: int) -> ExecutionRecord:
    state = sample_world(cfg, seed)
    sim = simulate_pick_place(state, instance, cfg, seed)
    results = evaluate_instance(clauses, sim.trace, sim.log, cfg)
    return ExecutionRecord(point, instance["id"], repetition, seed, results, sim.log.max_ee_speed(), sim.slipped)


def run_suite(manifest: dict, run: RunConfig, workers: int = 1) -> RunReport:
    """Execute every instance ``run.repetitions`` times under every sweep point.

    Execution seeds depend only on (master seed, sweep point, instance id,
    repetition), so results do not depend on ``workers`` or scheduling.
    """
    instances = sorted(manifest["instances"], key=lambda i: i["id"])
    categories = ["passed"]
    for inst in instances:
        for lab in clause_labels(inst["clauses"]):
            if lab not in categories:
                categories.append(lab)

    jobs = []
    for point in run.sweep:
        for inst in instances:
            cfg = world_config(inst["elements"], point, run)
            clauses = bind_agent(inst, point.agent)
            for rep in range(run.repetitions):
                jobs.append((inst, clauses, cfg, point, rep, execution_seed(run.master_seed, point, inst["id"], rep)))

    def go(job):
        return execute(*job)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(go, jobs))
    else:
        records = [go(j) for j in jobs]

    combos = []
    for point in run.sweep:
        recs = [r for r in records if r.point == point]
        recs.sort(key=lambda r: (r.instance, r.repetition))
        combos.append(CombinationReport(point, recs, categories))
    return RunReport(combos, run.master_seed, run.repetitions, categories)

