"""Turn clauses into verdicts against a simulated execution."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from robobdd.codegen import clause_labels
from robobdd.errors import CoordinationError, MissingEvent
from robobdd.harness.sim import EventTrace, StateLog
from robobdd.harness.world import WorldConfig

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass
class Verdict:
    status: str
    timesteps: tuple[int, ...]
    measured: dict = field(default_factory=dict)
    reason: str = ""


def window(timing: dict, trace: EventTrace, n_steps: int) -> tuple[int, ...]:
    """Timesteps a clause is judged on.

    ``after e`` is the first step strictly after ``e``; ``before e`` the last
    step strictly before it; ``during a .. b`` every step from ``a`` to ``b``.
    """
    for ev in (v for k, v in timing.items() if k != "kind"):
        if ev not in trace:
            raise MissingEvent(ev)
    kind = timing["kind"]
    if kind == "after-event":
        t = trace[timing["event"]] + 1
        if t >= n_steps:
            raise CoordinationError(f"no timestep after {timing['event']}")
        return (t,)
    if kind == "before-event":
        t = trace[timing["event"]] - 1
        if t < 0:
            raise CoordinationError(f"no timestep before {timing['event']}")
        return (t,)
    if kind == "during":
        a, b = trace[timing["start"]], trace[timing["end"]]
        if a > b:
            raise CoordinationError(f"window {timing['start']} .. {timing['end']} is empty")
        return tuple(range(a, b + 1))
    raise CoordinationError(f"unknown timing kind {kind!r}")


def _workspace_box(cfg: WorldConfig, log: StateLog, ws: str, t: int) -> np.ndarray:
    k = log.workspace_index[ws]
    w = cfg.workspaces[k]
    lo = np.array(w.aabb[:3], dtype=float)
    hi = np.array(w.aabb[3:], dtype=float)
    lo[:2] += log.bin_offset[t, k]
    hi[:2] += log.bin_offset[t, k]
    hi[2] = w.top(cfg.bin_height_scale)
    return np.concatenate([lo, hi])


def eval_clause(clause: dict, trace: EventTrace, log: StateLog, cfg: WorldConfig) -> Verdict:
    steps = window(clause["timing"], trace, log.n_steps)
    pred, roles = clause["predicate"], clause["roles"]
    if pred == "IsLocatedAt":
        i = log.object_index[roles["object"]]
        for t in steps:
            box = _workspace_box(cfg, log, roles["workspace"], t)
            p = log.objects[t, i]
            if not (np.all(p >= box[:3]) and np.all(p <= box[3:])):
                return Verdict(FAIL, steps, {"position": p.tolist(), "timestep": t},
                               f"{roles['object']} outside {roles['workspace']} at t={t}")
        return Verdict(PASS, steps, {"position": log.objects[steps[-1], i].tolist()})
    if pred == "IsHeldBy":
        i = log.object_index[roles["object"]]
        idx = np.array(steps)
        dist = np.linalg.norm(log.ee[idx] - log.objects[idx, i], axis=1)
        worst = float(dist.max())
        ok = worst <= cfg.grasp_distance_threshold
        return Verdict(PASS if ok else FAIL, steps, {"distance": worst},
                       "" if ok else f"EE-object distance {worst:.4f} m exceeds threshold")
    if pred == "DoesNotCollide":
        k = log.workspace_index[roles["workspace"]]
        acc = log.bin_displacement[:, k]
        moved = float(acc[steps[-1]] - acc[steps[0]]) if len(steps) > 1 else float(acc[steps[0]])
        ok = moved <= cfg.collision_displacement_threshold
        return Verdict(PASS if ok else FAIL, steps, {"displacement": moved},
                       "" if ok else f"{roles['workspace']} displaced {moved:.4f} m")
    raise CoordinationError(f"no evaluator for predicate {pred!r}")


@dataclass
class ClauseResult:
    label: str
    section: str
    predicate: str
    verdict: Verdict


def evaluate_instance(clauses: list[dict], trace: EventTrace, log: StateLog, cfg: WorldConfig) -> list[ClauseResult]:
    """Evaluate every clause in order, skipping location checks on dropped objects.

    Once an ``IsHeldBy`` clause fails, any later ``Then`` location clause on
    the same object whose window opens after that check is marked skipped:
    its failure would only restate the lost grasp.
    """
    labels = clause_labels(clauses)
    dropped: dict[str, int] = {}
    out = []
    for label, c in zip(labels, clauses):
        obj = c["roles"].get("object")
        if (c["section"] == "Then" and c["predicate"] == "IsLocatedAt" and obj in dropped
                and window(c["timing"], trace, log.n_steps)[0] > dropped[obj]):
            v = Verdict(SKIPPED, (), {}, f"grasp on {obj} already failed")
        else:
            v = eval_clause(c, trace, log, cfg)
            if c["predicate"] == "IsHeldBy" and v.status == FAIL:
                dropped.setdefault(obj, v.timesteps[-1])
        out.append(ClauseResult(label, c["section"], c["predicate"], v))
    return out


def outcome(results: list[ClauseResult]) -> tuple[str, str | None]:
    """``("passed", None)`` or the label of the first clause that did not pass."""
    for r in results:
        if r.verdict.status != PASS:
            return r.label, r.label
    return "passed", None
