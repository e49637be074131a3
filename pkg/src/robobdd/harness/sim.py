"""Kinematic pick-and-place simulator.

The arm is a point end-effector moving in straight lines at the agent's
nominal speed.  One step covers ``speed * dt`` metres; the final step of a
segment is shortened so the goal is reached exactly.  Phases, in order:

    approach -> grasp dwell -> lift -> transport -> lower -> release -> retreat

A gripper holds objects by their centre.  A suction cup holds them by the top
face, so the load hangs one half-height lower.  While a held load is carried
below the rim of a bin and overlaps its footprint, the bin is pushed along the
direction of motion just far enough to clear the load.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from robobdd.errors import UnresolvedBinding
from robobdd.harness.rng import XorShift64Star, hash64
from robobdd.harness.world import WorldConfig, WorldState

GRASP_DWELL_STEPS = 5
SLIP_DISTANCE = 0.1
CROWDING_RADIUS = 0.1
SPIKE_FACTOR = (1.5, 3.0)
EVENT_ROLES = ("pickup_start", "pickup_end", "place_start", "place_end")


@dataclass
class EventTrace:
    times: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        ts = list(self.times.values())
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError(f"event timesteps must be strictly increasing: {self.times}")

    def __getitem__(self, event: str) -> int:
        return self.times[event]

    def __contains__(self, event: str) -> bool:
        return event in self.times


@dataclass
class StateLog:
    """Time-indexed world state: step ``t`` is at time ``t * dt``."""

    dt: float
    ee: np.ndarray  # (T, 3)
    objects: np.ndarray  # (T, N, 3)
    bin_offset: np.ndarray  # (T, W, 2)
    bin_displacement: np.ndarray  # (T, W), accumulated push distance
    object_index: dict[str, int]
    workspace_index: dict[str, int]

    @property
    def n_steps(self) -> int:
        return self.ee.shape[0]

    def ee_speed(self) -> np.ndarray:
        v = np.zeros(self.n_steps)
        if self.n_steps > 1:
            v[1:] = np.linalg.norm(np.diff(self.ee, axis=0), axis=1) / self.dt
        return v

    def max_ee_speed(self) -> float:
        return float(self.ee_speed().max())


@dataclass(frozen=True)
class PickPlacePlan:
    target: str
    bin: str
    events: tuple[str, str, str, str]


@dataclass
class SimResult:
    trace: EventTrace
    log: StateLog
    slipped: bool


def plan_from_instance(instance: dict, cfg: WorldConfig) -> PickPlacePlan:
    """Read the object, destination bin and event names off a manifest instance."""
    events = tuple(instance["events"])
    if len(events) != 4:
        raise UnresolvedBinding(f"{instance['id']}: pick-place behaviour needs 4 events, got {len(events)}")
    clauses = instance["clauses"]
    target = next((c["roles"]["object"] for c in clauses if c["predicate"] == "IsHeldBy"), None)
    if target is None:
        target = next((c["roles"]["object"] for c in clauses if "object" in c["roles"]), None)
    bins = {w.iri for w in cfg.workspaces if w.kind == "bin"}
    dest = None
    for c in clauses:
        if c["section"] == "Then" and c["predicate"] == "IsLocatedAt" and c["roles"]["workspace"] in bins:
            dest = c["roles"]["workspace"]
    if dest is None:
        dest = next((c["roles"]["workspace"] for c in clauses
                     if c["predicate"] == "DoesNotCollide" and c["roles"]["workspace"] in bins), None)
    if target is None or dest is None:
        raise UnresolvedBinding(f"{instance['id']}: cannot find target object and destination bin")
    return PickPlacePlan(target, dest, events)  # type: ignore[arg-type]


def segment(start: np.ndarray, goal: np.ndarray, speed: float, dt: float) -> np.ndarray:
    """Waypoints after ``start`` up to and including ``goal``."""
    delta = goal - start
    dist = float(np.linalg.norm(delta))
    if dist == 0.0:
        return np.empty((0, 3))
    step = speed * dt
    n = max(1, math.ceil(dist / step - 1e-9))
    frac = np.minimum(np.arange(1, n + 1) * step / dist, 1.0)
    return start + frac[:, None] * delta


def crowding(positions: np.ndarray, target: int, radius: float = CROWDING_RADIUS) -> int:
    d = np.linalg.norm(positions[:, :2] - positions[target, :2], axis=1)
    d[target] = np.inf
    return int(np.count_nonzero(d < radius))


def simulate_pick_place(state: WorldState, instance: dict | PickPlacePlan, cfg: WorldConfig, seed: int) -> SimResult:
    """Run the phase script for one manifest instance (or an explicit plan)."""
    plan = instance if isinstance(instance, PickPlacePlan) else plan_from_instance(instance, cfg)
    ti = cfg.object_index(plan.target)
    bi = cfg.workspace_index(plan.bin)
    obj = cfg.objects[ti]
    hz = obj.half_extents[2]
    speed = cfg.agent.nominal_speed
    dt = cfg.dt
    hang = 0.0 if cfg.agent.ee == "gripper" else hz  # load centre sits this far below the EE

    rng = XorShift64Star(seed ^ hash64("fault-model"))
    u_slip, u_dir, u_spike = rng.uniform(), rng.uniform(), rng.uniform()

    p0 = state.object_positions[ti].copy()
    home = state.ee_position.astype(float)
    grasp_pt = p0 + np.array([0.0, 0.0, hang])

    slipped = False
    if cfg.agent.ee == "gripper" and cfg.slip_probability > 0:
        crowd = min(1, crowding(state.object_positions, ti))
        slipped = u_slip < cfg.slip_probability * (1 + crowd)
    theta = 2 * math.pi * u_dir
    heading = np.array([math.cos(theta), math.sin(theta), 0.0])

    parts = [home[None, :]]
    marks = {}

    t = 1
    approach = segment(home, grasp_pt, speed, dt)
    if len(approach) == 0:
        approach = grasp_pt[None, :]
    parts.append(approach)
    marks["pickup_start"] = t
    t += len(approach)

    dwell = np.repeat(grasp_pt[None, :], GRASP_DWELL_STEPS, axis=0)
    slip_step = t
    if slipped:
        spike = speed * (SPIKE_FACTOR[0] + (SPIKE_FACTOR[1] - SPIKE_FACTOR[0]) * u_spike)
        dwell[:] = grasp_pt + heading * spike * dt
    parts.append(dwell)
    t += len(dwell)
    attach_step = t - 1

    cur = dwell[-1]
    lift = segment(cur, np.array([cur[0], cur[1], cfg.transport_height]), speed, dt)
    parts.append(lift)
    t += len(lift)
    marks["pickup_end"] = t - 1
    cur = lift[-1] if len(lift) else cur

    bx, by = cfg.workspaces[bi].center_xy
    transport = segment(cur, np.array([bx, by, cfg.transport_height]), speed, dt)
    transport_start = t
    parts.append(transport)
    t += len(transport)
    marks["place_start"] = t - 1
    cur = transport[-1] if len(transport) else cur

    floor = cfg.workspaces[bi].aabb[2]
    lower = segment(cur, np.array([cur[0], cur[1], floor + hz + hang]), speed, dt)
    parts.append(lower)
    t += len(lower)
    cur = lower[-1] if len(lower) else cur

    parts.append(cur[None, :])
    marks["place_end"] = t
    release_step = t
    t += 1

    retreat = segment(cur, np.array([cur[0], cur[1], cfg.transport_height]), speed, dt)
    if len(retreat) == 0:
        retreat = cur[None, :]
    parts.append(retreat)

    ee = np.concatenate(parts)
    T = ee.shape[0]
    objects = np.repeat(state.object_positions[None, :, :], T, axis=0)
    held = np.zeros(T, dtype=bool)
    if not slipped:
        held[attach_step:release_step] = True
        objects[held, ti] = ee[held] - np.array([0.0, 0.0, hang])
        objects[release_step:, ti] = objects[release_step - 1, ti]
    else:
        objects[slip_step:, ti] = p0 + heading * SLIP_DISTANCE

    offsets, disp = _push_bins(cfg, ee, objects[:, ti], held, transport_start, obj.half_extents, T)

    trace = EventTrace({ev: marks[role] for ev, role in zip(plan.events, EVENT_ROLES)})
    log = StateLog(
        dt=dt,
        ee=ee,
        objects=objects,
        bin_offset=offsets,
        bin_displacement=disp,
        object_index={o.iri: i for i, o in enumerate(cfg.objects)},
        workspace_index={w.iri: i for i, w in enumerate(cfg.workspaces)},
    )
    return SimResult(trace, log, slipped)


def _push_bins(cfg: WorldConfig, ee, load, held, start, half, T):
    W = len(cfg.workspaces)
    offsets = np.zeros((T, W, 2))
    disp = np.zeros((T, W))
    bins = [(k, w, w.top(cfg.bin_height_scale)) for k, w in enumerate(cfg.workspaces) if w.kind == "bin"]
    if not bins:
        return offsets, disp
    hx, hy, hz = half
    highest = max(top for _, _, top in bins)
    steps = np.zeros(T, dtype=bool)
    steps[start:] = True
    steps[1:] &= held[1:] & (load[1:, 2] - hz < highest) & np.any(ee[1:, :2] != ee[:-1, :2], axis=1)
    steps[0] = False
    off = np.zeros((W, 2))
    acc = np.zeros(W)
    for t in np.flatnonzero(steps):
        step = ee[t, :2] - ee[t - 1, :2]
        d = step / math.hypot(step[0], step[1])
        c = load[t]
        moved = False
        for k, w, top in bins:
            if c[2] - hz >= top:
                continue
            x0, y0 = w.aabb[0] + off[k, 0], w.aabb[1] + off[k, 1]
            x1, y1 = w.aabb[3] + off[k, 0], w.aabb[4] + off[k, 1]
            if not (c[0] + hx > x0 and c[0] - hx < x1 and c[1] + hy > y0 and c[1] - hy < y1):
                continue
            push = _separation(d, (c[0] - hx, c[1] - hy, c[0] + hx, c[1] + hy), (x0, y0, x1, y1))
            off[k] += push * d
            acc[k] += push
            moved = True
        if moved:
            offsets[t:] = off
            disp[t:] = acc
    return offsets, disp


def _separation(d, load, box) -> float:
    """Smallest push along unit ``d`` that makes the two footprints disjoint."""
    best = math.inf
    for axis in (0, 1):
        if d[axis] > 0:
            best = min(best, (load[axis + 2] - box[axis]) / d[axis])
        elif d[axis] < 0:
            best = min(best, (load[axis] - box[axis + 2]) / d[axis])
    return best
