"""World configuration, run configuration and initial-state sampling."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from robobdd.harness.rng import XorShift64Star, hash64

NOMINAL_SPEED = {"gripper": 0.5, "suction": 1.0}

NORMAL_RANGE = (0.25, -0.4, 0.6, 0.4)
DENSE_RANGE = (0.35, -0.3, 0.6, 0.3)


@dataclass(frozen=True)
class ObjectSpec:
    iri: str
    mass_kg: float
    half_extents: tuple[float, float, float]
    position_range: tuple[float, float, float, float]  # x_min, y_min, x_max, y_max

    def __post_init__(self):
        xmin, ymin, xmax, ymax = self.position_range
        if not (xmin < xmax and ymin < ymax):
            raise ValueError(f"{self.iri}: position range needs min < max per axis")
        if min(self.half_extents) <= 0:
            raise ValueError(f"{self.iri}: half extents must be positive")


@dataclass(frozen=True)
class WorkspaceSpec:
    iri: str
    aabb: tuple[float, float, float, float, float, float]
    kind: str  # table | bin
    bin_base_height: Optional[float] = None

    def top(self, scale: float) -> float:
        """Top of the workspace volume; bins are scaled in height."""
        if self.kind == "bin":
            base = self.bin_base_height if self.bin_base_height is not None else self.aabb[5] - self.aabb[2]
            return self.aabb[2] + base * scale
        return self.aabb[5]

    @property
    def center_xy(self) -> tuple[float, float]:
        return ((self.aabb[0] + self.aabb[3]) / 2, (self.aabb[1] + self.aabb[4]) / 2)


@dataclass(frozen=True)
class AgentSpec:
    iri: str
    ee: str  # gripper | suction

    @property
    def nominal_speed(self) -> float:
        return NOMINAL_SPEED[self.ee]


@dataclass(frozen=True)
class WorldConfig:
    objects: tuple[ObjectSpec, ...]
    workspaces: tuple[WorkspaceSpec, ...]
    agent: AgentSpec
    bin_height_scale: float = 1.0
    transport_height: float = 0.3
    dt: float = 0.01
    slip_probability: float = 0.0
    grasp_distance_threshold: float = 0.05
    collision_displacement_threshold: float = 0.05
    home: tuple[float, float, float] = (0.4, 0.0, 0.3)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.grasp_distance_threshold <= 0 or self.collision_displacement_threshold <= 0:
            raise ValueError("thresholds must be positive")
        if not 0.0 <= self.slip_probability <= 1.0:
            raise ValueError("slip_probability must be in [0, 1]")
        if self.agent.ee not in NOMINAL_SPEED:
            raise ValueError(f"unknown end-effector kind {self.agent.ee!r}")

    def object_index(self, iri: str) -> int:
        for i, o in enumerate(self.objects):
            if o.iri == iri:
                return i
        raise KeyError(iri)

    def workspace_index(self, iri: str) -> int:
        for i, w in enumerate(self.workspaces):
            if w.iri == iri:
                return i
        raise KeyError(iri)


@dataclass
class WorldState:
    object_positions: np.ndarray  # (n_objects, 3)
    ee_position: np.ndarray  # (3,)


def sample_world(cfg: WorldConfig, seed: int) -> WorldState:
    """Uniform (x, y) per object from its range; each object has its own stream.

    Stream seed is ``seed XOR hash64(object iri)``, so adding an object never
    changes where the others land.
    """
    pos = np.empty((len(cfg.objects), 3))
    for i, obj in enumerate(cfg.objects):
        rng = XorShift64Star(seed ^ hash64(obj.iri))
        xmin, ymin, xmax, ymax = obj.position_range
        pos[i] = (rng.uniform_range(xmin, xmax), rng.uniform_range(ymin, ymax), obj.half_extents[2])
    return WorldState(pos, np.array(cfg.home, dtype=float))


# --- run configuration -------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    agent: str
    range_name: str
    position_range: tuple[float, float, float, float]
    bin_height_scale: float

    def key(self) -> tuple:
        return (self.agent, self.range_name, self.bin_height_scale)


@dataclass
class RunConfig:
    sweep: list[SweepPoint]
    repetitions: int = 10
    master_seed: int = 0
    slip_probability: float = 0.0
    dt: float = 0.01
    transport_height: float = 0.3
    grasp_distance_threshold: float = 0.05
    collision_displacement_threshold: float = 0.05

    def __post_init__(self):
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise ValueError("repetitions must be an integer >= 1")
        if not self.sweep:
            raise ValueError("sweep must contain at least one combination")
        keys = [p.key() for p in self.sweep]
        if len(keys) != len(set(keys)):
            raise ValueError("duplicate sweep combinations")

    @classmethod
    def from_json(cls, obj: dict, expand_iri=lambda s: s) -> "RunConfig":
        sw = obj.get("sweep")
        if isinstance(sw, dict):
            ranges = sw.get("position_ranges") or {"normal": list(NORMAL_RANGE)}
            points = [
                SweepPoint(expand_iri(a), name, tuple(float(v) for v in rng), float(scale))
                for a in sw["agents"]
                for name, rng in ranges.items()
                for scale in sw.get("bin_height_scales", [1.0])
            ]
        elif isinstance(sw, list):
            points = [
                SweepPoint(expand_iri(p["agent"]), p.get("position_range_name", "custom"),
                           tuple(float(v) for v in p["position_range"]), float(p.get("bin_height_scale", 1.0)))
                for p in sw
            ]
        else:
            raise ValueError("run config needs a 'sweep' object or list")
        for p in points:
            if len(p.position_range) != 4 or not all(math.isfinite(v) for v in p.position_range):
                raise ValueError(f"bad position range for {p.range_name!r}")
        faults = obj.get("faults", {})
        return cls(
            sweep=points,
            repetitions=obj.get("repetitions", 10),
            master_seed=int(obj.get("master_seed", 0)),
            slip_probability=float(faults.get("slip_probability", 0.0)),
            dt=float(obj.get("dt", 0.01)),
            transport_height=float(obj.get("transport_height", 0.3)),
            grasp_distance_threshold=float(obj.get("grasp_distance_threshold", 0.05)),
            collision_displacement_threshold=float(obj.get("collision_displacement_threshold", 0.05)),
        )

    @classmethod
    def load(cls, path, expand_iri=lambda s: s) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh), expand_iri)


def world_config(elements: dict, point: SweepPoint, run: RunConfig) -> WorldConfig:
    """Build the world for one manifest instance under one sweep point.

    The sweep agent stands in for whatever agent the scenario binds.
    """
    objects, workspaces, agent = [], [], None
    for iri in sorted(elements):
        cfg = elements[iri]
        if cfg["kind"] == "object":
            objects.append(ObjectSpec(iri, cfg["mass_kg"], tuple(cfg["half_extents_m"]), point.position_range))
        elif cfg["kind"] == "workspace":
            workspaces.append(WorkspaceSpec(iri, tuple(cfg["aabb_m"]), cfg["workspace_kind"],
                                            cfg.get("bin_base_height_m")))
        elif cfg["kind"] == "agent" and iri == point.agent:
            agent = AgentSpec(iri, cfg["ee"])
    if agent is None:
        from robobdd.errors import UnresolvedBinding

        raise UnresolvedBinding(f"sweep agent {point.agent} is not an element of the scenario's scene")
    return WorldConfig(
        objects=tuple(objects),
        workspaces=tuple(workspaces),
        agent=agent,
        bin_height_scale=point.bin_height_scale,
        transport_height=run.transport_height,
        dt=run.dt,
        slip_probability=run.slip_probability,
        grasp_distance_threshold=run.grasp_distance_threshold,
        collision_displacement_threshold=run.collision_displacement_threshold,
    )
