"""Builders for synthetic worlds and logs."""

import numpy as np

from robobdd.harness import AgentSpec, ObjectSpec, RunConfig, StateLog, SweepPoint, WorkspaceSpec, WorldConfig

NS = "https://my.url/models/lab/"
PANDA, UR10 = NS + "agent/panda", NS + "agent/ur10"
NORMAL, DENSE = (0.25, -0.4, 0.6, 0.4), (0.35, -0.3, 0.6, 0.3)
EVENTS = [NS + f"event/{e}" for e in ("pickup_start", "pickup_end", "place_start", "place_end")]
OBJ, BIN, TABLE = NS + "object/o", NS + "workspace/bin", NS + "workspace/table"


def point(agent=PANDA, rng="normal", scale=1.0):
    return SweepPoint(agent, rng, NORMAL if rng == "normal" else DENSE, scale)


def run_config(points, repetitions=1, slip=0.0, seed=0):
    return RunConfig(list(points), repetitions=repetitions, master_seed=seed, slip_probability=slip)


def tiny_world(**kw):
    return WorldConfig(
        objects=(ObjectSpec(OBJ, 0.1, (0.02, 0.02, 0.02), NORMAL),),
        workspaces=(WorkspaceSpec(BIN, (-0.15, 0.45, 0.0, 0.15, 0.75, 0.25), "bin", 0.25),
                    WorkspaceSpec(TABLE, (0.2, -0.45, 0.0, 0.7, 0.45, 0.2), "table")),
        agent=AgentSpec(PANDA, "gripper"),
        **kw,
    )


def synthetic_log(T, ee=None, obj=None, displacement=None, dt=0.01):
    """StateLog for ``tiny_world`` with one object and the bin's push history."""
    ee = np.zeros((T, 3)) if ee is None else np.asarray(ee, dtype=float)
    obj = np.zeros((T, 3)) if obj is None else np.asarray(obj, dtype=float)
    disp = np.zeros((T, 2))
    if displacement is not None:
        disp[:, 0] = displacement
    return StateLog(
        dt=dt,
        ee=ee,
        objects=obj[:, None, :],
        bin_offset=np.zeros((T, 2, 2)),
        bin_displacement=disp,
        object_index={OBJ: 0},
        workspace_index={BIN: 0, TABLE: 1},
    )


def clause(predicate, roles, timing, section="Then"):
    return {"section": section, "predicate": predicate, "roles": roles, "timing": timing}


def after(i):
    return {"kind": "after-event", "event": EVENTS[i]}


def before(i):
    return {"kind": "before-event", "event": EVENTS[i]}


def during(i, j):
    return {"kind": "during", "start": EVENTS[i], "end": EVENTS[j]}
