"""Rewrite the golden files under tests/golden from the bundled fixture.

Only run this after checking a diff by hand; the goldens are the reference
the test suite compares against.
"""

import json
from pathlib import Path

from robobdd import codegen, fixture_path
from robobdd import vocab as V
from robobdd.dsl import load_project
from robobdd.harness import RunConfig, SweepPoint, sample_world, simulate_pick_place, world_config
from robobdd.kg import serialize_jsonld

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"
SLIP_SEED = 7


def slip_trace(manifest: dict) -> dict:
    inst = manifest["instances"][0]
    point = SweepPoint("https://my.url/models/lab/agent/panda", "normal", (0.25, -0.4, 0.6, 0.4), 1.0)
    run = RunConfig([point], repetitions=1, slip_probability=1.0)
    cfg = world_config(inst["elements"], point, run)
    sim = simulate_pick_place(sample_world(cfg, SLIP_SEED), inst, cfg, SLIP_SEED)
    ti = sim.log.object_index[inst["clauses"][0]["roles"]["object"]]
    return {
        "instance": inst["id"],
        "seed": SLIP_SEED,
        "events": sim.trace.times,
        "n_steps": sim.log.n_steps,
        "initial_object": sim.log.objects[0, ti].tolist(),
        "final_object": sim.log.objects[-1, ti].tolist(),
        "max_ee_speed": sim.log.max_ee_speed(),
    }


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    g = load_project(fixture_path())
    ctx = V.default_context()
    (story,) = codegen.stories(g)
    (GOLDEN / "pickplace.jsonld").write_text(serialize_jsonld(g, ctx), encoding="utf-8")
    (GOLDEN / "pickplace.feature").write_text(codegen.emit_gherkin(g, story, ctx).render(), encoding="utf-8")
    manifest = codegen.emit_manifest(g, story, ctx)
    (GOLDEN / "manifest.json").write_text(codegen.manifest_text(manifest), encoding="utf-8")
    (GOLDEN / "slip_trace.json").write_text(json.dumps(slip_trace(manifest), indent=2, sort_keys=True) + "\n",
                                            encoding="utf-8")
    for p in sorted(GOLDEN.iterdir()):
        print(p)


if __name__ == "__main__":
    main()
