"""Run the bundled pick-and-place sweep end to end and print the outcome table.

    python scripts/run_sweep.py [--config run.json] [--seed N] [--workers K]
"""

import argparse
import time

from robobdd import codegen, fixture_path
from robobdd.dsl import load_project
from robobdd.harness import RunConfig, run_suite
from robobdd.kg import PrefixContext, expand


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(fixture_path("run.json")))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    g = load_project(fixture_path())
    (story,) = codegen.stories(g)
    manifest = codegen.emit_manifest(g, story)
    ctx = PrefixContext.from_json(manifest["context"])
    run = RunConfig.load(args.config, lambda s: expand(ctx, s).value)
    if args.seed is not None:
        run.master_seed = args.seed

    t0 = time.perf_counter()
    report = run_suite(manifest, run, workers=args.workers)
    elapsed = time.perf_counter() - t0

    print(report.table())
    print("max EE speed over passing executions:")
    for agent, s in report.speed_by_agent().items():
        name = agent.rsplit("/", 1)[-1]
        if s is None:
            print(f"  {name}: no passing executions")
        else:
            print(f"  {name}: n={s.n} min={s.min:.3f} q1={s.q1:.3f} median={s.median:.3f} q3={s.q3:.3f} max={s.max:.3f}")
    print(f"\n{len(report.records)} executions in {elapsed:.2f}s (seed {run.master_seed})")


if __name__ == "__main__":
    main()
