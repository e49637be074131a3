"""Command-line entry point: ``robobdd {validate,gen,run,query,export}``.

Exit codes: 0 success, 1 violations or refused generation, 2 usage or parse
error, 3 internal error (including coordination failures during a run).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from robobdd import codegen
from robobdd import vocab as V
from robobdd.dsl import DslError, collect_project, lower_to_graph
from robobdd.errors import CoordinationError, JsonLdError, MalformedQuery, NonConformingGraph, UnknownPrefix
from robobdd.kg import Graph, Iri, PrefixContext, expand, parse_jsonld, serialize_jsonld
from robobdd.query import construct, match_bgp, parse_bgp
from robobdd.shapes import builtin_bdd_shapes, validate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
JSONLD_SUFFIXES = (".jsonld", ".json")


class UsageError(Exception):
    pass


def load_context(path: str | None) -> PrefixContext:
    ctx = V.default_context()
    if path is None:
        return ctx
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    obj = obj.get("@context", obj) if isinstance(obj, dict) else obj
    return ctx.merged(PrefixContext.from_json(obj))


def load_graph(paths: list[str], ctx: PrefixContext, source_map: dict | None = None) -> Graph:
    """Union of JSON-LD documents and one lowered DSL project from ``paths``."""
    g = Graph()
    models, scenes, seen = [], [], set()
    for p in map(Path, paths):
        if not p.exists():
            raise FileNotFoundError(f"no such file: {p}")
        if p.is_file() and p.suffix in JSONLD_SUFFIXES:
            g.add_all(parse_jsonld(p.read_text(encoding="utf-8"), ctx))
            continue
        ms, ss = collect_project(p)
        for bucket, found in ((models, ms), (scenes, ss)):
            for m in found:
                if m.file not in seen:
                    seen.add(m.file)
                    bucket.append(m)
    if models or scenes:
        g.add_all(lower_to_graph(models, scenes, source_map=source_map))
    return g


def _violation_lines(report, ctx: PrefixContext, source_map: dict) -> list[str]:
    lines = []
    for v in report.violations:
        where = source_map.get(v.focus_node)
        prefix = f"{where}: " if where is not None else ""
        lines.append(f"{prefix}{ctx.compact(v.focus_node)} {ctx.compact(v.path)} [{v.kind}] {v.message}")
    return lines


# --- commands ----------------------------------------------------------------

def cmd_validate(args) -> int:
    ctx = load_context(args.context)
    smap: dict = {}
    g = load_graph(args.paths, ctx, smap)
    report = validate(g, builtin_bdd_shapes())
    if args.format == "json":
        print(json.dumps([{"focus": v.focus_node.value, "path": v.path.value, "kind": v.kind,
                           "message": v.message, "source": str(smap[v.focus_node]) if v.focus_node in smap else None}
                          for v in report.violations], indent=2))
    else:
        for line in _violation_lines(report, ctx, smap):
            print(line)
        if report.conforms:
            print(f"ok: {len(g)} triples conform to {len(builtin_bdd_shapes())} shapes")
    return EXIT_OK if report.conforms else EXIT_FAIL


def cmd_gen(args) -> int:
    ctx = load_context(args.context)
    smap: dict = {}
    g = load_graph(args.paths, ctx, smap)
    report = validate(g, builtin_bdd_shapes())
    if not report.conforms:
        for line in _violation_lines(report, ctx, smap):
            print(line, file=sys.stderr)
        print("refusing to generate from a non-conforming graph", file=sys.stderr)
        return EXIT_FAIL
    found = codegen.stories(g)
    if args.story:
        want = expand(ctx, args.story)
        found = [s for s in found if s == want]
    if not found:
        print("no user stories to generate", file=sys.stderr)
        return EXIT_FAIL
    if len(found) > 1:
        raise UsageError("graph has several stories; pick one with --story: "
                         + ", ".join(ctx.compact(s) for s in found))
    story = found[0]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    feature = out / f"{story.local_name}.feature"
    feature.write_text(codegen.emit_gherkin(g, story, ctx).render(), encoding="utf-8", newline="\n")
    manifest = out / "manifest.json"
    manifest.write_text(codegen.manifest_text(codegen.emit_manifest(g, story, ctx)), encoding="utf-8", newline="\n")
    print(feature)
    print(manifest)
    return EXIT_OK


def cmd_run(args) -> int:
    from robobdd.harness import RunConfig, run_suite

    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    ctx = PrefixContext.from_json(manifest.get("context", {})).merged(load_context(args.context))
    try:
        run = RunConfig.load(args.config, lambda s: expand(ctx, s).value)
        if args.seed is not None:
            run.master_seed = args.seed
        if args.repetitions is not None:
            run = RunConfig(**{**run.__dict__, "repetitions": args.repetitions})
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad run config: {exc}") from None
    report = run_suite(manifest, run, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json_text(), encoding="utf-8", newline="\n")
    (out / "report.csv").write_text(report.to_csv(), encoding="utf-8", newline="\n")
    if args.format == "json":
        sys.stdout.write(report.to_json_text())
    elif args.format == "csv":
        sys.stdout.write(report.to_csv())
    else:
        sys.stdout.write(report.table())
    return EXIT_OK


def _term_json(ctx: PrefixContext, t):
    return ctx.compact(t) if isinstance(t, Iri) else t.value


def cmd_query(args) -> int:
    ctx = load_context(args.context)
    g = load_graph(args.paths, ctx)
    q = parse_bgp(Path(args.query).read_text(encoding="utf-8"), ctx)
    if q.construct is not None:
        out = construct(g, q.construct, q.where)
        if len(out) or args.format == "json":
            sys.stdout.write(serialize_jsonld(out, ctx))
        return EXIT_OK
    rows = match_bgp(g, q.where)
    if args.format == "json":
        print(json.dumps([{k: _term_json(ctx, v) for k, v in sorted(b.items())} for b in rows], indent=2))
    else:
        for b in rows:
            print("  ".join(f"?{k}={_term_json(ctx, v)}" for k, v in sorted(b.items())))
    return EXIT_OK


def cmd_export(args) -> int:
    ctx = load_context(args.context)
    g = load_graph(args.paths, ctx)
    text = serialize_jsonld(g, ctx)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="robobdd", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="text", formats=("text", "json")):
        sp.add_argument("--context", help="JSON file with extra prefixes/terms (default: built-in bdd/env/lab)")
        sp.add_argument("--format", choices=formats, default=fmt_default, help=f"output format (default: {fmt_default})")

    v = sub.add_parser("validate", help="check a project or JSON-LD graph against the built-in shapes")
    v.add_argument("paths", nargs="+", help=".bdd/.scene files, project directories or .jsonld graphs")
    common(v)
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("gen", help="write <story>.feature and manifest.json")
    g.add_argument("paths", nargs="+")
    g.add_argument("--out", default=".", help="output directory (default: .)")
    g.add_argument("--story", help="story IRI or CURIE when the graph has several")
    common(g)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="execute a manifest over a sweep; writes report.json and report.csv")
    r.add_argument("manifest")
    r.add_argument("--config", required=True, help="run.json with sweep, repetitions, seed and faults")
    r.add_argument("--seed", type=int, help="override master_seed from the config")
    r.add_argument("--repetitions", type=int, help="override repetitions from the config")
    r.add_argument("--workers", type=int, default=1, help="threads for execution (default: 1)")
    r.add_argument("--out", default=".", help="output directory (default: .)")
    common(r, formats=("text", "json", "csv"))
    r.set_defaults(func=cmd_run)

    q = sub.add_parser("query", help="evaluate a .bgp query over graph files")
    q.add_argument("paths", nargs="*")
    q.add_argument("--query", required=True, help=".bgp query file")
    common(q)
    q.set_defaults(func=cmd_query)

    e = sub.add_parser("export", help="serialize the lowered graph as JSON-LD")
    e.add_argument("paths", nargs="+")
    e.add_argument("--out", help="output file (default: stdout)")
    common(e, fmt_default="json", formats=("json",))
    e.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NonConformingGraph as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CoordinationError as exc:
        print(f"coordination error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UsageError, DslError, JsonLdError, UnknownPrefix, MalformedQuery, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - last-resort exit status
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
