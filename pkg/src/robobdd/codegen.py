"""Scenario expansion and artefact generation (Gherkin feature + coordination manifest)."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable

from robobdd import vocab as V
from robobdd.errors import NonConformingGraph, RoboBddError, UnboundVariable
from robobdd.kg import Graph, Iri, Literal, PrefixContext, term_key
from robobdd.shapes import builtin_bdd_shapes, validate

B = V.BDD
E = V.ENV

ROLE_ORDER = ("object", "agent", "workspace")

# one sentence per predicate; placeholders are role names
STEP_SENTENCES = {
    "IsLocatedAt": '"{object}" is located at "{workspace}"',
    "IsHeldBy": '"{object}" is held by "{agent}"',
    "DoesNotCollide": '"{agent}" does not collide "{workspace}"',
}


@dataclass(frozen=True)
class Timing:
    kind: str  # after-event | before-event | during
    event: Iri | None = None
    start: Iri | None = None
    end: Iri | None = None

    def to_json(self) -> dict:
        if self.kind == "during":
            return {"kind": self.kind, "start": self.start.value, "end": self.end.value}
        return {"kind": self.kind, "event": self.event.value}

    @classmethod
    def from_json(cls, obj: dict) -> "Timing":
        if obj["kind"] == "during":
            return cls("during", start=Iri(obj["start"]), end=Iri(obj["end"]))
        if obj["kind"] not in ("after-event", "before-event"):
            raise ValueError(f"unknown timing kind {obj['kind']!r}")
        return cls(obj["kind"], event=Iri(obj["event"]))

    def events(self) -> tuple[Iri, ...]:
        return (self.start, self.end) if self.kind == "during" else (self.event,)


@dataclass(frozen=True)
class InstanceClause:
    section: str  # Given | Then
    predicate: str  # IsLocatedAt | IsHeldBy | DoesNotCollide
    roles: dict[str, Iri]
    timing: Timing
    clause: Iri | None = None

    def to_json(self) -> dict:
        out = {
            "section": self.section,
            "predicate": self.predicate,
            "roles": {r: iri.value for r, iri in sorted(self.roles.items())},
            "timing": self.timing.to_json(),
        }
        if self.clause is not None:
            out["clause"] = self.clause.value
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "InstanceClause":
        clause = Iri(obj["clause"]) if obj.get("clause") else None
        return cls(obj["section"], obj["predicate"], {r: Iri(v) for r, v in obj["roles"].items()},
                   Timing.from_json(obj["timing"]), clause)


@dataclass
class ScenarioInstance:
    id: str
    variant: Iri
    template: Iri
    bindings: dict[Iri, Iri]
    clauses: list[InstanceClause]
    behaviour: Iri
    events: list[Iri]
    scenes: list[Iri] = field(default_factory=list)

    def labels(self) -> list[str]:
        return clause_labels(self.clauses)


def clause_labels(clauses) -> list[str]:
    """Outcome category per clause, e.g. ``"DoesNotCollide (Then #2)"``."""
    counts: dict[str, int] = {}
    out = []
    for c in clauses:
        section, pred = (c["section"], c["predicate"]) if isinstance(c, dict) else (c.section, c.predicate)
        counts[section] = counts.get(section, 0) + 1
        out.append(f"{pred} ({section} #{counts[section]})")
    return out


def _name(g: Graph, node: Iri) -> str:
    lit = g.value(node, B.name)
    return lit.value if isinstance(lit, Literal) else node.local_name


def _iris(g: Graph, s: Iri, p: Iri) -> list[Iri]:
    return [o for o in g.objects(s, p) if isinstance(o, Iri)]


def _order(g: Graph, node: Iri) -> tuple:
    lit = g.value(node, B.order)
    return (lit.value if isinstance(lit, Literal) and lit.kind == "number" else float("inf"), node.value)


def require_conforming(g: Graph) -> None:
    report = validate(g, builtin_bdd_shapes())
    if not report.conforms:
        raise NonConformingGraph(report)


def behaviour_events(g: Graph, behaviour: Iri) -> list[Iri]:
    emissions = g.subjects_with(B["emitted-by"], behaviour)
    emissions.sort(key=lambda em: _order(g, em))
    return [g.value(em, B["ref-event"]) for em in emissions]


def _template_clauses(g: Graph, template: Iri) -> list[tuple[Iri, str, str, dict[str, Iri], Timing]]:
    out = []
    clauses = _iris(g, template, B["has-clause"])
    clauses.sort(key=lambda c: _order(g, c))
    for cl in clauses:
        owner = g.value(cl, B["clause-of"])
        section = "Given" if V.GIVEN in g.types(owner) else "Then"
        roles = {}
        for role, pred in V.ROLE_PREDICATES.items():
            var = g.value(cl, pred)
            if var is not None:
                roles[role] = var
        tc = g.value(cl, B["holds-at"])
        kind = g.value(tc, B["constraint-kind"]).value
        if kind == "during":
            timing = Timing(kind, start=g.value(tc, B["ref-event-start"]), end=g.value(tc, B["ref-event-end"]))
        else:
            timing = Timing(kind, event=g.value(tc, B["ref-event"]))
        out.append((cl, section, g.value(cl, B.predicate).local_name, roles, timing))
    # Given clauses precede Then clauses regardless of the order literal
    out.sort(key=lambda c: 0 if c[1] == "Given" else 1)
    return out


def cartesian_expander(variations: list[tuple[Iri, list[Iri]]]):
    """Default variation mechanism: full product, first variable slowest."""
    variables = [v for v, _ in variations]
    for combo in itertools.product(*(values for _, values in variations)):
        yield dict(zip(variables, combo))


Expander = Callable[[list[tuple[Iri, list[Iri]]]], object]


def expand_variations(g: Graph, variant: Iri, expander: Expander = cartesian_expander,
                      start: int = 1, check: bool = True) -> list[ScenarioInstance]:
    """One ScenarioInstance per combination of the variant's task variations."""
    if check:
        require_conforming(g)
    if V.SCENARIO_VARIANT not in g.types(variant):
        raise RoboBddError(f"{variant} is not a ScenarioVariant")
    template = g.value(variant, B["of-template"])
    scenario = g.value(template, B["of-scenario"])
    behaviour = g.value(scenario, B["of-behaviour"])
    variables = set(_iris(g, template, B["has-variable"]))
    clauses = _template_clauses(g, template)
    for _, _, _, roles, _ in clauses:
        variables.update(roles.values())

    variations = []
    for tv in _iris(g, variant, B["has-variation"]):
        var = g.value(tv, B["of-variable"])
        values = sorted(_iris(g, tv, B["can-be"]), key=lambda i: i.value)
        variations.append((var, values))
    variations.sort(key=lambda vv: vv[0].value)
    varied = {v for v, _ in variations}
    unbound = sorted(v.value for v in variables - varied)
    if unbound:
        raise UnboundVariable(f"variant {variant} leaves template variables unbound: {unbound}")

    events = behaviour_events(g, behaviour)
    scenes = _iris(g, variant, B["has-scene"])
    tname = _name(g, template)
    combos = list(expander(variations))
    width = max(3, len(str(start + len(combos) - 1)))
    instances = []
    for n, combo in enumerate(combos, start=start):
        inst_clauses = [
            InstanceClause(section, pred, {r: combo[var] for r, var in roles.items()}, timing, cl)
            for cl, section, pred, roles, timing in clauses
        ]
        instances.append(ScenarioInstance(
            id=f"{tname}-{n:0{width}d}",
            variant=variant,
            template=template,
            bindings=dict(sorted(combo.items(), key=lambda kv: kv[0].value)),
            clauses=inst_clauses,
            behaviour=behaviour,
            events=events,
            scenes=scenes,
        ))
    return instances


def story_variants(g: Graph, story: Iri) -> list[Iri]:
    return sorted(_iris(g, story, B["has-variant"]), key=lambda i: i.value)


def story_instances(g: Graph, story: Iri, check: bool = True) -> list[ScenarioInstance]:
    """Expand every variant of a story; numbering continues per template across variants."""
    if check:
        require_conforming(g)
    if V.USER_STORY not in g.types(story):
        raise RoboBddError(f"{story} is not a UserStory")
    counters: dict[Iri, int] = {}
    out = []
    for variant in story_variants(g, story):
        template = g.value(variant, B["of-template"])
        start = counters.get(template, 1)
        batch = expand_variations(g, variant, start=start, check=False)
        counters[template] = start + len(batch)
        out.extend(batch)
    return out


# --- element configuration ---------------------------------------------------

def _num(g, node, key):
    lit = g.value(node, E[key])
    return lit.value if isinstance(lit, Literal) else None


def element_config(g: Graph, el: Iri) -> dict:
    types = g.types(el)
    if V.OBJECT in types:
        cfg = {
            "kind": "object",
            "mass_kg": _num(g, el, "mass-kg"),
            "half_extents_m": [_num(g, el, f"half-extent-{a}") for a in "xyz"],
        }
        rng = [_num(g, el, f"position-{k}") for k in ("min-x", "min-y", "max-x", "max-y")]
        if all(v is not None for v in rng):
            cfg["position_range_m"] = rng
    elif V.AGENT in types:
        cfg = {"kind": "agent", "ee": g.value(el, E["ee-kind"]).value}
    elif V.WORKSPACE in types:
        cfg = {
            "kind": "workspace",
            "workspace_kind": g.value(el, E["workspace-kind"]).value,
            "aabb_m": [_num(g, el, f"aabb-{k}") for k in ("min-x", "min-y", "min-z", "max-x", "max-y", "max-z")],
        }
        base = _num(g, el, "bin-base-height-m")
        if base is not None:
            cfg["bin_base_height_m"] = base
    else:
        raise RoboBddError(f"{el} is not a scene element")
    cfg["name"] = _name(g, el)
    return cfg


def scene_elements(g: Graph, scenes: list[Iri]) -> list[Iri]:
    out = set()
    for scene in scenes:
        for rel in g.subjects_with(B["of-scene"], scene):
            el = g.value(rel, B["ref-element"])
            if el is not None:
                out.add(el)
    return sorted(out, key=lambda i: i.value)


# --- Gherkin -----------------------------------------------------------------

@dataclass
class GherkinScenario:
    title: str
    steps: list[str]


@dataclass
class GherkinDocument:
    feature: str
    background: list[tuple[str, list[str], list[list[str]]]]  # (caption, header, rows)
    scenarios: list[GherkinScenario]

    def render(self) -> str:
        lines = [f"Feature: {self.feature}", ""]
        if self.background:
            lines.append("  Background:")
            for i, (caption, header, rows) in enumerate(self.background):
                kw = "Given" if i == 0 else "And"
                lines.append(f"    {kw} {caption}")
                lines.extend(_table([header] + rows, indent="      "))
            lines.append("")
        for sc in self.scenarios:
            lines.append(f"  Scenario: {sc.title}")
            lines.extend(f"    {step}" for step in sc.steps)
            lines.append("")
        return "\n".join(lines).rstrip("\n") + "\n"


def _table(rows: list[list[str]], indent: str) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return [indent + "| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |" for r in rows]


def _fmt(x) -> str:
    if x is None:
        return "-"
    return f"{x:.6g}"


def _background(g: Graph, ctx: PrefixContext, elements: list[Iri]):
    objs, agents, wss = [], [], []
    for el in elements:
        cfg = element_config(g, el)
        cid = ctx.compact(el)
        if cfg["kind"] == "object":
            hx, hy, hz = cfg["half_extents_m"]
            objs.append([cid, _fmt(round(cfg["mass_kg"] * 1000.0, 6)), _fmt(hx), _fmt(hy), _fmt(hz)])
        elif cfg["kind"] == "agent":
            agents.append([cid, cfg["ee"]])
        else:
            wss.append([cid, cfg["workspace_kind"], " ".join(_fmt(v) for v in cfg["aabb_m"]),
                        _fmt(cfg.get("bin_base_height_m"))])
    out = []
    if objs:
        out.append(("a set of objects", ["ID", "Mass_g", "HalfExtent_x_m", "HalfExtent_y_m", "HalfExtent_z_m"], objs))
    if agents:
        out.append(("a set of agents", ["ID", "EE"], agents))
    if wss:
        out.append(("a set of workspaces", ["ID", "Kind", "AABB_m", "BinBaseHeight_m"], wss))
    return out


def _timing_text(ctx: PrefixContext, t: Timing) -> str:
    if t.kind == "during":
        return f'during "{ctx.compact(t.start)}" .. "{ctx.compact(t.end)}"'
    word = "after" if t.kind == "after-event" else "before"
    return f'{word} event "{ctx.compact(t.event)}"'


def clause_step(ctx: PrefixContext, c: InstanceClause) -> str:
    roles = {r: ctx.compact(iri) for r, iri in c.roles.items()}
    return STEP_SENTENCES[c.predicate].format(**roles) + " " + _timing_text(ctx, c.timing)


def _when_step(ctx: PrefixContext, inst: ScenarioInstance) -> str:
    agents = sorted({c.roles["agent"] for c in inst.clauses if "agent" in c.roles}, key=lambda i: i.value)
    behaviour = ctx.compact(inst.behaviour)
    if len(agents) == 1:
        return f'When "{ctx.compact(agents[0])}" performs "{behaviour}"'
    return f'When "{behaviour}" is executed'


def scenario_steps(ctx: PrefixContext, inst: ScenarioInstance) -> list[str]:
    steps = []
    for section in ("Given", "Then"):
        for k, c in enumerate(cl for cl in inst.clauses if cl.section == section):
            steps.append(f"{section if k == 0 else 'And'} {clause_step(ctx, c)}")
        if section == "Given":
            steps.append(_when_step(ctx, inst))
    return steps


def emit_gherkin(g: Graph, story: Iri, ctx: PrefixContext | None = None) -> GherkinDocument:
    ctx = ctx or V.default_context()
    instances = story_instances(g, story)
    scenes = sorted({s for inst in instances for s in inst.scenes}, key=lambda i: i.value)
    if not scenes:
        scenes = sorted({s for v in story_variants(g, story) for s in _iris(g, v, B["has-scene"])},
                        key=lambda i: i.value)
    return GherkinDocument(
        feature=_name(g, story),
        background=_background(g, ctx, scene_elements(g, scenes)),
        scenarios=[GherkinScenario(inst.id, scenario_steps(ctx, inst)) for inst in instances],
    )


# --- coordination manifest ---------------------------------------------------

def instance_to_json(inst: ScenarioInstance, elements: dict) -> dict:
    return {
        "id": inst.id,
        "variant": inst.variant.value,
        "template": inst.template.value,
        "behaviour": inst.behaviour.value,
        "events": [e.value for e in inst.events],
        "bindings": {k.value: v.value for k, v in inst.bindings.items()},
        "clauses": [c.to_json() for c in inst.clauses],
        "elements": elements,
    }


def emit_manifest(g: Graph, story: Iri, ctx: PrefixContext | None = None) -> dict:
    ctx = ctx or V.default_context()
    instances = story_instances(g, story)
    configs: dict[Iri, dict] = {}
    out = []
    for inst in instances:
        els = {}
        for el in scene_elements(g, inst.scenes):
            if el not in configs:
                configs[el] = element_config(g, el)
            els[el.value] = configs[el]
        out.append(instance_to_json(inst, els))
    return {"story": story.value, "context": ctx.to_json(), "instances": out}


def manifest_text(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def manifest_iris(manifest: dict) -> set[str]:
    """Every IRI mentioned by a manifest (used for referential-closure checks)."""
    out = {manifest["story"]}
    for inst in manifest["instances"]:
        out |= {inst["variant"], inst["template"], inst["behaviour"], *inst["events"]}
        out |= set(inst["bindings"]) | set(inst["bindings"].values()) | set(inst["elements"])
        for c in inst["clauses"]:
            out |= set(c["roles"].values())
            out |= {v for k, v in c["timing"].items() if k != "kind"}
            if "clause" in c:
                out.add(c["clause"])
    return out


def stories(g: Graph) -> list[Iri]:
    return g.instances_of(V.USER_STORY)
