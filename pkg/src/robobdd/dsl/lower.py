"""Lowering of parsed models to metamodel triples, and project loading."""

from __future__ import annotations

from pathlib import Path

from robobdd import vocab as V
from robobdd.dsl.ast import ClauseDecl, SceneModel, SourceModel, SourcePos, TemplateDecl
from robobdd.dsl.errors import CyclicImport, DuplicateName, ImportNotFound, LoweringError, UnknownReference
from robobdd.dsl.parser import parse_bdd_dsl, parse_scene_dsl
from robobdd.kg import Graph, Iri, Literal, Term, Triple

B = V.BDD
E = V.ENV


class _Lowerer:
    def __init__(self, namespace: str, source_map: dict | None):
        self.ns = str(namespace).rstrip("/")
        self.g = Graph()
        self.emissions: dict[str, list[str]] = {}
        self.source_map = source_map if source_map is not None else {}

    def iri(self, kind: str, *names: str) -> Iri:
        return Iri("/".join([self.ns, kind, *names]))

    def add(self, s: Iri, p: Iri, o) -> None:
        if not isinstance(o, (Iri, Literal)):
            o = Literal(o)
        self.g.add(Triple(s, p, o))

    def node(self, iri: Iri, *types: Iri, name: str | None = None, pos: SourcePos | None = None) -> Iri:
        for t in types:
            self.add(iri, V.TYPE, t)
        if name is not None:
            self.add(iri, B.name, name)
        if pos is not None:
            self.source_map.setdefault(iri, pos)
        return iri

    # -- scenes ------------------------------------------------------------
    def scene(self, sm: SceneModel, elements: dict[str, Iri]) -> Iri:
        scene = self.node(self.iri("scene", sm.name), V.SCENE, name=sm.name, pos=SourcePos(1, 1, sm.file))
        rel_types = {"object": V.SCENE_HAS_OBJECT, "agent": V.SCENE_HAS_AGENT, "workspace": V.SCENE_HAS_WORKSPACE}
        for kind, items in (("object", sm.objects), ("agent", sm.agents), ("workspace", sm.workspaces)):
            for item in items:
                if item.name in elements:
                    raise DuplicateName(f"scene element {item.name!r} declared in more than one scene", item.pos)
                el = self.element(kind, item)
                elements[item.name] = el
                rel = self.node(self.iri("scene-element", sm.name, item.name), rel_types[kind], pos=item.pos)
                self.add(rel, B["of-scene"], scene)
                self.add(rel, B["ref-element"], el)
        return scene

    def element(self, kind: str, item) -> Iri:
        if kind == "object":
            el = self.node(self.iri("object", item.name), V.OBJECT, name=item.name, pos=item.pos)
            self.add(el, E["mass-kg"], item.mass_kg)
            for axis, h in zip("xyz", item.half_extents_m):
                self.add(el, E[f"half-extent-{axis}"], h)
            if item.position_range_m is not None:
                for key, v in zip(("min-x", "min-y", "max-x", "max-y"), item.position_range_m):
                    self.add(el, E[f"position-{key}"], v)
        elif kind == "agent":
            el = self.node(self.iri("agent", item.name), V.AGENT, name=item.name, pos=item.pos)
            self.add(el, E["ee-kind"], item.ee)
        else:
            extra = V.BIN if item.kind == "bin" else V.TABLE
            el = self.node(self.iri("workspace", item.name), V.WORKSPACE, extra, name=item.name, pos=item.pos)
            self.add(el, E["workspace-kind"], item.kind)
            for key, v in zip(("min-x", "min-y", "min-z", "max-x", "max-y", "max-z"), item.aabb_m):
                self.add(el, E[f"aabb-{key}"], v)
            if item.kind == "bin":
                base = item.bin_base_height_m if item.bin_base_height_m is not None else item.aabb_m[5]
                self.add(el, E["bin-base-height-m"], base)
        return el

    # -- templates ---------------------------------------------------------
    def template(self, t: TemplateDecl, events: dict[str, Iri]) -> Iri:
        tmpl = self.node(self.iri("template", t.name), V.SCENARIO_TEMPLATE, name=t.name, pos=t.pos)
        scenario = self.node(self.iri("scenario", t.name), V.SCENARIO, name=t.name, pos=t.pos)
        given = self.node(self.iri("given", t.name), V.GIVEN, pos=t.pos)
        when = self.node(self.iri("when", t.name), V.WHEN, pos=t.pos)
        then = self.node(self.iri("then", t.name), V.THEN, pos=t.pos)
        # the template's own scene is abstract; concrete elements come from variants
        scene = self.node(self.iri("template-scene", t.name), V.SCENE, name=t.name, pos=t.pos)
        behaviour = self.node(self.iri("behaviour", t.behaviour), V.BEHAVIOUR, name=t.behaviour, pos=t.pos)
        task = self.node(self.iri("task", t.name), V.TASK, name=t.name, pos=t.pos)
        self.add(tmpl, B["of-scenario"], scenario)
        self.add(tmpl, B["has-scene"], scene)
        self.add(scenario, B["has-given"], given)
        self.add(scenario, B["has-when"], when)
        self.add(scenario, B["has-then"], then)
        self.add(scenario, B["of-behaviour"], behaviour)
        self.add(when, B["of-behaviour"], behaviour)

        known = self.emissions.setdefault(t.behaviour, list(t.emits))
        if known != list(t.emits):
            raise DuplicateName(f"behaviour {t.behaviour!r} emits different events in different templates", t.pos)
        for i, ev in enumerate(t.emits):
            if ev not in events:
                raise UnknownReference(f"undeclared event {ev!r} emitted by {t.behaviour!r}", t.pos)
            em = self.node(self.iri("emission", t.behaviour, str(i)), V.EVENT_EMISSION)
            self.add(em, B["emitted-by"], behaviour)
            self.add(em, B["ref-event"], events[ev])
            self.add(em, B.order, i)

        variables = {}
        for v in t.variables:
            var = self.node(self.iri("variable", t.name, v), V.SCENARIO_VARIABLE, name=v, pos=t.var_pos.get(v))
            self.add(tmpl, B["has-variable"], var)
            variables[v] = var

        order = 0
        for section, clauses, owner in (("Given", t.given, given), ("Then", t.then, then)):
            for j, c in enumerate(clauses):
                cl = self.clause(t, section, j, c, owner, variables, events)
                self.add(cl, B.order, order)
                self.add(tmpl, B["has-clause"], cl)
                order += 1
        return tmpl

    def clause(self, t, section, j, c: ClauseDecl, owner, variables, events) -> Iri:
        label = f"{section.lower()}-{j}"
        cl = self.node(self.iri("clause", t.name, label), V.FLUENT_CLAUSE, pos=c.pos)
        self.add(cl, B["clause-of"], owner)
        self.add(cl, B.predicate, B[c.predicate])
        for role, var in c.roles.items():
            self.add(cl, V.ROLE_PREDICATES[role], variables[var])
        tc = self.node(self.iri("time-constraint", t.name, label), V.TIME_CONSTRAINT, pos=c.timing.pos)
        self.add(cl, B["holds-at"], tc)
        self.add(tc, B["constraint-kind"], c.timing.kind)
        for ev in c.timing.events:
            if ev not in events:
                raise UnknownReference(f"undeclared event {ev!r}", c.timing.pos)
        if c.timing.kind == "during":
            self.add(tc, B["ref-event-start"], events[c.timing.events[0]])
            self.add(tc, B["ref-event-end"], events[c.timing.events[1]])
        else:
            self.add(tc, B["ref-event"], events[c.timing.events[0]])
        return cl


def lower_to_graph(
    models: list[SourceModel],
    scenes: list[SceneModel],
    namespace: str = V.DEFAULT_MODEL_NS,
    source_map: dict | None = None,
) -> Graph:
    """Lower parsed models into one graph; cross-file names are resolved here."""
    lw = _Lowerer(namespace, source_map)
    _check_imports(models, scenes)

    elements: dict[str, Iri] = {}
    scene_iris: dict[str, Iri] = {}
    scene_models: dict[str, SceneModel] = {}
    for sm in sorted(scenes, key=lambda s: s.name):
        if sm.name in scene_iris:
            raise DuplicateName(f"scene {sm.name!r} loaded twice", SourcePos(1, 1, sm.file))
        scene_iris[sm.name] = lw.scene(sm, elements)
        scene_models[sm.name] = sm

    events: dict[str, Iri] = {}
    templates: dict[str, TemplateDecl] = {}
    for m in models:
        for ev in m.events:
            if ev.name in events:
                raise DuplicateName(f"event {ev.name!r} declared in more than one file", ev.pos)
            events[ev.name] = lw.node(lw.iri("event", ev.name), V.EVENT, name=ev.name, pos=ev.pos)
        for t in m.templates:
            if t.name in templates:
                raise DuplicateName(f"template {t.name!r} declared in more than one file", t.pos)
            templates[t.name] = t

    for name in sorted(templates):
        lw.template(templates[name], events)

    seen_variants: set[str] = set()
    for m in models:
        for story in m.stories:
            st = lw.node(lw.iri("story", story.name), V.USER_STORY, name=story.name, pos=story.pos)
            for vd in story.variants:
                if vd.name in seen_variants:
                    raise DuplicateName(f"variant {vd.name!r} declared twice", vd.pos)
                seen_variants.add(vd.name)
                if vd.template not in templates:
                    raise UnknownReference(f"unknown template {vd.template!r}", vd.pos)
                if vd.scene not in scene_iris:
                    raise UnknownReference(f"unknown scene {vd.scene!r}", vd.pos)
                t = templates[vd.template]
                scene_elems = scene_models[vd.scene].element_names()
                var = lw.node(lw.iri("variant", vd.name), V.SCENARIO_VARIANT, name=vd.name, pos=vd.pos)
                lw.add(st, B["has-variant"], var)
                lw.add(var, B["of-template"], lw.iri("template", t.name))
                lw.add(var, B["has-scene"], scene_iris[vd.scene])
                for vr in vd.variations:
                    if vr.variable not in t.variables:
                        raise UnknownReference(
                            f"template {t.name!r} declares no variable {vr.variable!r}", vr.pos
                        )
                    tv = lw.node(lw.iri("variation", vd.name, vr.variable), V.TASK_VARIATION, pos=vr.pos)
                    lw.add(var, B["has-variation"], tv)
                    lw.add(tv, B["of-task"], lw.iri("task", t.name))
                    lw.add(tv, B["of-variable"], lw.iri("variable", t.name, vr.variable))
                    for value in vr.values:
                        if value not in scene_elems:
                            raise UnknownReference(f"scene {vd.scene!r} has no element {value!r}", vr.pos)
                        lw.add(tv, B["can-be"], elements[value])
    return lw.g


def _check_imports(models, scenes):
    scene_names = {sm.name for sm in scenes}
    model_files = {Path(m.file).name for m in models}
    for m in models:
        for imp in m.imports:
            target = Path(imp.path)
            ok = target.stem in scene_names if target.suffix == ".scene" else target.name in model_files
            if not ok:
                raise LoweringError(f"unresolved import {imp.path!r}", imp.pos)


def _read(path: Path, chain) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ImportNotFound(path, chain) from None


def collect_project(root, extra_scenes=()) -> tuple[list[SourceModel], list[SceneModel]]:
    """Parse ``root`` and all transitive imports (paths relative to the importing file).

    ``root`` may be a single file or a directory, in which case every
    ``.bdd`` and ``.scene`` file directly inside it is loaded.
    """
    root = Path(root)
    models: dict[Path, SourceModel] = {}
    scenes: dict[Path, SceneModel] = {}

    def visit(path: Path, chain: list[Path]):
        path = path.resolve()
        if path in chain:
            raise CyclicImport(chain + [path])
        if path in models or path in scenes:
            return
        text = _read(path, chain)
        if path.suffix == ".scene":
            scenes[path] = parse_scene_dsl(text, name=path.stem, file=str(path))
            return
        model = parse_bdd_dsl(text, file=str(path))
        models[path] = model
        for imp in model.imports:
            target = (path.parent / imp.path)
            if not target.exists():
                raise ImportNotFound(target, chain + [path])
            visit(target, chain + [path])

    if root.is_dir():
        for f in sorted(root.iterdir()):
            if f.suffix in (".bdd", ".scene"):
                visit(f, [])
    else:
        visit(root, [])
    for extra in extra_scenes:
        visit(Path(extra), [])
    return [models[p] for p in sorted(models)], [scenes[p] for p in sorted(scenes)]


def load_project(root, namespace: str = V.DEFAULT_MODEL_NS, source_map: dict | None = None) -> Graph:
    models, scenes = collect_project(root)
    return lower_to_graph(models, scenes, namespace, source_map)
