"""Structural validation of BDD graphs with a small SHACL-like shape language.

A shape targets every node typed with its ``target_class`` and checks, per
property constraint, the number of objects reached through the constraint's
path(s) and the kind of each object.  Problems are reported, never raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from robobdd.kg import Graph, Iri, Literal, PrefixContext, Term, Triple, RDF_TYPE, term_key
from robobdd import vocab as V

BUILTIN_SHAPES_VERSION = "1"

UNBOUNDED = None

VALUE_KINDS = ("iri-of-class", "text", "number", "boolean", "any-iri", "any")


@dataclass(frozen=True)
class PropertyConstraint:
    """Cardinality and value-kind rule for one path.

    ``path`` may hold several predicates, in which case the objects of all of
    them are counted together (an alternative path).  ``when`` restricts the
    constraint to focus nodes that have one of the given values on a guard
    predicate.
    """

    path: tuple[Iri, ...]
    min_count: int = 0
    max_count: Optional[int] = UNBOUNDED
    value_kind: str = "any"
    classes: tuple[Iri, ...] = ()
    when: Optional[tuple[Iri, tuple[Term, ...]]] = None

    def __post_init__(self):
        # alternatives and classes are sets; keep them sorted so encodings compare equal
        path = (self.path,) if isinstance(self.path, Iri) else self.path
        classes = (self.classes,) if isinstance(self.classes, Iri) else self.classes
        object.__setattr__(self, "path", tuple(sorted(path, key=lambda i: i.value)))
        object.__setattr__(self, "classes", tuple(sorted(classes, key=lambda i: i.value)))
        if self.when is not None:
            object.__setattr__(self, "when", (self.when[0], tuple(sorted(self.when[1], key=term_key))))
        if not self.path:
            raise ValueError("constraint needs at least one path predicate")
        if self.min_count < 0:
            raise ValueError("min_count must be non-negative")
        if self.max_count is not None and (self.max_count < 1 or self.max_count < self.min_count):
            raise ValueError("max_count must be positive and >= min_count")
        if self.value_kind not in VALUE_KINDS:
            raise ValueError(f"unknown value kind {self.value_kind!r}")
        if (self.value_kind == "iri-of-class") != bool(self.classes):
            raise ValueError("classes are required exactly for iri-of-class")

    @property
    def path_iri(self) -> Iri:
        """Representative path for reports: the first predicate in IRI order."""
        return self.path[0]


@dataclass(frozen=True)
class Shape:
    target_class: Iri
    constraints: tuple[PropertyConstraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        paths = [c.path for c in self.constraints]
        if len(paths) != len(set(paths)):
            raise ValueError(f"duplicate constraint paths in shape for {self.target_class}")


@dataclass(frozen=True, order=True)
class Violation:
    focus_node: Iri
    path: Iri
    kind: str  # too-few | too-many | wrong-kind | wrong-class
    message: str = field(compare=False)

    def sort_key(self):
        return (self.focus_node.value, self.path.value, self.kind)


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def conforms(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.conforms:
            return "conforms"
        return "\n".join(f"{v.focus_node} {v.path} {v.kind}: {v.message}" for v in self.violations)


def _kind_problem(g: Graph, c: PropertyConstraint, o: Term) -> Optional[tuple[str, str]]:
    vk = c.value_kind
    if vk == "any":
        return None
    if vk in ("any-iri", "iri-of-class"):
        if not isinstance(o, Iri):
            return "wrong-kind", f"expected an IRI, got literal {o.value!r}"
        if vk == "iri-of-class" and not (g.types(o) & set(c.classes)):
            names = ", ".join(cls.local_name for cls in c.classes)
            return "wrong-class", f"{o} is not typed as {names}"
        return None
    if not isinstance(o, Literal) or o.kind != vk:
        return "wrong-kind", f"expected a {vk} literal, got {o!r}"
    return None


def _applies(g: Graph, node: Iri, c: PropertyConstraint) -> bool:
    if c.when is None:
        return True
    guard, values = c.when
    return any(v in values for v in g.objects(node, guard))


def check_constraint(g: Graph, node: Iri, c: PropertyConstraint) -> Optional[Violation]:
    """First breach of ``c`` at ``node`` (counts before kinds), or ``None``."""
    objs: list[Term] = []
    for p in c.path:
        objs.extend(g.objects(node, p))
    n = len(objs)
    label = " | ".join(p.local_name for p in c.path)
    if n < c.min_count:
        return Violation(node, c.path_iri, "too-few", f"{label}: {n} value(s), at least {c.min_count} required")
    if c.max_count is not None and n > c.max_count:
        return Violation(node, c.path_iri, "too-many", f"{label}: {n} value(s), at most {c.max_count} allowed")
    for o in sorted(objs, key=term_key):
        problem = _kind_problem(g, c, o)
        if problem:
            return Violation(node, c.path_iri, problem[0], f"{label}: {problem[1]}")
    return None


def validate(g: Graph, shapes: list[Shape]) -> ValidationReport:
    violations = []
    for shape in shapes:
        for node in g.instances_of(shape.target_class):
            for c in shape.constraints:
                if not _applies(g, node, c):
                    continue
                v = check_constraint(g, node, c)
                if v is not None:
                    violations.append(v)
    violations.sort(key=Violation.sort_key)
    return ValidationReport(violations)


def _one(path, **kw) -> PropertyConstraint:
    return PropertyConstraint(path, min_count=1, max_count=1, **kw)


def _of_class(path, *classes, min_count=1, max_count=1) -> PropertyConstraint:
    return PropertyConstraint(path, min_count, max_count, "iri-of-class", classes)


_EVENT_KINDS = (Literal("after-event"), Literal("before-event"))


def builtin_bdd_shapes() -> list[Shape]:
    B = V.BDD
    kind = B["constraint-kind"]
    return [
        Shape(V.SCENARIO, (
            _of_class(B["has-given"], V.GIVEN),
            _of_class(B["has-when"], V.WHEN),
            _of_class(B["has-then"], V.THEN),
            _of_class(B["of-behaviour"], V.BEHAVIOUR),
        )),
        Shape(V.FLUENT_CLAUSE, (
            _of_class(B["clause-of"], V.GIVEN, V.THEN),
            _one(B["predicate"], value_kind="any-iri"),
            _of_class(B["holds-at"], V.TIME_CONSTRAINT),
            _of_class((B["ref-object"], B["ref-agent"], B["ref-workspace"]), V.SCENARIO_VARIABLE,
                      max_count=None),
        )),
        Shape(V.TIME_CONSTRAINT, (
            _one(kind, value_kind="text"),
            PropertyConstraint(B["ref-event"], 1, 1, "iri-of-class", (V.EVENT,), when=(kind, _EVENT_KINDS)),
            PropertyConstraint(B["ref-event-start"], 1, 1, "iri-of-class", (V.EVENT,),
                               when=(kind, (Literal("during"),))),
            PropertyConstraint(B["ref-event-end"], 1, 1, "iri-of-class", (V.EVENT,),
                               when=(kind, (Literal("during"),))),
        )),
        Shape(V.TASK_VARIATION, (
            _of_class(B["of-task"], V.TASK),
            _of_class(B["of-variable"], V.SCENARIO_VARIABLE),
            PropertyConstraint(B["can-be"], 1, None, "any-iri"),
        )),
        Shape(V.SCENE, (
            _one(B["name"], value_kind="text"),
        )),
        Shape(V.SCENE_HAS_OBJECT, (
            _of_class(B["of-scene"], V.SCENE),
            _of_class(B["ref-element"], V.OBJECT),
        )),
        Shape(V.SCENE_HAS_AGENT, (
            _of_class(B["of-scene"], V.SCENE),
            _of_class(B["ref-element"], V.AGENT),
        )),
        Shape(V.SCENE_HAS_WORKSPACE, (
            _of_class(B["of-scene"], V.SCENE),
            _of_class(B["ref-element"], V.WORKSPACE),
        )),
        Shape(V.SCENARIO_TEMPLATE, (
            _of_class(B["of-scenario"], V.SCENARIO),
            _of_class(B["has-scene"], V.SCENE),
            _of_class(B["has-clause"], V.FLUENT_CLAUSE, max_count=None),
        )),
        Shape(V.SCENARIO_VARIANT, (
            _of_class(B["of-template"], V.SCENARIO_TEMPLATE),
            _of_class(B["has-variation"], V.TASK_VARIATION, min_count=0, max_count=None),
        )),
        Shape(V.USER_STORY, (
            _of_class(B["has-variant"], V.SCENARIO_VARIANT, max_count=None),
        )),
    ]


# --- shapes as graphs -------------------------------------------------------

def shapes_to_graph(shapes: list[Shape]) -> Graph:
    """Encode shapes in the shape vocabulary so they can travel as JSON-LD."""
    g = Graph()
    for i, shape in enumerate(shapes):
        s = Iri(f"{V.SHAPE_NS}shape-{i:02d}-{shape.target_class.local_name}")
        g.add(Triple(s, RDF_TYPE, V.SH.NodeShape))
        g.add(Triple(s, V.SH.targetClass, shape.target_class))
        for j, c in enumerate(shape.constraints):
            pnode = Iri(f"{s.value}/property-{j:02d}")
            g.add(Triple(s, V.SH.property, pnode))
            g.add(Triple(pnode, RDF_TYPE, V.SH.PropertyShape))
            g.add(Triple(pnode, V.SH.order, Literal(j)))
            for p in c.path:
                g.add(Triple(pnode, V.SH.path, p))
            g.add(Triple(pnode, V.SH.minCount, Literal(c.min_count)))
            if c.max_count is not None:
                g.add(Triple(pnode, V.SH.maxCount, Literal(c.max_count)))
            g.add(Triple(pnode, V.SH.valueKind, Literal(c.value_kind)))
            for cls in c.classes:
                g.add(Triple(pnode, V.SH["class"], cls))
            if c.when is not None:
                g.add(Triple(pnode, V.SH.whenPath, c.when[0]))
                for v in c.when[1]:
                    g.add(Triple(pnode, V.SH.whenValue, v))
    return g


def _num(g: Graph, node: Iri, p: Iri, default=None):
    v = g.value(node, p)
    if v is None:
        return default
    if not isinstance(v, Literal) or v.kind != "number" or not v.value.is_integer():
        raise ValueError(f"{node} {p.local_name} must be an integer")
    return int(v.value)


def shapes_from_graph(g: Graph) -> list[Shape]:
    shapes = []
    for s in g.instances_of(V.SH.NodeShape):
        props = [o for o in g.objects(s, V.SH.property) if isinstance(o, Iri)]
        props.sort(key=lambda pn: (_num(g, pn, V.SH.order, 0), pn.value))
        constraints = []
        for pn in props:
            when = None
            guard = g.value(pn, V.SH.whenPath)
            if guard is not None:
                when = (guard, tuple(g.objects(pn, V.SH.whenValue)))
            kind = g.value(pn, V.SH.valueKind, Literal("any"))
            constraints.append(PropertyConstraint(
                tuple(o for o in g.objects(pn, V.SH.path) if isinstance(o, Iri)),
                _num(g, pn, V.SH.minCount, 0),
                _num(g, pn, V.SH.maxCount, None),
                kind.value,
                tuple(o for o in g.objects(pn, V.SH["class"]) if isinstance(o, Iri)),
                when,
            ))
        shapes.append(Shape(g.value(s, V.SH.targetClass), tuple(constraints)))
    return shapes


def shape_context() -> PrefixContext:
    ctx = V.default_context()
    ctx.prefixes["sh"] = V.SHAPE_NS
    return ctx
