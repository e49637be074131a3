import pytest

from robobdd import vocab as V
from robobdd.kg import Graph, Iri, Literal, Triple, parse_jsonld, serialize_jsonld
from robobdd.shapes import (
    PropertyConstraint,
    Shape,
    builtin_bdd_shapes,
    check_constraint,
    shape_context,
    shapes_from_graph,
    shapes_to_graph,
    validate,
)

B = V.BDD
EX = "https://example.org/s/"


def _shape_for(cls):
    return next(s for s in builtin_bdd_shapes() if s.target_class == cls)


def _constraint(shape, pred):
    return next(c for c in shape.constraints if pred in c.path)


def test_fixture_conforms(fixture_graph):
    report = validate(fixture_graph, builtin_bdd_shapes())
    assert report.conforms, str(report)


def test_empty_graph_conforms():
    assert validate(Graph(), builtin_bdd_shapes()).conforms


def test_eleven_shapes_with_distinct_targets():
    shapes = builtin_bdd_shapes()
    assert len(shapes) == 11
    assert len({s.target_class for s in shapes}) == 11


def test_fluent_clause_needs_one_time_constraint():
    c = _constraint(_shape_for(V.FLUENT_CLAUSE), B["holds-at"])
    assert (c.min_count, c.max_count, c.value_kind, c.classes) == (1, 1, "iri-of-class", (V.TIME_CONSTRAINT,))


def test_variant_needs_one_template():
    c = _constraint(_shape_for(V.SCENARIO_VARIANT), B["of-template"])
    assert (c.min_count, c.max_count) == (1, 1)


def test_deleting_holds_at_gives_one_violation(graph):
    clause = graph.instances_of(V.FLUENT_CLAUSE)[0]
    (t,) = graph.triples(clause, B["holds-at"], None)
    graph.discard(t)
    report = validate(graph, builtin_bdd_shapes())
    assert [(v.focus_node, v.path, v.kind) for v in report.violations] == [(clause, B["holds-at"], "too-few")]


def test_wrong_class(graph):
    clause = graph.instances_of(V.FLUENT_CLAUSE)[0]
    (t,) = graph.triples(clause, B["holds-at"], None)
    graph.discard(t)
    graph.add(Triple(clause, B["holds-at"], Iri(EX + "untyped")))
    (v,) = validate(graph, builtin_bdd_shapes()).violations
    assert v.kind == "wrong-class"


def test_wrong_kind_literal_for_iri(graph):
    scene = graph.instances_of(V.SCENE)[0]
    (t,) = graph.triples(scene, B["name"], None)
    graph.discard(t)
    graph.add(Triple(scene, B["name"], Literal(3.0)))
    (v,) = validate(graph, builtin_bdd_shapes()).violations
    assert (v.path, v.kind) == (B["name"], "wrong-kind")


def test_role_alternative_path(graph):
    clause = graph.instances_of(V.FLUENT_CLAUSE)[0]
    for p in (B["ref-object"], B["ref-agent"], B["ref-workspace"]):
        for t in list(graph.triples(clause, p, None)):
            graph.discard(t)
    (v,) = validate(graph, builtin_bdd_shapes()).violations
    assert v.kind == "too-few" and v.path in (B["ref-object"], B["ref-agent"], B["ref-workspace"])


def test_conditional_constraint_follows_kind(graph):
    tcs = graph.instances_of(V.TIME_CONSTRAINT)
    during = next(tc for tc in tcs if graph.value(tc, B["constraint-kind"]) == Literal("during"))
    (t,) = graph.triples(during, B["ref-event-start"], None)
    graph.discard(t)
    (v,) = validate(graph, builtin_bdd_shapes()).violations
    assert (v.focus_node, v.path) == (during, B["ref-event-start"])


def test_counts_checked_before_kinds():
    c = PropertyConstraint(Iri(EX + "p"), 1, 1, "number")
    g = Graph([Triple(Iri(EX + "n"), Iri(EX + "p"), Literal("a")), Triple(Iri(EX + "n"), Iri(EX + "p"), Literal("b"))])
    assert check_constraint(g, Iri(EX + "n"), c).kind == "too-many"


def test_violations_sorted():
    shape = Shape(Iri(EX + "T"), (PropertyConstraint(Iri(EX + "p"), 1),))
    g = Graph([Triple(Iri(EX + n), V.TYPE, Iri(EX + "T")) for n in ("z", "a", "m")])
    report = validate(g, [shape])
    assert [v.focus_node.local_name for v in report.violations] == ["a", "m", "z"]


@pytest.mark.parametrize("kw", [
    dict(min_count=-1),
    dict(min_count=2, max_count=1),
    dict(value_kind="iri-of-class"),
    dict(value_kind="colour"),
])
def test_bad_constraints(kw):
    with pytest.raises(ValueError):
        PropertyConstraint(Iri(EX + "p"), **kw)


def test_duplicate_paths_rejected():
    c = PropertyConstraint(Iri(EX + "p"))
    with pytest.raises(ValueError):
        Shape(Iri(EX + "T"), (c, c))


def test_shapes_round_trip_through_jsonld():
    shapes = builtin_bdd_shapes()
    g = shapes_to_graph(shapes)
    back = shapes_from_graph(parse_jsonld(serialize_jsonld(g, shape_context())))
    assert back == shapes
