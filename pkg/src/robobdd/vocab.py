"""Metamodel vocabulary: BDD concepts, scene/environment attributes, shape terms."""

from robobdd.kg import Iri, PrefixContext, RDF_TYPE

BDD_NS = "https://my.url/metamodels/bdd#"
ENV_NS = "https://my.url/metamodels/env#"
SHAPE_NS = "https://my.url/metamodels/shape#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

DEFAULT_MODEL_NS = "https://my.url/models/lab"
DEFAULT_MODEL_PREFIX = "lab"


class Namespace(str):
    def __getitem__(self, name) -> Iri:
        if isinstance(name, (int, slice)):
            return str.__getitem__(self, name)
        return Iri(str(self) + name)

    def __getattr__(self, name) -> Iri:
        if name.startswith("_"):
            raise AttributeError(name)
        return Iri(str(self) + name)


BDD = Namespace(BDD_NS)
ENV = Namespace(ENV_NS)
SH = Namespace(SHAPE_NS)

TYPE = RDF_TYPE

# classes
SCENARIO = BDD.Scenario
GIVEN = BDD.Given
WHEN = BDD.When
THEN = BDD.Then
BEHAVIOUR = BDD.Behaviour
EVENT = BDD.Event
EVENT_EMISSION = BDD.EventEmission
FLUENT_CLAUSE = BDD.FluentClause
TIME_CONSTRAINT = BDD.TimeConstraint
SCENARIO_VARIABLE = BDD.ScenarioVariable
TASK = BDD.Task
TASK_VARIATION = BDD.TaskVariation
SCENE = BDD.Scene
SCENE_HAS_OBJECT = BDD.SceneHasObject
SCENE_HAS_AGENT = BDD.SceneHasAgent
SCENE_HAS_WORKSPACE = BDD.SceneHasWorkspace
SCENARIO_TEMPLATE = BDD.ScenarioTemplate
SCENARIO_VARIANT = BDD.ScenarioVariant
USER_STORY = BDD.UserStory

OBJECT = ENV.Object
AGENT = ENV.Agent
WORKSPACE = ENV.Workspace
BIN = ENV.Bin
TABLE = ENV.Table

# predicate kinds of fluent clauses
IS_LOCATED_AT = BDD.IsLocatedAt
IS_HELD_BY = BDD.IsHeldBy
DOES_NOT_COLLIDE = BDD.DoesNotCollide

# relations used by the metamodel, (local name, id-valued)
BDD_RELATIONS = [
    ("name", False),
    ("order", False),
    ("has-given", True),
    ("has-when", True),
    ("has-then", True),
    ("of-behaviour", True),
    ("emitted-by", True),
    ("clause-of", True),
    ("predicate", True),
    ("holds-at", True),
    ("ref-object", True),
    ("ref-agent", True),
    ("ref-workspace", True),
    ("constraint-kind", False),
    ("ref-event", True),
    ("ref-event-start", True),
    ("ref-event-end", True),
    ("of-task", True),
    ("of-variable", True),
    ("can-be", True),
    ("of-scene", True),
    ("ref-element", True),
    ("of-scenario", True),
    ("has-scene", True),
    ("has-clause", True),
    ("has-variable", True),
    ("of-template", True),
    ("has-variation", True),
    ("has-variant", True),
]

ENV_ATTRIBUTES = [
    "mass-kg",
    "half-extent-x",
    "half-extent-y",
    "half-extent-z",
    "position-min-x",
    "position-min-y",
    "position-max-x",
    "position-max-y",
    "ee-kind",
    "workspace-kind",
    "aabb-min-x",
    "aabb-min-y",
    "aabb-min-z",
    "aabb-max-x",
    "aabb-max-y",
    "aabb-max-z",
    "bin-base-height-m",
]

ROLE_PREDICATES = {
    "object": BDD["ref-object"],
    "agent": BDD["ref-agent"],
    "workspace": BDD["ref-workspace"],
}

SECTION_CLASSES = {"Given": GIVEN, "Then": THEN}


def default_context(model_ns: str = DEFAULT_MODEL_NS, model_prefix: str = DEFAULT_MODEL_PREFIX) -> PrefixContext:
    """Prefixes for metamodels plus the model namespace, and one term per relation."""
    ctx = PrefixContext(
        {
            "bdd": BDD_NS,
            "env": ENV_NS,
            "rdf": RDF_NS,
            model_prefix: model_ns.rstrip("/") + "/",
        }
    )
    for name, coerced in BDD_RELATIONS:
        ctx.terms[name] = (BDD[name], coerced)
    for name in ENV_ATTRIBUTES:
        ctx.terms[name] = (ENV[name], False)
    return ctx
