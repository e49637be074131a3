from robobdd.dsl.ast import SceneModel, SourceModel, SourcePos
from robobdd.dsl.errors import (
    CyclicImport,
    DslError,
    DslSyntaxError,
    DuplicateName,
    ImportNotFound,
    LoweringError,
    UnknownReference,
)
from robobdd.dsl.lower import collect_project, load_project, lower_to_graph
from robobdd.dsl.parser import parse_bdd_dsl, parse_scene_dsl, tokenize

__all__ = [
    "CyclicImport",
    "DslError",
    "DslSyntaxError",
    "DuplicateName",
    "ImportNotFound",
    "LoweringError",
    "SceneModel",
    "SourceModel",
    "SourcePos",
    "UnknownReference",
    "collect_project",
    "load_project",
    "lower_to_graph",
    "parse_bdd_dsl",
    "parse_scene_dsl",
    "tokenize",
]
