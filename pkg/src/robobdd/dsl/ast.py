from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

PREDICATE_ROLES = {
    "IsLocatedAt": frozenset({"object", "workspace"}),
    "IsHeldBy": frozenset({"object", "agent"}),
    "DoesNotCollide": frozenset({"agent", "workspace"}),
}


@dataclass(frozen=True)
class SourcePos:
    line: int
    col: int
    file: str = "<string>"

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}"


@dataclass
class Timing:
    kind: str  # after-event | before-event | during
    events: tuple[str, ...]
    pos: SourcePos


@dataclass
class ClauseDecl:
    predicate: str
    roles: dict[str, str]
    timing: Timing
    pos: SourcePos


@dataclass
class TemplateDecl:
    name: str
    variables: list[str]
    given: list[ClauseDecl]
    behaviour: str
    emits: list[str]
    then: list[ClauseDecl]
    pos: SourcePos
    var_pos: dict[str, SourcePos] = field(default_factory=dict)


@dataclass
class VariationDecl:
    variable: str
    values: list[str]
    pos: SourcePos


@dataclass
class VariantDecl:
    name: str
    template: str
    scene: str
    variations: list[VariationDecl]
    pos: SourcePos


@dataclass
class StoryDecl:
    name: str
    variants: list[VariantDecl]
    pos: SourcePos


@dataclass
class EventDecl:
    name: str
    pos: SourcePos


@dataclass
class ImportDecl:
    path: str
    pos: SourcePos


@dataclass
class SourceModel:
    imports: list[ImportDecl] = field(default_factory=list)
    events: list[EventDecl] = field(default_factory=list)
    templates: list[TemplateDecl] = field(default_factory=list)
    stories: list[StoryDecl] = field(default_factory=list)
    file: str = "<string>"


@dataclass
class ObjectDecl:
    name: str
    mass_kg: float
    half_extents_m: tuple[float, float, float]
    pos: SourcePos
    position_range_m: Optional[tuple[float, float, float, float]] = None


@dataclass
class AgentDecl:
    name: str
    ee: str  # gripper | suction
    pos: SourcePos


@dataclass
class WorkspaceDecl:
    name: str
    aabb_m: tuple[float, float, float, float, float, float]
    kind: str  # table | bin
    pos: SourcePos
    bin_base_height_m: Optional[float] = None


@dataclass
class SceneModel:
    name: str
    objects: list[ObjectDecl] = field(default_factory=list)
    agents: list[AgentDecl] = field(default_factory=list)
    workspaces: list[WorkspaceDecl] = field(default_factory=list)
    file: str = "<string>"

    def element_names(self) -> dict[str, str]:
        """name -> element kind (object | agent | workspace)."""
        out = {}
        for kind, items in (("object", self.objects), ("agent", self.agents), ("workspace", self.workspaces)):
            for item in items:
                out[item.name] = kind
        return out
