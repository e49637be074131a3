"""Hand-written lexer and LL(1) parsers for the ``.bdd`` and ``.scene`` languages.

Acceptance-criteria grammar::

    model      := import* eventDecl* templateDecl* storyDecl*
    import     := "import" STRING
    eventDecl  := "Event" IDENT
    template   := "Template" IDENT "{" ("var" IDENT)+ "Given:" clause+
                  "When:" "behaviour" IDENT "emits" IDENT+ "Then:" clause+ "}"
    clause     := "<" predicate ">" "(" role "=" IDENT ("," role "=" IDENT)* ")" timing
    timing     := "after" "event" IDENT | "before" "event" IDENT | "during" IDENT ".." IDENT
    storyDecl  := "Story" IDENT "{" variant+ "}"
    variant    := "Variant" IDENT "{" "template:" IDENT "scene:" IDENT
                  ("foreach" IDENT "in" "[" IDENT ("," IDENT)* "]")* "}"

Scene grammar::

    Object IDENT { mass_kg: NUM half_extents_m: NUM NUM NUM (position_range_m: NUM NUM NUM NUM)? }
    Agent IDENT { ee: gripper|suction }
    Workspace IDENT { aabb_m: NUM NUM NUM NUM NUM NUM kind: table|bin (bin_base_height_m: NUM)? }
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from robobdd.dsl.ast import (
    PREDICATE_ROLES,
    AgentDecl,
    ClauseDecl,
    EventDecl,
    ImportDecl,
    ObjectDecl,
    SceneModel,
    SourceModel,
    SourcePos,
    StoryDecl,
    TemplateDecl,
    Timing,
    VariantDecl,
    VariationDecl,
    WorkspaceDecl,
)
from robobdd.dsl.errors import DslSyntaxError, DuplicateName, UnknownReference

_TOKEN_SPEC = [
    ("WS", r"[ \t\r]+"),
    ("NL", r"\n"),
    ("COMMENT", r"//[^\n]*"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("NUM", r"-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_\-]*"),
    ("RANGE", r"\.\."),
    ("PUNCT", r"[{}()<>=,\[\]:]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | NUM | STRING | PUNCT | RANGE | EOF
    text: str
    pos: SourcePos


def tokenize(text: str, file: str = "<string>") -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[i]!r}", SourcePos(line, i - line_start + 1, file))
        kind = m.lastgroup
        if kind == "NL":
            line += 1
            line_start = m.end()
        elif kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, m.group(), SourcePos(line, i - line_start + 1, file)))
        i = m.end()
    tokens.append(Token("EOF", "", SourcePos(line, i - line_start + 1, file)))
    return tokens


class _Parser:
    def __init__(self, text: str, file: str):
        self.file = file
        self.toks = tokenize(text, file)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, text: str) -> bool:
        return self.tok.kind in ("IDENT", "PUNCT", "RANGE") and self.tok.text == text

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def fail(self, expected: str):
        got = self.tok.text or "end of file"
        raise DslSyntaxError(f"unexpected {got!r}", self.tok.pos, expected)

    def expect(self, text: str) -> Token:
        if not self.peek(text):
            self.fail(repr(text))
        return self.next()

    def keyword_colon(self, word: str) -> Token:
        t = self.expect(word)
        self.expect(":")
        return t

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "IDENT":
            self.fail(what)
        return self.next()

    def number(self, what: str = "number") -> float:
        if self.tok.kind != "NUM":
            self.fail(what)
        t = self.next()
        value = float(t.text)
        if not math.isfinite(value):
            raise DslSyntaxError("number is not finite", t.pos)
        return value

    def string(self) -> Token:
        if self.tok.kind != "STRING":
            self.fail("string")
        return self.next()


class _BddParser(_Parser):
    def model(self) -> SourceModel:
        m = SourceModel(file=self.file)
        while self.peek("import"):
            self.next()
            s = self.string()
            m.imports.append(ImportDecl(s.text[1:-1], s.pos))
        while self.peek("Event"):
            self.next()
            t = self.ident("event name")
            m.events.append(EventDecl(t.text, t.pos))
        while self.peek("Template"):
            m.templates.append(self.template())
        while self.peek("Story"):
            m.stories.append(self.story())
        if self.tok.kind != "EOF":
            self.fail("'import', 'Event', 'Template', 'Story' or end of file")
        return m

    def template(self) -> TemplateDecl:
        start = self.expect("Template")
        name = self.ident("template name")
        self.expect("{")
        variables, var_pos = [], {}
        self.expect("var")
        while True:
            v = self.ident("variable name")
            if v.text in var_pos:
                raise DuplicateName(f"variable {v.text!r} declared twice", v.pos)
            variables.append(v.text)
            var_pos[v.text] = v.pos
            if not self.peek("var"):
                break
            self.next()
        self.keyword_colon("Given")
        given = self.clauses(var_pos)
        self.keyword_colon("When")
        self.expect("behaviour")
        behaviour = self.ident("behaviour name").text
        self.expect("emits")
        emits = [self.ident("event name").text]
        while self.tok.kind == "IDENT" and not self.peek("Then"):
            emits.append(self.next().text)
        self.keyword_colon("Then")
        then = self.clauses(var_pos)
        self.expect("}")
        return TemplateDecl(name.text, variables, given, behaviour, emits, then, start.pos, var_pos)

    def clauses(self, var_pos) -> list[ClauseDecl]:
        out = [self.clause(var_pos)]
        while self.peek("<"):
            out.append(self.clause(var_pos))
        return out

    def clause(self, var_pos) -> ClauseDecl:
        start = self.expect("<")
        pred = self.ident("predicate")
        if pred.text not in PREDICATE_ROLES:
            raise DslSyntaxError(f"unknown predicate {pred.text!r}", pred.pos, " | ".join(PREDICATE_ROLES))
        self.expect(">")
        self.expect("(")
        roles: dict[str, str] = {}
        while True:
            role = self.ident("role")
            if role.text not in ("object", "agent", "workspace"):
                raise DslSyntaxError(f"unknown role {role.text!r}", role.pos, "object | agent | workspace")
            if role.text in roles:
                raise DuplicateName(f"role {role.text!r} given twice", role.pos)
            self.expect("=")
            var = self.ident("variable name")
            if var.text not in var_pos:
                raise UnknownReference(f"undeclared variable {var.text!r}", var.pos)
            roles[role.text] = var.text
            if not self.peek(","):
                break
            self.next()
        close = self.expect(")")
        wanted = PREDICATE_ROLES[pred.text]
        if set(roles) != wanted:
            raise DslSyntaxError(
                f"{pred.text} takes roles {sorted(wanted)}, got {sorted(roles)}", close.pos, ", ".join(sorted(wanted))
            )
        return ClauseDecl(pred.text, roles, self.timing(), start.pos)

    def timing(self) -> Timing:
        t = self.tok
        if self.peek("after") or self.peek("before"):
            kind = self.next().text + "-event"
            self.expect("event")
            return Timing(kind, (self.ident("event name").text,), t.pos)
        if self.peek("during"):
            self.next()
            a = self.ident("event name").text
            if self.tok.kind != "RANGE":
                self.fail("'..'")
            self.next()
            b = self.ident("event name").text
            return Timing("during", (a, b), t.pos)
        self.fail("'after event', 'before event' or 'during'")

    def story(self) -> StoryDecl:
        start = self.expect("Story")
        name = self.ident("story name")
        self.expect("{")
        variants = [self.variant()]
        while self.peek("Variant"):
            variants.append(self.variant())
        self.expect("}")
        return StoryDecl(name.text, variants, start.pos)

    def variant(self) -> VariantDecl:
        start = self.expect("Variant")
        name = self.ident("variant name")
        self.expect("{")
        self.keyword_colon("template")
        template = self.ident("template name").text
        self.keyword_colon("scene")
        scene = self.ident("scene name").text
        variations = []
        seen = set()
        while self.peek("foreach"):
            f = self.next()
            var = self.ident("variable name")
            if var.text in seen:
                raise DuplicateName(f"variable {var.text!r} varied twice", var.pos)
            seen.add(var.text)
            self.expect("in")
            self.expect("[")
            values = [self.ident("element name").text]
            while self.peek(","):
                self.next()
                values.append(self.ident("element name").text)
            self.expect("]")
            if len(set(values)) != len(values):
                raise DuplicateName(f"repeated value in variation of {var.text!r}", f.pos)
            variations.append(VariationDecl(var.text, values, f.pos))
        self.expect("}")
        return VariantDecl(name.text, template, scene, variations, start.pos)


def _check_unique(items, kind):
    seen = {}
    for item in items:
        if item.name in seen:
            raise DuplicateName(f"{kind} {item.name!r} already declared at {seen[item.name]}", item.pos)
        seen[item.name] = item.pos


def parse_bdd_dsl(text: str, file: str = "<string>") -> SourceModel:
    model = _BddParser(text, file).model()
    _check_unique(model.events, "event")
    _check_unique(model.templates, "template")
    _check_unique(model.stories, "story")
    _check_unique([v for s in model.stories for v in s.variants], "variant")
    return model


class _SceneParser(_Parser):
    def scene(self, name: str) -> SceneModel:
        sm = SceneModel(name, file=self.file)
        while self.tok.kind != "EOF":
            if self.peek("Object"):
                sm.objects.append(self.object())
            elif self.peek("Agent"):
                sm.agents.append(self.agent())
            elif self.peek("Workspace"):
                sm.workspaces.append(self.workspace())
            else:
                self.fail("'Object', 'Agent' or 'Workspace'")
        return sm

    def object(self) -> ObjectDecl:
        start = self.expect("Object")
        name = self.ident("object name")
        self.expect("{")
        self.keyword_colon("mass_kg")
        mass_pos = self.tok.pos
        mass = self.number()
        if mass <= 0:
            raise DslSyntaxError("mass must be positive", mass_pos)
        self.keyword_colon("half_extents_m")
        extents = []
        for _ in range(3):
            p = self.tok.pos
            h = self.number("half extent")
            if h <= 0:
                raise DslSyntaxError("half extents must be positive", p)
            extents.append(h)
        prange = None
        if self.peek("position_range_m"):
            kw = self.keyword_colon("position_range_m")
            prange = tuple(self.number() for _ in range(4))
            if not (prange[0] < prange[2] and prange[1] < prange[3]):
                raise DslSyntaxError("position range needs min < max on x and y", kw.pos)
        self.expect("}")
        return ObjectDecl(name.text, mass, tuple(extents), start.pos, prange)

    def agent(self) -> AgentDecl:
        start = self.expect("Agent")
        name = self.ident("agent name")
        self.expect("{")
        self.keyword_colon("ee")
        ee = self.ident("'gripper' or 'suction'")
        if ee.text not in ("gripper", "suction"):
            raise DslSyntaxError(f"unknown end-effector {ee.text!r}", ee.pos, "gripper | suction")
        self.expect("}")
        return AgentDecl(name.text, ee.text, start.pos)

    def workspace(self) -> WorkspaceDecl:
        start = self.expect("Workspace")
        name = self.ident("workspace name")
        self.expect("{")
        kw = self.keyword_colon("aabb_m")
        box = tuple(self.number() for _ in range(6))
        if not all(box[i] < box[i + 3] for i in range(3)):
            raise DslSyntaxError("AABB needs min < max on every axis", kw.pos)
        self.keyword_colon("kind")
        kind = self.ident("'table' or 'bin'")
        if kind.text not in ("table", "bin"):
            raise DslSyntaxError(f"unknown workspace kind {kind.text!r}", kind.pos, "table | bin")
        base = None
        if self.peek("bin_base_height_m"):
            self.keyword_colon("bin_base_height_m")
            p = self.tok.pos
            base = self.number()
            if base <= 0:
                raise DslSyntaxError("bin base height must be positive", p)
        self.expect("}")
        return WorkspaceDecl(name.text, box, kind.text, start.pos, base)


def parse_scene_dsl(text: str, name: str = "scene", file: str = "<string>") -> SceneModel:
    sm = _SceneParser(text, file).scene(name)
    _check_unique(sm.objects + sm.agents + sm.workspaces, "scene element")
    return sm
