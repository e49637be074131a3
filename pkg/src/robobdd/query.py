"""Basic graph pattern matching and CONSTRUCT over a :class:`Graph`.

Patterns are evaluated left to right; each pattern extends the bindings
produced so far.  Results come back in a normalized order so callers never
depend on pattern order or set iteration order.
"""

from __future__ import annotations

import json
import re
import shlex
from dataclasses import dataclass
from typing import Union

from robobdd.errors import MalformedPattern, MalformedQuery, UnboundTemplateVariable, UnknownPrefix
from robobdd.kg import Graph, Iri, Literal, PrefixContext, Term, Triple, expand, term_key, RDF_TYPE


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def __repr__(self):
        return f"?{self.name}"


PatternTerm = Union[Var, Iri, Literal]
Binding = dict[str, Term]


@dataclass(frozen=True, slots=True)
class TriplePattern:
    s: PatternTerm
    p: PatternTerm
    o: PatternTerm

    def __post_init__(self):
        for pos in ("s", "p"):
            if isinstance(getattr(self, pos), Literal):
                raise MalformedPattern(f"literal {getattr(self, pos)!r} in {pos} position")
        for pos in ("s", "p", "o"):
            if not isinstance(getattr(self, pos), (Var, Iri, Literal)):
                raise MalformedPattern(f"{pos} is not a variable or term: {getattr(self, pos)!r}")

    def variables(self) -> set[str]:
        return {t.name for t in (self.s, self.p, self.o) if isinstance(t, Var)}


def pattern_variables(patterns: list[TriplePattern]) -> list[str]:
    names: set[str] = set()
    for pat in patterns:
        names |= pat.variables()
    return sorted(names)


def _resolve(t: PatternTerm, b: Binding):
    if isinstance(t, Var):
        return b.get(t.name)
    return t


def _extend(b: Binding, t: PatternTerm, value: Term) -> Binding | None:
    if not isinstance(t, Var):
        return b
    bound = b.get(t.name)
    if bound is None:
        nb = dict(b)
        nb[t.name] = value
        return nb
    return b if bound == value else None


def _match_one(g: Graph, pat: TriplePattern, b: Binding):
    s, p, o = (_resolve(t, b) for t in (pat.s, pat.p, pat.o))
    if s is not None and not isinstance(s, Iri):
        return
    if p is not None and not isinstance(p, Iri):
        return
    for t in g.triples(s, p, o):
        nb = _extend(b, pat.s, t.subject)
        if nb is not None:
            nb = _extend(nb, pat.p, t.predicate)
        if nb is not None:
            nb = _extend(nb, pat.o, t.object)
        if nb is not None:
            yield nb


def binding_key(b: Binding, names: list[str]) -> tuple:
    return tuple(term_key(b[n]) for n in names)


def match_bgp(g: Graph, patterns: list[TriplePattern]) -> list[Binding]:
    """All solutions of the conjunction ``patterns`` over ``g``."""
    for pat in patterns:
        if not isinstance(pat, TriplePattern):
            raise MalformedPattern(f"not a triple pattern: {pat!r}")
    solutions: list[Binding] = [{}]
    for pat in patterns:
        solutions = [nb for b in solutions for nb in _match_one(g, pat, b)]
        if not solutions:
            return []
    names = pattern_variables(patterns)
    unique = {tuple((n, b[n]) for n in names): b for b in solutions}
    return sorted(unique.values(), key=lambda b: binding_key(b, names))


def construct(g: Graph, template: list[TriplePattern], where: list[TriplePattern]) -> Graph:
    where_vars = set(pattern_variables(where))
    missing = set(pattern_variables(template)) - where_vars
    if missing:
        raise UnboundTemplateVariable(f"template variables not bound by WHERE: {sorted(missing)}")
    out = Graph()
    for b in match_bgp(g, where):
        for pat in template:
            s, p, o = (_resolve(t, b) for t in (pat.s, pat.p, pat.o))
            # instantiations with a literal subject/predicate are not triples; skip them
            if isinstance(s, Iri) and isinstance(p, Iri):
                out.add(Triple(s, p, o))
    return out


# --- .bgp text form ----------------------------------------------------------

@dataclass
class Query:
    where: list[TriplePattern]
    construct: list[TriplePattern] | None = None


_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def _parse_term(token: str, ctx: PrefixContext, lineno: int) -> PatternTerm:
    if token.startswith("?"):
        if len(token) == 1:
            raise MalformedQuery(f"line {lineno}: empty variable name")
        return Var(token[1:])
    if token.startswith("<") and token.endswith(">"):
        return Iri(token[1:-1])
    if token.startswith('"'):
        return Literal(json.loads(token))
    if token in ("true", "false"):
        return Literal(token == "true")
    if _NUMBER.match(token):
        return Literal(float(token))
    if token == "a":
        return RDF_TYPE
    try:
        return expand(ctx, token)
    except UnknownPrefix as exc:
        raise MalformedQuery(f"line {lineno}: {exc}") from None


def _tokens(line: str, lineno: int) -> list[str]:
    lex = shlex.shlex(line, posix=False)
    lex.whitespace_split = True
    lex.commenters = "#"
    try:
        return list(lex)
    except ValueError as exc:
        raise MalformedQuery(f"line {lineno}: {exc}") from None


def parse_bgp(text: str, ctx: PrefixContext) -> Query:
    """Parse the line-oriented query format.

    One triple pattern per line.  ``CONSTRUCT`` and ``WHERE`` on their own
    lines open sections; without keywords the whole file is a WHERE body.
    ``#`` starts a comment and a trailing ``.`` is ignored.
    """
    sections: dict[str, list[TriplePattern]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw, lineno)
        if not toks:
            continue
        if len(toks) == 1 and toks[0] in ("CONSTRUCT", "WHERE"):
            kw = toks[0]
            if kw in sections:
                raise MalformedQuery(f"line {lineno}: duplicate {kw} section")
            if kw == "CONSTRUCT" and "WHERE" in sections:
                raise MalformedQuery(f"line {lineno}: CONSTRUCT must precede WHERE")
            sections[kw] = []
            current = kw
            continue
        if toks[-1] == ".":
            toks = toks[:-1]
        if len(toks) != 3:
            raise MalformedQuery(f"line {lineno}: expected 3 terms, got {len(toks)}")
        if current is None:
            current = "WHERE"
            sections[current] = []
        try:
            sections[current].append(TriplePattern(*(_parse_term(t, ctx, lineno) for t in toks)))
        except (MalformedPattern, ValueError) as exc:
            raise MalformedQuery(f"line {lineno}: {exc}") from None
    if "CONSTRUCT" in sections and "WHERE" not in sections:
        raise MalformedQuery("CONSTRUCT without WHERE")
    return Query(sections.get("WHERE", []), sections.get("CONSTRUCT"))
