"""Knowledge-graph core: terms, triple sets and a closed JSON-LD subset.

Only the constructs needed by the BDD models are understood: ``@context``
(prefixes and term definitions with ``"@type": "@id"`` coercion), ``@graph``,
``@id`` and ``@type``.  Every node must carry an ``@id``; blank nodes are
rejected so that graph comparison is plain set comparison.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from robobdd.errors import JsonLdError, JsonLdSyntaxError, MissingId, UnknownPrefix

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*$")

# schemes accepted as absolute even without "//" (otherwise "x:y" is a CURIE)
ABSOLUTE_SCHEMES = frozenset({"urn", "mailto", "tag", "file", "data"})


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not self.value:
            raise ValueError("IRI must be a non-empty string")
        scheme, sep, _ = self.value.partition(":")
        if not sep or not _SCHEME.match(scheme):
            raise ValueError(f"not an absolute IRI: {self.value!r}")

    def __str__(self):
        return self.value

    def __repr__(self):
        return f"<{self.value}>"

    @property
    def local_name(self) -> str:
        """Text after the last ``#`` or ``/``."""
        return re.split(r"[#/]", self.value)[-1]


@dataclass(frozen=True, eq=False, slots=True)
class Literal:
    """Text, double-precision number or boolean literal."""

    value: Union[str, float, bool]

    def __post_init__(self):
        v = self.value
        if isinstance(v, bool) or isinstance(v, str):
            return
        if isinstance(v, (int, float)):
            v = float(v)
            if not math.isfinite(v):
                raise ValueError("numeric literals must be finite")
            object.__setattr__(self, "value", v)
            return
        raise TypeError(f"unsupported literal value {v!r}")

    @property
    def kind(self) -> str:
        if isinstance(self.value, bool):
            return "boolean"
        if isinstance(self.value, float):
            return "number"
        return "text"

    def __eq__(self, other):
        if not isinstance(other, Literal):
            return NotImplemented
        return self.kind == other.kind and self.value == other.value

    def __hash__(self):
        return hash((self.kind, self.value))

    def __repr__(self):
        return f"Literal({self.value!r})"


Term = Union[Iri, Literal]

_KIND_RANK = {"boolean": 0, "number": 1, "text": 2}


def term_key(t: Term) -> tuple:
    """Total order over terms: IRIs first, then literals by kind and value."""
    if isinstance(t, Iri):
        return (0, 0, t.value)
    return (1, _KIND_RANK[t.kind], t.value)


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, Iri):
            raise TypeError(f"subject must be an IRI, got {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise TypeError(f"predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (Iri, Literal)):
            raise TypeError(f"object must be a term, got {self.object!r}")

    def sort_key(self) -> tuple:
        return (self.subject.value, self.predicate.value, term_key(self.object))


class Graph:
    """A set of triples with a subject/predicate index."""

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: set[Triple] = set()
        self._spo: dict[Iri, dict[Iri, set[Term]]] = {}
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> None:
        if triple in self._triples:
            return
        self._triples.add(triple)
        self._spo.setdefault(triple.subject, {}).setdefault(triple.predicate, set()).add(triple.object)

    def add_all(self, triples: Iterable[Triple]) -> None:
        for t in triples:
            self.add(t)

    def discard(self, triple: Triple) -> None:
        if triple not in self._triples:
            return
        self._triples.discard(triple)
        objs = self._spo[triple.subject][triple.predicate]
        objs.discard(triple.object)
        if not objs:
            del self._spo[triple.subject][triple.predicate]
            if not self._spo[triple.subject]:
                del self._spo[triple.subject]

    def copy(self) -> "Graph":
        return Graph(self._triples)

    def __len__(self):
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._triples, key=Triple.sort_key))

    def __contains__(self, triple):
        return triple in self._triples

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __repr__(self):
        return f"<Graph {len(self)} triples>"

    def triple_set(self) -> frozenset[Triple]:
        return frozenset(self._triples)

    def subjects(self) -> list[Iri]:
        return sorted(self._spo, key=lambda s: s.value)

    def predicates_of(self, s: Iri) -> list[Iri]:
        return sorted(self._spo.get(s, {}), key=lambda p: p.value)

    def objects(self, s: Iri, p: Iri) -> list[Term]:
        return sorted(self._spo.get(s, {}).get(p, ()), key=term_key)

    def value(self, s: Iri, p: Iri, default=None):
        """The single object of ``(s, p, ·)``; ``default`` if absent."""
        objs = self._spo.get(s, {}).get(p)
        if not objs:
            return default
        if len(objs) > 1:
            raise ValueError(f"{s} has {len(objs)} values for {p}")
        return next(iter(objs))

    def triples(self, s=None, p=None, o=None) -> Iterator[Triple]:
        """Triples matching the given positions (``None`` is a wildcard)."""
        if s is not None:
            by_p = self._spo.get(s, {})
            preds = [p] if p is not None else list(by_p)
            for pred in preds:
                for obj in by_p.get(pred, ()):
                    if o is None or obj == o:
                        yield Triple(s, pred, obj)
            return
        for t in self._triples:
            if (p is None or t.predicate == p) and (o is None or t.object == o):
                yield t

    def subjects_with(self, p: Iri, o: Term) -> list[Iri]:
        return sorted({t.subject for t in self.triples(p=p, o=o)}, key=lambda s: s.value)

    def types(self, s: Iri) -> set[Iri]:
        return {o for o in self._spo.get(s, {}).get(RDF_TYPE, ()) if isinstance(o, Iri)}

    def instances_of(self, cls: Iri) -> list[Iri]:
        return self.subjects_with(RDF_TYPE, cls)


RDF_TYPE = Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")


def objects_of(g: Graph, s: Iri, p: Iri) -> list[Term]:
    return g.objects(s, p)


@dataclass
class PrefixContext:
    """Prefix declarations plus term definitions (term -> (IRI, id-coerced))."""

    prefixes: dict[str, str] = field(default_factory=dict)
    terms: dict[str, tuple[Iri, bool]] = field(default_factory=dict)

    def __post_init__(self):
        for prefix, ns in self.prefixes.items():
            if not prefix or ":" in prefix:
                raise ValueError(f"invalid prefix name {prefix!r}")
            if not ns:
                raise ValueError(f"prefix {prefix!r} maps to an empty namespace")

    def merged(self, other: "PrefixContext") -> "PrefixContext":
        return PrefixContext({**self.prefixes, **other.prefixes}, {**self.terms, **other.terms})

    def compact(self, iri: Iri) -> str:
        """CURIE for ``iri`` using the longest matching namespace, else the IRI itself."""
        best = None
        for prefix, ns in self.prefixes.items():
            if iri.value.startswith(ns) and len(iri.value) > len(ns):
                suffix = iri.value[len(ns):]
                if suffix.startswith("//"):
                    continue
                cand = (-len(ns), prefix, suffix)
                if best is None or cand < best:
                    best = cand
        if best is not None:
            curie = f"{best[1]}:{best[2]}"
            if curie not in self.terms:
                return curie
        return iri.value

    def term_for(self, iri: Iri, coerced: bool) -> str | None:
        names = sorted(n for n, (t, c) in self.terms.items() if t == iri and c == coerced)
        return names[0] if names else None

    def to_json(self) -> dict:
        out: dict = dict(self.prefixes)
        for name, (iri, coerced) in self.terms.items():
            entry = {"@id": self.compact(iri)}
            if coerced:
                entry["@type"] = "@id"
            out[name] = entry
        return out

    @classmethod
    def from_json(cls, obj) -> "PrefixContext":
        if not isinstance(obj, dict):
            raise JsonLdError("@context must be an object")
        prefixes = {k: v for k, v in obj.items() if isinstance(v, str)}
        ctx = cls(prefixes)
        for name, defn in obj.items():
            if isinstance(defn, str):
                continue
            if not isinstance(defn, dict) or "@id" not in defn:
                raise JsonLdError(f"term definition for {name!r} needs an @id")
            extra = set(defn) - {"@id", "@type"}
            if extra:
                raise JsonLdError(f"unsupported keys in term {name!r}: {sorted(extra)}")
            coerce = defn.get("@type")
            if coerce not in (None, "@id"):
                raise JsonLdError(f"term {name!r}: only '@type': '@id' coercion is supported")
            ctx.terms[name] = (_expand(ctx, defn["@id"], vocab=False), coerce == "@id")
        return ctx


def _expand(ctx: PrefixContext, token: str, vocab: bool) -> Iri:
    if not isinstance(token, str) or not token:
        raise UnknownPrefix(repr(token), "not an IRI token")
    if vocab and token in ctx.terms:
        return ctx.terms[token][0]
    prefix, sep, suffix = token.partition(":")
    if not sep:
        raise UnknownPrefix(token, "not a term, CURIE or absolute IRI")
    if suffix.startswith("//"):
        return Iri(token)
    if prefix in ctx.prefixes:
        return Iri(ctx.prefixes[prefix] + suffix)
    if prefix in ABSOLUTE_SCHEMES:
        return Iri(token)
    raise UnknownPrefix(token)


def expand(ctx: PrefixContext, token: str) -> Iri:
    """Expand a term, CURIE or absolute IRI to an absolute IRI."""
    return _expand(ctx, token, vocab=True)


def _syntax_error(text: str, exc: json.JSONDecodeError) -> JsonLdSyntaxError:
    return JsonLdSyntaxError(exc.msg, exc.lineno, exc.colno)


def _literal_or_iri(ctx, value, coerced: bool, where: str) -> Term:
    if isinstance(value, dict):
        if set(value) == {"@id"}:
            return _expand(ctx, value["@id"], vocab=False)
        if set(value) == {"@value"} and isinstance(value["@value"], (str, int, float, bool)):
            return Literal(value["@value"])
        raise JsonLdError(f"unsupported value object at {where}: {sorted(value)}")
    if isinstance(value, bool):
        return Literal(value)
    if isinstance(value, (int, float)):
        return Literal(float(value))
    if isinstance(value, str):
        return _expand(ctx, value, vocab=False) if coerced else Literal(value)
    raise JsonLdError(f"unsupported value at {where}: {value!r}")


def parse_jsonld(text: str, base_context: PrefixContext | None = None) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _syntax_error(text, exc) from None
    return graph_from_document(doc, base_context)


def graph_from_document(doc, base_context: PrefixContext | None = None) -> Graph:
    if not isinstance(doc, dict):
        raise JsonLdError("top level must be an object")
    unknown = set(doc) - {"@context", "@graph"}
    if unknown:
        raise JsonLdError(f"unsupported top-level keys: {sorted(unknown)}")
    ctx = base_context or PrefixContext()
    if "@context" in doc:
        ctx = ctx.merged(PrefixContext.from_json(doc["@context"]))
    nodes = doc.get("@graph", [])
    if not isinstance(nodes, list):
        raise JsonLdError("@graph must be an array")
    g = Graph()
    for i, node in enumerate(nodes):
        path = f"@graph[{i}]"
        if not isinstance(node, dict):
            raise JsonLdError(f"{path} is not a node object")
        if "@id" not in node:
            raise MissingId(path)
        subject = _expand(ctx, node["@id"], vocab=False)
        for key in sorted(node):
            if key == "@id":
                continue
            values = node[key]
            if not isinstance(values, list):
                values = [values]
            if key == "@type":
                for v in values:
                    g.add(Triple(subject, RDF_TYPE, expand(ctx, v)))
                continue
            if key.startswith("@"):
                raise JsonLdError(f"unsupported keyword {key} at {path}")
            predicate = expand(ctx, key)
            coerced = key in ctx.terms and ctx.terms[key][1]
            for v in values:
                if isinstance(v, list):
                    raise JsonLdError(f"nested arrays are not supported at {path}.{key}")
                g.add(Triple(subject, predicate, _literal_or_iri(ctx, v, coerced, f"{path}.{key}")))
    return g


def _json_number(x: float):
    if x.is_integer() and abs(x) < 2**53:
        return int(x)
    return x


def _encode(ctx: PrefixContext, o: Term, coerced: bool):
    if isinstance(o, Iri):
        return ctx.compact(o) if coerced else {"@id": ctx.compact(o)}
    if o.kind == "number":
        return _json_number(o.value)
    if o.kind == "text" and coerced:
        return {"@value": o.value}
    return o.value


def _node_key(ctx: PrefixContext, p: Iri, objs: list[Term]) -> tuple[str, bool]:
    all_iris = all(isinstance(o, Iri) for o in objs)
    name = ctx.term_for(p, coerced=all_iris) or ctx.term_for(p, coerced=not all_iris)
    if name is not None:
        return name, ctx.terms[name][1]
    return ctx.compact(p), False


def document_from_graph(g: Graph, ctx: PrefixContext) -> dict:
    nodes = []
    for s in g.subjects():
        node: dict = {"@id": ctx.compact(s)}
        for p in g.predicates_of(s):
            objs = g.objects(s, p)
            if p == RDF_TYPE:
                types = [o for o in objs if isinstance(o, Iri)]
                if types:
                    node["@type"] = [ctx.compact(t) for t in types]
                objs = [o for o in objs if not isinstance(o, Iri)]
                if not objs:
                    continue
                key, coerced = ctx.compact(p), False
            else:
                key, coerced = _node_key(ctx, p, objs)
            encoded = [_encode(ctx, o, coerced) for o in objs]
            node[key] = encoded[0] if len(encoded) == 1 else encoded
        nodes.append(node)
    return {"@context": ctx.to_json(), "@graph": nodes}


def serialize_jsonld(g: Graph, ctx: PrefixContext) -> str:
    """Deterministic text: subjects sorted, keys sorted, 2-space indent, trailing newline."""
    doc = document_from_graph(g, ctx)
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
