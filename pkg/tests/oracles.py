"""Independent reference implementations used as test oracles."""

import itertools
import random

from robobdd.kg import Graph, Iri, Literal, Triple
from robobdd.query import TriplePattern, Var

EX = "https://example.org/q/"
VAR_NAMES = ("a", "b", "c")


def brute_force_bgp(g: Graph, patterns) -> list[dict]:
    """Try every assignment of graph terms to the pattern variables."""
    names = sorted({t.name for p in patterns for t in (p.s, p.p, p.o) if isinstance(t, Var)})
    terms = sorted({t for tr in g for t in (tr.subject, tr.predicate, tr.object)}, key=repr)
    triples = g.triple_set()
    out = []
    for combo in itertools.product(terms, repeat=len(names)):
        b = dict(zip(names, combo))

        def sub(t):
            return b[t.name] if isinstance(t, Var) else t

        ok = True
        for p in patterns:
            s, pr, o = sub(p.s), sub(p.p), sub(p.o)
            if not isinstance(s, Iri) or not isinstance(pr, Iri) or Triple(s, pr, o) not in triples:
                ok = False
                break
        if ok:
            out.append(b)
    return out


def canonical(bindings) -> list:
    return sorted((tuple(sorted((k, repr(v)) for k, v in b.items())) for b in bindings))


def random_graph(rng: random.Random, max_triples: int = 30) -> Graph:
    iris = [Iri(EX + f"n{i}") for i in range(rng.randint(2, 6))]
    preds = [Iri(EX + f"p{i}") for i in range(rng.randint(1, 3))]
    lits = [Literal("x"), Literal(1.0), Literal(True)]
    g = Graph()
    for _ in range(rng.randint(0, max_triples)):
        o = rng.choice(iris + lits) if rng.random() < 0.8 else rng.choice(preds)
        s = rng.choice(iris + preds) if rng.random() < 0.9 else rng.choice(iris)
        g.add(Triple(s, rng.choice(preds), o))
    return g


def random_patterns(rng: random.Random, g: Graph, max_patterns: int = 3) -> list[TriplePattern]:
    terms = sorted({t for tr in g for t in (tr.subject, tr.predicate, tr.object)}, key=repr) or [Iri(EX + "n0")]
    iris = [t for t in terms if isinstance(t, Iri)] or [Iri(EX + "n0")]
    extra = Iri(EX + "absent")

    def term(position):
        if rng.random() < 0.6:
            return Var(rng.choice(VAR_NAMES))
        pool = iris + [extra] if position != "o" else terms + [extra]
        return rng.choice(pool)

    return [TriplePattern(term("s"), term("p"), term("o")) for _ in range(rng.randint(1, max_patterns))]
