import random

import pytest

from qtwalk.graph import build_graph
from qtwalk.terms import Iri, QuotedTriple, Triple


def iri(name: str) -> Iri:
    return Iri(f"urn:t:{name}")


@pytest.fixture
def nested_example():
    """Two-level nesting: an asserted graph around an outer QT whose
    subject is itself a QT.

    inner = << e2 r2 e3 >>, outer = << inner r3 e4 >>,
    asserted: (e1, r1, outer), (outer, r6, e7).
    """
    e1, e2, e3, e4, e7 = (iri(n) for n in ("e1", "e2", "e3", "e4", "e7"))
    r1, r2, r3, r6 = (iri(n) for n in ("r1", "r2", "r3", "r6"))
    inner = QuotedTriple(e2, r2, e3)
    outer = QuotedTriple(inner, r3, e4)
    triples = [Triple(e1, r1, outer), Triple(outer, r6, e7)]
    graph = build_graph(triples)
    return {
        "graph": graph,
        "triples": triples,
        "inner": inner,
        "outer": outer,
        "e1": e1, "e2": e2, "e3": e3, "e4": e4, "e7": e7,
        "r1": r1, "r2": r2, "r3": r3, "r6": r6,
    }


@pytest.fixture
def rng():
    return random.Random(20240817)
