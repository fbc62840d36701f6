"""RDF-star term model: IRIs, literals, and recursively quoted triples.

Terms are immutable value objects. Two terms are equal iff their canonical
serializations are byte-equal, which the frozen dataclasses guarantee as
long as serialization is injective (see ``serialize_term``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
KGC_NS = "http://kgc.knowledge-graph.jp/ontology/kgc.owl#"

RDF_TYPE = f"{RDF_NS}type"
XSD_INTEGER = f"{XSD_NS}integer"
XSD_DECIMAL = f"{XSD_NS}decimal"
OWL_NOTHING = f"{OWL_NS}Nothing"

# Reserved predicate used to wrap duplicate quoted triples with a unique id.
ID_PREDICATE = f"{KGC_NS}sid"


@dataclass(frozen=True)
class Iri:
    value: str


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str | None = None
    language: str | None = None


@dataclass(frozen=True)
class QuotedTriple:
    subject: "Term"
    predicate: Iri
    object: "Term"


Term = Iri | Literal | QuotedTriple


@dataclass(frozen=True)
class Triple:
    """An asserted triple.  Subject is never a literal."""

    subject: Iri | QuotedTriple
    predicate: Iri
    object: Term


_LITERAL_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def _escape_lexical(s: str) -> str:
    out = []
    for ch in s:
        if ch in _LITERAL_ESCAPES:
            out.append(_LITERAL_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def serialize_term(t: Term) -> str:
    """Canonical text form of a term.

    IRIs as ``<iri>``, literals as ``"lexical"`` with an optional ``^^<dt>``
    or ``@lang`` suffix, quoted triples as ``<< S P O >>`` with single
    spaces, recursively.  Parsing the result yields an equal term.
    """
    if isinstance(t, Iri):
        return f"<{t.value}>"
    if isinstance(t, Literal):
        base = f'"{_escape_lexical(t.lexical)}"'
        if t.language is not None:
            return f"{base}@{t.language}"
        if t.datatype is not None:
            return f"{base}^^<{t.datatype}>"
        return base
    if isinstance(t, QuotedTriple):
        return (
            f"<< {serialize_term(t.subject)} {serialize_term(t.predicate)} "
            f"{serialize_term(t.object)} >>"
        )
    raise TypeError(f"not a Term: {t!r}")


def serialize_triple(t: Triple) -> str:
    return (
        f"{serialize_term(t.subject)} {serialize_term(t.predicate)} "
        f"{serialize_term(t.object)} ."
    )


@lru_cache(maxsize=65536)
def _cached_key(t: Term) -> str:
    return serialize_term(t)


def term_sort_key(t: Term) -> str:
    """Stable ordering key; used everywhere candidate order matters."""
    return _cached_key(t)


def qt_depth(t: Term) -> int:
    """Nesting depth of a quoted triple; non-QT terms have depth 0."""
    if not isinstance(t, QuotedTriple):
        return 0
    return 1 + max(qt_depth(t.subject), qt_depth(t.object))


def iter_subterms(t: Term):
    """Yield ``t`` and every component term reachable by decomposition."""
    yield t
    if isinstance(t, QuotedTriple):
        yield from iter_subterms(t.subject)
        yield t.predicate
        yield from iter_subterms(t.object)
