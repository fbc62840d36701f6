"""Immutable indexed store for RDF-star graphs.

Besides subject/object adjacency over asserted triples, the store indexes
every quoted triple occurring anywhere in the graph (any nesting level) by
its subject and object components, which is what the QT-aware walks need.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .terms import (
    ID_PREDICATE,
    Iri,
    QuotedTriple,
    RDF_TYPE,
    Term,
    Triple,
    iter_subterms,
    qt_depth,
    serialize_triple,
    term_sort_key,
)

_DEPTH_NAMES = {1: "Single", 2: "Double", 3: "Triple", 4: "Quadruple"}


@dataclass(frozen=True)
class Graph:
    triples: tuple[Triple, ...]
    subj_index: dict[Term, tuple[Triple, ...]] = field(repr=False)
    obj_index: dict[Term, tuple[Triple, ...]] = field(repr=False)
    qt_subj_index: dict[Term, tuple[QuotedTriple, ...]] = field(repr=False)
    qt_obj_index: dict[Term, tuple[QuotedTriple, ...]] = field(repr=False)
    node_set: frozenset[Term] = field(repr=False)
    qt_set: frozenset[QuotedTriple] = field(repr=False)

    def fingerprint(self) -> str:
        """sha256 over the sorted canonical triple serializations."""
        digest = hashlib.sha256()
        for line in sorted(serialize_triple(t) for t in self.triples):
            digest.update(line.encode("utf-8"))
            digest.update(b"\n")
        return digest.hexdigest()


def build_graph(triples) -> Graph:
    """Index a triple collection.  Duplicate asserted triples are dropped."""
    seen: set[Triple] = set()
    ordered: list[Triple] = []
    for t in triples:
        if t not in seen:
            seen.add(t)
            ordered.append(t)

    subj: dict[Term, list[Triple]] = {}
    obj: dict[Term, list[Triple]] = {}
    nodes: set[Term] = set()
    qts: set[QuotedTriple] = set()

    for t in ordered:
        subj.setdefault(t.subject, []).append(t)
        obj.setdefault(t.object, []).append(t)
        for part in (t.subject, t.predicate, t.object):
            for sub in iter_subterms(part):
                nodes.add(sub)
                if isinstance(sub, QuotedTriple):
                    qts.add(sub)

    qt_subj: dict[Term, list[QuotedTriple]] = {}
    qt_obj: dict[Term, list[QuotedTriple]] = {}
    for q in qts:
        qt_subj.setdefault(q.subject, []).append(q)
        qt_obj.setdefault(q.object, []).append(q)

    def _freeze(index):
        return {
            k: tuple(sorted(v, key=lambda x: term_sort_key(_as_term(x))))
            for k, v in index.items()
        }

    def _as_term(x):
        return QuotedTriple(x.subject, x.predicate, x.object) if isinstance(
            x, Triple
        ) else x

    return Graph(
        triples=tuple(ordered),
        subj_index=_freeze(subj),
        obj_index=_freeze(obj),
        qt_subj_index=_freeze(qt_subj),
        qt_obj_index=_freeze(qt_obj),
        node_set=frozenset(nodes),
        qt_set=frozenset(qts),
    )


def triples_with_subject(g: Graph, n: Term) -> tuple[Triple, ...]:
    return g.subj_index.get(n, ())


def triples_with_object(g: Graph, n: Term) -> tuple[Triple, ...]:
    return g.obj_index.get(n, ())


def qts_with_subject(g: Graph, n: Term) -> tuple[QuotedTriple, ...]:
    return g.qt_subj_index.get(n, ())


def qts_with_object(g: Graph, n: Term) -> tuple[QuotedTriple, ...]:
    return g.qt_obj_index.get(n, ())


def get_qt(g: Graph, s: Term, p: Term, o: Term) -> QuotedTriple | None:
    """The quoted triple (s, p, o) if it occurs in the graph, else None."""
    if not isinstance(p, Iri):
        return None
    candidate = QuotedTriple(s, p, o)
    return candidate if candidate in g.qt_set else None


@dataclass(frozen=True)
class GraphStats:
    class_count: int
    instance_count: int
    property_count: int
    standard_triple_count: int
    qt_count_by_depth: dict[int, int]

    @property
    def total(self) -> int:
        return self.standard_triple_count + sum(self.qt_count_by_depth.values())


def compute_stats(g: Graph, include_id_nesting: bool = False,
                  id_predicate: str = ID_PREDICATE) -> GraphStats:
    """Structural statistics of the graph.

    Classes are distinct rdf:type objects, instances distinct rdf:type
    subjects, properties distinct predicates at any nesting level.  QTs
    are counted once each
    (at every nesting level) by their own depth; QTs whose predicate is
    the reserved duplicate-disambiguation id property are excluded unless
    ``include_id_nesting`` is set.
    """
    classes: set[Term] = set()
    instances: set[Term] = set()
    properties: set[Term] = set()
    standard = 0

    for t in g.triples:
        properties.add(t.predicate)
        if t.predicate.value == RDF_TYPE:
            classes.add(t.object)
            instances.add(t.subject)
        if not isinstance(t.subject, QuotedTriple) and not isinstance(
            t.object, QuotedTriple
        ):
            standard += 1

    by_depth: dict[int, int] = {}
    for q in g.qt_set:
        if not include_id_nesting and q.predicate.value == id_predicate:
            continue
        properties.add(q.predicate)
        d = qt_depth(q)
        by_depth[d] = by_depth.get(d, 0) + 1

    return GraphStats(
        class_count=len(classes),
        instance_count=len(instances),
        property_count=len(properties),
        standard_triple_count=standard,
        qt_count_by_depth=dict(sorted(by_depth.items())),
    )


def stats_rows(stats: GraphStats) -> list[tuple[str, int]]:
    """Stats as (metric, value) rows, one per summary-table line."""
    rows = [
        ("Class", stats.class_count),
        ("Instance", stats.instance_count),
        ("Property", stats.property_count),
        ("Standard triple", stats.standard_triple_count),
    ]
    for depth, count in stats.qt_count_by_depth.items():
        name = _DEPTH_NAMES.get(depth, f"{depth}-fold")
        rows.append((f"{name}-nested QT", count))
    rows.append(("Total", stats.total))
    return rows


def stats_tsv(stats: GraphStats) -> str:
    return "".join(f"{k}\t{v}\n" for k, v in stats_rows(stats))
