"""Conversion of reified scene-graph RDF into RDF-star.

Each scene node carrying a ``kgc:hasPredicate`` is folded into a quoted
triple ``<< subject predicate object >>``.  The object is the value of
the highest-priority populated role (what > whom > where > on > to >
from); a missing subject or object becomes ``owl:Nothing``.  Remaining
roles and types reattach to the QT as metadata, scene-to-scene links are
resolved to the target scene's QT, and duplicate (s, p, o) combinations
are told apart by nesting each occurrence under a reserved id predicate:
``<< << s p o >> id val >>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import (
    ID_PREDICATE,
    Iri,
    KGC_NS,
    Literal,
    OWL_NOTHING,
    QuotedTriple,
    RDF_TYPE,
    Term,
    Triple,
    XSD_INTEGER,
    term_sort_key,
)

HAS_PREDICATE = f"{KGC_NS}hasPredicate"
SUBJECT_ROLE = f"{KGC_NS}subject"

OBJECT_ROLE_PRIORITY = ("what", "whom", "where", "on", "to", "from")


class MissingPredicate(ValueError):
    pass


@dataclass
class SceneRecord:
    scene_id: Iri
    predicate: Iri | None
    role_map: dict[str, Term] = field(default_factory=dict)
    type_terms: list[Term] = field(default_factory=list)
    extra_metadata: list[tuple[Iri, Term]] = field(default_factory=list)


@dataclass
class ConversionReport:
    scenes_converted: int = 0
    nothing_substitutions: int = 0
    duplicates_disambiguated: int = 0
    dropped_scenes: list[tuple[str, str]] = field(default_factory=list)

    def rows(self) -> list[tuple[str, str]]:
        out = [
            ("scenes_converted", str(self.scenes_converted)),
            ("nothing_substitutions", str(self.nothing_substitutions)),
            ("duplicates_disambiguated", str(self.duplicates_disambiguated)),
            ("dropped_scenes", str(len(self.dropped_scenes))),
        ]
        out.extend(("dropped", f"{sid}: {reason}")
                   for sid, reason in self.dropped_scenes)
        return out

    def tsv(self) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in self.rows())


def _role_name(predicate: Iri) -> str | None:
    if predicate.value.startswith(KGC_NS):
        return predicate.value[len(KGC_NS):]
    return None


def collect_scenes(triples) -> tuple[dict[Iri, SceneRecord], list[Triple]]:
    """Split input into scene records and pass-through triples.

    A scene is any IRI subject with a ``kgc:hasPredicate`` triple.
    """
    scene_ids = {
        t.subject
        for t in triples
        if t.predicate.value == HAS_PREDICATE and isinstance(t.subject, Iri)
    }
    scenes: dict[Iri, SceneRecord] = {
        sid: SceneRecord(scene_id=sid, predicate=None) for sid in scene_ids
    }
    passthrough: list[Triple] = []
    for t in triples:
        rec = scenes.get(t.subject)
        if rec is None:
            passthrough.append(t)
            continue
        if t.predicate.value == HAS_PREDICATE:
            if rec.predicate is None and isinstance(t.object, Iri):
                rec.predicate = t.object
            continue
        if t.predicate.value == RDF_TYPE:
            rec.type_terms.append(t.object)
            continue
        role = _role_name(t.predicate)
        if role is not None and role not in rec.role_map:
            rec.role_map[role] = t.object
        else:
            rec.extra_metadata.append((t.predicate, t.object))
    return scenes, passthrough


def select_object(rec: SceneRecord) -> Term:
    """The highest-priority populated object role, else ``owl:Nothing``."""
    for role in OBJECT_ROLE_PRIORITY:
        if role in rec.role_map:
            return rec.role_map[role]
    return Iri(OWL_NOTHING)


def _chosen_object_role(rec: SceneRecord) -> str | None:
    for role in OBJECT_ROLE_PRIORITY:
        if role in rec.role_map:
            return role
    return None


def convert_scene(rec: SceneRecord
                  ) -> tuple[QuotedTriple, list[tuple[Iri, Term]]]:
    """Fold a scene into its QT plus metadata (predicate, object) pairs.

    Scene-to-scene link objects are left untouched here; resolution is a
    second pass over all converted scenes.
    """
    if rec.predicate is None:
        raise MissingPredicate(rec.scene_id.value)
    subject = rec.role_map.get("subject", Iri(OWL_NOTHING))
    if isinstance(subject, Literal):
        subject = Iri(OWL_NOTHING)
    consumed = _chosen_object_role(rec)
    obj = rec.role_map[consumed] if consumed else Iri(OWL_NOTHING)
    qt = QuotedTriple(subject, rec.predicate, obj)

    metadata: list[tuple[Iri, Term]] = []
    for type_term in rec.type_terms:
        metadata.append((Iri(RDF_TYPE), type_term))
    for role, value in sorted(rec.role_map.items()):
        if role == "subject" or role == consumed:
            continue
        metadata.append((Iri(KGC_NS + role), value))
    metadata.extend(rec.extra_metadata)
    return qt, metadata


def assign_subjects(qts: list[QuotedTriple],
                    id_predicate: str = ID_PREDICATE) -> list[Term]:
    """Metadata subject for each QT occurrence, in input order.

    Combinations occurring more than once get a wrapper QT with a distinct
    integer id; unique combinations stay unwrapped.
    """
    occurrence_counts: dict[QuotedTriple, int] = {}
    for qt in qts:
        occurrence_counts[qt] = occurrence_counts.get(qt, 0) + 1
    next_id: dict[QuotedTriple, int] = {}
    subjects: list[Term] = []
    for qt in qts:
        if occurrence_counts[qt] > 1:
            next_id[qt] = next_id.get(qt, 0) + 1
            wrapper = QuotedTriple(
                qt,
                Iri(id_predicate),
                Literal(str(next_id[qt]), datatype=XSD_INTEGER),
            )
            subjects.append(wrapper)
        else:
            subjects.append(qt)
    return subjects


def disambiguate_duplicates(converted,
                            id_predicate: str = ID_PREDICATE) -> list[Triple]:
    """Emit metadata triples with duplicate QTs nested under unique ids."""
    converted = list(converted)
    subjects = assign_subjects([qt for qt, _ in converted], id_predicate)
    out: list[Triple] = []
    for subject, (_, metadata) in zip(subjects, converted):
        for pred, obj in metadata:
            out.append(Triple(subject, pred, obj))
    return out


def convert_document(triples, link_to_wrapper: bool = True,
                     id_predicate: str = ID_PREDICATE
                     ) -> tuple[list[Triple], ConversionReport]:
    """Full conversion: scenes folded, links resolved, duplicates split."""
    report = ConversionReport()
    scenes, passthrough = collect_scenes(triples)

    ordered = sorted(scenes.values(), key=lambda r: term_sort_key(r.scene_id))
    converted: list[tuple[Iri, QuotedTriple, list[tuple[Iri, Term]]]] = []
    for rec in ordered:
        try:
            qt, metadata = convert_scene(rec)
        except MissingPredicate:
            report.dropped_scenes.append(
                (rec.scene_id.value, "missing kgc:hasPredicate")
            )
            continue
        report.scenes_converted += 1
        report.nothing_substitutions += sum(
            1 for part in (qt.subject, qt.object)
            if isinstance(part, Iri) and part.value == OWL_NOTHING
        )
        converted.append((rec.scene_id, qt, metadata))

    subjects = assign_subjects([qt for _, qt, _ in converted], id_predicate)
    report.duplicates_disambiguated = sum(
        1 for s in subjects if isinstance(s, QuotedTriple)
        and s.predicate.value == id_predicate
    )

    scene_target: dict[Term, Term] = {}
    for (scene_id, qt, _), subject in zip(converted, subjects):
        scene_target[scene_id] = subject if link_to_wrapper else qt

    def _resolve(term: Term) -> Term:
        return scene_target.get(term, term)

    out: list[Triple] = []
    for (_, _, metadata), subject in zip(converted, subjects):
        for pred, obj in metadata:
            out.append(Triple(subject, pred, _resolve(obj)))
    for t in passthrough:
        out.append(Triple(t.subject, t.predicate, _resolve(t.object)))
    return out, report
