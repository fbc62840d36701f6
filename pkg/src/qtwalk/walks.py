"""Quoted-triple-aware walk corpus generation.

Two strategies over an indexed RDF-star graph:

* random walks: breadth-wise expansion from a root, trimmed to at most
  ``n`` partial walks after each depth iteration;
* mid walks: grow a sequence around a focus node, flipping a fair coin
  each iteration between extending backward (predecessors) and forward
  (successors).

At every expansion the walker may, with probability ``beta``, step from an
entity in the object role of a quoted triple to the QT token itself
(oq-step), or, with probability ``alpha``, decompose a QT into its
subject, predicate, and object (qs-step).  The oq-step has priority when
both are possible.  With ``alpha == beta == 0`` the output reduces to
plain random walks that treat each QT as an opaque node.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum

from .graph import (
    Graph,
    get_qt,
    qts_with_object,
    qts_with_subject,
    triples_with_subject,
    triples_with_object,
)
from .terms import Iri, QuotedTriple, Term, serialize_term, term_sort_key


class Strategy(Enum):
    RANDOM_WALK = "random"
    MID_WALK = "mid"


class UnknownRoot(KeyError):
    pass


@dataclass(frozen=True)
class WalkParams:
    strategy: Strategy = Strategy.MID_WALK
    n: int = 100
    d: int = 8
    alpha: float = 0.5
    beta: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n <= 0 or self.d <= 0:
            raise ValueError("n and d must be positive")
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ValueError("alpha and beta must lie in [0, 1]")


@dataclass(frozen=True)
class Walk:
    tokens: tuple[Term, ...]

    def texts(self) -> list[str]:
        return [serialize_term(t) for t in self.tokens]


@dataclass(frozen=True)
class WalkCorpus:
    walks: tuple[Walk, ...]
    params: WalkParams
    graph_fingerprint: str


def _derive_seed(master: int, key: str) -> int:
    digest = hashlib.sha256(f"{master}|{key}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _root_rng(params: WalkParams, root: Term) -> random.Random:
    return random.Random(_derive_seed(params.seed, serialize_term(root)))


def _qs_candidate(g: Graph, node: Term, rng: random.Random
                  ) -> QuotedTriple | None:
    """QT whose decomposition may follow ``node`` in a walk.

    A QT node decomposes into itself; for other nodes a uniformly chosen
    QT having the node in its subject role qualifies.
    """
    if isinstance(node, QuotedTriple):
        return node
    candidates = qts_with_subject(g, node)
    return rng.choice(candidates) if candidates else None


def random_walks(g: Graph, root: Term, params: WalkParams,
                 rng: random.Random | None = None,
                 step_log: list | None = None) -> list[Walk]:
    """Walks rooted at ``root`` per the combined random-walk procedure."""
    if root not in g.node_set:
        raise UnknownRoot(serialize_term(root))
    if rng is None:
        rng = _root_rng(params, root)

    wl: list[list[Term]] = [[]]
    for _ in range(params.d):
        new_wl: list[list[Term]] = []
        for walk in wl:
            cur = walk[-1] if walk else root

            if not walk:
                oq_options = qts_with_object(g, root)
                oq = rng.choice(oq_options) if oq_options else None
            elif not isinstance(cur, QuotedTriple) and len(walk) >= 3:
                oq = get_qt(g, walk[-3], walk[-2], walk[-1])
            else:
                oq = None
            qs = _qs_candidate(g, cur, rng)
            rand_oq = rng.random()
            rand_qs = rng.random()

            if oq is not None and rand_oq < params.beta:
                nw = list(walk)
                if not walk:
                    nw.append(oq.object)  # the root, in its object role
                nw.append(oq)
                new_wl.append(nw)
                branch = "oq"
            elif qs is not None and rand_qs < params.alpha:
                nw = list(walk)
                if not walk:
                    nw.append(qs)
                nw.extend((qs.subject, qs.predicate, qs.object))
                if walk:
                    new_wl.append(walk)  # the undecomposed walk survives
                new_wl.append(nw)
                branch = "qs"
            else:
                outgoing = triples_with_subject(g, cur)
                if not outgoing:
                    new_wl.append(walk if walk else [root])
                    branch = "dead-end"
                else:
                    for t in outgoing:
                        nw = list(walk) if walk else [root]
                        nw.extend((t.predicate, t.object))
                        new_wl.append(nw)
                    branch = "default"
            if step_log is not None:
                step_log.append({
                    "branch": branch,
                    "oq_possible": oq is not None,
                    "qs_possible": qs is not None,
                    "rand_oq": rand_oq,
                    "rand_qs": rand_qs,
                })
        wl = new_wl
        while len(wl) > params.n:
            wl.pop(rng.randrange(len(wl)))
    return [Walk(tuple(w)) for w in wl]


def mid_walks(g: Graph, focus: Term, params: WalkParams,
              rng: random.Random | None = None) -> list[Walk]:
    """``n`` walks grown around ``focus``, extending either end per depth
    iteration.

    The walk always starts at its current predecessor frontier and ends at
    its successor frontier, so extensions splice on without repeating the
    joining token.
    """
    if focus not in g.node_set:
        raise UnknownRoot(serialize_term(focus))
    if rng is None:
        rng = _root_rng(params, focus)

    walks: list[Walk] = []
    for _ in range(params.n):
        walk: list[Term] = [focus]
        np_node: Term = focus
        ns_node: Term = focus
        for _ in range(params.d):
            rand_oq = rng.random()
            rand_qs = rng.random()
            backward = rng.randrange(2) == 0
            if backward:
                oq_options = qts_with_object(g, np_node)
                oq = rng.choice(oq_options) if oq_options else None
                if oq is not None and rand_oq < params.beta:
                    # object token is already at the front of the walk
                    walk[:0] = [oq.subject, oq.predicate]
                    np_node = oq.subject
                else:
                    incoming = triples_with_object(g, np_node)
                    if incoming:
                        t = rng.choice(incoming)
                        walk[:0] = [t.subject, t.predicate]
                        np_node = t.subject
            else:
                qs = _qs_candidate(g, ns_node, rng)
                if qs is not None and rand_qs < params.alpha:
                    if qs is ns_node:
                        walk.extend((qs.subject, qs.predicate, qs.object))
                    else:
                        # subject token is already at the end of the walk
                        walk.extend((qs.predicate, qs.object))
                    ns_node = qs.object
                else:
                    outgoing = triples_with_subject(g, ns_node)
                    if outgoing:
                        t = rng.choice(outgoing)
                        walk.extend((t.predicate, t.object))
                        ns_node = t.object
        walks.append(Walk(tuple(walk)))
    return walks


def _walk_nodes(term: Term):
    """Subject/object-position terms of a triple part, QTs included."""
    yield term
    if isinstance(term, QuotedTriple):
        yield from _walk_nodes(term.subject)
        yield from _walk_nodes(term.object)


def corpus_roots(g: Graph) -> list[Term]:
    """Walk roots: IRIs and QTs in any subject/object position, sorted.

    Predicate-only IRIs and literals are not roots.
    """
    roots: set[Term] = set()
    for t in g.triples:
        for part in (t.subject, t.object):
            for node in _walk_nodes(part):
                if isinstance(node, Iri | QuotedTriple):
                    roots.add(node)
    return sorted(roots, key=term_sort_key)


def generate_corpus(g: Graph, params: WalkParams) -> WalkCorpus:
    """Apply the configured strategy to every root node of the graph.

    Each root draws from an independent seeded substream, so the corpus is
    reproducible regardless of the order roots are processed in.
    """
    walker = random_walks if params.strategy is Strategy.RANDOM_WALK else mid_walks
    walks: list[Walk] = []
    for root in corpus_roots(g):
        walks.extend(walker(g, root, params))
    return WalkCorpus(
        walks=tuple(walks),
        params=params,
        graph_fingerprint=g.fingerprint(),
    )


CORPUS_MAGIC = "#qtwalk-corpus v1"


def corpus_header(params: WalkParams) -> str:
    return (
        f"{CORPUS_MAGIC} seed={params.seed} alpha={params.alpha!r} "
        f"beta={params.beta!r} n={params.n} d={params.d} "
        f"strategy={params.strategy.value}"
    )


def write_corpus(corpus: WalkCorpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(corpus_header(corpus.params) + "\n")
        for walk in corpus.walks:
            fh.write("\t".join(walk.texts()) + "\n")


def read_corpus_lines(path) -> tuple[str, list[list[str]]]:
    """Token rows of a corpus file, plus its header line."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(CORPUS_MAGIC):
            raise ValueError(f"{path}: not a walk corpus file")
        rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    return header, rows
