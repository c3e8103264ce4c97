"""Canonical N-Triples serialization and content digests.

Canonical form: blank nodes are skolemized to ``urn:app:bnode:<k>`` IRIs,
every triple is rendered as one N-Triples line, and lines are sorted by
codepoint. Isomorphic graphs (equal up to blank relabeling) serialize to
identical bytes, so SHA-256 over the output is a stable content address.

Blank ranks come from a pre-pass over the sorted triple lines rendered
with label-independent placeholders. Placeholders carry a structural
color computed by iterated signature refinement, which disambiguates
blanks whose surrounding triples would otherwise render identically
(e.g. two constraint nodes hanging off the same permission). Truly
automorphic blanks remain tied and are numbered by input label; any
assignment among them yields the same bytes.
"""

from __future__ import annotations

import hashlib

from ..namespaces import SKOLEM_BNODE
from .terms import RdfGraph, RdfTerm, RdfTriple, iri

_LITERAL_ESCAPES = {
    "\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t",
    "\b": "\\b", "\f": "\\f",
}


def _escape_literal(text: str) -> str:
    out = []
    for c in text:
        if c in _LITERAL_ESCAPES:
            out.append(_LITERAL_ESCAPES[c])
        elif ord(c) < 0x20:
            out.append(f"\\u{ord(c):04X}")
        else:
            out.append(c)
    return "".join(out)


def render_term(term: RdfTerm) -> str:
    """One term in N-Triples surface syntax."""
    if term.is_iri:
        return f"<{term.value}>"
    if term.is_blank:
        return f"_:{term.value}"
    body = f'"{_escape_literal(term.value)}"'
    if term.language is not None:
        return f"{body}@{term.language}"
    if term.datatype is not None:
        return f"{body}^^<{term.datatype}>"
    return body


def render_triple(t: RdfTriple) -> str:
    return f"{render_term(t.subject)} {render_term(t.predicate)} {render_term(t.object)} ."


# -- blank node ranking ----------------------------------------------------

def _refine_colors(g: RdfGraph, blanks: list[str]) -> dict[str, int]:
    # Iterated signature refinement: a blank's color summarizes the
    # predicates and neighbor colors around it, recomputed until the
    # partition stops splitting.
    color = {b: 0 for b in blanks}
    triples = list(g.triples)

    def neighbor_key(term: RdfTerm) -> tuple:
        if term.is_blank:
            return ("b", color[term.value])
        if term.is_iri:
            return ("i", term.value)
        return ("l", term.value, term.datatype or "", term.language or "")

    for _ in range(len(blanks) + 1):
        sigs: dict[str, tuple] = {}
        for b in blanks:
            parts = []
            for t in triples:
                if t.subject.is_blank and t.subject.value == b:
                    parts.append(("s", t.predicate.value, neighbor_key(t.object)))
                if t.object.is_blank and t.object.value == b:
                    parts.append(("o", t.predicate.value, neighbor_key(t.subject)))
            sigs[b] = (color[b], tuple(sorted(parts)))
        palette = sorted(set(sigs.values()))
        new_color = {b: palette.index(sigs[b]) for b in blanks}
        if new_color == color:
            break
        color = new_color
    return color


def blank_ranks(g: RdfGraph) -> dict[str, int]:
    """Map each blank label to its skolem rank.

    Rank order: position of the blank's first-occurrence triple once all
    triples are rendered with placeholder labels and sorted; subject
    position before object position within a line; then structural color;
    input label only breaks ties between automorphic blanks.
    """
    blanks = sorted(g.blank_labels(), key=lambda l: (len(l), l))
    if not blanks:
        return {}
    color = _refine_colors(g, blanks)

    def placeholder(term: RdfTerm) -> str:
        if term.is_blank:
            return f"_:c{color[term.value]}"
        return render_term(term)

    lines = sorted(
        ((f"{placeholder(t.subject)} {placeholder(t.predicate)} {placeholder(t.object)} .", t)
         for t in g.triples),
        key=lambda pair: (pair[0], pair[1].sort_key()),
    )
    first: dict[str, tuple] = {}
    for idx, (_, t) in enumerate(lines):
        if t.subject.is_blank and t.subject.value not in first:
            first[t.subject.value] = (idx, 0)
        if t.object.is_blank and t.object.value not in first:
            first[t.object.value] = (idx, 1)

    ordered = sorted(blanks, key=lambda b: (first[b], color[b], len(b), b))
    return {b: k for k, b in enumerate(ordered)}


def skolemize(g: RdfGraph) -> RdfGraph:
    """Replace every blank node with its ``urn:app:bnode:<k>`` IRI."""
    ranks = blank_ranks(g)
    if not ranks:
        return g

    def sk(term: RdfTerm) -> RdfTerm:
        if term.is_blank:
            return iri(f"{SKOLEM_BNODE}{ranks[term.value]}")
        return term

    return RdfGraph.of(
        (RdfTriple(sk(t.subject), t.predicate, sk(t.object)) for t in g.triples),
        g.prefixes,
    )


def serialize_canonical(g: RdfGraph) -> str:
    """Canonical N-Triples text: skolemized, line-sorted, trailing newline.

    The empty graph serializes to the empty string.
    """
    sk = skolemize(g)
    lines = sorted(render_triple(t) for t in sk.triples)
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def serialize_ntriples(g: RdfGraph) -> str:
    """Deterministic N-Triples that keeps blank nodes blank.

    Same relabeling and line order as the canonical form, but blanks stay
    ``_:b<k>`` instead of skolem IRIs, so the output re-parses to an
    isomorphic graph. The document form for emitted policy artifacts;
    digests always go through serialize_canonical.
    """
    ranks = blank_ranks(g)

    def rb(term: RdfTerm) -> RdfTerm:
        if term.is_blank:
            return RdfTerm("blank", f"b{ranks[term.value]}")
        return term

    lines = sorted(
        render_triple(RdfTriple(rb(t.subject), t.predicate, rb(t.object)))
        for t in g.triples)
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def graph_digest(g: RdfGraph) -> str:
    """Lowercase-hex SHA-256 of the canonical serialization."""
    return hashlib.sha256(serialize_canonical(g).encode("utf-8")).hexdigest()
