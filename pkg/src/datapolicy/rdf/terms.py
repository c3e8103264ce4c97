"""RDF term, triple and graph model.

Everything here is immutable after construction; graphs are value objects
that can be shared freely across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from ..errors import DataPolicyError
from ..namespaces import RDF_TYPE, XSD

IRI = "iri"
BLANK = "blank"
LITERAL = "literal"

# RFC 3986 scheme; anything matching this is treated as an absolute IRI.
_ABSOLUTE_IRI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")


class RdfError(DataPolicyError):
    """Base class for RDF-layer errors."""


class TermError(RdfError):
    """A term violates the RDF term invariants."""


def is_absolute_iri(value: str) -> bool:
    return bool(_ABSOLUTE_IRI_RE.match(value))


@dataclass(frozen=True)
class RdfTerm:
    """A single RDF term: IRI, blank node, or literal.

    Literals carry at most one of ``datatype``/``language``; IRIs and blank
    nodes carry neither.
    """

    kind: str
    value: str
    datatype: str | None = None
    language: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in (IRI, BLANK, LITERAL):
            raise TermError(f"unknown term kind: {self.kind!r}")
        if self.kind == LITERAL:
            if self.datatype is not None and self.language is not None:
                raise TermError("literal cannot carry both datatype and language")
        elif self.datatype is not None or self.language is not None:
            raise TermError(f"{self.kind} term cannot carry datatype or language")

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    @property
    def is_blank(self) -> bool:
        return self.kind == BLANK

    @property
    def is_literal(self) -> bool:
        return self.kind == LITERAL

    def sort_key(self) -> tuple:
        # Blank labels _:bN sort by (len, text) so b2 < b10, i.e. creation
        # order for parser-assigned labels.
        if self.kind == IRI:
            return (0, self.value)
        if self.kind == BLANK:
            return (1, len(self.value), self.value)
        return (2, self.value, self.datatype or "", self.language or "")


def iri(value: str) -> RdfTerm:
    """An IRI term; the value must already be absolute."""
    if not is_absolute_iri(value):
        raise TermError(f"not an absolute IRI: {value!r}")
    return RdfTerm(IRI, value)


def blank(label: str) -> RdfTerm:
    return RdfTerm(BLANK, label)


def literal(lex: str, datatype: str | None = None, language: str | None = None) -> RdfTerm:
    # "x"^^xsd:string and "x" denote the same RDF term; keep one form so
    # graph equality and digests agree.
    if datatype == XSD + "string":
        datatype = None
    return RdfTerm(LITERAL, lex, datatype=datatype, language=language)


@dataclass(frozen=True)
class RdfTriple:
    subject: RdfTerm
    predicate: RdfTerm
    object: RdfTerm

    def __post_init__(self) -> None:
        if self.subject.is_literal:
            raise TermError("triple subject cannot be a literal")
        if not self.predicate.is_iri:
            raise TermError("triple predicate must be an IRI")

    def terms(self) -> tuple[RdfTerm, RdfTerm, RdfTerm]:
        return (self.subject, self.predicate, self.object)

    def sort_key(self) -> tuple:
        return (self.subject.sort_key(), self.predicate.sort_key(), self.object.sort_key())


@dataclass(frozen=True)
class RdfGraph:
    """A set of triples plus the prefix map seen while parsing.

    Prefixes are cosmetic (they do not participate in equality); the triple
    set is the graph.
    """

    triples: frozenset[RdfTriple]
    prefixes: Mapping[str, str] = field(default_factory=dict, compare=False)

    @staticmethod
    def of(triples: Iterable[RdfTriple], prefixes: Mapping[str, str] | None = None) -> "RdfGraph":
        return RdfGraph(frozenset(triples), dict(prefixes or {}))

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[RdfTriple]:
        return iter(self.triples)

    def sorted_triples(self) -> list[RdfTriple]:
        return sorted(self.triples, key=RdfTriple.sort_key)

    def blank_labels(self) -> set[str]:
        labels: set[str] = set()
        for t in self.triples:
            if t.subject.is_blank:
                labels.add(t.subject.value)
            if t.object.is_blank:
                labels.add(t.object.value)
        return labels

    # -- query helpers -------------------------------------------------

    def objects(self, subject: RdfTerm, predicate: str) -> list[RdfTerm]:
        """All objects of (subject, predicate, ?o), deterministically ordered."""
        found = [t.object for t in self.triples
                 if t.subject == subject and t.predicate.value == predicate]
        return sorted(found, key=RdfTerm.sort_key)

    def value(self, subject: RdfTerm, predicate: str) -> RdfTerm | None:
        """First object of (subject, predicate, ?o) in deterministic order."""
        objs = self.objects(subject, predicate)
        return objs[0] if objs else None

    def subjects_of_type(self, class_iri: str) -> list[RdfTerm]:
        found = [t.subject for t in self.triples
                 if t.predicate.value == RDF_TYPE
                 and t.object.is_iri and t.object.value == class_iri]
        return sorted(set(found), key=RdfTerm.sort_key)

    def types_of(self, subject: RdfTerm) -> list[str]:
        return sorted(o.value for o in self.objects(subject, RDF_TYPE) if o.is_iri)

    def union(self, other: "RdfGraph") -> "RdfGraph":
        """Merge two graphs, relabeling the other's blank nodes apart.

        Blank labels are scoped per graph, so colliding labels on the right
        side are renamed before merging.
        """
        mine = self.blank_labels()
        theirs = other.blank_labels()
        clashes = mine & theirs
        if not clashes:
            merged = self.triples | other.triples
        else:
            taken = mine | theirs
            renames: dict[str, str] = {}
            n = 0
            for label in sorted(clashes, key=lambda l: (len(l), l)):
                while f"m{n}" in taken:
                    n += 1
                renames[label] = f"m{n}"
                taken.add(f"m{n}")

            def rename(term: RdfTerm) -> RdfTerm:
                if term.is_blank and term.value in renames:
                    return blank(renames[term.value])
                return term

            merged = self.triples | {
                RdfTriple(rename(t.subject), t.predicate, rename(t.object))
                for t in other.triples
            }
        prefixes = dict(other.prefixes)
        prefixes.update(self.prefixes)
        return RdfGraph(frozenset(merged), prefixes)


EMPTY_GRAPH = RdfGraph(frozenset(), {})
