"""Minimal RDF substrate: terms, Turtle subset, canonical N-Triples, RDFa."""

from .ntriples import blank_ranks, graph_digest, render_term, render_triple, serialize_canonical, serialize_ntriples, skolemize
from .rdfa import RdfaError, extract_rdfa
from .terms import (
    EMPTY_GRAPH,
    RdfError,
    RdfGraph,
    RdfTerm,
    RdfTriple,
    TermError,
    blank,
    iri,
    is_absolute_iri,
    literal,
)
from .turtle import (
    RelativeIriError,
    TurtleSyntaxError,
    UnknownPrefixError,
    UnsupportedConstructError,
    parse_turtle,
)

__all__ = [
    "EMPTY_GRAPH",
    "RdfError",
    "RdfGraph",
    "RdfTerm",
    "RdfTriple",
    "RdfaError",
    "RelativeIriError",
    "TermError",
    "TurtleSyntaxError",
    "UnknownPrefixError",
    "UnsupportedConstructError",
    "blank",
    "blank_ranks",
    "extract_rdfa",
    "graph_digest",
    "iri",
    "is_absolute_iri",
    "literal",
    "parse_turtle",
    "render_term",
    "render_triple",
    "serialize_canonical",
    "serialize_ntriples",
    "skolemize",
]
