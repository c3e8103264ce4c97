"""IRI namespaces shared across the policy substrate.

Prefixes listed in DEFAULT_PREFIXES are pre-bound by the Turtle parser and
the RDFa extractor so that documents written against the well-known W3C
vocabularies do not need to redeclare them.
"""

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
SKOS = "http://www.w3.org/2004/02/skos/core#"
FOAF = "http://xmlns.com/foaf/0.1/"

ODRL = "http://www.w3.org/ns/odrl/2/"
DCTERMS = "http://purl.org/dc/terms/"
DPV = "https://w3id.org/dpv#"
OAC = "https://w3id.org/oac#"
DTOU = "urn:dtou:core#"
DUR = "http://example.com/duration#"

# Vocabulary owned by this project: preference profiles and the handful of
# bookkeeping predicates (request digests on agreements, ladder spans).
DPP = "https://example.org/dpp#"

RDF_TYPE = RDF + "type"

DEFAULT_PREFIXES = {
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
    "foaf": FOAF,
}

# Skolem namespaces; canonical serialization and agreement synthesis must
# never emit blank nodes, so both mint IRIs under urn:app:.
SKOLEM_BNODE = "urn:app:bnode:"
AGREEMENT_NODE = "urn:app:agreement:"
