"""Typed views over ODRL request/agreement graphs.

parse_odrl_request lifts the Figure-1-shaped graph into dataclasses the
engine can evaluate; request_to_graph is its inverse, used both for
content digests and for writing agreements/requests back to the wire.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DataPolicyError
from ..namespaces import DCTERMS, DPP, DPV, FOAF, OAC, ODRL, RDF_TYPE, XSD
from ..rdf import RdfGraph, RdfTerm, RdfTriple, blank, graph_digest, iri, literal

REQUEST_TYPE = ODRL + "Request"
AGREEMENT_TYPE = ODRL + "Agreement"

# Operators the engine knows how to evaluate; anything else is carried
# through but flagged.
EVALUABLE_OPERATORS = frozenset(
    ODRL + op for op in ("isA", "eq", "lt", "lteq", "gt", "gteq"))

PURPOSE_LEFT_OPERANDS = frozenset({OAC + "Purpose", ODRL + "purpose"})
RETENTION_LEFT_OPERAND = ODRL + "elapsedTime"


class OdrlError(DataPolicyError):
    pass


@dataclass(frozen=True)
class Party:
    iri: str
    name: str | None = None
    page: str | None = None
    role_class: str | None = None


@dataclass(frozen=True)
class Constraint:
    left_operand: str
    operator: str
    right_operand: RdfTerm
    title: str | None = None

    @property
    def evaluable(self) -> bool:
        return self.operator in EVALUABLE_OPERATORS

    @property
    def is_purpose(self) -> bool:
        return self.left_operand in PURPOSE_LEFT_OPERANDS

    @property
    def is_retention(self) -> bool:
        return self.left_operand == RETENTION_LEFT_OPERAND


@dataclass(frozen=True)
class Permission:
    assignee: Party | None
    actions: tuple[str, ...]
    target: str
    constraints: tuple[Constraint, ...] = ()

    def purpose_constraints(self) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if c.is_purpose)

    def retention_constraint(self) -> Constraint | None:
        for c in self.constraints:
            if c.is_retention:
                return c
        return None

    def purposes(self) -> tuple[str, ...]:
        return tuple(c.right_operand.value for c in self.purpose_constraints()
                     if c.right_operand.is_iri)


@dataclass(frozen=True)
class OdrlRequest:
    node: str
    uid: str
    permissions: tuple[Permission, ...]
    description: str | None = None
    creator: Party | None = None
    issued: str | None = None
    profile: str | None = None


@dataclass(frozen=True)
class OdrlAgreement:
    node: str
    uid: str
    issued: str
    assigner: str
    request_digest: str
    permissions: tuple[Permission, ...] = ()


def _literal_value(g: RdfGraph, node: RdfTerm, predicate: str) -> str | None:
    term = g.value(node, predicate)
    if term is None:
        return None
    if not term.is_literal:
        raise OdrlError(f"expected literal for <{predicate}>, got {term.kind}")
    return term.value


def _load_party(g: RdfGraph, term: RdfTerm) -> Party:
    if not term.is_iri:
        raise OdrlError("party reference must be an IRI")
    types = [t for t in g.types_of(term) if t.startswith(DPV)]
    page = g.value(term, FOAF + "page")
    return Party(
        iri=term.value,
        name=_literal_value(g, term, DPV + "hasName"),
        page=page.value if page is not None and page.is_iri else None,
        role_class=types[0] if types else None,
    )


def _parse_constraint(g: RdfGraph, node: RdfTerm) -> Constraint:
    left = g.value(node, ODRL + "leftOperand")
    op = g.value(node, ODRL + "operator")
    right = g.value(node, ODRL + "rightOperand")
    if left is None or not left.is_iri:
        raise OdrlError("constraint without odrl:leftOperand")
    if op is None or not op.is_iri:
        raise OdrlError("constraint without odrl:operator")
    if right is None:
        raise OdrlError("constraint without odrl:rightOperand")
    return Constraint(
        left_operand=left.value,
        operator=op.value,
        right_operand=right,
        title=_literal_value(g, node, DCTERMS + "title"),
    )


def _parse_permission(g: RdfGraph, node: RdfTerm) -> Permission:
    actions = [o.value for o in g.objects(node, ODRL + "action") if o.is_iri]
    if not actions:
        raise OdrlError("permission has no actions")
    target = g.value(node, ODRL + "target")
    if target is None or not target.is_iri:
        raise OdrlError("permission has no odrl:target")
    assignee_term = g.value(node, ODRL + "assignee")
    assignee = _load_party(g, assignee_term) if assignee_term is not None else None
    constraints = tuple(_parse_constraint(g, c)
                        for c in g.objects(node, ODRL + "constraint"))
    retention = [c for c in constraints if c.is_retention]
    if len(retention) > 1:
        raise OdrlError("permission carries more than one retention constraint")
    return Permission(
        assignee=assignee,
        actions=tuple(sorted(actions)),
        target=target.value,
        constraints=constraints,
    )


def _pick_node(g: RdfGraph, type_iri: str, node: str | None, what: str) -> RdfTerm:
    typed = g.subjects_of_type(type_iri)
    if node is not None:
        wanted = iri(node)
        if wanted not in typed:
            raise OdrlError(f"<{node}> is not typed {what} in this graph")
        return wanted
    if not typed:
        raise OdrlError(f"graph contains no {what}")
    if len(typed) > 1:
        listing = ", ".join(t.value for t in typed)
        raise OdrlError(f"graph contains multiple {what} nodes ({listing}); "
                        "pass an explicit node")
    return typed[0]


def parse_odrl_request(g: RdfGraph, node: str | None = None) -> OdrlRequest:
    """Lift an odrl:Request out of a graph.

    Without `node`, the graph must contain exactly one request.
    """
    subject = _pick_node(g, REQUEST_TYPE, node, "odrl:Request")
    uid = _literal_value(g, subject, ODRL + "uid")
    if not uid:
        raise OdrlError("request has no odrl:uid")
    permissions = tuple(_parse_permission(g, p)
                        for p in g.objects(subject, ODRL + "permission"))
    if not permissions:
        raise OdrlError("request has no permissions")
    creator_term = g.value(subject, DCTERMS + "creator")
    profile = g.value(subject, ODRL + "profile")
    return OdrlRequest(
        node=subject.value,
        uid=uid,
        permissions=permissions,
        description=_literal_value(g, subject, DCTERMS + "description"),
        creator=_load_party(g, creator_term) if creator_term is not None else None,
        issued=_literal_value(g, subject, DCTERMS + "issued"),
        profile=profile.value if profile is not None and profile.is_iri else None,
    )


# -- re-emission -------------------------------------------------------------


class _Emitter:
    def __init__(self) -> None:
        self.triples: list[RdfTriple] = []
        self._count = 0

    def fresh(self) -> RdfTerm:
        term = blank(f"b{self._count}")
        self._count += 1
        return term

    def add(self, s: RdfTerm, p: str, o: RdfTerm) -> None:
        self.triples.append(RdfTriple(s, iri(p), o))

    def party(self, party: Party) -> RdfTerm:
        node = iri(party.iri)
        if party.role_class:
            self.add(node, RDF_TYPE, iri(party.role_class))
        if party.name is not None:
            self.add(node, DPV + "hasName", literal(party.name))
        if party.page is not None:
            self.add(node, FOAF + "page", iri(party.page))
        return node

    def constraint(self, c: Constraint, node: RdfTerm) -> None:
        if c.title is not None:
            self.add(node, DCTERMS + "title", literal(c.title))
        self.add(node, ODRL + "leftOperand", iri(c.left_operand))
        self.add(node, ODRL + "operator", iri(c.operator))
        self.add(node, ODRL + "rightOperand", c.right_operand)

    def permission(self, p: Permission, node: RdfTerm,
                   constraint_node=None) -> None:
        if p.assignee is not None:
            self.add(node, ODRL + "assignee", self.party(p.assignee))
        for action in p.actions:
            self.add(node, ODRL + "action", iri(action))
        self.add(node, ODRL + "target", iri(p.target))
        for i, c in enumerate(p.constraints):
            cnode = constraint_node(i) if constraint_node else self.fresh()
            self.add(node, ODRL + "constraint", cnode)
            self.constraint(c, cnode)


def request_to_graph(r: OdrlRequest) -> RdfGraph:
    """Deterministic graph form of a typed request (permissions and
    constraints become blank nodes, everything else keeps its IRI)."""
    em = _Emitter()
    node = iri(r.node)
    em.add(node, RDF_TYPE, iri(REQUEST_TYPE))
    em.add(node, ODRL + "uid", literal(r.uid))
    if r.description is not None:
        em.add(node, DCTERMS + "description", literal(r.description))
    if r.creator is not None:
        em.add(node, DCTERMS + "creator", em.party(r.creator))
    if r.issued is not None:
        em.add(node, DCTERMS + "issued",
               literal(r.issued, datatype=XSD + "dateTime"))
    if r.profile is not None:
        em.add(node, ODRL + "profile", iri(r.profile))
    for p in r.permissions:
        pnode = em.fresh()
        em.add(node, ODRL + "permission", pnode)
        em.permission(p, pnode)
    return RdfGraph.of(em.triples)


def agreement_to_graph(a: OdrlAgreement) -> RdfGraph:
    """Graph form of an agreement. No blank nodes: permission and
    constraint nodes are minted under the agreement IRI."""
    em = _Emitter()
    node = iri(a.node)
    em.add(node, RDF_TYPE, iri(AGREEMENT_TYPE))
    em.add(node, ODRL + "uid", literal(a.uid))
    em.add(node, DCTERMS + "issued", literal(a.issued, datatype=XSD + "dateTime"))
    em.add(node, ODRL + "assigner", iri(a.assigner))
    em.add(node, DPP + "requestDigest", literal(a.request_digest))
    for i, p in enumerate(a.permissions):
        pnode = iri(f"{a.node}/p{i}")
        em.add(node, ODRL + "permission", pnode)
        em.permission(p, pnode,
                      constraint_node=lambda j, i=i: iri(f"{a.node}/p{i}/c{j}"))
    return RdfGraph.of(em.triples)


def parse_odrl_agreement(g: RdfGraph, node: str | None = None) -> OdrlAgreement:
    """Typed view of an agreement graph (the receiving side of the
    Data-Policy header)."""
    subject = _pick_node(g, AGREEMENT_TYPE, node, "odrl:Agreement")
    uid = _literal_value(g, subject, ODRL + "uid")
    issued = _literal_value(g, subject, DCTERMS + "issued")
    assigner = g.value(subject, ODRL + "assigner")
    digest = _literal_value(g, subject, DPP + "requestDigest")
    if not uid:
        raise OdrlError("agreement has no odrl:uid")
    if issued is None:
        raise OdrlError("agreement has no dcterms:issued")
    if assigner is None or not assigner.is_iri:
        raise OdrlError("agreement has no odrl:assigner")
    permissions = tuple(_parse_permission(g, p)
                        for p in g.objects(subject, ODRL + "permission"))
    return OdrlAgreement(
        node=subject.value,
        uid=uid,
        issued=issued,
        assigner=assigner.value,
        request_digest=digest or "",
        permissions=permissions,
    )


def request_digest(r: OdrlRequest) -> str:
    """Content address of a request: digest of its canonical graph form.

    Extra triples that travelled in the same document (party blurbs,
    unrelated nodes) do not affect it.
    """
    return graph_digest(request_to_graph(r))
