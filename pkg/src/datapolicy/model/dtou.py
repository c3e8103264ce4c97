"""Typed views over DToU app-policy graphs (the Figure-2 shape)."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DataPolicyError
from ..namespaces import DTOU, RDF_TYPE
from ..rdf import RdfGraph, RdfTerm, RdfTriple, blank, iri, literal

APP_POLICY_TYPE = DTOU + "AppPolicy"
INPUT_SPEC_TYPE = DTOU + "InputSpec"


class DtouError(DataPolicyError):
    pass


@dataclass(frozen=True)
class Downstream:
    app_name: str
    purpose: str


@dataclass(frozen=True)
class InputSpec:
    data: str
    port_name: str
    purposes: frozenset[str]
    expects: frozenset[str]
    provide: str | None = None
    downstream: tuple[Downstream, ...] = ()

    def __post_init__(self) -> None:
        if not self.purposes:
            raise DtouError("input spec purpose required")


@dataclass(frozen=True)
class DtouAppPolicy:
    node: str
    name: str
    input_specs: tuple[InputSpec, ...]

    def __post_init__(self) -> None:
        if not self.input_specs:
            raise DtouError("app policy has no input specs")


def _descriptor(g: RdfGraph, term: RdfTerm, what: str) -> str:
    """Tag IRI of a descriptor object.

    Accepts both the bracketed Figure-2 form `[ dtou:descriptor X ]` and a
    bare IRI.
    """
    if term.is_iri:
        return term.value
    inner = g.value(term, DTOU + "descriptor")
    if inner is None or not inner.is_iri:
        raise DtouError(f"{what} descriptor without dtou:descriptor IRI")
    return inner.value


def _parse_input_spec(g: RdfGraph, node: RdfTerm) -> InputSpec:
    data = g.value(node, DTOU + "data")
    if data is None or not data.is_iri:
        raise DtouError("input spec has no dtou:data")

    port_name = ""
    port = g.value(node, DTOU + "port")
    if port is not None:
        name = g.value(port, DTOU + "name")
        if name is not None and name.is_literal:
            port_name = name.value

    purposes = frozenset(_descriptor(g, o, "purpose")
                         for o in g.objects(node, DTOU + "purpose"))
    if not purposes:
        raise DtouError("input spec purpose required")
    expects = frozenset(_descriptor(g, o, "expect")
                        for o in g.objects(node, DTOU + "expect"))

    provides = g.objects(node, DTOU + "provide")
    if len(provides) > 1:
        raise DtouError("input spec carries more than one dtou:provide")
    provide = _descriptor(g, provides[0], "provide") if provides else None

    downstream = []
    for d in g.objects(node, DTOU + "downstream"):
        app = g.value(d, DTOU + "app_name")
        purpose = g.value(d, DTOU + "purpose")
        if app is None or not app.is_iri:
            raise DtouError("downstream entry without dtou:app_name")
        if purpose is None:
            raise DtouError("downstream entry without dtou:purpose")
        downstream.append(Downstream(app.value, _descriptor(g, purpose, "downstream purpose")))

    return InputSpec(
        data=data.value,
        port_name=port_name,
        purposes=purposes,
        expects=expects,
        provide=provide,
        downstream=tuple(downstream),
    )


def parse_dtou_app_policy(g: RdfGraph, node: str | None = None) -> DtouAppPolicy:
    """Lift a dtou:AppPolicy out of a graph.

    Without `node`, the graph must contain exactly one app policy.
    """
    typed = g.subjects_of_type(APP_POLICY_TYPE)
    if node is not None:
        wanted = iri(node)
        if wanted not in typed:
            raise DtouError(f"<{node}> is not typed dtou:AppPolicy in this graph")
        subject = wanted
    elif not typed:
        raise DtouError("graph contains no dtou:AppPolicy")
    elif len(typed) > 1:
        listing = ", ".join(t.value for t in typed)
        raise DtouError(f"graph contains multiple app policies ({listing}); "
                        "pass an explicit node")
    else:
        subject = typed[0]

    name = g.value(subject, DTOU + "name")
    if name is None or not name.is_iri:
        raise DtouError("app policy has no dtou:name IRI")
    specs = tuple(_parse_input_spec(g, s)
                  for s in g.objects(subject, DTOU + "input_spec"))
    if not specs:
        raise DtouError("app policy has no input specs")
    return DtouAppPolicy(node=subject.value, name=name.value, input_specs=specs)


def dtou_to_graph(p: DtouAppPolicy) -> RdfGraph:
    """Figure-2-shaped graph: descriptors wrapped in blank nodes,
    downstream purposes as bare IRIs."""
    triples: list[RdfTriple] = []
    count = 0

    def fresh() -> RdfTerm:
        nonlocal count
        term = blank(f"b{count}")
        count += 1
        return term

    def add(s, pred, o):
        triples.append(RdfTriple(s, iri(DTOU + pred), o))

    node = iri(p.node)
    triples.append(RdfTriple(node, iri(RDF_TYPE), iri(APP_POLICY_TYPE)))
    add(node, "name", iri(p.name))
    for i, spec in enumerate(p.input_specs):
        snode = iri(f"{p.node}/input/{i}") if not p.node.endswith("#") \
            else iri(f"{p.node}input/{i}")
        add(node, "input_spec", snode)
        triples.append(RdfTriple(snode, iri(RDF_TYPE), iri(INPUT_SPEC_TYPE)))
        add(snode, "data", iri(spec.data))
        if spec.port_name:
            port = fresh()
            add(snode, "port", port)
            add(port, "name", literal(spec.port_name))
        for purpose in sorted(spec.purposes):
            wrap = fresh()
            add(snode, "purpose", wrap)
            add(wrap, "descriptor", iri(purpose))
        for expect in sorted(spec.expects):
            wrap = fresh()
            add(snode, "expect", wrap)
            add(wrap, "descriptor", iri(expect))
        if spec.provide is not None:
            wrap = fresh()
            add(snode, "provide", wrap)
            add(wrap, "descriptor", iri(spec.provide))
        for d in spec.downstream:
            wrap = fresh()
            add(snode, "downstream", wrap)
            add(wrap, "app_name", iri(d.app_name))
            add(wrap, "purpose", iri(d.purpose))
    return RdfGraph.of(triples)
