"""Cross-formalism translation between cookie requests and app policies.

Both directions work permission-by-permission (input-spec-by-input-spec).
Action vocabularies differ: requests use oac: actions, app policies use
dpv: ones. A skos:exactMatch table maps the curated pairs; anything else
falls back to namespace substitution, which keeps round-trips stable.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from ..errors import DataPolicyError
from ..namespaces import DPV, DUR, OAC, ODRL, SKOS, XSD
from ..rdf import RdfGraph, graph_digest, iri, literal, parse_turtle
from .durations import (
    DurationLadder,
    default_duration_ladder,
    duration_to_seconds,
    seconds_to_duration,
)
from .dtou import Downstream, DtouAppPolicy, InputSpec, dtou_to_graph
from .odrl import Constraint, OdrlRequest, Party, Permission

EXACT_MATCH = SKOS + "exactMatch"
UNBOUNDED = DUR + "unbounded"


class TranslationError(DataPolicyError):
    pass


def load_action_map(g: RdfGraph) -> dict[str, str]:
    """oac action IRI -> dpv action IRI, from skos:exactMatch pairs."""
    mapping: dict[str, str] = {}
    for t in g.triples:
        if t.predicate.value != EXACT_MATCH:
            continue
        if not (t.subject.is_iri and t.object.is_iri):
            continue
        if t.subject.value.startswith(OAC):
            mapping[t.subject.value] = t.object.value
        elif t.object.value.startswith(OAC):
            mapping[t.object.value] = t.subject.value
    return mapping


@lru_cache(maxsize=1)
def default_action_map() -> dict[str, str]:
    text = resources.files("datapolicy").joinpath("data/oac-map.ttl").read_text("utf-8")
    return load_action_map(parse_turtle(text, base=OAC))


def action_to_dpv(action: str, amap: dict[str, str] | None = None) -> str:
    if amap is None:
        amap = default_action_map()
    if action in amap:
        return amap[action]
    if action.startswith(OAC):
        return DPV + action[len(OAC):]
    return action


def action_from_dpv(action: str, amap: dict[str, str] | None = None) -> str:
    if amap is None:
        amap = default_action_map()
    for oac_action, dpv_action in amap.items():
        if dpv_action == action:
            return oac_action
    if action.startswith(DPV):
        return OAC + action[len(DPV):]
    return action


def _retention_seconds(c: Constraint) -> int:
    if c.operator not in (ODRL + "eq", ODRL + "lteq"):
        raise TranslationError(
            f"unevaluable retention operator: {c.operator}")
    if not c.right_operand.is_literal:
        raise TranslationError("retention right operand must be a duration literal")
    return duration_to_seconds(c.right_operand.value)


def translate_odrl_to_dtou(
    r: OdrlRequest,
    ladder: DurationLadder | None = None,
    amap: dict[str, str] | None = None,
) -> DtouAppPolicy:
    """One input spec per permission. Retention maps to the smallest
    duration tag covering the requested span; no retention means the app
    asks for unbounded storage."""
    if ladder is None:
        ladder = default_duration_ladder()
    specs = []
    for i, perm in enumerate(r.permissions):
        purposes = []
        for c in perm.purpose_constraints():
            if c.operator != ODRL + "isA":
                raise TranslationError(
                    f"unevaluable purpose operator: {c.operator}")
            if not c.right_operand.is_iri:
                raise TranslationError("purpose right operand must be an IRI")
            purposes.append(c.right_operand.value)
        if not purposes:
            raise TranslationError(
                f"permission {i} has no purpose constraint")

        retention = perm.retention_constraint()
        if retention is None:
            provide = UNBOUNDED
        else:
            provide = ladder.tag_for(_retention_seconds(retention))

        downstream = []
        if perm.assignee is not None:
            for purpose in sorted(purposes):
                downstream.append(Downstream(perm.assignee.iri, purpose))

        specs.append(InputSpec(
            data=perm.target,
            port_name=f"port-{i}",
            purposes=frozenset(purposes),
            expects=frozenset(action_to_dpv(a, amap) for a in perm.actions),
            provide=provide,
            downstream=tuple(downstream),
        ))
    return DtouAppPolicy(node=r.node + "#app-policy", name=r.node,
                         input_specs=tuple(specs))


def translate_dtou_to_odrl(
    p: DtouAppPolicy,
    ladder: DurationLadder | None = None,
    amap: dict[str, str] | None = None,
) -> OdrlRequest:
    """One permission per input spec. The provide tag expands back to its
    full ladder span; dur:unbounded drops the retention constraint."""
    if ladder is None:
        ladder = default_duration_ladder()
    permissions = []
    for i, spec in enumerate(p.input_specs):
        if not spec.expects:
            raise TranslationError(f"input spec {i}: actions required")
        constraints = [
            Constraint(OAC + "Purpose", ODRL + "isA", iri(purpose))
            for purpose in sorted(spec.purposes)
        ]
        tag = ladder.canonical(spec.provide) if spec.provide else UNBOUNDED
        span = ladder.span(tag)
        if span is not None:
            constraints.append(Constraint(
                ODRL + "elapsedTime", ODRL + "eq",
                literal(seconds_to_duration(span), datatype=XSD + "duration")))
        assignee = None
        if spec.downstream:
            assignee = Party(iri=spec.downstream[0].app_name)
        permissions.append(Permission(
            assignee=assignee,
            actions=tuple(sorted(action_from_dpv(e, amap) for e in spec.expects)),
            target=spec.data,
            constraints=tuple(constraints),
        ))
    # Content-addressed uid so translating the same policy twice agrees.
    return OdrlRequest(
        node=p.node + "#request",
        uid=graph_digest(dtou_to_graph(p))[:32],
        permissions=tuple(permissions),
        profile=OAC,
    )
