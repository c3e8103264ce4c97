"""User preference profiles: the dpp: vocabulary, JSON round-trip.

A profile is a list of (purpose, actions, maxRetention, decision) rules
plus a default decision. Actions=None is the ANY wildcard. Rules are
validated against the purpose taxonomy at parse time so a typo'd purpose
fails loudly instead of silently never matching.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DataPolicyError
from ..namespaces import DPP, RDF_TYPE, XSD
from ..rdf import RdfGraph, RdfTerm, RdfTriple, blank, iri, is_absolute_iri, literal
from .durations import duration_to_seconds, seconds_to_duration
from .taxonomy import PurposeTaxonomy

PROFILE_TYPE = DPP + "Profile"

DECISIONS = ("allow", "deny", "ask")

ANY_ACTIONS = None  # wildcard value for PreferenceRule.actions


class PreferenceError(DataPolicyError):
    pass


@dataclass(frozen=True)
class PreferenceRule:
    purpose: str
    actions: frozenset[str] | None  # None = ANY
    max_retention: int | None  # seconds
    decision: str


@dataclass(frozen=True)
class PreferenceProfile:
    owner: str
    rules: tuple[PreferenceRule, ...]
    default_decision: str


def _check_decision(value: str) -> str:
    if value not in DECISIONS:
        raise PreferenceError(f"unknown decision keyword: {value!r}")
    return value


def _check_duplicates(rules: tuple[PreferenceRule, ...]) -> None:
    seen = set()
    for r in rules:
        key = (r.purpose, r.actions)
        if key in seen:
            actions = "ANY" if r.actions is None else sorted(r.actions)
            raise PreferenceError(
                f"duplicate rule for purpose {r.purpose} with actions {actions}")
        seen.add(key)


def _check_purpose(purpose: str, taxonomy: PurposeTaxonomy) -> str:
    if purpose not in taxonomy.nodes:
        raise PreferenceError(f"purpose not in taxonomy: {purpose}")
    return purpose


def parse_preferences(g: RdfGraph, taxonomy: PurposeTaxonomy) -> PreferenceProfile:
    """Read a dpp:Profile graph into a validated profile.

    The taxonomy is required because rule purposes must resolve in it.
    """
    profiles = g.subjects_of_type(PROFILE_TYPE)
    if not profiles:
        raise PreferenceError("graph contains no dpp:Profile")
    if len(profiles) > 1:
        raise PreferenceError("graph contains multiple dpp:Profile nodes")
    node = profiles[0]

    owner = g.value(node, DPP + "owner")
    if owner is None or not owner.is_iri:
        raise PreferenceError("profile has no dpp:owner IRI")
    default = g.value(node, DPP + "default")
    if default is None or not default.is_literal:
        raise PreferenceError("profile has no dpp:default decision")

    rules = []
    for rule_node in g.objects(node, DPP + "rule"):
        purpose = g.value(rule_node, DPP + "purpose")
        if purpose is None or not purpose.is_iri:
            raise PreferenceError("rule has no dpp:purpose IRI")
        decision = g.value(rule_node, DPP + "decision")
        if decision is None or not decision.is_literal:
            raise PreferenceError("rule has no dpp:decision")
        actions = frozenset(o.value for o in g.objects(rule_node, DPP + "action")
                            if o.is_iri) or None
        retention = g.value(rule_node, DPP + "maxRetention")
        max_retention = None
        if retention is not None:
            if not retention.is_literal:
                raise PreferenceError("dpp:maxRetention must be a duration literal")
            max_retention = duration_to_seconds(retention.value)
        rules.append(PreferenceRule(
            purpose=_check_purpose(purpose.value, taxonomy),
            actions=actions,
            max_retention=max_retention,
            decision=_check_decision(decision.value),
        ))

    profile = PreferenceProfile(
        owner=owner.value,
        rules=tuple(rules),
        default_decision=_check_decision(default.value),
    )
    _check_duplicates(profile.rules)
    return profile


def profile_to_graph(p: PreferenceProfile) -> RdfGraph:
    triples: list[RdfTriple] = []
    node = blank("profile")

    def add(s: RdfTerm, pred: str, o: RdfTerm) -> None:
        triples.append(RdfTriple(s, iri(DPP + pred), o))

    triples.append(RdfTriple(node, iri(RDF_TYPE), iri(PROFILE_TYPE)))
    add(node, "owner", iri(p.owner))
    add(node, "default", literal(p.default_decision))
    for i, rule in enumerate(p.rules):
        rnode = blank(f"r{i}")
        add(node, "rule", rnode)
        add(rnode, "purpose", iri(rule.purpose))
        if rule.actions is not None:
            for action in sorted(rule.actions):
                add(rnode, "action", iri(action))
        if rule.max_retention is not None:
            add(rnode, "maxRetention",
                literal(seconds_to_duration(rule.max_retention),
                        datatype=XSD + "duration"))
        add(rnode, "decision", literal(rule.decision))
    return RdfGraph.of(triples)


# -- JSON shape for the control API -----------------------------------------


def profile_to_json(p: PreferenceProfile) -> dict:
    return {
        "owner": p.owner,
        "defaultDecision": p.default_decision,
        "rules": [
            {
                "purpose": r.purpose,
                "actions": sorted(r.actions) if r.actions is not None else None,
                "maxRetentionSeconds": r.max_retention,
                "decision": r.decision,
            }
            for r in p.rules
        ],
    }


def profile_from_json(data: object, taxonomy: PurposeTaxonomy) -> PreferenceProfile:
    """Validate the control-API JSON shape; raises PreferenceError with a
    message suitable for a 422 body."""
    if not isinstance(data, dict):
        raise PreferenceError("profile must be a JSON object")
    owner = data.get("owner")
    if not isinstance(owner, str) or not is_absolute_iri(owner):
        raise PreferenceError("owner must be an absolute IRI string")
    default = data.get("defaultDecision")
    if not isinstance(default, str):
        raise PreferenceError("defaultDecision is required")
    raw_rules = data.get("rules", [])
    if not isinstance(raw_rules, list):
        raise PreferenceError("rules must be a list")

    rules = []
    for i, raw in enumerate(raw_rules):
        if not isinstance(raw, dict):
            raise PreferenceError(f"rule {i} must be an object")
        purpose = raw.get("purpose")
        if not isinstance(purpose, str):
            raise PreferenceError(f"rule {i}: purpose is required")
        actions = raw.get("actions")
        if actions is not None:
            if (not isinstance(actions, list) or not actions
                    or not all(isinstance(a, str) and is_absolute_iri(a) for a in actions)):
                raise PreferenceError(
                    f"rule {i}: actions must be null or a non-empty list of IRIs")
            actions = frozenset(actions)
        retention = raw.get("maxRetentionSeconds")
        if retention is not None and (not isinstance(retention, int)
                                      or isinstance(retention, bool) or retention < 0):
            raise PreferenceError(
                f"rule {i}: maxRetentionSeconds must be a non-negative integer")
        decision = raw.get("decision")
        if not isinstance(decision, str):
            raise PreferenceError(f"rule {i}: decision is required")
        rules.append(PreferenceRule(
            purpose=_check_purpose(purpose, taxonomy),
            actions=actions,
            max_retention=retention,
            decision=_check_decision(decision),
        ))

    profile = PreferenceProfile(
        owner=owner,
        rules=tuple(rules),
        default_decision=_check_decision(default),
    )
    _check_duplicates(profile.rules)
    return profile
