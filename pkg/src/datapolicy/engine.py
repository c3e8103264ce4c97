"""Decision engine: match a cookie request against a preference profile.

Rule selection is by specificity: among the rules whose purpose subsumes
the requested purpose, pick the one at minimal taxonomy distance, break
ties by severity (deny over ask over allow), then by declaration order.
An allow never silently widens a request; it can only narrow the action
set and shorten retention. Ask surfaces a question instead of deciding.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import DataPolicyError
from .model.durations import (
    DurationLadder,
    default_duration_ladder,
    duration_to_seconds,
    seconds_to_duration,
)
from .model.dtou import DtouAppPolicy
from .model.odrl import (
    Constraint,
    OdrlAgreement,
    OdrlRequest,
    Permission,
    agreement_to_graph,
    request_digest,
)
from .model.preferences import PreferenceProfile, PreferenceRule
from .model.taxonomy import PurposeTaxonomy
from .model.translate import action_to_dpv, default_action_map
from .namespaces import AGREEMENT_NODE, DUR, ODRL, XSD
from .rdf import RdfGraph, literal

GRANTED = "granted"
PARTIAL = "partial"
DENIED = "denied"
PENDING = "pending"

ALLOW, DENY, ASK = "allow", "deny", "ask"

# deny beats ask beats allow when two rules sit at the same distance
_SEVERITY = {DENY: 0, ASK: 1, ALLOW: 2}

_UNBOUNDED_TAG = DUR + "unbounded"


class EngineError(DataPolicyError):
    pass


@dataclass(frozen=True)
class PendingQuestion:
    permission_index: int
    purpose: str
    reason: str
    # what the permission asked for, so a prompt can show it and offer
    # narrowing within it; retention is the raw duration literal
    requested_actions: tuple[str, ...] = ()
    requested_retention: str | None = None


@dataclass(frozen=True)
class UserChoice:
    permission_index: int
    decision: str  # allow | deny
    narrowed_actions: frozenset[str] | None = None
    narrowed_retention: int | None = None  # seconds


@dataclass(frozen=True)
class Decision:
    request_digest: str
    outcome: str
    granted_permissions: tuple[Permission, ...] = ()
    granted_indexes: tuple[int, ...] = ()
    pending_questions: tuple[PendingQuestion, ...] = ()
    agreement: OdrlAgreement | None = None


@dataclass(frozen=True)
class ComplianceViolation:
    spec_index: int
    dimension: str  # purpose | action | duration | downstream
    detail: str


@dataclass(frozen=True)
class ComplianceResult:
    compliant: bool
    violations: tuple[ComplianceViolation, ...] = ()


def select_rule(
    profile: PreferenceProfile,
    purpose: str,
    taxonomy: PurposeTaxonomy,
) -> PreferenceRule | None:
    """Most specific applicable rule for a purpose, or None when no rule
    applies and the profile default governs."""
    best = None
    best_key = None
    for index, rule in enumerate(profile.rules):
        if not taxonomy.is_subpurpose(purpose, rule.purpose):
            continue
        distance = taxonomy.distance(purpose, rule.purpose)
        key = (distance, _SEVERITY[rule.decision], index)
        if best_key is None or key < best_key:
            best, best_key = rule, key
    return best


def _permission_purposes(perm: Permission, index: int) -> list[str]:
    purposes = []
    for c in perm.purpose_constraints():
        if c.operator != ODRL + "isA":
            raise EngineError(
                f"permission {index}: unevaluable purpose constraint "
                f"operator: {c.operator}")
        if not c.right_operand.is_iri:
            raise EngineError(
                f"permission {index}: purpose right operand must be an IRI")
        purposes.append(c.right_operand.value)
    return purposes


def _governing(
    profile: PreferenceProfile,
    purposes: list[str],
    taxonomy: PurposeTaxonomy,
) -> list[tuple[str, PreferenceRule | None, str]]:
    out = []
    for purpose in purposes:
        rule = select_rule(profile, purpose, taxonomy)
        decision = rule.decision if rule is not None else profile.default_decision
        out.append((purpose, rule, decision))
    return out


def _requested_retention(perm: Permission) -> tuple[Constraint | None, int | None]:
    """The retention constraint and its span in seconds. A constraint
    whose operator is not eq/lteq (or whose operand is not a duration
    literal) is opaque: it is preserved verbatim and never narrowed."""
    c = perm.retention_constraint()
    if c is None:
        return None, None
    if c.operator not in (ODRL + "eq", ODRL + "lteq"):
        return c, None
    if not c.right_operand.is_literal:
        return c, None
    try:
        return c, duration_to_seconds(c.right_operand.value)
    except DataPolicyError:
        return c, None


def _narrow_actions(
    requested: tuple[str, ...],
    rule_action_sets: list[frozenset[str]],
    amap: dict[str, str],
) -> tuple[str, ...]:
    """Requested actions surviving every constraining rule, compared in
    the dpv action vocabulary so oac spellings match."""
    if not rule_action_sets:
        return requested
    allowed_sets = [frozenset(action_to_dpv(a, amap) for a in s)
                    for s in rule_action_sets]
    return tuple(a for a in requested
                 if all(action_to_dpv(a, amap) in s for s in allowed_sets))


def _narrowed_permission(
    perm: Permission,
    actions: tuple[str, ...],
    retention_cap: int | None,
) -> Permission:
    """Rebuild a permission with the surviving actions and, when the cap
    bites, a rewritten or appended retention constraint."""
    constraint, requested_seconds = _requested_retention(perm)
    constraints = list(perm.constraints)

    if retention_cap is not None:
        if requested_seconds is not None and retention_cap < requested_seconds:
            rendered = literal(seconds_to_duration(retention_cap),
                               datatype=XSD + "duration")
            constraints = [
                replace(c, right_operand=rendered, title=None)
                if c is constraint else c
                for c in constraints
            ]
        elif constraint is None:
            constraints.append(Constraint(
                ODRL + "elapsedTime", ODRL + "lteq",
                literal(seconds_to_duration(retention_cap),
                        datatype=XSD + "duration")))

    return replace(perm, actions=actions, constraints=tuple(constraints))


def _rule_retention_min(rules: list[PreferenceRule]) -> int | None:
    spans = [r.max_retention for r in rules if r.max_retention is not None]
    return min(spans) if spans else None


def evaluate(
    profile: PreferenceProfile,
    request: OdrlRequest,
    taxonomy: PurposeTaxonomy,
    ladder: DurationLadder | None = None,
    amap: dict[str, str] | None = None,
    *,
    owner: str | None = None,
    now: str | None = None,
    uid: str | None = None,
) -> Decision:
    """Evaluate every permission and aggregate.

    A permission with several purposes is governed by all of them: any
    deny wins, else any ask defers, else the allow rules jointly narrow.
    Permissions without purpose constraints fall to the profile default.
    When now and uid are given an agreement is synthesized for granted
    and partial outcomes (assigner defaults to the profile owner).
    """
    if amap is None:
        amap = default_action_map()

    granted: list[tuple[int, Permission]] = []
    questions: list[PendingQuestion] = []
    for index, perm in enumerate(request.permissions):
        purposes = _permission_purposes(perm, index)
        if purposes:
            governing = _governing(profile, purposes, taxonomy)
        else:
            governing = [("", None, profile.default_decision)]

        if any(decision == DENY for _, _, decision in governing):
            continue
        asking = [(purpose, rule) for purpose, rule, decision in governing
                  if decision == ASK]
        if asking:
            retention = perm.retention_constraint()
            shown = (retention.right_operand.value
                     if retention is not None and retention.right_operand.is_literal
                     else None)
            for purpose, rule in asking:
                if rule is None:
                    reason = "no applicable rule; profile default is ask"
                else:
                    reason = f"rule for {rule.purpose} asks"
                questions.append(PendingQuestion(
                    index, purpose, reason,
                    requested_actions=perm.actions,
                    requested_retention=shown))
            continue

        rules = [rule for _, rule, _ in governing if rule is not None]
        actions = _narrow_actions(
            perm.actions,
            [r.actions for r in rules if r.actions is not None],
            amap)
        if not actions:
            # every requested action was filtered out: nothing to grant
            continue
        cap = _rule_retention_min(rules)
        granted.append((index, _narrowed_permission(perm, actions, cap)))

    if questions:
        outcome = PENDING
    elif not granted:
        outcome = DENIED
    elif (len(granted) == len(request.permissions)
          and all(narrowed == request.permissions[i] for i, narrowed in granted)):
        outcome = GRANTED
    else:
        outcome = PARTIAL

    d = Decision(
        request_digest=request_digest(request),
        outcome=outcome,
        granted_permissions=tuple(p for _, p in granted),
        granted_indexes=tuple(i for i, _ in granted),
        pending_questions=tuple(questions),
    )
    if outcome in (GRANTED, PARTIAL) and now is not None and uid is not None:
        agreement, _ = build_agreement(
            d, request, owner or profile.owner, now, uid)
        d = replace(d, agreement=agreement)
    return d


def build_agreement(
    d: Decision,
    request: OdrlRequest,
    owner: str,
    now: str,
    uid: str,
) -> tuple[OdrlAgreement, RdfGraph]:
    """Synthesize the agreement recording what was actually granted.

    Retention constraints come out with operator lteq: the agreement
    states a ceiling, regardless of how the request phrased it.
    """
    if d.outcome not in (GRANTED, PARTIAL):
        raise EngineError(f"no agreement for a {d.outcome} decision")

    permissions = []
    for perm in d.granted_permissions:
        constraints = tuple(
            replace(c, operator=ODRL + "lteq")
            if c.is_retention and c.operator == ODRL + "eq" else c
            for c in perm.constraints
        )
        permissions.append(replace(perm, constraints=constraints))

    agreement = OdrlAgreement(
        node=AGREEMENT_NODE + uid,
        uid=uid,
        issued=now,
        assigner=owner,
        request_digest=d.request_digest,
        permissions=tuple(permissions),
    )
    graph = agreement_to_graph(agreement)
    assert not any(t.subject.is_blank or t.object.is_blank for t in graph.triples)
    return agreement, graph


def resolve_pending(
    d: Decision,
    choices: list[UserChoice],
    request: OdrlRequest,
    owner: str,
    now: str,
    uid: str,
    amap: dict[str, str] | None = None,
) -> Decision:
    """Fold the user's answers into a pending decision.

    Every pending permission needs exactly one choice; allow applies the
    optional narrowing, deny drops the permission. The outcome is then
    recomputed over all permissions and an agreement synthesized when
    anything survives.
    """
    if d.outcome != PENDING:
        raise EngineError("decision has nothing pending")
    if amap is None:
        amap = default_action_map()

    pending = {q.permission_index for q in d.pending_questions}
    by_index: dict[int, UserChoice] = {}
    for choice in choices:
        if choice.permission_index not in pending:
            raise EngineError(
                f"choice for permission {choice.permission_index},"
                " which is not pending")
        if choice.permission_index in by_index:
            raise EngineError(
                f"duplicate choice for permission {choice.permission_index}")
        by_index[choice.permission_index] = choice
    missing = pending - by_index.keys()
    if missing:
        raise EngineError(f"missing choice for permission {min(missing)}")

    resolved: dict[int, Permission] = dict(
        zip(d.granted_indexes, d.granted_permissions))
    for index, choice in by_index.items():
        if choice.decision == DENY:
            continue
        if choice.decision != ALLOW:
            raise EngineError(f"unknown choice decision: {choice.decision!r}")
        perm = request.permissions[index]
        if choice.narrowed_actions is None:
            actions = perm.actions
        else:
            wanted = frozenset(action_to_dpv(a, amap)
                               for a in choice.narrowed_actions)
            actions = tuple(a for a in perm.actions
                            if action_to_dpv(a, amap) in wanted)
        if not actions:
            continue
        resolved[index] = _narrowed_permission(
            perm, actions, choice.narrowed_retention)

    granted = sorted(resolved.items())
    if not granted:
        outcome = DENIED
    elif (len(granted) == len(request.permissions)
          and all(narrowed == request.permissions[i] for i, narrowed in granted)):
        outcome = GRANTED
    else:
        outcome = PARTIAL

    out = Decision(
        request_digest=d.request_digest,
        outcome=outcome,
        granted_permissions=tuple(p for _, p in granted),
        granted_indexes=tuple(i for i, _ in granted),
    )
    if outcome in (GRANTED, PARTIAL):
        agreement, _ = build_agreement(out, request, owner, now, uid)
        out = replace(out, agreement=agreement)
    return out


def dtou_compliance(
    profile: PreferenceProfile,
    app: DtouAppPolicy,
    taxonomy: PurposeTaxonomy,
    ladder: DurationLadder | None = None,
    amap: dict[str, str] | None = None,
) -> ComplianceResult:
    """Check an app policy against the profile on four dimensions per
    input spec: purpose, action, duration, downstream.

    Actions and retention are constrained only by the governing allow
    rules; a non-allow verdict on any purpose is itself the violation.
    Downstream flows are judged by their purpose alone.
    """
    if ladder is None:
        ladder = default_duration_ladder()
    if amap is None:
        amap = default_action_map()

    violations: list[ComplianceViolation] = []
    for index, spec in enumerate(app.input_specs):
        governing = _governing(profile, sorted(spec.purposes), taxonomy)
        for purpose, rule, decision in governing:
            if decision != ALLOW:
                source = f"rule for {rule.purpose}" if rule else "profile default"
                violations.append(ComplianceViolation(
                    index, "purpose",
                    f"purpose {purpose} is not allowed ({source}: {decision})"))
        if any(decision != ALLOW for _, _, decision in governing):
            continue  # purpose violations already recorded
        allow_rules = [rule for _, rule, _ in governing if rule is not None]

        action_sets = [frozenset(action_to_dpv(a, amap) for a in r.actions)
                       for r in allow_rules if r.actions is not None]
        for expect in sorted(spec.expects):
            image = action_to_dpv(expect, amap)
            if any(image not in s for s in action_sets):
                violations.append(ComplianceViolation(
                    index, "action", f"action {expect} is not allowed"))

        ceiling = _rule_retention_min(allow_rules)
        ceiling_tag = _UNBOUNDED_TAG if ceiling is None else ladder.tag_for(ceiling)
        provide = ladder.canonical(spec.provide) if spec.provide else _UNBOUNDED_TAG
        if not ladder.covers(provide, ceiling_tag):
            violations.append(ComplianceViolation(
                index, "duration",
                f"storage duration {provide} exceeds ceiling {ceiling_tag}"))

        for ds in spec.downstream:
            rule = select_rule(profile, ds.purpose, taxonomy)
            decision = rule.decision if rule else profile.default_decision
            if decision != ALLOW:
                violations.append(ComplianceViolation(
                    index, "downstream",
                    f"sharing with {ds.app_name} for {ds.purpose}"
                    f" is not allowed ({decision})"))

    return ComplianceResult(compliant=not violations,
                            violations=tuple(violations))
