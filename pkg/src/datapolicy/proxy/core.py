"""Consent decisions applied to HTTP header traffic.

The core is transport-agnostic: it takes and returns header lists
(name, value) and never touches sockets, so the whole pipeline can be
driven in-process by tests. The forward proxy in server.py and the
control API in control.py both delegate here.
"""

from __future__ import annotations

import logging
import queue
import threading
import time
import urllib.request
from collections import defaultdict
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable
from uuid import uuid4

from ..engine import (
    DENIED,
    GRANTED,
    PARTIAL,
    PENDING,
    Decision,
    UserChoice,
    build_agreement,
    evaluate,
    resolve_pending,
)
from ..errors import DataPolicyError
from ..model import (
    DurationLadder,
    OdrlRequest,
    PreferenceProfile,
    PurposeTaxonomy,
    agreement_to_graph,
    default_action_map,
    default_duration_ladder,
    parse_odrl_agreement,
    parse_odrl_request,
    request_to_graph,
)
from ..rdf import RdfGraph, graph_digest, parse_turtle, serialize_canonical
from ..wire import (
    AGREEMENT_HEADER,
    REQUEST_HEADER,
    AgreementEnvelope,
    NegotiationResult,
    PolicySource,
    UnrecognizedSource,
    WireError,
    decode_request_header,
    encode_agreement_header,
    negotiate,
)
from .log import ConsentLog, ConsentRecord
from .state import ALL_COOKIES, OriginState, PendingItem, ProxyConfig, ProxyStateError

logger = logging.getLogger("datapolicy.proxy")

Header = tuple[str, str]
Fetcher = Callable[[str, float], bytes]


def http_fetch(url: str, timeout: float) -> bytes:
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        if resp.status != 200:
            raise DataPolicyError(f"policy fetch got {resp.status} from {url}")
        return resp.read()


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class _CachedPolicy:
    expires_at: float
    digest: str
    request: OdrlRequest


def cookie_name_of(set_cookie: str) -> str:
    return set_cookie.split("=", 1)[0].strip()


def split_cookie_header(value: str) -> list[tuple[str, str]]:
    """Cookie header into (name, pair-text) entries, order preserved."""
    pairs = []
    for chunk in value.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        name = chunk.split("=", 1)[0].strip()
        pairs.append((name, chunk))
    return pairs


class ProxyCore:
    """Holds all consent state and applies it to traffic."""

    def __init__(
        self,
        profile: PreferenceProfile,
        taxonomy: PurposeTaxonomy,
        log: ConsentLog,
        config: ProxyConfig | None = None,
        *,
        ladder: DurationLadder | None = None,
        amap: dict[str, str] | None = None,
        fetcher: Fetcher = http_fetch,
        clock: Callable[[], str] = utc_now,
        uid_factory: Callable[[], str] | None = None,
        monotonic: Callable[[], float] | None = None,
    ):
        self.profile = profile
        self.taxonomy = taxonomy
        self.log = log
        self.config = config or ProxyConfig()
        self.ladder = ladder or default_duration_ladder()
        self.amap = amap if amap is not None else default_action_map()
        self._fetch = fetcher
        self._clock = clock
        self._uid = uid_factory or (lambda: uuid4().hex)
        self._monotonic = monotonic or time.monotonic

        self._origins: dict[str, OriginState] = {}
        self._locks: dict[str, threading.RLock] = defaultdict(threading.RLock)
        self._global = threading.RLock()
        self._link_cache: dict[str, _CachedPolicy] = {}
        self._resolved_ids: set[str] = set()
        self._listeners: list[queue.Queue] = []

    # -- events ---------------------------------------------------------

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._global:
            self._listeners.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._global:
            if q in self._listeners:
                self._listeners.remove(q)

    def _emit(self, event: str, data: dict) -> None:
        with self._global:
            listeners = list(self._listeners)
        for q in listeners:
            q.put((event, data))

    # -- state access ---------------------------------------------------

    def origin_state(self, origin: str) -> OriginState:
        with self._global:
            if origin not in self._origins:
                self._origins[origin] = OriginState(origin=origin)
            return self._origins[origin]

    def pending_items(self) -> list[PendingItem]:
        with self._global:
            origins = list(self._origins.values())
        items: list[PendingItem] = []
        for state in origins:
            with self._locks[state.origin]:
                items.extend(state.pending)
        items.sort(key=lambda it: it.created_at)
        return items

    # -- policy acquisition ----------------------------------------------

    def _policy_document(self, source: PolicySource, origin: str):
        """Resolve a source to (digest, request) or None when absent."""
        if source.disposition == "inline":
            text = source.policy_bytes.decode("utf-8")
            # relative IRIs in an inline policy resolve against the
            # origin that sent it
            graph = parse_turtle(text, base=origin)
            request = parse_odrl_request(graph)
            return graph_digest(request_to_graph(request)), request
        # link and negotiate both serve the policy document at href (a
        # negotiate endpoint answers GET with the policy, POST with the
        # negotiation exchange)
        return self._fetch_linked(source.href)

    def _fetch_linked(self, href: str):
        now = self._monotonic()
        cached = self._link_cache.get(href)
        if cached and cached.expires_at > now:
            return cached.digest, cached.request
        body = self._fetch(href, self.config.upstream_timeout)
        graph = parse_turtle(body.decode("utf-8"), base=href)
        request = parse_odrl_request(graph)
        digest = graph_digest(request_to_graph(request))
        self._link_cache[href] = _CachedPolicy(
            expires_at=now + self.config.link_cache_ttl,
            digest=digest, request=request)
        return digest, request

    # -- evaluation -------------------------------------------------------

    def _decide(self, state: OriginState, digest: str,
                request: OdrlRequest) -> tuple[Decision, bool]:
        """Returns (decision, fresh). A remembered decision is reused
        without re-evaluation and without another log record."""
        existing = state.decisions.get(digest)
        if existing is not None:
            return existing, False
        decision = evaluate(
            self.profile, request, self.taxonomy, self.ladder, self.amap,
            now=self._clock(), uid=self._uid())
        state.decisions[digest] = decision
        state.decision_sources[digest] = "auto"
        return decision, True

    def _record(self, state: OriginState, cookie_names: tuple[str, ...],
                digest: str, decision: Decision, source: str) -> ConsentRecord:
        agreement_digest = None
        agreement_turtle = None
        if decision.agreement is not None:
            graph = agreement_to_graph(decision.agreement)
            agreement_turtle = serialize_canonical(graph)
            agreement_digest = graph_digest(graph)
        record = ConsentRecord(
            ts=self._clock(),
            origin=state.origin,
            cookie_names=cookie_names,
            request_digest=digest,
            outcome=decision.outcome,
            source=source,
            prev_hash=self.log.tail_hash,
            agreement_digest=agreement_digest,
            agreement_turtle=agreement_turtle,
        )
        self.log.append(record)
        return record

    def _queue_pending(self, state: OriginState, digest: str,
                       decision: Decision, cookie_names: tuple[str, ...]) -> PendingItem | None:
        for item in state.pending:
            if item.request_digest == digest:
                return None  # already on the queue
        item = PendingItem(
            id=self._uid(),
            origin=state.origin,
            request_digest=digest,
            questions=decision.pending_questions,
            created_at=self._clock(),
            cookie_names=cookie_names,
        )
        state.pending.append(item)
        self._emit("pending", pending_json(item))
        return item

    # -- the two traffic hooks -------------------------------------------

    def on_response(self, origin: str, headers: list[Header]):
        """Apply consent to one upstream response.

        Returns (filtered headers, new pending items, consent records).
        Set-Cookie headers whose policy says denied or pending are
        removed; everything else passes through untouched.
        """
        state = self.origin_state(origin)
        with self._locks[origin]:
            return self._on_response_locked(state, headers)

    def _on_response_locked(self, state: OriginState, headers: list[Header]):
        set_cookies = [(i, cookie_name_of(v)) for i, (n, v) in enumerate(headers)
                       if n.lower() == "set-cookie"]
        all_names = tuple(name for _, name in set_cookies)

        new_pending: list[PendingItem] = []
        records: list[ConsentRecord] = []
        evaluated: set[str] = set()

        for _, value in [h for h in headers if h[0].lower() == REQUEST_HEADER.lower()]:
            try:
                source = decode_request_header(value)
            except WireError as exc:
                logger.warning("%s: unreadable %s header: %s",
                               state.origin, REQUEST_HEADER, exc)
                continue
            if isinstance(source, UnrecognizedSource):
                logger.warning("%s: unrecognized policy disposition %r, "
                               "cookies treated as unannotated",
                               state.origin, source.disposition)
                continue
            try:
                resolved = self._policy_document(source, state.origin)
            except (DataPolicyError, OSError, UnicodeDecodeError) as exc:
                logger.warning("%s: policy at %s unavailable, treating as "
                               "absent: %s", state.origin,
                               source.href or "<inline>", exc)
                continue
            digest, request = resolved
            binding = source.cookie_name if source.cookie_name is not None else ALL_COOKIES
            state.known_policies[binding] = (source, digest, request)

            bound_names = (source.cookie_name,) if source.cookie_name else all_names
            decision, fresh = self._decide(state, digest, request)
            if fresh and digest not in evaluated:
                evaluated.add(digest)
                records.append(self._record(
                    state, bound_names, digest, decision, "auto"))
            if decision.outcome == PENDING:
                item = self._queue_pending(state, digest, decision, bound_names)
                if item is not None:
                    new_pending.append(item)

        filtered: list[Header] = []
        for name, value in headers:
            if name.lower() != "set-cookie":
                filtered.append((name, value))
                continue
            cookie = cookie_name_of(value)
            known = state.policy_for_cookie(cookie)
            if known is None:
                if self.config.pass_unannotated:
                    logger.info("%s: unannotated cookie %r passed through",
                                state.origin, cookie)
                    filtered.append((name, value))
                else:
                    logger.info("%s: unannotated cookie %r dropped",
                                state.origin, cookie)
                continue
            _, digest, _ = known
            decision = state.decisions.get(digest)
            if decision is not None and decision.outcome in (GRANTED, PARTIAL):
                filtered.append((name, value))
            # denied and pending cookies are withheld from the client

        return filtered, new_pending, records

    def _drop_stale_pending(self, state: OriginState, digest: str) -> None:
        stale = [it for it in state.pending if it.request_digest == digest]
        for item in stale:
            state.pending.remove(item)
            self._resolved_ids.add(item.id)
            self._emit("resolved", {"id": item.id, "origin": state.origin,
                                    "resolution": "superseded"})

    def on_request(self, origin: str, headers: list[Header]) -> list[Header]:
        """Strip denied/pending cookies and attach agreement headers."""
        state = self.origin_state(origin)
        with self._locks[origin]:
            return self._on_request_locked(state, headers)

    def _on_request_locked(self, state: OriginState, headers: list[Header]) -> list[Header]:
        out: list[Header] = []
        agreements: list[Header] = []
        for name, value in headers:
            if name.lower() != "cookie":
                out.append((name, value))
                continue
            kept: list[str] = []
            for cookie, pair in split_cookie_header(value):
                known = state.policy_for_cookie(cookie)
                if known is None:
                    kept.append(pair)  # unknown cookies pass untouched
                    continue
                _, digest, _ = known
                decision = state.decisions.get(digest)
                if decision is None:
                    kept.append(pair)
                    continue
                if decision.outcome in (GRANTED, PARTIAL):
                    kept.append(pair)
                    agreements.append((AGREEMENT_HEADER,
                                       self._envelope_for(decision)))
                # denied / pending pairs are deleted
            if kept:
                out.append((name, "; ".join(kept)))
        out.extend(agreements)
        return out

    def _envelope_for(self, decision: Decision) -> str:
        graph = agreement_to_graph(decision.agreement)
        payload = serialize_canonical(graph).encode("utf-8")
        return encode_agreement_header(AgreementEnvelope.of_bytes(payload))

    # -- human resolution --------------------------------------------------

    def resolve(self, pending_id: str, choices: list[UserChoice]) -> Decision:
        """Fold user answers into the pending decision. Raises KeyError
        for an unknown id and AlreadyResolved for a settled one."""
        target: PendingItem | None = None
        with self._global:
            for state in self._origins.values():
                for item in state.pending:
                    if item.id == pending_id:
                        target = item
                        break
        if target is None:
            if pending_id in self._resolved_ids:
                raise AlreadyResolved(pending_id)
            raise KeyError(pending_id)

        state = self.origin_state(target.origin)
        with self._locks[target.origin]:
            if target not in state.pending:
                raise AlreadyResolved(pending_id)
            known = [entry for entry in state.known_policies.values()
                     if entry[1] == target.request_digest]
            if not known:
                raise ProxyStateError(
                    f"pending item {pending_id} lost its request")
            request = known[0][2]
            old = state.decisions[target.request_digest]
            decision = resolve_pending(
                old, choices, request, self.profile.owner,
                self._clock(), self._uid(), self.amap)
            state.decisions[target.request_digest] = decision
            state.decision_sources[target.request_digest] = "user"
            state.pending.remove(target)
            self._resolved_ids.add(target.id)
            self._record(state, target.cookie_names, target.request_digest,
                         decision, "user")
        self._emit("resolved", {"id": target.id, "origin": target.origin,
                                "outcome": decision.outcome})
        return decision

    # -- preference updates -------------------------------------------------

    def update_profile(self, profile: PreferenceProfile) -> None:
        """Swap the preference profile and drop every auto-derived
        decision so the next sighting re-evaluates. Decisions a human
        made (or negotiated) stay."""
        with self._global:
            self.profile = profile
            origins = list(self._origins.values())
        for state in origins:
            with self._locks[state.origin]:
                stale = [d for d, src in state.decision_sources.items()
                         if src == "auto"]
                for digest in stale:
                    state.decisions.pop(digest, None)
                    state.decision_sources.pop(digest, None)
                    self._drop_stale_pending(state, digest)

    # -- negotiation ---------------------------------------------------------

    def try_negotiate(self, origin: str, cookie_name: str,
                      transport=None) -> NegotiationResult:
        """Explicit user action: counter-offer a denied policy whose
        source allows negotiation. An accepted agreement replaces the
        denial and is logged with source=negotiated."""
        if not self.config.negotiation_enabled:
            raise ProxyStateError("negotiation is disabled by configuration")
        state = self.origin_state(origin)
        with self._locks[origin]:
            known = state.policy_for_cookie(cookie_name)
            if known is None:
                raise KeyError(cookie_name)
            source, digest, request = known
            if source.disposition != "negotiate":
                raise ProxyStateError(
                    f"policy for {cookie_name!r} is not negotiable")
            decision = state.decisions.get(digest)
            if decision is None or decision.outcome != DENIED:
                raise ProxyStateError(
                    "negotiation applies only to denied policies")
            desired = self._counter_offer(request)
            kwargs = {"transport": transport} if transport is not None else {}
            result = negotiate(source.href, desired,
                               timeout=self.config.upstream_timeout, **kwargs)
            if result.kind == "accepted":
                agreement = parse_odrl_agreement(result.agreement)
                negotiated = Decision(
                    request_digest=digest,
                    outcome=GRANTED,
                    granted_permissions=agreement.permissions,
                    granted_indexes=tuple(range(len(agreement.permissions))),
                    agreement=agreement,
                )
                state.decisions[digest] = negotiated
                state.decision_sources[digest] = "negotiated"
                self._record(state, (cookie_name,) if cookie_name else (),
                             digest, negotiated, "negotiated")
            return result

    def _counter_offer(self, request: OdrlRequest):
        """The agreement we would sign: the request narrowed to whatever
        the profile permits outright."""
        trial = evaluate(self.profile, request, self.taxonomy, self.ladder,
                         self.amap)
        base = Decision(
            request_digest=trial.request_digest,
            outcome=PARTIAL if trial.granted_permissions else trial.outcome,
            granted_permissions=trial.granted_permissions,
            granted_indexes=trial.granted_indexes,
        )
        if not base.granted_permissions:
            # nothing acceptable: offer the empty agreement
            return RdfGraph.of([])
        _, graph = build_agreement(base, request, self.profile.owner,
                                   self._clock(), self._uid())
        return graph


class AlreadyResolved(DataPolicyError):
    def __init__(self, pending_id: str):
        super().__init__(f"pending item {pending_id} was already resolved")
        self.pending_id = pending_id


def pending_json(item: PendingItem) -> dict:
    return {
        "id": item.id,
        "origin": item.origin,
        "requestDigest": item.request_digest,
        "createdAt": item.created_at,
        "cookieNames": list(item.cookie_names),
        "questions": [
            {"permissionIndex": q.permission_index,
             "purpose": q.purpose,
             "reason": q.reason,
             "requestedActions": list(q.requested_actions),
             "requestedRetention": q.requested_retention}
            for q in item.questions
        ],
    }
