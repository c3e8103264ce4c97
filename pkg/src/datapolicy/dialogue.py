"""Checkbox planning for consent dialogues with embedded policy requests.

Cookie dialogues that embed their terms-of-use requests as RDFa can name
each selection box after the request it covers. The id scheme is a hash
prefix of the request node IRI, so a dialogue author and an automated
agent derive the same id independently. plan_selections pairs the ids
found in a page with the requests extracted from it and decides, from the
user's preference profile, which boxes to tick.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser

from .engine import evaluate
from .errors import DataPolicyError
from .model import (
    DurationLadder,
    PreferenceProfile,
    PurposeTaxonomy,
    parse_odrl_request,
)
from .model.odrl import REQUEST_TYPE
from .rdf import extract_rdfa, is_absolute_iri

ID_PREFIX = "data-policy-opt--"
_ID_PATTERN = re.compile(r"^data-policy-opt--[0-9a-f]{16}$")

# checked states; pending and denied both leave the box unticked
_CHECKED_OUTCOMES = frozenset({"granted", "partial"})


class DialogueError(DataPolicyError):
    pass


def checkbox_id_for(request_node: str) -> str:
    """Element id for the selection box covering ``request_node``.

    First 16 hex chars of SHA-256 over the IRI's UTF-8 bytes, behind a
    fixed prefix. HTML ids cannot carry arbitrary IRI characters, and 64
    bits of digest is plenty at dialogue scale.
    """
    if not is_absolute_iri(request_node):
        raise DialogueError(f"checkbox ids key on absolute IRIs, got {request_node!r}")
    digest = hashlib.sha256(request_node.encode("utf-8")).hexdigest()
    return ID_PREFIX + digest[:16]


@dataclass(frozen=True)
class SelectionEntry:
    element_id: str
    checked: bool
    request_digest: str
    outcome: str


@dataclass(frozen=True)
class SelectionPlan:
    entries: tuple[SelectionEntry, ...] = ()
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        ids = [e.element_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise DialogueError("duplicate element id in selection plan")

    def to_json(self) -> dict:
        return {
            "entries": [
                {
                    "elementId": e.element_id,
                    "checked": e.checked,
                    "requestDigest": e.request_digest,
                    "outcome": e.outcome,
                }
                for e in self.entries
            ],
            "warnings": list(self.warnings),
        }


class _IdCollector(HTMLParser):
    """Collects every element id that follows the naming scheme."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.ids: list[str] = []

    def handle_starttag(self, tag, attrs):
        for name, value in attrs:
            if name == "id" and value and _ID_PATTERN.match(value):
                if value not in self.ids:
                    self.ids.append(value)


def scheme_ids(html: str) -> list[str]:
    """All scheme-shaped element ids in the document, in document order."""
    collector = _IdCollector()
    collector.feed(html)
    return collector.ids


def plan_selections(
    html: str,
    profile: PreferenceProfile,
    taxonomy: PurposeTaxonomy,
    *,
    base: str = "https://dialogue.invalid/",
    ladder: DurationLadder | None = None,
    amap: dict[str, str] | None = None,
) -> SelectionPlan:
    """Decide the selection boxes of a consent dialogue.

    Requests are extracted from the page's RDFa, evaluated against the
    profile, and matched to checkboxes by the id scheme. A box is ticked
    when the evaluation grants at least part of the request; denied and
    pending requests stay unticked (pending still records its outcome so
    a caller can surface the open question).

    Orphans on either side (an id with no extracted request, a request
    with no matching id) do not produce entries; they are reported as
    warnings, since acting on half a pair silently would misstate consent.
    """
    graph = extract_rdfa(html, base)
    found_ids = scheme_ids(html)

    entries: list[SelectionEntry] = []
    warnings: list[str] = []
    matched: set[str] = set()

    for subject in graph.subjects_of_type(REQUEST_TYPE):
        if not subject.is_iri:
            warnings.append(
                f"request without an IRI node (blank _:{subject.value}) cannot be "
                "matched to a checkbox")
            continue
        element_id = checkbox_id_for(subject.value)
        try:
            request = parse_odrl_request(graph, node=subject.value)
        except DataPolicyError as exc:
            warnings.append(f"request <{subject.value}> could not be read: {exc}")
            continue
        if element_id not in found_ids:
            warnings.append(
                f"request <{subject.value}> has no checkbox (expected id {element_id})")
            continue
        matched.add(element_id)
        decision = evaluate(profile, request, taxonomy, ladder, amap)
        entries.append(SelectionEntry(
            element_id=element_id,
            checked=decision.outcome in _CHECKED_OUTCOMES,
            request_digest=decision.request_digest,
            outcome=decision.outcome,
        ))

    for element_id in found_ids:
        if element_id not in matched:
            warnings.append(f"checkbox {element_id} matches no request on the page")

    entries.sort(key=lambda e: e.element_id)
    return SelectionPlan(tuple(entries), tuple(warnings))
