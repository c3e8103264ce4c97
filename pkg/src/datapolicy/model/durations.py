"""xsd:duration arithmetic and the retention tag ladder.

Durations compare as total seconds under fixed conventions (Y = 365 days,
M = 30 days); xsd:duration itself is only partially ordered, so the
conventions make retention checks total. The ladder maps second counts to
named duration tags (one-day up to unbounded) with longer tags as
superclasses of shorter ones, which is what lets a DToU `provide` tag be
checked against a profile ceiling with one span comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..errors import DataPolicyError
from ..namespaces import DPP, DUR, SKOS
from ..rdf import RdfGraph, parse_turtle

SECONDS_PER_DAY = 86400
SECONDS_PER_YEAR = 365 * SECONDS_PER_DAY
SECONDS_PER_MONTH = 30 * SECONDS_PER_DAY

_DURATION_RE = re.compile(
    r"^(?P<sign>-)?P"
    r"(?:(?P<years>\d+)Y)?"
    r"(?:(?P<months>\d+)M)?"
    r"(?:(?P<days>\d+)D)?"
    r"(?:T"
    r"(?:(?P<hours>\d+)H)?"
    r"(?:(?P<minutes>\d+)M)?"
    r"(?:(?P<seconds>\d+(?:\.\d+)?)S)?"
    r")?$"
)


class DurationError(DataPolicyError):
    pass


def duration_to_seconds(lexical: str) -> int:
    """Total seconds of an xsd:duration lexical form (Y=365d, M=30d).

    Rejects malformed forms and negative durations; fractional seconds
    are floored.
    """
    m = _DURATION_RE.match(lexical.strip())
    if not m:
        raise DurationError(f"malformed xsd:duration: {lexical!r}")
    fields = m.groupdict()
    if fields["sign"]:
        raise DurationError(f"negative duration not allowed: {lexical!r}")
    parts = {k: v for k, v in fields.items() if v is not None and k != "sign"}
    if not parts:
        raise DurationError(f"malformed xsd:duration: {lexical!r}")
    if "T" in lexical and lexical.rstrip().endswith("T"):
        raise DurationError(f"malformed xsd:duration: {lexical!r}")

    total = 0.0
    total += int(parts.get("years", 0)) * SECONDS_PER_YEAR
    total += int(parts.get("months", 0)) * SECONDS_PER_MONTH
    total += int(parts.get("days", 0)) * SECONDS_PER_DAY
    total += int(parts.get("hours", 0)) * 3600
    total += int(parts.get("minutes", 0)) * 60
    total += float(parts.get("seconds", 0))
    return int(total)


def seconds_to_duration(seconds: int) -> str:
    """Days-first lexical form: whole days as P<n>D, remainder as time
    components. 31536000 renders as "P365D", zero as "PT0S"."""
    if seconds < 0:
        raise DurationError("negative seconds")
    days, rest = divmod(seconds, SECONDS_PER_DAY)
    if rest == 0 and days > 0:
        return f"P{days}D"
    hours, rest = divmod(rest, 3600)
    minutes, secs = divmod(rest, 60)
    time_part = ""
    if hours:
        time_part += f"{hours}H"
    if minutes:
        time_part += f"{minutes}M"
    if secs or not time_part:
        time_part += f"{secs}S"
    prefix = f"P{days}D" if days else "P"
    return f"{prefix}T{time_part}"


@dataclass(frozen=True)
class DurationLadder:
    """Ordered duration tags; span None means unbounded."""

    rungs: tuple[tuple[str, int | None], ...]
    aliases: dict[str, str]

    def canonical(self, tag: str) -> str:
        """Resolve alias spellings (e.g. the singular two-year) to the
        ladder spelling; unknown tags raise."""
        resolved = self.aliases.get(tag, tag)
        if resolved not in {iri for iri, _ in self.rungs}:
            raise DurationError(f"unknown duration tag: {tag}")
        return resolved

    def is_tag(self, tag: str) -> bool:
        return self.aliases.get(tag, tag) in {iri for iri, _ in self.rungs}

    def span(self, tag: str) -> int | None:
        resolved = self.canonical(tag)
        for iri, seconds in self.rungs:
            if iri == resolved:
                return seconds
        raise DurationError(f"unknown duration tag: {tag}")

    def tag_for(self, seconds: int) -> str:
        """Smallest rung whose span covers the given seconds."""
        for iri, span in self.rungs:
            if span is None or seconds <= span:
                return iri
        return self.rungs[-1][0]

    def covers(self, tag: str, ceiling: str) -> bool:
        """True iff tag is a subclass-or-equal of ceiling (span ≤ span,
        unbounded covering everything)."""
        ceiling_span = self.span(ceiling)
        if ceiling_span is None:
            return True
        tag_span = self.span(tag)
        return tag_span is not None and tag_span <= ceiling_span


def load_duration_ladder(g: RdfGraph) -> DurationLadder:
    spans: dict[str, int | None] = {}
    aliases: dict[str, str] = {}
    unbounded: list[str] = []

    for t in g.triples:
        if not t.subject.is_iri:
            continue
        if t.predicate.value == DPP + "seconds" and t.object.is_literal:
            spans[t.subject.value] = int(t.object.value)
        elif t.predicate.value == DPP + "unboundedSpan":
            unbounded.append(t.subject.value)
        elif t.predicate.value == SKOS + "exactMatch" and t.object.is_iri:
            aliases[t.subject.value] = t.object.value

    rungs = sorted(spans.items(), key=lambda kv: kv[1])
    rungs += [(iri, None) for iri in sorted(unbounded)]
    if not rungs:
        raise DurationError("duration ladder is empty")
    return DurationLadder(tuple(rungs), aliases)


@lru_cache(maxsize=1)
def default_duration_ladder() -> DurationLadder:
    text = resources.files("datapolicy").joinpath("data/duration-tags.ttl").read_text()
    return load_duration_ladder(parse_turtle(text))


def duration_tag_for(seconds: int, ladder: DurationLadder | None = None) -> str:
    return (ladder or default_duration_ladder()).tag_for(seconds)


# Canonical rung IRIs, for tests and the UI retention picker.
ONE_DAY = DUR + "one-day"
ONE_WEEK = DUR + "one-week"
ONE_MONTH = DUR + "one-month"
SIX_MONTHS = DUR + "six-months"
ONE_YEAR = DUR + "one-year"
TWO_YEARS = DUR + "two-years"
FIVE_YEARS = DUR + "five-years"
UNBOUNDED = DUR + "unbounded"
