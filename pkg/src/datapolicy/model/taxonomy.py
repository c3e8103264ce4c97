"""Purpose taxonomy: subclass closure, subsumption, rule specificity.

The taxonomy is a DAG of purpose IRIs. Both rdfs:subClassOf and
skos:broader edges are read as "direct superclass"; labels, definitions
and notes come from the usual SKOS annotation properties. The subclass
closure is reflexive and transitive, so matching a preference written
against `marketing` to a request for a marketing subclass is a single
set-membership test.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Mapping

from ..errors import DataPolicyError
from ..namespaces import DPV, RDFS, SKOS
from ..rdf import RdfGraph, parse_turtle

SUBCLASS_PREDICATES = (RDFS + "subClassOf", SKOS + "broader")

LABEL = SKOS + "prefLabel"
DEFINITION = SKOS + "definition"
NOTE = SKOS + "scopeNote"


class TaxonomyError(DataPolicyError):
    pass


@dataclass(frozen=True)
class PurposeTaxonomy:
    nodes: frozenset[str]
    direct_super: Mapping[str, frozenset[str]]
    labels: Mapping[str, str] = field(default_factory=dict)
    definitions: Mapping[str, str] = field(default_factory=dict)
    notes: Mapping[str, str] = field(default_factory=dict)

    def closure(self, purpose: str) -> frozenset[str]:
        """Reflexive-transitive superclass closure; unknown IRIs close
        over themselves only."""
        seen = {purpose}
        queue = deque([purpose])
        while queue:
            current = queue.popleft()
            for sup in self.direct_super.get(current, ()):
                if sup not in seen:
                    seen.add(sup)
                    queue.append(sup)
        return frozenset(seen)

    def is_subpurpose(self, sub: str, super_: str) -> bool:
        return super_ in self.closure(sub)

    def distance(self, sub: str, super_: str) -> int | None:
        """Minimal number of superclass edges from sub up to super_;
        None when unreachable."""
        if sub == super_:
            return 0
        depth = {sub: 0}
        queue = deque([sub])
        while queue:
            current = queue.popleft()
            for sup in self.direct_super.get(current, ()):
                if sup not in depth:
                    depth[sup] = depth[current] + 1
                    if sup == super_:
                        return depth[sup]
                    queue.append(sup)
        return None

    def children(self, purpose: str) -> list[str]:
        return sorted(n for n in self.nodes
                      if purpose in self.direct_super.get(n, ()))

    def roots(self) -> list[str]:
        return sorted(n for n in self.nodes if not self.direct_super.get(n))

    def label(self, purpose: str) -> str | None:
        return self.labels.get(purpose)


EMPTY_TAXONOMY = PurposeTaxonomy(frozenset(), {})


def _find_cycle(direct_super: Mapping[str, frozenset[str]]) -> list[str] | None:
    WHITE, GREY, BLACK = 0, 1, 2
    state = {n: WHITE for n in direct_super}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        state[node] = GREY
        stack.append(node)
        for sup in sorted(direct_super.get(node, ())):
            if state.get(sup, WHITE) == GREY:
                return stack[stack.index(sup):] + [sup]
            if state.get(sup, WHITE) == WHITE:
                found = visit(sup)
                if found:
                    return found
        stack.pop()
        state[node] = BLACK
        return None

    for node in sorted(direct_super):
        if state[node] == WHITE:
            found = visit(node)
            if found:
                return found
    return None


def load_taxonomy(g: RdfGraph) -> PurposeTaxonomy:
    """Build a taxonomy from subclass edges and SKOS annotations.

    Raises TaxonomyError naming one cycle if the edge set is cyclic.
    """
    direct: dict[str, set[str]] = {}
    nodes: set[str] = set()
    labels: dict[str, str] = {}
    definitions: dict[str, str] = {}
    notes: dict[str, str] = {}

    for t in g.triples:
        p = t.predicate.value
        if p in SUBCLASS_PREDICATES and t.subject.is_iri and t.object.is_iri:
            direct.setdefault(t.subject.value, set()).add(t.object.value)
            nodes.add(t.subject.value)
            nodes.add(t.object.value)
        elif t.subject.is_iri and t.object.is_literal:
            if p == LABEL:
                labels[t.subject.value] = t.object.value
            elif p == DEFINITION:
                definitions[t.subject.value] = t.object.value
            elif p == NOTE:
                notes[t.subject.value] = t.object.value
    nodes.update(labels)
    nodes.update(definitions)
    nodes.update(notes)

    cycle = _find_cycle({k: frozenset(v) for k, v in direct.items()})
    if cycle:
        pretty = " -> ".join(cycle)
        raise TaxonomyError(f"subclass graph has a cycle: {pretty}")

    return PurposeTaxonomy(
        nodes=frozenset(nodes),
        direct_super={k: frozenset(v) for k, v in direct.items()},
        labels=labels,
        definitions=definitions,
        notes=notes,
    )


@lru_cache(maxsize=1)
def default_taxonomy() -> PurposeTaxonomy:
    """The vendored data-privacy purpose hierarchy."""
    text = resources.files("datapolicy").joinpath(
        "data/dpv-purposes.ttl").read_text("utf-8")
    return load_taxonomy(parse_turtle(text, base=DPV))


def is_subpurpose(taxonomy: PurposeTaxonomy, sub: str, super_: str) -> bool:
    return taxonomy.is_subpurpose(sub, super_)


def closure(taxonomy: PurposeTaxonomy, purpose: str) -> frozenset[str]:
    return taxonomy.closure(purpose)
