"""Preference profiles: graph and JSON forms, validation."""

import pytest

from datapolicy.model import (
    PreferenceError,
    PreferenceProfile,
    PreferenceRule,
    default_taxonomy,
    parse_preferences,
    profile_from_json,
    profile_to_graph,
    profile_to_json,
)
from datapolicy.namespaces import DPV
from datapolicy.rdf import parse_turtle

ALICE = "https://alice.example/profile#me"

PREFIXES = """
@prefix dpp: <https://example.org/dpp#> .
@prefix dpv: <https://w3id.org/dpv#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
"""


@pytest.fixture(scope="module")
def tax():
    return default_taxonomy()


def parse(text, tax):
    return parse_preferences(parse_turtle(PREFIXES + text, base="https://t/"), tax)


class TestParsing:
    def test_full_profile(self, tax):
        p = parse("""
            [] a dpp:Profile ;
                dpp:owner <%s> ;
                dpp:default "ask" ;
                dpp:rule [
                    dpp:purpose dpv:Marketing ;
                    dpp:action dpv:Store, dpv:Download ;
                    dpp:maxRetention "P30D"^^xsd:duration ;
                    dpp:decision "allow" ] ;
                dpp:rule [
                    dpp:purpose dpv:Analytics ;
                    dpp:decision "deny" ] .
        """ % ALICE, tax)
        assert p.owner == ALICE
        assert p.default_decision == "ask"
        assert len(p.rules) == 2
        by_purpose = {r.purpose: r for r in p.rules}
        marketing = by_purpose[DPV + "Marketing"]
        assert marketing.actions == frozenset({DPV + "Store", DPV + "Download"})
        assert marketing.max_retention == 30 * 86400
        assert marketing.decision == "allow"
        analytics = by_purpose[DPV + "Analytics"]
        assert analytics.actions is None
        assert analytics.max_retention is None
        assert analytics.decision == "deny"

    def test_zero_rules_is_fine(self, tax):
        p = parse(f'[] a dpp:Profile ; dpp:owner <{ALICE}> ; dpp:default "deny" .',
                  tax)
        assert p.rules == ()

    def test_missing_owner(self, tax):
        with pytest.raises(PreferenceError, match="owner"):
            parse('[] a dpp:Profile ; dpp:default "ask" .', tax)

    def test_missing_default(self, tax):
        with pytest.raises(PreferenceError, match="default"):
            parse(f"[] a dpp:Profile ; dpp:owner <{ALICE}> .", tax)

    def test_unknown_decision_keyword_is_named(self, tax):
        with pytest.raises(PreferenceError, match="'maybe'"):
            parse(f'[] a dpp:Profile ; dpp:owner <{ALICE}> ; dpp:default "maybe" .',
                  tax)

    def test_purpose_outside_taxonomy_rejected(self, tax):
        with pytest.raises(PreferenceError, match="urn:x:Nonsense"):
            parse(f"""
                [] a dpp:Profile ; dpp:owner <{ALICE}> ; dpp:default "ask" ;
                    dpp:rule [ dpp:purpose <urn:x:Nonsense> ;
                               dpp:decision "allow" ] .
            """, tax)

    def test_duplicate_purpose_action_pair_rejected(self, tax):
        with pytest.raises(PreferenceError, match="duplicate"):
            parse(f"""
                [] a dpp:Profile ; dpp:owner <{ALICE}> ; dpp:default "ask" ;
                    dpp:rule [ dpp:purpose dpv:Marketing ; dpp:decision "allow" ] ;
                    dpp:rule [ dpp:purpose dpv:Marketing ; dpp:decision "deny" ] .
            """, tax)

    def test_same_purpose_different_actions_allowed(self, tax):
        p = parse(f"""
            [] a dpp:Profile ; dpp:owner <{ALICE}> ; dpp:default "ask" ;
                dpp:rule [ dpp:purpose dpv:Marketing ;
                           dpp:action dpv:Store ; dpp:decision "allow" ] ;
                dpp:rule [ dpp:purpose dpv:Marketing ; dpp:decision "deny" ] .
        """, tax)
        assert len(p.rules) == 2

    def test_no_profile_node(self, tax):
        with pytest.raises(PreferenceError, match="no dpp:Profile"):
            parse("<urn:a> dpp:owner <urn:b> .", tax)


class TestRoundTrips:
    def make(self):
        return PreferenceProfile(
            owner=ALICE,
            rules=(
                PreferenceRule(DPV + "Marketing",
                               frozenset({DPV + "Store"}), 31536000, "allow"),
                PreferenceRule(DPV + "Analytics", None, None, "deny"),
                PreferenceRule(DPV + "Security", None, 86400, "ask"),
            ),
            default_decision="ask",
        )

    def test_graph_round_trip(self, tax):
        p = self.make()
        assert parse_preferences(profile_to_graph(p), tax) == p

    def test_json_round_trip(self, tax):
        p = self.make()
        data = profile_to_json(p)
        assert data["rules"][0]["maxRetentionSeconds"] == 31536000
        assert data["rules"][1]["actions"] is None
        assert profile_from_json(data, tax) == p


class TestJsonValidation:
    def base(self):
        return {"owner": ALICE, "defaultDecision": "ask", "rules": []}

    def test_not_an_object(self, tax):
        with pytest.raises(PreferenceError, match="object"):
            profile_from_json([], tax)

    def test_owner_must_be_absolute_iri(self, tax):
        data = self.base()
        data["owner"] = "alice"
        with pytest.raises(PreferenceError, match="absolute IRI"):
            profile_from_json(data, tax)

    def test_rule_requires_purpose(self, tax):
        data = self.base()
        data["rules"] = [{"decision": "allow"}]
        with pytest.raises(PreferenceError, match="purpose"):
            profile_from_json(data, tax)

    def test_empty_actions_list_rejected(self, tax):
        data = self.base()
        data["rules"] = [{"purpose": DPV + "Marketing", "actions": [],
                          "decision": "allow"}]
        with pytest.raises(PreferenceError, match="actions"):
            profile_from_json(data, tax)

    def test_bool_retention_rejected(self, tax):
        data = self.base()
        data["rules"] = [{"purpose": DPV + "Marketing",
                          "maxRetentionSeconds": True, "decision": "allow"}]
        with pytest.raises(PreferenceError, match="maxRetentionSeconds"):
            profile_from_json(data, tax)

    def test_negative_retention_rejected(self, tax):
        data = self.base()
        data["rules"] = [{"purpose": DPV + "Marketing",
                          "maxRetentionSeconds": -5, "decision": "allow"}]
        with pytest.raises(PreferenceError, match="maxRetentionSeconds"):
            profile_from_json(data, tax)
