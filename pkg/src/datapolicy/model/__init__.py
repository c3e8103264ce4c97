"""Policy vocabulary layer: purposes, durations, requests, app policies,
preference profiles, and the translations between them."""

from .durations import (
    FIVE_YEARS,
    ONE_DAY,
    ONE_MONTH,
    ONE_WEEK,
    ONE_YEAR,
    SIX_MONTHS,
    TWO_YEARS,
    UNBOUNDED,
    DurationError,
    DurationLadder,
    default_duration_ladder,
    duration_tag_for,
    duration_to_seconds,
    load_duration_ladder,
    seconds_to_duration,
)
from .dtou import (
    Downstream,
    DtouAppPolicy,
    DtouError,
    InputSpec,
    dtou_to_graph,
    parse_dtou_app_policy,
)
from .odrl import (
    Constraint,
    OdrlAgreement,
    OdrlError,
    OdrlRequest,
    Party,
    Permission,
    agreement_to_graph,
    parse_odrl_agreement,
    parse_odrl_request,
    request_digest,
    request_to_graph,
)
from .preferences import (
    ANY_ACTIONS,
    PreferenceError,
    PreferenceProfile,
    PreferenceRule,
    parse_preferences,
    profile_from_json,
    profile_to_graph,
    profile_to_json,
)
from .taxonomy import (
    EMPTY_TAXONOMY,
    PurposeTaxonomy,
    TaxonomyError,
    closure,
    default_taxonomy,
    is_subpurpose,
    load_taxonomy,
)
from .translate import (
    TranslationError,
    action_from_dpv,
    action_to_dpv,
    default_action_map,
    load_action_map,
    translate_dtou_to_odrl,
    translate_odrl_to_dtou,
)

__all__ = [
    "ANY_ACTIONS",
    "Constraint",
    "Downstream",
    "DtouAppPolicy",
    "DtouError",
    "DurationError",
    "DurationLadder",
    "EMPTY_TAXONOMY",
    "FIVE_YEARS",
    "InputSpec",
    "ONE_DAY",
    "ONE_MONTH",
    "ONE_WEEK",
    "ONE_YEAR",
    "OdrlAgreement",
    "OdrlError",
    "OdrlRequest",
    "Party",
    "Permission",
    "PreferenceError",
    "PreferenceProfile",
    "PreferenceRule",
    "PurposeTaxonomy",
    "SIX_MONTHS",
    "TWO_YEARS",
    "TaxonomyError",
    "TranslationError",
    "UNBOUNDED",
    "action_from_dpv",
    "action_to_dpv",
    "agreement_to_graph",
    "closure",
    "default_action_map",
    "default_duration_ladder",
    "default_taxonomy",
    "duration_tag_for",
    "duration_to_seconds",
    "dtou_to_graph",
    "is_subpurpose",
    "load_action_map",
    "load_duration_ladder",
    "load_taxonomy",
    "parse_dtou_app_policy",
    "parse_odrl_agreement",
    "parse_odrl_request",
    "parse_preferences",
    "profile_from_json",
    "profile_to_graph",
    "profile_to_json",
    "request_digest",
    "request_to_graph",
    "seconds_to_duration",
    "translate_dtou_to_odrl",
    "translate_odrl_to_dtou",
]
