"""In-memory consent state the proxy accumulates per origin."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..engine import Decision, PendingQuestion
from ..errors import DataPolicyError
from ..model import OdrlRequest
from ..wire import PolicySource

# knownPolicies key meaning "every cookie from this origin". The empty
# string can never collide with a real cookie name.
ALL_COOKIES = ""


class ProxyStateError(DataPolicyError):
    pass


@dataclass(frozen=True)
class PendingItem:
    id: str
    origin: str
    request_digest: str
    questions: tuple[PendingQuestion, ...]
    created_at: str
    cookie_names: tuple[str, ...] = ()


@dataclass
class OriginState:
    origin: str
    # cookie name (or ALL_COOKIES) -> (source, request digest, parsed request)
    known_policies: dict[str, tuple[PolicySource, str, OdrlRequest]] = field(
        default_factory=dict)
    decisions: dict[str, Decision] = field(default_factory=dict)
    # how each decision came about: auto | user | negotiated
    decision_sources: dict[str, str] = field(default_factory=dict)
    pending: list[PendingItem] = field(default_factory=list)

    def policy_for_cookie(self, name: str):
        """Exact binding wins over the origin-wide one."""
        if name in self.known_policies:
            return self.known_policies[name]
        return self.known_policies.get(ALL_COOKIES)


@dataclass(frozen=True)
class ProxyConfig:
    listen_address: str = "127.0.0.1:8080"
    control_address: str = "127.0.0.1:8081"
    preferences_path: str = "prefs.ttl"
    taxonomy_path: str | None = None  # None -> bundled DPV subset
    log_path: str = "consent.jsonl"
    default_decision: str = "ask"  # profile fallback when no prefs file
    negotiation_enabled: bool = False
    pass_unannotated: bool = True
    upstream_timeout: float = 10.0
    link_cache_ttl: float = 86400.0

    def __post_init__(self):
        if self.listen_address == self.control_address:
            raise ProxyStateError(
                "proxy and control listeners need distinct addresses")
        if self.default_decision not in ("allow", "deny", "ask"):
            raise ProxyStateError(
                f"unknown default decision: {self.default_decision!r}")
