"""Consent proxy: traffic hooks, state, proof-of-consent log, servers."""

from .control import make_control_server, serve_control
from .core import AlreadyResolved, Fetcher, ProxyCore, pending_json
from .log import (
    GENESIS_HASH,
    ChainReport,
    ConsentLog,
    ConsentLogError,
    ConsentRecord,
    line_hash,
    verify_chain,
)
from .server import make_proxy_server, serve_proxy
from .state import (
    ALL_COOKIES,
    OriginState,
    PendingItem,
    ProxyConfig,
    ProxyStateError,
)
from .tls import ProxyCA

__all__ = [
    "ALL_COOKIES",
    "AlreadyResolved",
    "ChainReport",
    "ConsentLog",
    "ConsentLogError",
    "ConsentRecord",
    "Fetcher",
    "GENESIS_HASH",
    "OriginState",
    "PendingItem",
    "ProxyCA",
    "ProxyConfig",
    "ProxyCore",
    "ProxyStateError",
    "line_hash",
    "make_control_server",
    "make_proxy_server",
    "pending_json",
    "serve_control",
    "serve_proxy",
    "verify_chain",
]
