"""Bit-exact codecs for the Data-Policy-Request / Data-Policy headers,
plus a small negotiation client.

Header grammar: a disposition token, then `; `-separated key=value
parameters. Byte payloads travel as base64url without padding between
colons (`policy=:eA:`); IRIs and cookie names are double-quoted. The
decoder is liberal about whitespace after semicolons and ignores unknown
parameters; an unknown disposition is a recoverable result rather than
an error, so future dispositions pass through quietly.

Agreement payloads are tamper-evident: the decoder re-encodes the bytes
and compares with the transmitted base64 (catching flipped padding bits
that decode to identical bytes) and then checks the sha-256 parameter.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import json
import re
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Callable

from .errors import DataPolicyError
from .rdf import RdfGraph, is_absolute_iri, parse_turtle, serialize_canonical

DISPOSITIONS = ("inline", "link", "negotiate")

REQUEST_HEADER = "Data-Policy-Request"
AGREEMENT_HEADER = "Data-Policy"


class WireError(DataPolicyError):
    pass


class HeaderSyntaxError(WireError):
    pass


class DigestMismatchError(WireError):
    pass


@dataclass(frozen=True)
class PolicySource:
    disposition: str
    policy_bytes: bytes | None = None  # inline
    href: str | None = None  # link / negotiate
    cookie_name: str | None = None


@dataclass(frozen=True)
class UnrecognizedSource:
    """A disposition this implementation does not know. Carried through
    so callers can apply their unannotated-cookie policy to it."""

    disposition: str
    raw: str


@dataclass(frozen=True)
class AgreementEnvelope:
    agreement_bytes: bytes
    digest: str

    @classmethod
    def of_bytes(cls, agreement_bytes: bytes) -> "AgreementEnvelope":
        return cls(agreement_bytes, hashlib.sha256(agreement_bytes).hexdigest())


@dataclass(frozen=True)
class NegotiationOffer:
    offer_id: str
    description: str
    policy: str | None = None  # Turtle text
    price_tag: str | None = None


@dataclass(frozen=True)
class NegotiationResult:
    kind: str  # accepted | offers | refused
    agreement: RdfGraph | None = None
    offers: tuple[NegotiationOffer, ...] = ()


# -- primitives ---------------------------------------------------------------


def _b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _unb64url(text: str) -> bytes:
    if not re.fullmatch(r"[A-Za-z0-9_-]*", text):
        raise HeaderSyntaxError(f"malformed base64url payload: {text!r}")
    pad = -len(text) % 4
    if pad == 3:
        raise HeaderSyntaxError(f"malformed base64url payload: {text!r}")
    try:
        data = base64.urlsafe_b64decode(text + "=" * pad)
    except (binascii.Error, ValueError) as exc:
        raise HeaderSyntaxError(f"malformed base64url payload: {text!r}") from exc
    # canonical-form check: reject encodings with nonzero padding bits
    if _b64url(data) != text:
        raise HeaderSyntaxError("non-canonical base64url payload")
    return data


_FIELD_SAFE = re.compile(r"^[\x21-\x7e]+$")  # printable ASCII, no spaces


def _check_quotable(value: str, what: str) -> str:
    if not _FIELD_SAFE.fullmatch(value) or '"' in value:
        raise WireError(f"{what} contains characters unsafe for a header "
                        f"field: {value!r}")
    return value


def _split_params(value: str) -> list[str]:
    """Split on semicolons outside double quotes."""
    parts = []
    buf = []
    quoted = False
    for ch in value:
        if ch == '"':
            quoted = not quoted
            buf.append(ch)
        elif ch == ";" and not quoted:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    return parts


def _parse_params(segments: list[str]) -> dict[str, str]:
    params: dict[str, str] = {}
    for segment in segments:
        segment = segment.strip(" \t")
        if not segment:
            continue
        name, eq, value = segment.partition("=")
        if not eq:
            continue  # bare token, not a parameter we know how to read
        # names are case-sensitive lowercase, as in structured fields
        name = name.strip(" \t")
        if name not in params:  # first occurrence wins
            params[name] = value
    return params


def _unquote(value: str, what: str) -> str:
    if len(value) < 2 or not (value.startswith('"') and value.endswith('"')):
        raise HeaderSyntaxError(f"{what} must be double-quoted: {value!r}")
    return value[1:-1]


def _unwrap_bytes(value: str, what: str) -> bytes:
    if len(value) < 2 or not (value.startswith(":") and value.endswith(":")):
        raise HeaderSyntaxError(f"{what} must be wrapped in colons: {value!r}")
    return _unb64url(value[1:-1])


# -- Data-Policy-Request ------------------------------------------------------


def encode_request_header(s: PolicySource) -> str:
    if s.disposition not in DISPOSITIONS:
        raise WireError(f"unknown disposition: {s.disposition!r}")
    parts = [s.disposition]
    if s.disposition == "inline":
        if s.policy_bytes is None or s.href is not None:
            raise WireError("inline source carries policy bytes and no href")
        parts.append(f"policy=:{_b64url(s.policy_bytes)}:")
    else:
        if s.href is None or s.policy_bytes is not None:
            raise WireError(
                f"{s.disposition} source carries an href and no policy bytes")
        if not is_absolute_iri(s.href):
            raise WireError(f"href must be an absolute IRI: {s.href!r}")
        _check_quotable(s.href, "href")
        parts.append(f'href="{s.href}"')
    if s.cookie_name is not None:
        _check_quotable(s.cookie_name, "cookie name")
        parts.append(f'cookie="{s.cookie_name}"')
    return "; ".join(parts)


def decode_request_header(value: str) -> PolicySource | UnrecognizedSource:
    segments = _split_params(value)
    disposition = segments[0].strip(" \t").lower()
    if disposition not in DISPOSITIONS:
        if not disposition:
            raise HeaderSyntaxError("empty disposition")
        return UnrecognizedSource(disposition=disposition, raw=value)
    params = _parse_params(segments[1:])

    cookie_name = None
    if "cookie" in params:
        cookie_name = _unquote(params["cookie"].strip(" \t"), "cookie")

    if disposition == "inline":
        if "policy" not in params:
            raise HeaderSyntaxError("inline source without policy parameter")
        policy = _unwrap_bytes(params["policy"].strip(" \t"), "policy")
        return PolicySource("inline", policy_bytes=policy,
                            cookie_name=cookie_name)

    if "href" not in params:
        raise HeaderSyntaxError(f"{disposition} source without href parameter")
    href = _unquote(params["href"].strip(" \t"), "href")
    if not is_absolute_iri(href):
        raise HeaderSyntaxError(f"href must be an absolute IRI: {href!r}")
    return PolicySource(disposition, href=href, cookie_name=cookie_name)


# -- Data-Policy --------------------------------------------------------------

_HEX64 = re.compile(r"^[0-9a-f]{64}$")


def encode_agreement_header(e: AgreementEnvelope) -> str:
    if not _HEX64.fullmatch(e.digest):
        raise WireError("digest must be 64 lowercase hex characters")
    actual = hashlib.sha256(e.agreement_bytes).hexdigest()
    if actual != e.digest:
        raise DigestMismatchError(
            f"digest {e.digest} does not match agreement bytes ({actual})")
    return f"agreement=:{_b64url(e.agreement_bytes)}:; sha-256={e.digest}"


# Unlike the request header, the agreement header is parsed against the
# exact encoder grammar: no whitespace slack, no extra parameters. It is
# proof-of-consent material, so any single tampered byte must surface,
# and lenient parsing would let decode-equivalent variants through.
_AGREEMENT_GRAMMAR = re.compile(
    r"^agreement=:([A-Za-z0-9_-]*):; sha-256=([0-9a-f]{64})$")


def decode_agreement_header(value: str) -> AgreementEnvelope:
    match = _AGREEMENT_GRAMMAR.match(value)
    if match is None:
        raise HeaderSyntaxError(
            "agreement header does not match "
            "'agreement=:<base64url>:; sha-256=<hex64>'")
    payload = _unb64url(match.group(1))
    digest = match.group(2)
    actual = hashlib.sha256(payload).hexdigest()
    if actual != digest:
        raise DigestMismatchError(
            f"agreement bytes digest {actual} does not match declared {digest}")
    return AgreementEnvelope(payload, digest)


# -- negotiation --------------------------------------------------------------

# transport(url, method, headers, body, timeout) -> (status, body bytes)
Transport = Callable[[str, str, dict, bytes, float], tuple[int, bytes]]


def urllib_transport(url: str, method: str, headers: dict, body: bytes,
                     timeout: float) -> tuple[int, bytes]:
    req = urllib.request.Request(url, data=body, headers=headers, method=method)
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()
    except urllib.error.URLError as exc:
        raise WireError(f"negotiation transport failure: {exc.reason}") from exc


def _parse_offers(body: bytes) -> tuple[NegotiationOffer, ...]:
    try:
        raw = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WireError(f"offer body is not JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise WireError("offer body must be a JSON array")
    offers = []
    seen = set()
    for item in raw:
        if not isinstance(item, dict) or not isinstance(item.get("offerId"), str) \
                or not isinstance(item.get("description"), str):
            raise WireError(f"malformed offer entry: {item!r}")
        if item["offerId"] in seen:
            raise WireError(f"duplicate offerId: {item['offerId']}")
        seen.add(item["offerId"])
        offers.append(NegotiationOffer(
            offer_id=item["offerId"],
            description=item["description"],
            policy=item.get("policy"),
            price_tag=item.get("priceTag"),
        ))
    return tuple(offers)


def negotiate(endpoint: str, desired: RdfGraph,
              transport: Transport = urllib_transport,
              timeout: float = 10.0) -> NegotiationResult:
    """POST the desired agreement; the server answers with acceptance
    (200, N-Triples), counter-offers (409, JSON array), or refusal (403)."""
    body = serialize_canonical(desired).encode("utf-8")
    status, payload = transport(
        endpoint, "POST", {"Content-Type": "application/n-triples"},
        body, timeout)
    if status == 200:
        return NegotiationResult("accepted", agreement=parse_turtle(
            payload.decode("utf-8")))
    if status == 409:
        return NegotiationResult("offers", offers=_parse_offers(payload))
    if status == 403:
        return NegotiationResult("refused")
    raise WireError(f"negotiation endpoint answered {status}")


def accept_offer(endpoint: str, offer_id: str,
                 transport: Transport = urllib_transport,
                 timeout: float = 10.0) -> RdfGraph:
    """Accept one offer by id at <endpoint>/accept; returns the agreed
    policy graph."""
    body = json.dumps({"offerId": offer_id}).encode("utf-8")
    status, payload = transport(
        endpoint.rstrip("/") + "/accept", "POST",
        {"Content-Type": "application/json"}, body, timeout)
    if status != 200:
        raise WireError(f"offer acceptance answered {status}")
    return parse_turtle(payload.decode("utf-8"))
