"""HTTP+JSON control surface for the proxy.

Serves the preference profile, the pending-prompt queue, the consent
log, the purpose taxonomy, and a server-sent-events stream; optionally
serves a static UI bundle for every non-/api path. All decisions happen
in ProxyCore; this module only translates HTTP to method calls.
"""

from __future__ import annotations

import json
import mimetypes
import os
import queue
import re
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from ..engine import EngineError, UserChoice
from ..errors import DataPolicyError
from ..model import profile_from_json, profile_to_graph, profile_to_json
from ..rdf import serialize_canonical
from .core import AlreadyResolved, ProxyCore, pending_json
from .log import verify_chain

_RESOLVE_RE = re.compile(r"^/api/pending/([^/]+)/resolve$")


def _choices_from_json(raw) -> list[UserChoice]:
    if not isinstance(raw, dict) or not isinstance(raw.get("choices"), list):
        raise DataPolicyError("body must be an object with a choices array")
    choices = []
    for entry in raw["choices"]:
        if not isinstance(entry, dict):
            raise DataPolicyError(f"choice must be an object: {entry!r}")
        index = entry.get("permissionIndex")
        decision = entry.get("decision")
        if not isinstance(index, int) or isinstance(index, bool):
            raise DataPolicyError("choice permissionIndex must be an integer")
        if decision not in ("allow", "deny"):
            raise DataPolicyError(f"choice decision must be allow or deny, "
                                  f"got {decision!r}")
        actions = entry.get("narrowedActions")
        if actions is not None:
            if (not isinstance(actions, list) or not actions
                    or not all(isinstance(a, str) for a in actions)):
                raise DataPolicyError(
                    "narrowedActions must be a non-empty array of IRIs")
            actions = frozenset(actions)
        retention = entry.get("narrowedRetentionSeconds")
        if retention is not None:
            if not isinstance(retention, int) or isinstance(retention, bool) \
                    or retention < 0:
                raise DataPolicyError(
                    "narrowedRetentionSeconds must be a non-negative integer")
        choices.append(UserChoice(
            permission_index=index, decision=decision,
            narrowed_actions=actions, narrowed_retention=retention))
    return choices


def _taxonomy_json(core: ProxyCore) -> dict:
    tax = core.taxonomy
    nodes = {}
    for iri_ in sorted(tax.nodes):
        nodes[iri_] = {
            "label": tax.label(iri_),
            "definition": tax.definitions.get(iri_),
            "children": sorted(tax.children(iri_)),
        }
    return {"roots": sorted(tax.roots()), "nodes": nodes}


def _record_json(record) -> dict:
    return {
        "ts": record.ts,
        "origin": record.origin,
        "cookieNames": list(record.cookie_names),
        "requestDigest": record.request_digest,
        "outcome": record.outcome,
        "source": record.source,
        "prevHash": record.prev_hash,
        "agreementDigest": record.agreement_digest,
        "agreementTurtle": record.agreement_turtle,
    }


class ControlHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "datapolicy-control"
    core: ProxyCore  # set by make_control_server
    static_dir: Path | None = None

    # -- plumbing ---------------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _json(self, status: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._json(status, {"error": message})

    def _body_json(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DataPolicyError(f"request body is not JSON: {exc}") from exc

    # -- routing ----------------------------------------------------------

    def do_GET(self):
        url = urlsplit(self.path)
        if url.path == "/api/preferences":
            return self._json(200, profile_to_json(self.core.profile))
        if url.path == "/api/pending":
            return self._json(200, [pending_json(i)
                                    for i in self.core.pending_items()])
        if url.path == "/api/log":
            return self._get_log(parse_qs(url.query))
        if url.path == "/api/log/verify":
            report = verify_chain(self.core.log.path)
            return self._json(200, {
                "ok": report.ok, "length": report.length,
                "firstBadIndex": report.first_bad_index,
                "detail": report.detail})
        if url.path == "/api/taxonomy":
            return self._json(200, _taxonomy_json(self.core))
        if url.path == "/api/events":
            return self._stream_events()
        if url.path.startswith("/api/"):
            return self._error(404, f"no such endpoint: {url.path}")
        return self._static(url.path)

    def do_PUT(self):
        if urlsplit(self.path).path != "/api/preferences":
            return self._error(404, "no such endpoint")
        try:
            raw = self._body_json()
            profile = profile_from_json(raw, self.core.taxonomy)
        except DataPolicyError as exc:
            return self._error(422, str(exc))
        self.core.update_profile(profile)
        self._persist_profile(profile)
        return self._json(200, profile_to_json(profile))

    def do_POST(self):
        match = _RESOLVE_RE.match(urlsplit(self.path).path)
        if not match:
            return self._error(404, "no such endpoint")
        pending_id = match.group(1)
        try:
            choices = _choices_from_json(self._body_json())
        except DataPolicyError as exc:
            return self._error(422, str(exc))
        try:
            decision = self.core.resolve(pending_id, choices)
        except AlreadyResolved as exc:
            return self._error(409, str(exc))
        except KeyError:
            return self._error(404, f"no pending item {pending_id}")
        except EngineError as exc:
            return self._error(422, str(exc))
        return self._json(200, {
            "outcome": decision.outcome,
            "requestDigest": decision.request_digest,
            "grantedIndexes": list(decision.granted_indexes),
        })

    # -- endpoint bodies ----------------------------------------------------

    def _get_log(self, params) -> None:
        records = self.core.log.records()
        origin = params.get("origin", [None])[0]
        if origin:
            records = [r for r in records if r.origin == origin]
        records.reverse()  # newest first
        limit = params.get("limit", [None])[0]
        if limit is not None:
            try:
                records = records[:max(0, int(limit))]
            except ValueError:
                return self._error(400, f"limit must be an integer: {limit!r}")
        return self._json(200, [_record_json(r) for r in records])

    def _persist_profile(self, profile) -> None:
        path = Path(self.core.config.preferences_path)
        text = serialize_canonical(profile_to_graph(profile))
        fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".",
                                   prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except OSError:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _stream_events(self) -> None:
        q = self.core.subscribe()
        try:
            self.send_response(200)
            self.send_header("Content-Type", "text/event-stream")
            self.send_header("Cache-Control", "no-cache")
            self.send_header("Connection", "close")
            self.end_headers()
            while True:
                try:
                    event, data = q.get(timeout=15.0)
                except queue.Empty:
                    self.wfile.write(b": keep-alive\n\n")
                    self.wfile.flush()
                    continue
                payload = json.dumps(data)
                self.wfile.write(
                    f"event: {event}\ndata: {payload}\n\n".encode("utf-8"))
                self.wfile.flush()
        except (BrokenPipeError, ConnectionResetError, OSError):
            pass
        finally:
            self.core.unsubscribe(q)

    def _static(self, path: str) -> None:
        if self.static_dir is None:
            return self._error(404, "no UI bundle configured")
        root = self.static_dir.resolve()
        rel = path.lstrip("/") or "index.html"
        target = (root / rel).resolve()
        if not str(target).startswith(str(root)) or not target.is_file():
            # single-page app: unknown paths fall back to the shell
            target = root / "index.html"
            if not target.is_file():
                return self._error(404, f"no such file: {path}")
        body = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_control_server(core: ProxyCore, address: tuple[str, int],
                        static_dir: str | Path | None = None) -> ThreadingHTTPServer:
    handler = type("BoundControlHandler", (ControlHandler,), {
        "core": core,
        "static_dir": Path(static_dir) if static_dir else None,
    })
    server = ThreadingHTTPServer(address, handler)
    server.daemon_threads = True
    return server


def serve_control(core: ProxyCore, address: tuple[str, int],
                  static_dir: str | Path | None = None) -> threading.Thread:
    """Start the control listener on a daemon thread; returns it."""
    server = make_control_server(core, address, static_dir)
    thread = threading.Thread(target=server.serve_forever,
                              name="datapolicy-control", daemon=True)
    thread.server = server  # type: ignore[attr-defined]
    thread.start()
    return thread
