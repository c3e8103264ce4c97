"""Forward HTTP proxy that routes traffic through the consent core.

Plain requests arrive in absolute-URI form; HTTPS arrives via CONNECT
and is intercepted with a certificate minted by the local CA. Bodies
are fully buffered (cookie consent traffic is small), hop-by-hop
headers are dropped, and each relayed exchange passes through
ProxyCore.on_request / on_response.
"""

from __future__ import annotations

import http.client
import logging
import ssl
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import urlsplit

from .core import ProxyCore
from .tls import ProxyCA

logger = logging.getLogger("datapolicy.proxy")

_HOP_BY_HOP = {
    "connection", "keep-alive", "proxy-authenticate", "proxy-authorization",
    "proxy-connection", "te", "trailers", "transfer-encoding", "upgrade",
}

_METHODS = ("GET", "POST", "PUT", "DELETE", "HEAD", "OPTIONS", "PATCH")


def _relay(handler: BaseHTTPRequestHandler, core: ProxyCore, scheme: str,
           host: str, port: int, path: str,
           upstream_context: ssl.SSLContext | None = None) -> None:
    origin = f"{scheme}://{host}:{port}"
    length = int(handler.headers.get("Content-Length") or 0)
    body = handler.rfile.read(length) if length else b""

    inbound = [(k, v) for k, v in handler.headers.items()
               if k.lower() not in _HOP_BY_HOP]
    outbound = core.on_request(origin, inbound)

    timeout = core.config.upstream_timeout
    if scheme == "https":
        ctx = upstream_context or ssl.create_default_context()
        conn = http.client.HTTPSConnection(host, port, timeout=timeout,
                                           context=ctx)
    else:
        conn = http.client.HTTPConnection(host, port, timeout=timeout)
    try:
        conn.putrequest(handler.command, path, skip_host=True,
                        skip_accept_encoding=True)
        sent_host = False
        for name, value in outbound:
            if name.lower() == "host":
                sent_host = True
            conn.putheader(name, value)
        if not sent_host:
            conn.putheader("Host", host if port in (80, 443) else f"{host}:{port}")
        if body and not any(n.lower() == "content-length" for n, _ in outbound):
            conn.putheader("Content-Length", str(len(body)))
        conn.endheaders()
        if body:
            conn.send(body)
        resp = conn.getresponse()
        resp_body = resp.read()
        resp_headers = [(k, v) for k, v in resp.getheaders()
                        if k.lower() not in _HOP_BY_HOP]
    except OSError as exc:
        logger.warning("%s: upstream failure: %s", origin, exc)
        handler.send_error(502, f"upstream failure: {exc}")
        return
    finally:
        conn.close()

    filtered, _, _ = core.on_response(origin, resp_headers)

    handler.send_response_only(resp.status, resp.reason)
    for name, value in filtered:
        if name.lower() == "content-length":
            continue
        handler.send_header(name, value)
    handler.send_header("Content-Length", str(len(resp_body)))
    handler.send_header("Connection", "close")
    handler.end_headers()
    if handler.command != "HEAD":
        handler.wfile.write(resp_body)
    handler.close_connection = True


def _make_inner_handler(core: ProxyCore, host: str, port: int,
                        upstream_context: ssl.SSLContext | None):
    """Handler for requests arriving inside an intercepted TLS tunnel."""

    class InnerHandler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            pass

        def _proxy(self):
            _relay(self, core, "https", host, port, self.path,
                   upstream_context)

    for method in _METHODS:
        setattr(InnerHandler, f"do_{method}", InnerHandler._proxy)
    return InnerHandler


class ProxyHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "datapolicy-proxy"
    core: ProxyCore  # bound by make_proxy_server
    ca: ProxyCA | None = None
    upstream_context: ssl.SSLContext | None = None

    def log_message(self, fmt, *args):
        pass

    def _proxy(self):
        url = urlsplit(self.path)
        if not url.scheme or not url.hostname:
            self.send_error(400, "proxy requests must use absolute URIs")
            return
        port = url.port or (443 if url.scheme == "https" else 80)
        path = url.path or "/"
        if url.query:
            path += "?" + url.query
        _relay(self, self.core, url.scheme, url.hostname, port, path,
               self.upstream_context)

    def do_CONNECT(self):
        if self.ca is None:
            self.send_error(501, "HTTPS interception is not enabled")
            return
        host, _, port_text = self.path.partition(":")
        port = int(port_text or 443)
        self.send_response_only(200, "Connection Established")
        self.end_headers()
        try:
            ctx = self.ca.server_context(host)
            tls_sock = ctx.wrap_socket(self.connection, server_side=True)
        except (ssl.SSLError, OSError) as exc:
            logger.warning("CONNECT %s: TLS handshake failed: %s",
                           self.path, exc)
            self.close_connection = True
            return
        inner = _make_inner_handler(self.core, host, port,
                                    self.upstream_context)
        try:
            inner(tls_sock, self.client_address, self.server)
        finally:
            try:
                tls_sock.close()
            except OSError:
                pass
            self.close_connection = True


for _m in _METHODS:
    setattr(ProxyHandler, f"do_{_m}", ProxyHandler._proxy)


def make_proxy_server(core: ProxyCore, address: tuple[str, int],
                      ca: ProxyCA | None = None,
                      upstream_context: ssl.SSLContext | None = None
                      ) -> ThreadingHTTPServer:
    handler = type("BoundProxyHandler", (ProxyHandler,), {
        "core": core, "ca": ca, "upstream_context": upstream_context,
    })
    server = ThreadingHTTPServer(address, handler)
    server.daemon_threads = True
    return server


def serve_proxy(core: ProxyCore, address: tuple[str, int],
                ca: ProxyCA | None = None,
                upstream_context: ssl.SSLContext | None = None) -> threading.Thread:
    server = make_proxy_server(core, address, ca, upstream_context)
    thread = threading.Thread(target=server.serve_forever,
                              name="datapolicy-proxy", daemon=True)
    thread.server = server  # type: ignore[attr-defined]
    thread.start()
    return thread
