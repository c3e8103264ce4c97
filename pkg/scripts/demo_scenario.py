#!/usr/bin/env python3
"""Walk the whole consent loop in one terminal.

A mock shop plants three annotated cookies: a marketing one carrying
the real ODRL cookie request, an analytics one, and one with a purpose
nobody has heard of. A local profile (allow marketing up to a year,
deny analytics, ask otherwise) drives the proxy; the script plays the
browser, resolves the queued prompt over the control API the way the
UI would, and prints what crossed each hop.

Run it directly; it binds ephemeral localhost ports and cleans up:

    python3 scripts/demo_scenario.py
"""

import argparse
import http.client
import json
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from datapolicy.model import default_taxonomy, profile_from_json
from datapolicy.proxy import (
    ConsentLog,
    ProxyConfig,
    ProxyCore,
    make_control_server,
    make_proxy_server,
)
from datapolicy.rdf import parse_turtle
from datapolicy.wire import PolicySource, decode_agreement_header, encode_request_header

ROOT = Path(__file__).resolve().parents[1]
ODRL = "http://www.w3.org/ns/odrl/2/"
DPV = "https://w3id.org/dpv#"
ALICE = "https://alice.example/profile#me"

POLICY_TMPL = """\
@prefix odrl: <http://www.w3.org/ns/odrl/2/> .
@prefix oac: <https://w3id.org/oac#> .
@prefix dpv: <https://w3id.org/dpv#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .

<https://pol.example/{name}> a odrl:Request ;
  odrl:uid "{name}-uid" ;
  odrl:profile oac: ;
  odrl:permission [
    odrl:action {actions} ;
    odrl:target <https://pol.example/{name}/data> ;
    odrl:constraint [
      odrl:leftOperand oac:Purpose ;
      odrl:operator odrl:isA ;
      odrl:rightOperand <{purpose}> ] ;
    odrl:constraint [
      odrl:leftOperand odrl:elapsedTime ;
      odrl:operator odrl:eq ;
      odrl:rightOperand "{retention}"^^xsd:duration ]
  ] .
"""


def policy(name: str, purpose: str, actions: str, retention: str) -> bytes:
    return POLICY_TMPL.format(name=name, purpose=purpose, actions=actions,
                              retention=retention).encode()


def inline(policy_bytes: bytes, cookie: str) -> str:
    return encode_request_header(
        PolicySource("inline", policy_bytes=policy_bytes, cookie_name=cookie))


def make_origin(cookie_specs):
    """The mock shop: /set plants the cookies, /echo mirrors back the
    Cookie and Data-Policy headers it received."""

    class Shop(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            pass

        def do_GET(self):
            if self.path.startswith("/set"):
                body = b'{"planted": true}'
                extra = [("Data-Policy-Request", header)
                         for _, header in cookie_specs]
                extra += [("Set-Cookie", set_cookie)
                          for set_cookie, _ in cookie_specs]
            else:
                body = json.dumps({
                    "cookie": self.headers.get("Cookie"),
                    "agreements": self.headers.get_all("Data-Policy") or [],
                }).encode()
                extra = []
            self.send_response(200)
            for name, value in extra:
                self.send_header(name, value)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return ThreadingHTTPServer(("127.0.0.1", 0), Shop)


def via_proxy(proxy_addr, url, cookie=None):
    conn = http.client.HTTPConnection(*proxy_addr, timeout=5)
    headers = {"Cookie": cookie} if cookie else {}
    conn.request("GET", url, headers=headers)
    response = conn.getresponse()
    payload = response.read()
    set_cookies = [v.split(";")[0] for k, v in response.getheaders()
                   if k.lower() == "set-cookie"]
    conn.close()
    return set_cookies, payload


def control(addr, method, path, body=None):
    conn = http.client.HTTPConnection(*addr, timeout=5)
    payload = json.dumps(body).encode() if body is not None else None
    conn.request(method, path, body=payload,
                 headers={"Content-Type": "application/json"} if payload else {})
    response = conn.getresponse()
    data = json.loads(response.read())
    conn.close()
    return response.status, data


def describe_agreement(header_value: str) -> str:
    envelope = decode_agreement_header(header_value)
    graph = parse_turtle(envelope.agreement_bytes.decode(), "urn:app:agreement")
    actions = sorted(t.object.value.rsplit("#", 1)[-1] for t in graph
                     if t.predicate.value == ODRL + "action")
    retention = [t.object.value for t in graph
                 if t.predicate.value == ODRL + "rightOperand"
                 and t.object.is_literal and t.object.value.startswith("P")]
    return f"actions {actions}, retention at most {retention[0]}"


def main() -> None:
    argparse.ArgumentParser(description=__doc__.splitlines()[0]).parse_args()

    fig1 = (ROOT / "fixtures" / "cookie-request.odrl.ttl").read_bytes()
    specs = [
        ("NID=abc123; Path=/", inline(fig1, "NID")),
        ("track=9; Path=/",
         inline(policy("analytics", DPV + "Analytics", "oac:Store", "P30D"),
                "track")),
        ("myst=7; Path=/",
         inline(policy("mystery", "https://vendor.example/vocab#Frobnicate",
                       "oac:Store, oac:Profiling", "P180D"),
                "myst")),
    ]

    taxonomy = default_taxonomy()
    profile = profile_from_json({
        "owner": ALICE,
        "defaultDecision": "ask",
        "rules": [
            {"purpose": DPV + "Marketing", "actions": None,
             "maxRetentionSeconds": 31536000, "decision": "allow"},
            {"purpose": DPV + "Analytics", "actions": None,
             "maxRetentionSeconds": None, "decision": "deny"},
        ],
    }, taxonomy)

    with tempfile.TemporaryDirectory(prefix="datapolicy-demo-") as tmp:
        log_path = Path(tmp) / "consent.jsonl"
        core = ProxyCore(profile, taxonomy, ConsentLog(log_path),
                         ProxyConfig(log_path=str(log_path)))
        origin = make_origin(specs)
        proxy = make_proxy_server(core, ("127.0.0.1", 0))
        ctrl = make_control_server(core, ("127.0.0.1", 0))
        for server in (origin, proxy, ctrl):
            threading.Thread(target=server.serve_forever,
                             kwargs={"poll_interval": 0.05},
                             daemon=True).start()
        try:
            run(origin.server_address, proxy.server_address,
                ctrl.server_address)
        finally:
            for server in (origin, proxy, ctrl):
                server.shutdown()
                server.server_close()


def run(origin_addr, proxy_addr, control_addr) -> None:
    shop = f"http://{origin_addr[0]}:{origin_addr[1]}"
    print(f"shop     {shop}")
    print(f"proxy    http://{proxy_addr[0]}:{proxy_addr[1]}")
    print(f"control  http://{control_addr[0]}:{control_addr[1]}\n")

    print("1. browsing to the shop; it tries to set three annotated cookies")
    set_cookies, _ = via_proxy(proxy_addr, shop + "/set")
    print(f"   cookies that reached the browser: {set_cookies}")
    print("   (marketing allowed for a year, analytics denied,"
          " the unknown purpose is parked)\n")

    print("2. sending every cookie back anyway, as a bad client would")
    _, payload = via_proxy(proxy_addr, shop + "/echo",
                           cookie="NID=abc123; track=9; myst=7")
    seen = json.loads(payload)
    print(f"   Cookie header the shop saw: {seen['cookie']!r}")
    for value in seen["agreements"]:
        print(f"   proof of consent attached: {describe_agreement(value)}")
    print()

    print("3. one question is waiting for a human")
    _, pending = control(control_addr, "GET", "/api/pending")
    item = pending[0]
    question = item["questions"][0]
    print(f"   cookie {item['cookieNames']} from {item['origin']}")
    print(f"   purpose {question['purpose']}")
    print(f"   reason: {question['reason']}\n")

    print("4. answering it: allow, but storage only and 30 days at most")
    status, outcome = control(
        control_addr, "POST", f"/api/pending/{item['id']}/resolve",
        {"choices": [{"permissionIndex": 0, "decision": "allow",
                      "narrowedActions": [DPV + "Store"],
                      "narrowedRetentionSeconds": 2592000}]})
    print(f"   resolution: HTTP {status}, outcome {outcome['outcome']}\n")

    print("5. browsing again: the resolved cookie now flows, narrowed")
    set_cookies, _ = via_proxy(proxy_addr, shop + "/set")
    print(f"   cookies that reached the browser: {set_cookies}")
    _, payload = via_proxy(proxy_addr, shop + "/echo",
                           cookie="NID=abc123; track=9; myst=7")
    seen = json.loads(payload)
    print(f"   Cookie header the shop saw: {seen['cookie']!r}")
    for value in seen["agreements"]:
        print(f"   proof of consent attached: {describe_agreement(value)}")
    print()

    print("6. the consent log remembers all of it")
    _, chain = control(control_addr, "GET", "/api/log/verify")
    print(f"   hash chain verifies: {chain['ok']} over {chain['length']} records")
    _, records = control(control_addr, "GET", "/api/log")
    for record in reversed(records):
        print(f"   {record['ts']}  {record['outcome']:<8} source={record['source']:<5}"
              f"  cookies={record['cookieNames']}")


if __name__ == "__main__":
    main()
