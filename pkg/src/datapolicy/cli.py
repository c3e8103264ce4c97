"""Command line front end.

Artifacts go to stdout, diagnostics to stderr. Exit codes: 0 success
(for `match`: granted), 10 partial, 20 denied (or non-compliant), 30
pending, 1 operational failure, 2 usage. Commands that mint timestamps
or identifiers accept --now / --uid so reruns are byte-identical.
"""

from __future__ import annotations

import json
import pathlib
import sys

import click

from .dialogue import plan_selections
from .engine import dtou_compliance, evaluate
from .errors import DataPolicyError
from .model import (
    PreferenceProfile,
    default_taxonomy,
    dtou_to_graph,
    load_taxonomy,
    parse_dtou_app_policy,
    parse_odrl_request,
    parse_preferences,
    request_to_graph,
    translate_dtou_to_odrl,
    translate_odrl_to_dtou,
)
from .rdf import extract_rdfa, parse_turtle, serialize_ntriples
from .wire import (
    AgreementEnvelope,
    PolicySource,
    UnrecognizedSource,
    decode_agreement_header,
    decode_request_header,
    encode_agreement_header,
    encode_request_header,
)

_EXIT_BY_OUTCOME = {"granted": 0, "partial": 10, "denied": 20, "pending": 30}


def _fail(message: str) -> "SystemExit":
    click.echo(f"error: {message}", err=True)
    return SystemExit(1)


def _document_base(path: str, override: str | None) -> str:
    if override:
        return override
    return pathlib.Path(path).resolve().as_uri()


def _load_graph(path: str, base: str | None):
    text = pathlib.Path(path).read_text(encoding="utf-8")
    return parse_turtle(text, base=base)


def _load_taxonomy(path: str | None):
    if path is None:
        return default_taxonomy()
    return load_taxonomy(_load_graph(path, _document_base(path, None)))


def _load_profile(path: str, taxonomy) -> PreferenceProfile:
    return parse_preferences(_load_graph(path, _document_base(path, None)), taxonomy)


def _party_json(party):
    if party is None:
        return None
    return {"iri": party.iri, "name": party.name, "page": party.page,
            "roleClass": party.role_class}


def _constraint_json(c):
    return {
        "leftOperand": c.left_operand,
        "operator": c.operator,
        "rightOperand": c.right_operand.value,
        "title": c.title,
    }


def _permission_json(p):
    return {
        "assignee": _party_json(p.assignee),
        "actions": list(p.actions),
        "target": p.target,
        "constraints": [_constraint_json(c) for c in p.constraints],
        "purposes": list(p.purposes()),
    }


def _request_report(request) -> dict:
    return {
        "kind": "odrl-request",
        "node": request.node,
        "uid": request.uid,
        "profile": request.profile,
        "description": request.description,
        "creator": _party_json(request.creator),
        "issued": request.issued,
        "permissions": [_permission_json(p) for p in request.permissions],
        "counts": {
            "permissions": len(request.permissions),
            "actions": sum(len(p.actions) for p in request.permissions),
            "constraints": sum(len(p.constraints) for p in request.permissions),
        },
    }


def _app_policy_report(app) -> dict:
    return {
        "kind": "dtou-app-policy",
        "node": app.node,
        "name": app.name,
        "inputSpecs": [
            {
                "data": s.data,
                "portName": s.port_name,
                "purposes": sorted(s.purposes),
                "expects": sorted(s.expects),
                "provide": s.provide,
                "downstream": [
                    {"appName": d.app_name, "purpose": d.purpose}
                    for d in s.downstream
                ],
            }
            for s in app.input_specs
        ],
        "counts": {
            "inputSpecs": len(app.input_specs),
            "expects": sum(len(s.expects) for s in app.input_specs),
            "downstream": sum(len(s.downstream) for s in app.input_specs),
        },
    }


def _decision_json(decision) -> dict:
    doc = {
        "outcome": decision.outcome,
        "requestDigest": decision.request_digest,
        "grantedIndexes": list(decision.granted_indexes),
        "grantedPermissions": [_permission_json(p)
                               for p in decision.granted_permissions],
        "pendingQuestions": [
            {"permissionIndex": q.permission_index, "purpose": q.purpose,
             "reason": q.reason}
            for q in decision.pending_questions
        ],
        "agreement": None,
    }
    if decision.agreement is not None:
        a = decision.agreement
        doc["agreement"] = {
            "node": a.node,
            "uid": a.uid,
            "issued": a.issued,
            "assigner": a.assigner,
            "requestDigest": a.request_digest,
            "permissions": [_permission_json(p) for p in a.permissions],
        }
    return doc


def _emit(doc: dict) -> None:
    click.echo(json.dumps(doc, indent=2, ensure_ascii=False))


@click.group()
def main():
    """Parse, match, translate, and relay machine-readable cookie terms."""


@main.command("parse")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--dtou", is_flag=True, help="Read a DToU app policy instead of an ODRL request.")
@click.option("--base", default=None, help="Document base IRI (default: file:// URI of FILE).")
def parse_cmd(file, dtou, base):
    """Validate a policy document and report its structure as JSON."""
    try:
        graph = _load_graph(file, _document_base(file, base))
        if dtou:
            report = _app_policy_report(parse_dtou_app_policy(graph))
        else:
            report = _request_report(parse_odrl_request(graph))
    except (DataPolicyError, OSError, UnicodeDecodeError) as exc:
        raise _fail(str(exc))
    _emit(report)


@main.command("match")
@click.option("--prefs", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--request", "request_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--dtou", is_flag=True,
              help="REQUEST is a DToU app policy; report compliance instead.")
@click.option("--base", default=None, help="Document base IRI for REQUEST.")
@click.option("--taxonomy", "taxonomy_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--now", default=None, help="Pinned agreement timestamp (ISO 8601 UTC).")
@click.option("--uid", default=None, help="Pinned agreement uid.")
def match_cmd(prefs, request_path, dtou, base, taxonomy_path, now, uid):
    """Match a policy against a preference profile.

    Prints the decision as JSON. Exit status encodes the outcome:
    0 granted/compliant, 10 partial, 20 denied/non-compliant, 30 pending.
    """
    try:
        taxonomy = _load_taxonomy(taxonomy_path)
        profile = _load_profile(prefs, taxonomy)
        graph = _load_graph(request_path, _document_base(request_path, base))
        if dtou:
            result = dtou_compliance(profile, parse_dtou_app_policy(graph), taxonomy)
            _emit({
                "compliant": result.compliant,
                "violations": [
                    {"specIndex": v.spec_index, "dimension": v.dimension,
                     "detail": v.detail}
                    for v in result.violations
                ],
            })
            raise SystemExit(0 if result.compliant else 20)
        request = parse_odrl_request(graph)
        decision = evaluate(profile, request, taxonomy, now=now, uid=uid)
    except (DataPolicyError, OSError, UnicodeDecodeError) as exc:
        raise _fail(str(exc))
    _emit(_decision_json(decision))
    raise SystemExit(_EXIT_BY_OUTCOME[decision.outcome])


@main.command("translate")
@click.option("--to", "target", required=True, type=click.Choice(["odrl", "dtou"]))
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--base", default=None, help="Document base IRI (default: file:// URI of FILE).")
def translate_cmd(target, file, base):
    """Translate between the two policy formalisms.

    Reads the other formalism from FILE and emits deterministic
    N-Triples for the requested one on stdout.
    """
    try:
        graph = _load_graph(file, _document_base(file, base))
        if target == "dtou":
            out = dtou_to_graph(translate_odrl_to_dtou(parse_odrl_request(graph)))
        else:
            out = request_to_graph(translate_dtou_to_odrl(parse_dtou_app_policy(graph)))
    except (DataPolicyError, OSError, UnicodeDecodeError) as exc:
        raise _fail(str(exc))
    click.echo(serialize_ntriples(out), nl=False)


@main.group("header")
def header_group():
    """Encode and decode the policy transmission headers."""


@header_group.command("encode")
@click.option("--disposition", type=click.Choice(["inline", "link", "negotiate"]),
              default=None, help="Request header disposition.")
@click.option("--policy-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Policy document for an inline source.")
@click.option("--href", default=None, help="Policy IRI for link/negotiate sources.")
@click.option("--cookie", default=None, help="Cookie the policy is bound to.")
@click.option("--agreement-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Agreement document; emits a Data-Policy value instead.")
def header_encode(disposition, policy_file, href, cookie, agreement_file):
    """Print one header value built from the given parts."""
    try:
        if agreement_file is not None:
            if disposition or policy_file or href or cookie:
                raise _fail("--agreement-file cannot be combined with request options")
            body = pathlib.Path(agreement_file).read_bytes()
            click.echo(encode_agreement_header(AgreementEnvelope.of_bytes(body)))
            return
        if disposition is None:
            raise _fail("either --disposition or --agreement-file is required")
        policy = (pathlib.Path(policy_file).read_bytes()
                  if policy_file is not None else None)
        source = PolicySource(disposition, policy_bytes=policy, href=href,
                              cookie_name=cookie)
        click.echo(encode_request_header(source))
    except (DataPolicyError, OSError) as exc:
        raise _fail(str(exc))


@header_group.command("decode")
@click.argument("value")
@click.option("--agreement", is_flag=True,
              help="VALUE is a Data-Policy header, not a Data-Policy-Request.")
def header_decode(value, agreement):
    """Decode a header value to JSON. Pass - to read it from stdin."""
    if value == "-":
        value = sys.stdin.readline().strip()
    try:
        if agreement:
            envelope = decode_agreement_header(value)
            _emit({
                "kind": "agreement",
                "sha256": envelope.digest,
                "agreement": envelope.agreement_bytes.decode("utf-8", "replace"),
            })
            return
        source = decode_request_header(value)
        if isinstance(source, UnrecognizedSource):
            _emit({"kind": "unrecognized", "disposition": source.disposition,
                   "raw": source.raw})
            return
        _emit({
            "kind": "request",
            "disposition": source.disposition,
            "policy": (source.policy_bytes.decode("utf-8", "replace")
                       if source.policy_bytes is not None else None),
            "href": source.href,
            "cookie": source.cookie_name,
        })
    except DataPolicyError as exc:
        raise _fail(str(exc))


@main.command("extract")
@click.argument("page", type=click.Path(exists=True, dir_okay=False))
@click.option("--base", default=None, help="Document base IRI (default: file:// URI of PAGE).")
def extract_cmd(page, base):
    """Extract embedded policy markup from an HTML page as N-Triples."""
    try:
        html = pathlib.Path(page).read_text(encoding="utf-8")
        graph = extract_rdfa(html, _document_base(page, base))
    except (DataPolicyError, OSError, UnicodeDecodeError) as exc:
        raise _fail(str(exc))
    click.echo(serialize_ntriples(graph), nl=False)


@main.command("plan")
@click.argument("page", type=click.Path(exists=True, dir_okay=False))
@click.option("--prefs", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--base", default=None, help="Document base IRI (default: file:// URI of PAGE).")
@click.option("--taxonomy", "taxonomy_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
def plan_cmd(page, prefs, base, taxonomy_path):
    """Decide the selection boxes of a consent dialogue page."""
    try:
        taxonomy = _load_taxonomy(taxonomy_path)
        profile = _load_profile(prefs, taxonomy)
        html = pathlib.Path(page).read_text(encoding="utf-8")
        plan = plan_selections(html, profile, taxonomy,
                               base=_document_base(page, base))
    except (DataPolicyError, OSError, UnicodeDecodeError) as exc:
        raise _fail(str(exc))
    _emit(plan.to_json())


@main.group("log")
def log_group():
    """Consent log inspection."""


@log_group.command("verify")
@click.argument("file", type=click.Path(dir_okay=False))
def log_verify(file):
    """Walk the hash chain of a consent log.

    Exit 0 when the chain verifies, 1 with the first bad index when it
    does not.
    """
    from .proxy import verify_chain

    report = verify_chain(file)
    _emit({
        "ok": report.ok,
        "length": report.length,
        "firstBadIndex": report.first_bad_index,
        "detail": report.detail,
    })
    if not report.ok:
        click.echo(
            f"error: chain broken at record {report.first_bad_index}: {report.detail}",
            err=True)
        raise SystemExit(1)


def _address(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise click.BadParameter(f"expected HOST:PORT, got {text!r}")
    return host, int(port)


@main.command("proxy")
@click.option("--listen", default="127.0.0.1:8080", show_default=True,
              help="Relay listener address.")
@click.option("--control", default="127.0.0.1:8081", show_default=True,
              help="Control API address.")
@click.option("--prefs", default="prefs.ttl", show_default=True,
              help="Preference profile; --default applies while it is missing.")
@click.option("--taxonomy", "taxonomy_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--log", "log_path", default="consent.jsonl", show_default=True)
@click.option("--default", "default_decision", default="ask", show_default=True,
              type=click.Choice(["allow", "deny", "ask"]))
@click.option("--negotiate", is_flag=True, help="Enable the negotiation client.")
@click.option("--drop-unannotated", is_flag=True,
              help="Withhold cookies that carry no policy at all.")
@click.option("--static", "static_dir", default=None,
              type=click.Path(exists=True, file_okay=False),
              help="Static files served by the control listener.")
@click.option("--ca", "ca_dir", default=None, type=click.Path(file_okay=False),
              help="CA directory; enables HTTPS interception via CONNECT.")
@click.option("--now", default=None, help="Pin the clock (testing).")
@click.option("--uid", "uid_seed", default=None,
              help="Seed deterministic agreement uids (testing).")
def proxy_cmd(listen, control, prefs, taxonomy_path, log_path, default_decision,
              negotiate, drop_unannotated, static_dir, ca_dir, now, uid_seed):
    """Run the consent proxy and its control API until interrupted."""
    from .proxy import ConsentLog, ProxyCA, ProxyConfig, ProxyCore, make_control_server, make_proxy_server

    try:
        config = ProxyConfig(
            listen_address=listen,
            control_address=control,
            preferences_path=prefs,
            taxonomy_path=taxonomy_path,
            log_path=log_path,
            default_decision=default_decision,
            negotiation_enabled=negotiate,
            pass_unannotated=not drop_unannotated,
        )
        taxonomy = _load_taxonomy(taxonomy_path)
        prefs_path = pathlib.Path(prefs)
        if prefs_path.exists():
            profile = _load_profile(prefs, taxonomy)
        else:
            profile = PreferenceProfile("urn:app:local-user", (), default_decision)
            click.echo(f"note: {prefs} not found, starting with an empty "
                       f"profile (default {default_decision})", err=True)

        kwargs = {}
        if now is not None:
            kwargs["clock"] = lambda: now
        if uid_seed is not None:
            counter = iter(range(1, 10 ** 9))
            kwargs["uid_factory"] = lambda: f"{uid_seed}-{next(counter):04d}"
        core = ProxyCore(profile, taxonomy, ConsentLog(log_path), config, **kwargs)

        ca = ProxyCA(ca_dir) if ca_dir is not None else None
        proxy_server = make_proxy_server(core, _address(listen), ca=ca)
        control_server = make_control_server(core, _address(control),
                                             static_dir=static_dir)
    except (DataPolicyError, OSError) as exc:
        raise _fail(str(exc))

    import threading

    threading.Thread(target=control_server.serve_forever, daemon=True).start()
    click.echo(f"proxy listening on {listen}, control API on {control}", err=True)
    if ca is not None:
        click.echo(f"interception CA certificate: {ca.ca_cert_path}", err=True)
    try:
        proxy_server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        proxy_server.shutdown()
        control_server.shutdown()


if __name__ == "__main__":
    main()
