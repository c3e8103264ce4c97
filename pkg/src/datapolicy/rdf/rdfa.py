"""RDFa-Lite extraction from HTML.

Honors exactly the RDFa-Lite attribute set: ``vocab``, ``prefix``,
``typeof``, ``property``, ``resource``, ``about``, ``content``,
``datatype``. No ``rel``/``rev`` chaining, no predefined terms.

Subset processing rules, applied per element with an inherited
(subject, vocab, prefixes) context:

- ``about`` sets the subject for this element and its children.
- ``property`` emits (subject, property, object) where the object is, in
  order of preference: ``resource``, ``content`` (literal), a fresh blank
  node when ``typeof`` is present without ``about``, else the element's
  text content as a literal (``datatype`` applies to literal objects).
- ``typeof`` types the subject when ``about`` is present or no
  ``property`` intervenes; with ``property`` it types the resource/blank
  object instead (the usual RDFa-Lite item pattern).
- ``resource``/typed blank objects become the subject for children.

Blank node CURIEs (``_:x``, and safe-CURIE brackets) are accepted in
``about``/``resource``; labels are renumbered ``_:bN`` in document order
like the Turtle parser does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser
from urllib.parse import urljoin

from ..namespaces import DEFAULT_PREFIXES, RDF_TYPE
from .terms import RdfError, RdfGraph, RdfTerm, RdfTriple, blank, is_absolute_iri, literal

_VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}


class RdfaError(RdfError):
    """RDFa extraction failed."""


@dataclass
class _Node:
    tag: str
    attrs: dict[str, str]
    children: list = field(default_factory=list)  # _Node or str

    def text(self) -> str:
        parts = []
        for child in self.children:
            if isinstance(child, str):
                parts.append(child)
            else:
                parts.append(child.text())
        return "".join(parts)


class _TreeBuilder(HTMLParser):
    """Tag-soup-tolerant tree builder on top of html.parser.

    Unclosed elements are closed implicitly; stray end tags are dropped.
    """

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = _Node("#document", {})
        self.stack = [self.root]

    def handle_starttag(self, tag: str, attrs) -> None:
        node = _Node(tag, {k: (v if v is not None else "") for k, v in attrs})
        self.stack[-1].children.append(node)
        if tag not in _VOID_TAGS:
            self.stack.append(node)

    def handle_startendtag(self, tag: str, attrs) -> None:
        node = _Node(tag, {k: (v if v is not None else "") for k, v in attrs})
        self.stack[-1].children.append(node)

    def handle_endtag(self, tag: str) -> None:
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # stray end tag: ignore

    def handle_data(self, data: str) -> None:
        self.stack[-1].children.append(data)


class _Extractor:
    def __init__(self, base: str):
        self.base = base
        self.triples: list[RdfTriple] = []
        self._blank_map: dict[str, str] = {}
        self._blank_count = 0

    # -- helpers ---------------------------------------------------------

    def _fresh_blank(self) -> RdfTerm:
        term = blank(f"b{self._blank_count}")
        self._blank_count += 1
        return term

    def _labeled_blank(self, label: str) -> RdfTerm:
        if label not in self._blank_map:
            self._blank_map[label] = f"b{self._blank_count}"
            self._blank_count += 1
        return blank(self._blank_map[label])

    def _parse_prefix_attr(self, value: str, prefixes: dict[str, str]) -> dict[str, str]:
        tokens = value.split()
        if len(tokens) % 2 != 0:
            raise RdfaError(f"malformed prefix attribute: {value!r}")
        out = dict(prefixes)
        for i in range(0, len(tokens), 2):
            name, ns = tokens[i], tokens[i + 1]
            if not name.endswith(":") or len(name) < 2:
                raise RdfaError(
                    f"malformed prefix attribute: expected 'name:' before {ns!r}")
            if not is_absolute_iri(ns):
                raise RdfaError(
                    f"malformed prefix attribute: {ns!r} is not an absolute IRI")
            out[name[:-1]] = ns
        return out

    def _resolve_resource(self, value: str, prefixes: dict[str, str],
                          attr: str) -> RdfTerm:
        value = value.strip()
        if value.startswith("[") and value.endswith("]"):
            value = value[1:-1].strip()
        if value.startswith("_:"):
            return self._labeled_blank(value[2:] or "anon")
        if ":" in value:
            prefix = value.split(":", 1)[0]
            if prefix in prefixes:
                return RdfTerm("iri", prefixes[prefix] + value.split(":", 1)[1])
            if is_absolute_iri(value):
                return RdfTerm("iri", value)
        resolved = urljoin(self.base, value)
        if not is_absolute_iri(resolved):
            raise RdfaError(f"cannot resolve {attr}={value!r} against base {self.base!r}")
        return RdfTerm("iri", resolved)

    def _resolve_term(self, token: str, prefixes: dict[str, str],
                      vocab: str | None, attr: str) -> RdfTerm:
        if ":" in token:
            prefix = token.split(":", 1)[0]
            if prefix in prefixes:
                return RdfTerm("iri", prefixes[prefix] + token.split(":", 1)[1])
            if is_absolute_iri(token):
                return RdfTerm("iri", token)
            raise RdfaError(f"unknown prefix {prefix!r}: in {attr} attribute")
        if vocab is None:
            raise RdfaError(f"term {token!r} in {attr} attribute with no vocab in scope")
        return RdfTerm("iri", vocab + token)

    # -- traversal ---------------------------------------------------------

    def walk(self, node: _Node, subject: RdfTerm,
             vocab: str | None, prefixes: dict[str, str]) -> None:
        for child in node.children:
            if isinstance(child, _Node):
                self._element(child, subject, vocab, prefixes)

    def _element(self, el: _Node, subject: RdfTerm,
                 vocab: str | None, prefixes: dict[str, str]) -> None:
        attrs = el.attrs
        if el.tag == "base" and attrs.get("href"):
            self.base = urljoin(self.base, attrs["href"])
        if "prefix" in attrs:
            prefixes = self._parse_prefix_attr(attrs["prefix"], prefixes)
        if "vocab" in attrs:
            vocab = attrs["vocab"].strip() or None

        about = attrs.get("about")
        prop = attrs.get("property")
        resource = attrs.get("resource")
        typeof = attrs.get("typeof")

        if about is not None:
            subject = self._resolve_resource(about, prefixes, "about")

        types = []
        if typeof is not None:
            types = [self._resolve_term(t, prefixes, vocab, "typeof")
                     for t in typeof.split()]

        child_subject = subject

        if prop is not None:
            predicates = [self._resolve_term(t, prefixes, vocab, "property")
                          for t in prop.split()]
            obj, obj_is_node = self._object_for(el, attrs, prefixes, vocab,
                                                typeof if about is None else None)
            for p in predicates:
                self.triples.append(RdfTriple(subject, p, obj))
            if about is not None:
                for t in types:
                    self.triples.append(RdfTriple(subject, RdfTerm("iri", RDF_TYPE), t))
            elif types and obj_is_node:
                for t in types:
                    self.triples.append(RdfTriple(obj, RdfTerm("iri", RDF_TYPE), t))
            if obj_is_node:
                child_subject = obj
        else:
            if resource is not None:
                child_subject = self._resolve_resource(resource, prefixes, "resource")
            elif types and about is None:
                child_subject = self._fresh_blank()
            for t in types:
                self.triples.append(RdfTriple(child_subject, RdfTerm("iri", RDF_TYPE), t))

        self.walk(el, child_subject, vocab, prefixes)

    def _object_for(self, el: _Node, attrs: dict[str, str],
                    prefixes: dict[str, str], vocab: str | None,
                    typeof: str | None) -> tuple[RdfTerm, bool]:
        """Object of a property triple; second value says whether it is a
        node (IRI/blank) that children should describe."""
        if "resource" in attrs:
            return self._resolve_resource(attrs["resource"], prefixes, "resource"), True
        datatype = None
        if attrs.get("datatype"):
            datatype = self._resolve_term(attrs["datatype"], prefixes, vocab,
                                          "datatype").value
        if "content" in attrs:
            return literal(attrs["content"], datatype=datatype), False
        if typeof is not None:
            return self._fresh_blank(), True
        return literal(el.text(), datatype=datatype), False


def extract_rdfa(html: str, base: str) -> RdfGraph:
    """Extract the RDFa-Lite graph from an HTML document.

    ``base`` is the document IRI (subject of top-level properties and the
    resolution base for relative references); a ``<base href>`` element
    overrides it.
    """
    if not is_absolute_iri(base):
        raise RdfaError(f"base must be an absolute IRI, got {base!r}")
    nul = html.find("\x00")
    if nul != -1:
        offset = len(html[:nul].encode("utf-8"))
        raise RdfaError(f"unparseable HTML: NUL character at byte offset {offset}")

    builder = _TreeBuilder()
    builder.feed(html)
    builder.close()

    ex = _Extractor(base)
    ex.walk(builder.root, RdfTerm("iri", base), None, dict(DEFAULT_PREFIXES))
    return RdfGraph.of(ex.triples)
