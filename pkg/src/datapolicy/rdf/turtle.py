"""Hand-written parser for the Turtle subset used by cookie policies.

Supported grammar:

    doc         := (directive | triples)* EOF
    directive   := '@prefix' PNAME_NS IRIREF '.'?  |  '@base' IRIREF '.'?
    triples     := subject predicateObjectList '.'
    subject     := iri | BLANK_LABEL | '[' predicateObjectList? ']'
    predicateObjectList := verb objectList (';' (verb objectList)?)*
    verb        := 'a' | iri
    objectList  := object (',' object)*
    object      := iri | BLANK_LABEL | '[' ... ']' | literal
    literal     := STRING ('^^' iri | LANGTAG)?
    iri         := IRIREF | PNAME

Strings come in short and long form with either quote character. RDF
collections '( ... )' and bare numeric/boolean literals are deliberately out
of the subset; collections raise a dedicated "unsupported construct" error.

The '@prefix' terminating dot is optional, and the rdf/rdfs/xsd/foaf
prefixes are pre-bound: hand-written policy files in the wild routinely
rely on both (the hand-crafted ODRL cookie request shipped under
fixtures/ does).

Blank nodes get fresh labels ``_:b0, _:b1, ...`` in document order of first
occurrence, regardless of the label used in the document.
"""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import urljoin

from ..namespaces import DEFAULT_PREFIXES, RDF_TYPE
from .terms import RdfError, RdfGraph, RdfTerm, RdfTriple, blank, is_absolute_iri, literal

_ESCAPES = {
    "t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
    '"': '"', "'": "'", "\\": "\\",
}


class TurtleSyntaxError(RdfError):
    """Syntax error with 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnsupportedConstructError(TurtleSyntaxError):
    """Input uses Turtle syntax outside the supported subset."""


class UnknownPrefixError(TurtleSyntaxError):
    pass


class RelativeIriError(TurtleSyntaxError):
    """A relative IRI was found and no base is in effect."""


@dataclass
class _Token:
    kind: str
    value: str
    line: int
    col: int
    extra: str = ""


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> TurtleSyntaxError:
        return TurtleSyntaxError(message, self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, offset: int = 0) -> str:
        j = self.pos + offset
        return self.text[j] if j < len(self.text) else ""

    def tokens(self) -> list[_Token]:
        out: list[_Token] = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.kind == "eof":
                return out

    def _next(self) -> _Token:
        while True:
            c = self._peek()
            if c == "":
                return _Token("eof", "", self.line, self.col)
            if c in " \t\r\n":
                self._advance()
                continue
            if c == "#":
                while self._peek() not in ("", "\n"):
                    self._advance()
                continue
            break

        line, col = self.line, self.col
        c = self._peek()

        if c == "<":
            return self._iriref(line, col)
        if c in "\"'":
            return self._string(line, col)
        if c == "@":
            return self._at_word(line, col)
        if c == "^" and self._peek(1) == "^":
            self._advance(2)
            return _Token("^^", "^^", line, col)
        if c in ";,.[]":
            self._advance()
            return _Token(c, c, line, col)
        if c in "()":
            raise UnsupportedConstructError(
                "RDF collections '( ... )' are not supported", line, col)
        if c == "_" and self._peek(1) == ":":
            self._advance(2)
            label = self._take_name()
            if not label:
                raise TurtleSyntaxError("blank node label expected after '_:'", line, col)
            return _Token("blank", label, line, col)

        # prefixed name or the 'a' keyword
        word = self._take_name()
        if not word:
            raise TurtleSyntaxError(f"unexpected character {c!r}", line, col)
        if self._peek() == ":":
            self._advance()
            local = self._take_local()
            return _Token("pname", word, line, col, extra=local)
        if word == "a":
            return _Token("a", "a", line, col)
        if word == "true" or word == "false" or word[0].isdigit():
            raise UnsupportedConstructError(
                "numeric/boolean shorthand literals are not supported; "
                "use a quoted typed literal", line, col)
        raise TurtleSyntaxError(f"unexpected token {word!r}", line, col)

    def _take_name(self) -> str:
        chars = []
        while True:
            c = self._peek()
            if c and (c.isalnum() or c in "_-"):
                chars.append(c)
                self._advance()
            else:
                break
        return "".join(chars)

    def _take_local(self) -> str:
        # Local part of a prefixed name; may be empty (e.g. 'oac:'), may
        # contain dots but not end with one ('ex:a.' is name 'a' then DOT).
        chars = []
        while True:
            c = self._peek()
            if c and (c.isalnum() or c in "_-"):
                chars.append(c)
                self._advance()
            elif c == "." and (self._peek(1).isalnum() or self._peek(1) in ("_", "-")):
                chars.append(c)
                self._advance()
            else:
                break
        return "".join(chars)

    def _iriref(self, line: int, col: int) -> _Token:
        self._advance()  # '<'
        chars = []
        while True:
            c = self._peek()
            if c == ">":
                self._advance()
                return _Token("iriref", "".join(chars), line, col)
            if c == "" or c == "\n":
                raise TurtleSyntaxError("unterminated IRI reference", line, col)
            if ord(c) <= 0x20 or c in '"{}|^`':
                raise TurtleSyntaxError(f"character {c!r} not allowed in IRI reference",
                                        self.line, self.col)
            chars.append(c)
            self._advance()

    def _at_word(self, line: int, col: int) -> _Token:
        self._advance()  # '@'
        word = []
        while self._peek().isalpha() or (word and self._peek() == "-") \
                or (word and self._peek().isdigit()):
            word.append(self._peek())
            self._advance()
        w = "".join(word)
        if w == "prefix":
            return _Token("@prefix", w, line, col)
        if w == "base":
            return _Token("@base", w, line, col)
        if w:
            return _Token("langtag", w, line, col)
        raise TurtleSyntaxError("'@' must start @prefix, @base or a language tag", line, col)

    def _string(self, line: int, col: int) -> _Token:
        quote = self._peek()
        long_form = self._peek(1) == quote and self._peek(2) == quote
        self._advance(3 if long_form else 1)
        chars: list[str] = []
        while True:
            c = self._peek()
            if c == "":
                raise TurtleSyntaxError("unterminated string literal", line, col)
            if c == "\\":
                chars.append(self._escape(line, col))
                continue
            if c == quote:
                if not long_form:
                    self._advance()
                    return _Token("string", "".join(chars), line, col)
                if self._peek(1) == quote and self._peek(2) == quote:
                    self._advance(3)
                    return _Token("string", "".join(chars), line, col)
                chars.append(c)
                self._advance()
                continue
            if c == "\n" and not long_form:
                raise TurtleSyntaxError("newline in short string literal", line, col)
            chars.append(c)
            self._advance()

    def _escape(self, line: int, col: int) -> str:
        self._advance()  # backslash
        c = self._peek()
        if c in _ESCAPES:
            self._advance()
            return _ESCAPES[c]
        if c in "uU":
            width = 4 if c == "u" else 8
            self._advance()
            digits = self.text[self.pos:self.pos + width]
            if len(digits) < width or any(d not in "0123456789abcdefABCDEF" for d in digits):
                raise TurtleSyntaxError(f"bad \\{c} escape", self.line, self.col)
            self._advance(width)
            return chr(int(digits, 16))
        raise TurtleSyntaxError(f"unknown string escape \\{c}", self.line, self.col)


class _Parser:
    def __init__(self, tokens: list[_Token], base: str | None):
        self.tokens = tokens
        self.i = 0
        self.base = base
        self.prefixes: dict[str, str] = dict(DEFAULT_PREFIXES)
        self.triples: list[RdfTriple] = []
        self._blank_map: dict[str, str] = {}
        self._blank_count = 0

    # -- token plumbing -------------------------------------------------

    def _peek(self) -> _Token:
        return self.tokens[self.i]

    def _take(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def _expect(self, kind: str, what: str) -> _Token:
        tok = self._take()
        if tok.kind != kind:
            raise TurtleSyntaxError(f"expected {what}, found {tok.value!r}", tok.line, tok.col)
        return tok

    # -- term construction ----------------------------------------------

    def _fresh_blank(self) -> RdfTerm:
        term = blank(f"b{self._blank_count}")
        self._blank_count += 1
        return term

    def _labeled_blank(self, label: str) -> RdfTerm:
        if label not in self._blank_map:
            self._blank_map[label] = f"b{self._blank_count}"
            self._blank_count += 1
        return blank(self._blank_map[label])

    def _resolve_iriref(self, tok: _Token) -> RdfTerm:
        value = tok.value
        if not is_absolute_iri(value):
            if self.base is None:
                raise RelativeIriError(
                    f"relative IRI <{value}> with no base in effect", tok.line, tok.col)
            value = urljoin(self.base, value)
        return RdfTerm("iri", value)

    def _resolve_pname(self, tok: _Token) -> RdfTerm:
        prefix, local = tok.value, tok.extra
        ns = self.prefixes.get(prefix)
        if ns is None:
            raise UnknownPrefixError(f"unknown prefix '{prefix}:'", tok.line, tok.col)
        value = ns + local
        if not is_absolute_iri(value):
            raise TurtleSyntaxError(
                f"prefixed name {prefix}:{local} does not resolve to an absolute IRI",
                tok.line, tok.col)
        return RdfTerm("iri", value)

    # -- grammar --------------------------------------------------------

    def parse(self) -> RdfGraph:
        while True:
            tok = self._peek()
            if tok.kind == "eof":
                break
            if tok.kind == "@prefix":
                self._take()
                name = self._expect("pname", "prefix declaration 'p:'")
                if name.extra:
                    raise TurtleSyntaxError("prefix declaration must end with ':'",
                                            name.line, name.col)
                target = self._expect("iriref", "namespace IRI")
                ns = target.value
                if not is_absolute_iri(ns):
                    if self.base is None:
                        raise RelativeIriError(
                            f"relative namespace IRI <{ns}> with no base", target.line, target.col)
                    ns = urljoin(self.base, ns)
                self.prefixes[name.value] = ns
                if self._peek().kind == ".":
                    self._take()
                continue
            if tok.kind == "@base":
                self._take()
                target = self._expect("iriref", "base IRI")
                if is_absolute_iri(target.value):
                    self.base = target.value
                elif self.base is not None:
                    self.base = urljoin(self.base, target.value)
                else:
                    raise RelativeIriError(
                        f"relative base IRI <{target.value}> with no prior base",
                        target.line, target.col)
                if self._peek().kind == ".":
                    self._take()
                continue
            self._triples()
        # Keep only the user-relevant prefixes first, then defaults that
        # were not overridden (cosmetic; equality ignores prefixes).
        return RdfGraph.of(self.triples, self.prefixes)

    def _triples(self) -> None:
        bracketed = self._peek().kind == "["
        subject = self._subject()
        # `[ p o ] .` is a complete statement; predicates after the
        # bracket are optional for anonymous subjects.
        if not (bracketed and self._peek().kind == "."):
            self._predicate_object_list(subject)
        self._expect(".", "'.' terminating the statement")

    def _subject(self) -> RdfTerm:
        tok = self._peek()
        if tok.kind == "iriref":
            return self._resolve_iriref(self._take())
        if tok.kind == "pname":
            return self._resolve_pname(self._take())
        if tok.kind == "blank":
            self._take()
            return self._labeled_blank(tok.value)
        if tok.kind == "[":
            return self._anon_blank()
        raise TurtleSyntaxError(f"expected subject, found {tok.value!r}", tok.line, tok.col)

    def _anon_blank(self) -> RdfTerm:
        open_tok = self._expect("[", "'['")
        node = self._fresh_blank()
        if self._peek().kind != "]":
            self._predicate_object_list(node)
        closing = self._take()
        if closing.kind != "]":
            raise TurtleSyntaxError("expected ']' closing blank node",
                                    open_tok.line, open_tok.col)
        return node

    def _predicate_object_list(self, subject: RdfTerm) -> None:
        while True:
            predicate = self._verb()
            self._object_list(subject, predicate)
            if self._peek().kind == ";":
                while self._peek().kind == ";":
                    self._take()
                if self._peek().kind in ("]", ".", "eof"):
                    return
                continue
            return

    def _verb(self) -> RdfTerm:
        tok = self._peek()
        if tok.kind == "a":
            self._take()
            return RdfTerm("iri", RDF_TYPE)
        if tok.kind == "iriref":
            return self._resolve_iriref(self._take())
        if tok.kind == "pname":
            return self._resolve_pname(self._take())
        raise TurtleSyntaxError(f"expected predicate, found {tok.value!r}", tok.line, tok.col)

    def _object_list(self, subject: RdfTerm, predicate: RdfTerm) -> None:
        while True:
            obj = self._object()
            self.triples.append(RdfTriple(subject, predicate, obj))
            if self._peek().kind == ",":
                self._take()
                continue
            return

    def _object(self) -> RdfTerm:
        tok = self._peek()
        if tok.kind == "iriref":
            return self._resolve_iriref(self._take())
        if tok.kind == "pname":
            return self._resolve_pname(self._take())
        if tok.kind == "blank":
            self._take()
            return self._labeled_blank(tok.value)
        if tok.kind == "[":
            return self._anon_blank()
        if tok.kind == "string":
            return self._literal()
        raise TurtleSyntaxError(f"expected object, found {tok.value!r}", tok.line, tok.col)

    def _literal(self) -> RdfTerm:
        tok = self._expect("string", "string literal")
        nxt = self._peek()
        if nxt.kind == "^^":
            self._take()
            dt_tok = self._peek()
            if dt_tok.kind == "iriref":
                dt = self._resolve_iriref(self._take())
            elif dt_tok.kind == "pname":
                dt = self._resolve_pname(self._take())
            else:
                raise TurtleSyntaxError("expected datatype IRI after '^^'",
                                        dt_tok.line, dt_tok.col)
            return literal(tok.value, datatype=dt.value)
        if nxt.kind == "langtag":
            self._take()
            return literal(tok.value, language=nxt.value)
        return literal(tok.value)


def parse_turtle(text: str, base: str | None = None) -> RdfGraph:
    """Parse a Turtle-subset document into a graph.

    ``base`` resolves relative IRIs; without it any relative IRI is an
    error. Blank nodes get fresh ``_:bN`` labels in document order.
    """
    tokens = _Lexer(text).tokens()
    return _Parser(tokens, base).parse()
