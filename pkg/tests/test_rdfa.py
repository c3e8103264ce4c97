"""RDFa-Lite extraction from HTML."""

import pytest

from datapolicy.namespaces import ODRL, RDF_TYPE, XSD
from datapolicy.rdf import RdfaError, extract_rdfa, iri, literal

BASE = "http://e/doc"


def single(g):
    assert len(g) == 1
    return next(iter(g))


def test_spec_example_one_type_triple():
    html = ('<div about="http://e/r" typeof="odrl:Request" '
            'prefix="odrl: http://www.w3.org/ns/odrl/2/"></div>')
    t = single(extract_rdfa(html, BASE))
    assert t.subject == iri("http://e/r")
    assert t.predicate.value == RDF_TYPE
    assert t.object == iri(ODRL + "Request")


def test_plain_html_gives_empty_graph():
    g = extract_rdfa("<html><body><p>just text</p></body></html>", BASE)
    assert len(g) == 0


def test_text_content_literal():
    html = '<div vocab="http://s/"><span property="name">Google</span></div>'
    t = single(extract_rdfa(html, BASE))
    assert t.subject == iri(BASE)
    assert t.predicate == iri("http://s/name")
    assert t.object == literal("Google")


def test_content_attribute_wins_over_text():
    html = '<span vocab="http://s/" property="v" content="machine">human</span>'
    t = single(extract_rdfa(html, BASE))
    assert t.object == literal("machine")


def test_datatype_attribute():
    html = ('<span vocab="http://s/" property="issued" datatype="xsd:dateTime" '
            'content="2024-06-03T17:58:31"></span>')
    t = single(extract_rdfa(html, BASE))
    assert t.object == literal("2024-06-03T17:58:31", datatype=XSD + "dateTime")


def test_resource_object_and_chaining():
    html = ('<div vocab="http://s/" about="http://e/s">'
            '<div property="knows" resource="http://e/o">'
            '<span property="name">O</span></div></div>')
    g = extract_rdfa(html, BASE)
    triples = {(t.subject.value, t.predicate.value, t.object) for t in g}
    assert ("http://e/s", "http://s/knows", iri("http://e/o")) in triples
    assert ("http://e/o", "http://s/name", literal("O")) in triples


def test_property_with_typeof_mints_blank(CT="http://s/"):
    html = (f'<div vocab="{CT}" about="http://e/s">'
            '<div property="perm" typeof="Permission">'
            '<span property="p" content="1"></span></div></div>')
    g = extract_rdfa(html, BASE)
    assert len(g) == 3
    blanks = g.blank_labels()
    assert len(blanks) == 1
    node = next(iter(blanks))
    objs = [t for t in g if t.object.is_blank and t.object.value == node]
    assert len(objs) == 1


def test_labeled_blank_in_resource():
    html = ('<div vocab="http://s/">'
            '<span property="a" resource="_:n"></span>'
            '<span about="_:n" property="b" content="x"></span></div>')
    g = extract_rdfa(html, BASE)
    assert len(g) == 2
    labels = {t.object.value for t in g if t.object.is_blank}
    subjects = {t.subject.value for t in g if t.subject.is_blank}
    assert labels == subjects


def test_relative_resource_resolves_against_base():
    html = '<span vocab="http://s/" property="page" resource="google.com"></span>'
    t = single(extract_rdfa(html, "https://example.com/dialog"))
    assert t.object == iri("https://example.com/google.com")


def test_base_element_overrides():
    html = ('<head><base href="http://other/"></head>'
            '<body><span vocab="http://s/" property="p" resource="x"></span></body>')
    t = single(extract_rdfa(html, BASE))
    assert t.object == iri("http://other/x")


def test_multiple_properties_share_object():
    html = '<span vocab="http://s/" property="a b" content="v"></span>'
    g = extract_rdfa(html, BASE)
    assert {t.predicate.value for t in g} == {"http://s/a", "http://s/b"}


def test_safe_curie():
    html = ('<div prefix="ex: http://x/" about="[ex:s]" typeof="ex:T"></div>')
    t = single(extract_rdfa(html, BASE))
    assert t.subject == iri("http://x/s")


def test_tag_soup_tolerated():
    html = ('<div vocab="http://s/"><p property="a" content="1">'
            '<span property="b" content="2"</div>')
    g = extract_rdfa(html, BASE)
    assert len(g) >= 1


def test_malformed_prefix_named_in_error():
    html = '<div prefix="broken http://x/" about="http://e/s" typeof="T"></div>'
    with pytest.raises(RdfaError) as info:
        extract_rdfa(html, BASE)
    assert "prefix" in str(info.value)


def test_colon_token_without_prefix_falls_back_to_iri():
    # CURIE-or-IRI: an undeclared prefix that still parses as an absolute
    # IRI is taken literally.
    html = '<span property="nope:p" content="x"></span>'
    t = single(extract_rdfa(html, BASE))
    assert t.predicate == iri("nope:p")


def test_term_without_vocab_rejected():
    html = '<span property="bare" content="x"></span>'
    with pytest.raises(RdfaError):
        extract_rdfa(html, BASE)


def test_nul_byte_reported_with_offset():
    with pytest.raises(RdfaError) as info:
        extract_rdfa("<p>ab\x00</p>", BASE)
    assert "byte offset 5" in str(info.value)
