import logging

import pytest
from hypothesis import given

from conftest import MIXED, any_signature_structures, structures
from pinchlab.catalog import GRAPH, K2, UNARY
from pinchlab.lattices import TWO, a_n, m_k, p_n
from pinchlab.logic import parse_sentence
from pinchlab.structures import RelStructure
from pinchlab.textformat import (
    FormatError,
    parse_document,
    parse_structure,
    read_document,
    serialize_lattice,
    serialize_sentence,
    serialize_structure,
)

K2_TEXT = """\
# two vertices, one symmetric edge
structure K2 over graph
  size 2
  E 0 1
  E 1 0
end
"""


def test_parse_builtin_signature():
    s = parse_structure(K2_TEXT)
    assert s == K2 and s.name == "K2"


def test_declared_signature_and_sentence():
    doc = parse_document("""
signature tern
  rel T 3
end
structure X over tern
  size 2
  T 0 1 1
end
sentence phi over tern
  forall x y z .
    ~T(x,y,z)
end
""")
    assert doc.signatures["tern"].relations == (("T", 3),)
    assert doc.structures["X"].table("T") == {(0, 1, 1)}
    assert str(doc.sentences["phi"]) == "forall x y z . ~T(x,y,z)"


@pytest.mark.parametrize("text, line", [
    ("structure A over graph\n  size 2\n  E 0 5\nend\n", 3),
    ("structure A over graph\n  E 0 1\nend\n", 2),
    ("structure A over graph\n  size 2\n  E 0\nend\n", 3),
    ("structure A over nothing\n  size 1\nend\n", 1),
    ("structure A over graph\n  size 2\n", 1),
    ("bogus\n", 1),
    ("structure A over graph\n  size x\nend\n", 2),
    ("sentence s over graph\n  forall x . Q(x)\nend\n", 2),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(FormatError) as exc:
        parse_document(text, "f.txt")
    assert exc.value.line == line
    assert str(exc.value).startswith(f"f.txt:{line}:")


def test_duplicate_tuple_warns(caplog):
    with caplog.at_level(logging.WARNING):
        s = parse_structure("structure A over graph\n size 2\n E 0 1\n E 0 1\nend\n")
    assert len(s.table("E")) == 1
    assert "duplicate" in caplog.text


def test_parse_structure_requires_exactly_one():
    with pytest.raises(FormatError):
        parse_structure(K2_TEXT + K2_TEXT.replace("K2", "K2b"))


def test_read_missing_file(tmp_path):
    with pytest.raises(FormatError):
        read_document(tmp_path / "nope.txt")


def test_serialization_is_canonical():
    a = serialize_structure(K2, "K2", with_signature=False)
    assert a == "structure K2 over graph\n  size 2\n  E 0 1\n  E 1 0\nend\n"


@pytest.mark.parametrize("lat", [TWO, m_k(3), a_n(2, 3), p_n(2)])
def test_lattice_round_trip(lat):
    doc = parse_document(serialize_lattice(lat, "L"))
    back = doc.lattices["L"]
    assert (back.join, back.meet, back.bottom, back.top) == (lat.join, lat.meet, lat.bottom, lat.top)


def test_lattice_triples_and_errors():
    text = "lattice T\n size 2\n bottom 0\n top 1\n join 0 0 0\n join 0 1 1\n join 1 1 1\n meet 0 0 0\n meet 0 1 0\n meet 1 1 1\nend\n"
    assert parse_document(text).lattices["T"].join == TWO.join
    with pytest.raises(FormatError):
        parse_document(text.replace(" meet 1 1 1\n", ""))
    with pytest.raises(FormatError):
        parse_document(text.replace(" join 1 1 1\n", " join 1 1 1\n join 1 0 0\n"))


def test_sentence_round_trip():
    s = parse_sentence("forall x y . E(x,y) -> E(y,x)", GRAPH, "sym")
    back = parse_document(serialize_sentence(s)).sentences["sym"]
    assert back.matrix == s.matrix


@given(structures(max_size=4))
def test_round_trip_graph(s):
    assert parse_structure(serialize_structure(s, "A")) == s


@given(structures(UNARY, max_size=4))
def test_round_trip_unary(s):
    assert parse_structure(serialize_structure(s, "A", with_signature=False)) == s


@given(any_signature_structures())
def test_round_trip_any_signature(s):
    text = serialize_structure(s, "A")
    back = parse_structure(text)
    assert back == s
    assert serialize_structure(back, "A") == text


def test_mixed_signature_rendering():
    m = RelStructure(MIXED, 2, {"R": [(1, 0)], "U": [(0,)]})
    text = serialize_structure(parse_structure(serialize_structure(m, "M")), "M")
    assert "  R 1 0\n  U 0\n" in text
