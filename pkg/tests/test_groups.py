from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F2, Z, Z2, elements
from soficlab.errors import GroupMismatch, ParseError
from soficlab.groups import GroupSpec, format_element, parse_element, parse_group


def test_parse_group_forms():
    assert parse_group("Z") == Z
    assert parse_group("Z^2") == Z2
    assert parse_group("F_2") == F2
    assert parse_group("Z/(4,6)").moduli == (4, 6)


def test_rank_one_element_spellings():
    assert parse_element("1", Z) == Z.element((1,))
    assert parse_element("-1", Z) == Z.element((-1,))
    assert parse_element("(1)", Z) == Z.element((1,))


def test_free_words_reduce():
    a = parse_element("a", F2)
    b = parse_element("b", F2)
    assert (a * b * b.inverse() * a.inverse()).is_identity()
    assert (a * b).length == 2


def test_quotient_elements_are_row_major():
    Q = GroupSpec.quotient((2, 3))
    words = [g.word for g in Q.elements()]
    assert words == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    assert Q.order() == 6


def test_ball_sizes():
    assert len(Z.ball(3)) == 7
    assert len(Z2.ball(1)) == 5
    assert len(F2.ball(1)) == 5
    assert len(F2.ball(2)) == 17


def test_mixing_groups_is_an_error():
    with pytest.raises(GroupMismatch):
        Z.element((1,)) * Z2.element((0, 1))


def test_bad_element_text():
    with pytest.raises(ParseError):
        parse_element("e e e ?", F2)


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from([Z, Z2, F2]).flatmap(lambda s: st.tuples(elements(s), elements(s), elements(s))))
def test_group_axioms(triple):
    x, y, z = triple
    e = x.spec.identity()
    assert (x * y) * z == x * (y * z)
    assert x * e == x == e * x
    assert (x * x.inverse()).is_identity()
    assert (x * y).inverse() == y.inverse() * x.inverse()


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([Z, Z2, F2]).flatmap(elements))
def test_format_parse_roundtrip(x):
    assert parse_element(format_element(x), x.spec) == x
