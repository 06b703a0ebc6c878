from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F2, Z, Z2, elements, ring_elements
from soficlab.errors import GroupMismatch, ModeMismatch, NeumannConditionFailed, ParseError
from soficlab.ring import (GroupRingElement, RingMatrix, find_split, format_ring, inverse_residual,
                           l1_inverse, parse_matrix, parse_ring)


def test_parse_examples():
    f = parse_ring("2-t", Z)
    assert f.terms == {(0,): 2, (1,): -1}
    g = parse_ring("3 - t - t^-1", Z)
    assert g.terms == {(0,): 3, (1,): -1, (-1,): -1}
    h = parse_ring("a + 2*bA", F2)
    assert h.l1_norm() == 3


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse_ring("", Z)


def test_convolution_shifts():
    t = parse_ring("t", Z)
    f = parse_ring("2-t", Z)
    assert (t * f).terms == {(1,): 2, (2,): -1}


def test_star_of_matrix_transposes():
    A = parse_matrix("2, t; 0, 3", Z)
    S = A.star()
    assert S[1, 0] == parse_ring("t^-1", Z)
    assert S[0, 1].is_zero()


def test_inverse_of_two_minus_t_is_geometric():
    inv = l1_inverse(parse_ring("2-t", Z), 1e-10)
    for k in range(10):
        assert abs(float(inv.coefficient(Z.element((k,)))) - 2.0 ** -(k + 1)) < 1e-12
    assert inv.tail <= 1e-10


def test_inverse_of_shifted_split():
    # t - 3 needs the scale on the t term's complement; c = -3 at e works
    inv = l1_inverse(parse_ring("t-3", Z), 1e-9)
    assert inverse_residual(RingMatrix.scalar(parse_ring("t-3", Z)), RingMatrix.scalar(inv)) < 1e-8


def test_matrix_inverse_residual():
    A = parse_matrix("4, t; 1, 5", Z)
    R = l1_inverse(A, 1e-9)
    assert inverse_residual(A, R) < 1e-8


def test_one_minus_t_is_not_certified():
    with pytest.raises(NeumannConditionFailed):
        find_split(RingMatrix.scalar(parse_ring("1-t", Z)))


def test_mode_and_group_mismatch():
    f = parse_ring("2", Z)
    with pytest.raises(ModeMismatch):
        f + f.to_float()
    with pytest.raises(GroupMismatch):
        f + parse_ring("2", Z2)


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from([Z, Z2, F2]).flatmap(lambda s: st.tuples(ring_elements(s), ring_elements(s),
                                                                 ring_elements(s))))
def test_ring_laws(triple):
    f, g, h = triple
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f + g) * h == f * h + g * h
    assert (f * g).star() == g.star() * f.star()
    assert f.star().star() == f
    one = GroupRingElement.one(f.spec)
    assert f * one == f == one * f
    assert (f * g).l1_norm() <= f.l1_norm() * g.l1_norm()


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([Z, Z2, F2]).flatmap(ring_elements))
def test_format_parse_roundtrip(f):
    assert parse_ring(format_ring(f), f.spec) == f


@st.composite
def dominant(draw):
    """(f, tol) with f = c e + rest and |c| >= 2 ||rest||_1 + 1; free groups get a sparser rest."""
    spec = draw(st.sampled_from([Z, Z2, F2]))
    free = spec is F2
    items = draw(st.lists(st.tuples(elements(spec, 1 if free else 2), st.integers(-1, 1)),
                          max_size=2 if free else 3))
    rest = GroupRingElement.from_items(spec, [(g, c) for g, c in items if not g.is_identity()], exact=True)
    factor = 4 if free else 2
    c = draw(st.integers(factor * rest.l1_norm() + 1, factor * rest.l1_norm() + 4))
    c *= draw(st.sampled_from([1, -1]))
    return rest + GroupRingElement.monomial(spec.identity(), c), (1e-5 if free else 1e-8)


@settings(max_examples=1000, deadline=None)
@given(dominant())
def test_l1_inverse_residuals(case):
    f, tol = case
    inv = l1_inverse(f, tol)
    assert inv.tail <= tol
    assert inverse_residual(RingMatrix.scalar(f), RingMatrix.scalar(inv)) <= 2 * tol * f.l1_norm()
