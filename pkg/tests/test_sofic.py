from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Z, Z2
from soficlab.errors import ParseError, SoficOverflow, SupportError
from soficlab.sofic import (dump_sofic, freeness_defect, hamming, load_sofic, multiplicativity_defect, perturb,
                            quotient_sofic)


def test_quotient_translation():
    sig = quotient_sofic(Z, (5,), 2)
    assert list(sig.perm(Z.element((1,)))) == [1, 2, 3, 4, 0]
    assert sig(Z.element((-2,)), 0) == 3


def test_quotient_is_a_homomorphism_on_its_support():
    sig = quotient_sofic(Z2, (4, 3), 2)
    for s in Z2.ball(1):
        for t in Z2.ball(1):
            assert multiplicativity_defect(sig, s, t) == 0


def test_freeness_fails_only_when_n_divides():
    sig = quotient_sofic(Z, (4,), 4)
    assert freeness_defect(sig, Z.element((0,)), Z.element((4,))) == 1
    assert freeness_defect(sig, Z.element((0,)), Z.element((2,))) == 0


def test_dump_load_roundtrip():
    sig = quotient_sofic(Z2, (3, 2), 1)
    again = load_sofic(dump_sofic(sig), Z2)
    assert again.fingerprint() == sig.fingerprint()


def test_load_rejects_bad_files():
    with pytest.raises(ParseError):
        load_sofic("nope", Z)
    with pytest.raises(ParseError):
        load_sofic("d=3\n0: 1 2 3\n1: 1 1 2\n-1: 3 1 2\n", Z)


def test_support_and_size_errors():
    sig = quotient_sofic(Z, (5,), 1)
    with pytest.raises(SupportError):
        sig.perm(Z.element((2,)))
    with pytest.raises(SoficOverflow):
        quotient_sofic(Z2, (2000, 2000), 1)


def test_hamming():
    assert hamming([0, 1, 2, 3], [1, 0, 2, 3]) == Fraction(1, 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 40), st.integers(0, 5), st.integers(0, 10 ** 6))
def test_perturbation_moves_at_most_m_points(N, m, seed):
    m = min(m, N)
    sig = quotient_sofic(Z, (N,), 1)
    p = perturb(sig, m, seed)
    for s in sig.support():
        moved = int(np.count_nonzero(p.perm(s) != sig.perm(s)))
        assert moved <= m
    assert np.array_equal(p.perm(Z.identity()), np.arange(N))
