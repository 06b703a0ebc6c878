from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Z
from soficlab.actions import (Cylinder, FullShift, MetricBall, PointPattern, SetTuple, algebraic_action,
                              cylinder, golden_mean, identity_cylinders)
from soficlab.errors import CapExceeded
from soficlab.independence import (algebraic_independence_set, check_independence, clopper_pearson_upper,
                                   decomposition_split, independence_density, is_independence_set, km_extract,
                                   li_yorke_scan, lpoint_from_z, product_density_check, shattered,
                                   sofic_independence_check, validate_split)
from soficlab.microstates import fullshift_microstate
from soficlab.ring import parse_ring
from soficlab.sofic import quotient_sofic


def E(*vals):
    return [Z.element((v,)) for v in vals]


def test_golden_mean_independence_sets():
    X, A = golden_mean(), identity_cylinders(Z, 2)
    assert is_independence_set(E(0, 1), A, X) is False
    assert is_independence_set(E(0, 2), A, X) is True
    assert is_independence_set([], A, X) is True
    v = check_independence(E(0, 1), A, X)
    assert v.failing == (1, 1)


def test_golden_mean_density_is_one_half():
    res = independence_density(E(*range(10)), identity_cylinders(Z, 2), golden_mean())
    assert res.q == Fraction(1, 2) and len(res.J) == 5 and res.exact and res.certified


def test_greedy_density_is_a_lower_bound():
    res = independence_density(E(*range(10)), identity_cylinders(Z, 2), golden_mean(), mode="greedy")
    assert not res.exact and res.q <= Fraction(1, 2)


def test_density_cap():
    with pytest.raises(CapExceeded):
        independence_density(E(*range(30)), identity_cylinders(Z, 2), golden_mean())


def test_product_density_certificate():
    A = identity_cylinders(Z, 2)
    rep = product_density_check(E(*range(8)), A, golden_mean(), A, golden_mean())
    assert rep.q == Fraction(1, 2) and rep.r == 1
    assert rep.inequality_holds and rep.product_valid is True


def test_full_shift_sofic_independence_exhaustive():
    sig = quotient_sofic(Z, (8,), 1)
    A = identity_cylinders(Z, 2)
    rep = sofic_independence_check(range(8), A, E(1, -1), 0.1, sig, FullShift(2))
    assert rep.holds and rep.patterns_checked == 256


def test_sofic_check_reports_failures():
    sig = quotient_sofic(Z, (6,), 1)
    A = SetTuple((cylinder(Z, None, 0), Cylinder(Z, (((0,), frozenset({0})), ((1,), frozenset({1}))))))
    # pattern (1, 1) on {0, 1} needs phi(0)_1 = 1 and phi(1)_0 = 0, the same coordinate omega(1)
    rep = sofic_independence_check([0, 1], A, E(1, -1), 0.1, sig, FullShift(2))
    assert not rep.holds and rep.first_failure is not None


def test_clopper_pearson():
    assert clopper_pearson_upper(0, 100) == pytest.approx(1 - 0.05 ** (1 / 100))
    assert clopper_pearson_upper(5, 5) == 1.0


def test_algebraic_construction_small():
    act = algebraic_action(parse_ring("2-t", Z))
    centers = [lpoint_from_z({(0,): (v,)}, act, act.radius + 2) for v in (0, 1)]
    U = SetTuple(tuple(MetricBall(c, 0.1, act) for c in centers))
    sig = quotient_sofic(Z, (16,), act.radius + 4)
    cert = algebraic_independence_set(act, Z.ball(1), sig, U, E(1, -1), 0.1)
    assert len(cert.J) >= cert.bound
    assert cert.all_valid and cert.patterns_checked == 2 ** len(cert.J)


def test_km_worked_example():
    S = [(1, 1, 1), (1, 1, 2), (1, 2, 1), (1, 2, 2), (2, 2, 2)]
    assert km_extract(S, 2).I == (1, 2)


def _brute_km(rows, n, k):
    alphabet = tuple(range(1, k + 1))
    for m in range(n, 0, -1):
        if any(shattered(rows, I, alphabet) for I in itertools.combinations(range(n), m)):
            return m
    return 0


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 8), st.integers(2, 3), st.integers(1, 40), st.integers(0, 10 ** 6))
def test_km_matches_brute_force(n, k, m, seed):
    rng = random.Random(seed)
    rows = [tuple(rng.randint(1, k) for _ in range(n)) for _ in range(m)]
    res = km_extract(rows, k)
    assert len(res.I) == _brute_km(rows, n, k)
    assert shattered(rows, res.I, tuple(range(1, k + 1))) or not res.I
    assert km_extract(rows, k, mode="greedy").I.__len__() <= len(res.I)


def _split_case(seed: int):
    rng = random.Random(seed)
    d = rng.randint(3, 6)
    sig = quotient_sofic(Z, (d,), 1)
    X = FullShift(3)
    A = SetTuple((Cylinder(Z, (((0,), frozenset({0, 1})),)), cylinder(Z, None, 2)))
    parts = (cylinder(Z, None, 0), cylinder(Z, None, 1))
    J = sorted(rng.sample(range(d), rng.randint(1, min(d, 4))))
    witnesses = {}
    for omega in itertools.product(range(2), repeat=len(J)):
        w = [rng.randint(0, 2) for _ in range(d)]
        for a, j in zip(J, omega):
            w[a] = rng.randint(0, 1) if j == 0 else 2
        witnesses[omega] = fullshift_microstate(w, sig, 1, X)
    return J, A, parts, witnesses


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_decomposition_split_is_valid(seed):
    J, A, parts, witnesses = _split_case(seed)
    res = decomposition_split(J, A, parts, witnesses)
    assert set(res.I) <= set(J)
    assert max(res.sizes) == len(res.I)
    F = [Z.element((1,))]
    assert validate_split(res, A, parts, witnesses, J, F, 2.0)


def test_li_yorke_scan():
    spec = Z
    x = PointPattern(spec, 4, {(u,): int(abs(u) % 2) for u in range(-4, 5)})
    y = PointPattern(spec, 4, {(u,): 0 for u in range(-4, 5)})
    rep = li_yorke_scan(x, y, 4, 1.0, 0.0, FullShift(2))
    assert [row["sup"] for row in rep.annuli] == [0.0, 1.0, 0.0, 1.0, 0.0]
    assert rep.evidence(1.0, 0.0) is False  # the last tail r=3 only sees the sphere of radius 4
    assert rep.annuli[1]["witness_high"] == "(-1)"
