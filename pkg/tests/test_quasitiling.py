from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Z, Z2
from soficlab.errors import InvariantViolation, NotEvenCover, PreconditionViolation
from soficlab.groups import GroupSpec, format_element
from soficlab.quasitiling import (commutation_defect, commuting_bijection, density_select, even_cover_check,
                                  even_cover_refine, eta_disjoint_witness, matched_layers, matched_tiles,
                                  quasitile, right_translation, rf_mixing_check, tau_prime, tile,
                                  validate_tiles)
from soficlab.sofic import perturb, quotient_sofic


@settings(max_examples=300, deadline=None)
@given(st.integers(8, 40), st.integers(1, 3), st.floats(0.05, 0.95), st.integers(0, 10 ** 6))
def test_density_selection_bound_and_membership(N, r, lam, seed):
    sig = quotient_sofic(Z, (N,), r + 1)
    rng = random.Random(seed)
    F = Z.ball(r)
    B = rng.sample(range(N), rng.randint(0, N))
    J = rng.sample(range(N), rng.randint(0, N))
    sel = density_select(sig, F, B, J, lam)
    Jset = set(J)
    expect = [b for b in sorted(B) if sum(t in Jset for t in tile(sig, F, b)) > sel.lam * len(F)]
    assert list(sel.V) == expect
    assert len(sel.V) >= sel.bound


def test_density_selection_needs_injectivity():
    sig = quotient_sofic(Z, (4,), 3)
    with pytest.raises(PreconditionViolation):
        density_select(sig, Z.ball(3), range(4), range(4), 0.5)


@settings(max_examples=300, deadline=None)
@given(st.integers(5, 60), st.integers(1, 25), st.floats(0.05, 0.95), st.integers(0, 10 ** 6))
def test_even_cover_refine_covers_enough(d, n, eta, seed):
    rng = random.Random(seed)
    family = {i: frozenset(rng.sample(range(d), rng.randint(1, d))) for i in range(n)}
    counts = np.zeros(d, dtype=int)
    for A in family.values():
        counts[list(A)] += 1
    M = int(counts.max())
    delta = 1 - sum(len(A) for A in family.values()) / (M * d)
    ref = even_cover_refine(family, eta, delta + 1e-12, d)
    assert ref.cover >= eta * (1 - delta) - 1e-9
    for key in ref.order:
        assert len(ref.hats[key]) >= (1 - eta) * len(family[key])
    assert set().union(*ref.hats.values()) == ref.union
    assert eta_disjoint_witness([family[k] for k in ref.order], eta) is not None


def test_even_cover_check_rejects():
    family = {0: {0, 1}, 1: {0, 1}}
    with pytest.raises(NotEvenCover):
        even_cover_check(family, 4, 0.1)
    with pytest.raises(NotEvenCover):
        even_cover_check(family, 2, 0.0, multiplicity=1)
    assert even_cover_check({0: {0, 1}, 1: {2, 3}}, 4, 0.0) == 1


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(Z, (60,)), (Z, (41,)), (Z2, (9, 9)), (Z2, (12, 12))]),
       st.sampled_from([(1, 3), (1, 2), (2, 3), (0, 2)]), st.floats(0.05, 0.4), st.integers(0, 10 ** 6))
def test_quasitile_validates(level, radii, eta, seed):
    spec, mods = level
    sig = quotient_sofic(spec, mods, max(radii) * 2 + 2)
    rng = random.Random(seed)
    V = [v for v in range(sig.d) if rng.random() < 0.95]
    tau = 1 - len(V) / sig.d
    ts = quasitile(sig, [spec.ball(r) for r in radii], V, eta, tau)
    val = validate_tiles(ts, sig, V)
    assert val.ok
    assert 0 < ts.cover <= 1


def test_quasitile_cover_on_cyclic_group():
    sig = quotient_sofic(Z, (60,), 8)
    ts = quasitile(sig, [Z.ball(1), Z.ball(3)], range(60), 0.1)
    assert validate_tiles(ts, sig).ok and ts.cover > 0.9


def test_quasitile_rejects_unnested():
    sig = quotient_sofic(Z, (20,), 4)
    with pytest.raises(PreconditionViolation):
        quasitile(sig, [Z.ball(2), [Z.element((5,))]], range(20), 0.1)


def test_quasitile_reference_gap():
    sig = quotient_sofic(Z, (60,), 8)
    with pytest.raises(InvariantViolation):
        quasitile(sig, [Z.ball(1), Z.ball(3)], range(60), 0.1, reference=[1.0, 1.0], delta=0.1)


@settings(max_examples=60, deadline=None)
@given(st.integers(80, 200), st.integers(0, 10 ** 6))
def test_matched_tiles_conclusions(N, seed):
    sig = quotient_sofic(Z, (N,), 6)
    rng = random.Random(seed)
    J1 = rng.sample(range(N), (N + 1) // 2)
    J2 = rng.sample(range(N), (N + 1) // 2)
    mt = matched_tiles(sig, Z.ball(4), range(N), range(N), J1, J2, 0.5, 0.1)
    c = mt.checks
    assert c["eta_disjoint_1"] and c["eta_disjoint_2"] and c["bijection_ok"] and c["in_B"]
    assert c["joint_ok"] and c["cover_ok"] and not mt.partial
    assert sorted(mt.phi) == sorted(mt.C1) and sorted(mt.phi.values()) == sorted(mt.C2)


def test_matched_tiles_preconditions():
    sig = quotient_sofic(Z, (40,), 4)
    with pytest.raises(PreconditionViolation):
        matched_tiles(sig, Z.ball(2), range(5), range(40), range(40), range(40), 0.5, 0.1)


def test_matched_layers_trim():
    sig = quotient_sofic(Z, (200,), 12)
    rng = random.Random(1)
    Y, W = rng.sample(range(200), 100), rng.sample(range(200), 100)
    lay = matched_layers(sig, [Z.ball(2), Z.ball(5)], range(200), Y, W, 0.5, 0.1, keep_fraction=0.1)
    assert any(lay.C1)
    assert [len(a) for a in lay.C1] == [len(b) for b in lay.C2]
    assert len(lay.union1) <= 0.1 * 200 + 11


def test_tau_prime_below_one():
    for tau in (0.1, 0.25, 0.5, 0.9):
        assert tau_prime(tau) < 1


@pytest.mark.parametrize("seed", range(10))
def test_commuting_bijection(seed):
    N = 240
    sig = quotient_sofic(Z, (N,), 22)
    rng = random.Random(seed)
    Y, W = rng.sample(range(N), N // 2), rng.sample(range(N), N // 2)
    F = [Z.element((1,)), Z.element((-1,))]
    res = commuting_bijection(sig, Y, W, F, 0.2, [Z.ball(10)], [Z.ball(3), Z.ball(6)], 0.1, 0.25)
    assert res.ok
    assert sorted(res.phi.tolist()) == list(range(N))
    for s in F:
        assert res.defects[format_element(s)] == commutation_defect(res.phi, sig.perm(s))
    assert res.max_defect < Fraction(1, 5)
    assert res.overlap >= res.lam


def test_commutation_defect_identity():
    sig = quotient_sofic(Z, (10,), 2)
    assert commutation_defect(np.arange(10), sig.perm(Z.element((1,)))) == 0
    swap = np.arange(10)
    swap[[0, 1]] = [1, 0]
    assert commutation_defect(swap, sig.perm(Z.element((1,)))) > 0


def test_rf_mixing_example():
    rep = rf_mixing_check(right_translation(GroupSpec.quotient((10,))), range(5))
    assert rep.identity_holds and rep.achieved == 1 and rep.bound == Fraction(1, 2) and rep.ok


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from([(7,), (12,), (3, 4), (5, 5)]), st.integers(0, 10 ** 9))
def test_rf_mixing_identity(mods, seed):
    spec = GroupSpec.quotient(mods)
    table = right_translation(spec)
    n = len(spec.elements())
    rng = random.Random(seed)
    Y = [i for i in range(n) if rng.random() < rng.random()]
    rep = rf_mixing_check(table, Y)
    assert rep.identity_holds
    assert rep.achieved >= rep.bound


def test_perturbed_sigma_still_tiles():
    sig = perturb(quotient_sofic(Z, (60,), 8), 4, seed=2)
    ts = quasitile(sig, [Z.ball(1), Z.ball(3)], range(60), 0.2)
    assert validate_tiles(ts, sig).ok
