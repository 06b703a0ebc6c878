from __future__ import annotations

import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Z, Z2
from soficlab.actions import SFT, Cylinder, FullShift, Pattern, golden_mean, parse_sft, product_action
from soficlab.extension import essential_blocks, extends
from soficlab.groups import GroupSpec


def cyl(spec, cells):
    return Cylinder(spec, tuple((p, frozenset(s)) for p, s in cells))


def test_full_shift_always_extends_nonempty_constraints():
    assert extends(FullShift(2), cyl(Z, [((0,), {1}), ((3,), {0})])).exists
    assert not extends(FullShift(2), cyl(Z, [((0,), {5})])).exists


def test_golden_mean_pairs():
    X = golden_mean()
    assert not extends(X, cyl(Z, [((0,), {1}), ((1,), {1})])).exists
    assert extends(X, cyl(Z, [((0,), {1}), ((2,), {1})])).exists
    assert extends(X, cyl(Z, [((0,), {1}), ((2,), {1})])).certified


def test_essential_blocks_drop_dead_ends():
    # forbidding 00, 01 and 11 leaves only 10, which sits on no bi-infinite path
    X = parse_sft("0=0;1=0\n0=0;1=1\n0=1;1=1", Z)
    L, blocks = essential_blocks(X)
    assert blocks == frozenset()
    assert not extends(X, Cylinder(Z, ())).exists


def test_quotient_backtracking_is_exact():
    Q = GroupSpec.quotient((3,))
    # no 11 on Z/3: a 1 at two positions of a 3-cycle always touches
    X = SFT(2, (Pattern(Q, (((0,), 1), ((1,), 1))),), Q)
    res = extends(X, cyl(Q, [((0,), {1}), ((2,), {1})]))
    assert res.exists is False and res.certified


def test_window_search_on_z2():
    X = SFT(2, (Pattern(Z2, (((0, 0), 1), ((1, 0), 1))),), Z2)
    assert extends(X, cyl(Z2, [((0, 0), {1}), ((0, 1), {1})])).exists
    res = extends(X, cyl(Z2, [((0, 0), {1}), ((1, 0), {1})]))
    assert res.exists is False and res.certified


def test_product_extension_is_componentwise():
    X = product_action(golden_mean(), FullShift(2))
    c = cyl(Z, [((0,), {(1, 0), (1, 1)}), ((1,), {(1, 0), (1, 1)})])
    assert extends(X, c).exists is False


def _golden_brute(cons, lo, hi):
    """Any finite golden word on [lo-1, hi+1] fitting the constraints extends (pad with 0)."""
    for w in itertools.product((0, 1), repeat=hi - lo + 1):
        if any(w[i] == 1 and w[i + 1] == 1 for i in range(len(w) - 1)):
            continue
        if all(w[p - lo] in s for p, s in cons.items()):
            return True
    return False


@settings(max_examples=300, deadline=None)
@given(st.dictionaries(st.integers(-4, 4), st.sampled_from([frozenset({0}), frozenset({1}), frozenset({0, 1})]),
                       min_size=1, max_size=5))
def test_golden_block_graph_matches_brute_force(cons):
    c = Cylinder(Z, tuple(((p,), s) for p, s in cons.items()))
    lo, hi = min(cons), max(cons)
    assert extends(golden_mean(), c).exists == _golden_brute(cons, lo, hi)
