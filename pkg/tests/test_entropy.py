from __future__ import annotations

import math

import pytest

from conftest import Z
from soficlab.actions import FullShift, algebraic_action, golden_mean, product_action
from soficlab.entropy import (NEG_INF, EntropyCell, EntropySchedule, FamilyPolicy, estimate, level_value,
                              monotonicity_violations)
from soficlab.ring import parse_ring
from soficlab.sofic import quotient_sofic


def levels(Ns, radius=1):
    return [quotient_sofic(Z, (N,), radius) for N in Ns]


def test_level_value_recognizes_perfect_powers():
    assert level_value(2 ** 10, 10) == math.log(2)
    assert level_value(6 ** 40, 40) == math.log(6)
    assert level_value(0, 5) == NEG_INF
    assert level_value(2 ** 2000, 2000) == math.log(2)


def test_full_shift_levels():
    sched = EntropySchedule(FullShift(2), levels([4, 5, 6]), [Z.ball(1)], [0.5], [0.5])
    rep = estimate(sched)
    assert rep.values() == [math.log(2)] * 3
    assert rep.upper_bound == math.log(2)
    assert not rep.partial


def test_delta_zero_gives_empty_families():
    sched = EntropySchedule(FullShift(2), levels([4]), [Z.ball(1)], [0.0], [0.5])
    assert estimate(sched).values() == [NEG_INF]
    agg = estimate(sched).aggregate()[0]
    assert agg["max"] == "-inf"


def test_golden_mean_counts_cyclic_words():
    # admissible phi_omega on Z/N are the cyclic golden words: Lucas numbers
    sched = EntropySchedule(golden_mean(), levels([5, 6]), [Z.ball(1)], [0.5], [0.5])
    rep = estimate(sched)
    assert [c.count for c in rep.cells] == [11, 18]


def test_product_additivity():
    X = product_action(FullShift(2), FullShift(3))
    rep = estimate(EntropySchedule(X, levels([4, 5]), [Z.ball(1)], [0.5], [0.5]))
    assert rep.values() == [math.log(6)] * 2


def test_algebraic_policy_for_constant_two():
    act = algebraic_action(parse_ring("2", Z))
    sched = EntropySchedule(act, levels([4, 6], 2), [Z.ball(1)], [0.5], [0.25],
                            FamilyPolicy("algebraic", radius=1))
    rep = estimate(sched)
    assert rep.values() == [math.log(2)] * 2
    assert rep.lower_bound_only


def test_budget_overflow_is_partial():
    sched = EntropySchedule(FullShift(3), levels([12]), [Z.ball(1)], [0.5], [0.5], FamilyPolicy(budget=1000))
    rep = estimate(sched)
    assert rep.partial and rep.cells[0].status.startswith("budget")


@pytest.mark.parametrize("bad", [
    dict(deltas=[0.1, 0.5]),
    dict(epsilons=[]),
    dict(F_chain=[Z.ball(1), Z.ball(1)]),
    dict(levels=[]),
])
def test_schedule_validation(bad):
    kw = dict(action=FullShift(2), levels=levels([4]), F_chain=[Z.ball(1)], deltas=[0.5], epsilons=[0.5])
    kw.update(bad)
    with pytest.raises(ValueError):
        EntropySchedule(**kw).validate()


def test_monotonicity_checker_flags_drops():
    F = ("(0)",)
    cells = [EntropyCell(4, F, 0.1, 0.5, 1, 1, 4, "exact", 0.5), EntropyCell(4, F, 0.5, 0.5, 1, 1, 2, "exact", 0.2)]
    assert monotonicity_violations(cells)


def test_report_json_shape():
    rep = estimate(EntropySchedule(FullShift(2), levels([4]), [Z.ball(1)], [0.5], [0.5]))
    d = rep.as_dict()
    assert d["schema"] == "soficlab.entropy/1"
    assert d["cells"][0]["value_log2"] == 1.0
