"""Per-level sofic entropy estimates (1/d) log N_eps over grids of (F, delta, eps)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .actions import ActionSpec, Algebraic
from .errors import BudgetExceeded, CapExceeded, WindowExhausted
from .groups import GroupElement, format_element
from .microstates import INF, AlgebraicFamily, FullShiftFamily, separated_count
from .sofic import SoficMap

NEG_INF = float("-inf")


@dataclass(frozen=True)
class FamilyPolicy:
    """Which constructed microstates to enumerate at each level.

    ``kind`` is "fullshift" (all phi_omega) or "algebraic" (L-point
    microstates over ``digits``).  ``samples`` switches the algebraic family
    to a seeded random subset.
    """

    kind: str = "fullshift"
    budget: int = 10 ** 6
    digits: tuple[int, ...] = (0, 1)
    samples: int | None = None
    seed: int = 0
    radius: int = 1


@dataclass
class EntropySchedule:
    action: ActionSpec
    levels: Sequence[SoficMap]
    F_chain: Sequence[Sequence[GroupElement]]
    deltas: Sequence[float]
    epsilons: Sequence[float]
    policy: FamilyPolicy = field(default_factory=FamilyPolicy)
    metric: str = INF
    mode: str = "exact"

    def validate(self) -> None:
        if not self.levels:
            raise ValueError("schedule needs at least one level")
        ds = [s.d for s in self.levels]
        if any(b <= a for a, b in zip(ds, ds[1:])):
            raise ValueError("level sizes must be strictly increasing")
        for name, grid in (("delta", self.deltas), ("epsilon", self.epsilons)):
            if not grid:
                raise ValueError(f"empty {name} grid")
            if any(b >= a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} grid must be strictly decreasing")
        if any(e <= 0 for e in self.epsilons) or any(x < 0 for x in self.deltas):
            raise ValueError("epsilon must be positive and delta nonnegative")
        sizes = [len(set(F)) for F in self.F_chain]
        if not sizes:
            raise ValueError("empty F chain")
        for a, b in zip(self.F_chain, self.F_chain[1:]):
            if not set(a) < set(b):
                raise ValueError("F chain must be strictly increasing")
        for sig in self.levels:
            for s in self.F_chain[-1]:
                if s not in sig:
                    raise ValueError(f"{format_element(s)} lies outside the support at d={sig.d}")
        if self.policy.kind not in ("fullshift", "algebraic"):
            raise ValueError(f"unknown family kind {self.policy.kind!r}")
        if self.policy.budget <= 0:
            raise ValueError("budget must be positive")


@dataclass
class EntropyCell:
    d: int
    F: tuple[str, ...]
    delta: float
    epsilon: float
    family_size: int
    members: int
    count: int
    bound: str
    value: float
    status: str = "ok"

    def as_dict(self) -> dict:
        return {"d": self.d, "F": list(self.F), "delta": self.delta, "epsilon": self.epsilon,
                "family_size": self.family_size, "members": self.members, "count": self.count,
                "bound": self.bound, "value": _num(self.value), "value_log2": _num(self.value / math.log(2)),
                "status": self.status}


def _num(v: float):
    return v if math.isfinite(v) else ("-inf" if v < 0 else "inf")


def level_value(count: int, d: int) -> float:
    """(1/d) log count; exact log r when count = r^d, and -inf for an empty family."""
    if count <= 0:
        return NEG_INF
    v = math.log(count) / d
    r = round(math.exp(v))
    for cand in (r - 1, r, r + 1):
        if cand >= 1 and cand ** d == count:
            return math.log(cand)
    return v


@dataclass
class EntropyReport:
    cells: list[EntropyCell]
    upper_bound: float | None
    lower_bound_only: bool
    partial: bool = False
    monotonicity_violations: list[str] = field(default_factory=list)

    def values(self, delta: float | None = None, epsilon: float | None = None) -> list[float]:
        return [c.value for c in self.cells
                if (delta is None or c.delta == delta) and (epsilon is None or c.epsilon == epsilon)]

    def aggregate(self) -> list[dict]:
        """max/min/last over levels for each (F, delta, eps); -inf if any level is empty."""
        groups: dict[tuple, list[EntropyCell]] = {}
        for c in self.cells:
            groups.setdefault((c.F, c.delta, c.epsilon), []).append(c)
        rows = []
        for (F, delta, eps), cs in groups.items():
            cs = sorted(cs, key=lambda c: c.d)
            vals = [c.value for c in cs]
            empty = any(v == NEG_INF for v in vals)
            rows.append({"F": list(F), "delta": delta, "epsilon": eps,
                         "max": _num(NEG_INF if empty else max(vals)),
                         "min": _num(min(vals)),
                         "last": _num(NEG_INF if empty else vals[-1]),
                         "exact": all(c.bound == "exact" for c in cs)})
        return rows

    def as_dict(self) -> dict:
        return {"schema": "soficlab.entropy/1",
                "cells": [c.as_dict() for c in self.cells],
                "aggregate": self.aggregate(),
                "upper_bound": self.upper_bound,
                "lower_bound_only": self.lower_bound_only,
                "partial": self.partial,
                "monotonicity_violations": self.monotonicity_violations,
                "empty_convention": "-inf"}


def _family(schedule: EntropySchedule, sigma: SoficMap):
    pol = schedule.policy
    if pol.kind == "fullshift":
        return FullShiftFamily(schedule.action, sigma, pol.radius, pol.budget)
    if not isinstance(schedule.action, Algebraic):
        raise ValueError("algebraic families need an algebraic action")
    return AlgebraicFamily(schedule.action, sigma, pol.digits, pol.radius, pol.budget, pol.samples, pol.seed)


def estimate(schedule: EntropySchedule) -> EntropyReport:
    """Run every grid cell; budget failures produce flagged partial cells."""
    schedule.validate()
    cells: list[EntropyCell] = []
    partial = False
    F_all = sorted(set(schedule.F_chain[-1]), key=GroupElement.sort_key)
    for sigma in schedule.levels:
        try:
            fam = _family(schedule, sigma)
            coords = fam.coordinates()
            defects = fam.defects(F_all) if F_all else np.zeros((fam.size, 0))
            admissible = fam.admissible()
        except (BudgetExceeded, WindowExhausted) as exc:
            partial = True
            for F in schedule.F_chain:
                for delta in schedule.deltas:
                    for eps in schedule.epsilons:
                        cells.append(EntropyCell(sigma.d, _names(F), delta, eps, 0, 0, 0, "none",
                                                 float("nan"), f"budget: {exc}"))
            continue
        col = {s: j for j, s in enumerate(F_all)}
        for F in schedule.F_chain:
            idx = [col[s] for s in sorted(set(F), key=GroupElement.sort_key)]
            worst = defects[:, idx].max(axis=1) if idx else np.zeros(fam.size)
            for delta in schedule.deltas:
                mask = admissible & (worst < delta)
                members = int(mask.sum())
                for eps in schedule.epsilons:
                    if members == 0:
                        cells.append(EntropyCell(sigma.d, _names(F), delta, eps, fam.size, 0, 0, "exact", NEG_INF))
                        continue
                    try:
                        rep = separated_count(coords.subset(mask), eps, schedule.metric, schedule.mode,
                                              seed=schedule.policy.seed)
                    except CapExceeded as exc:
                        partial = True
                        cells.append(EntropyCell(sigma.d, _names(F), delta, eps, fam.size, members, 0, "none",
                                                 float("nan"), f"budget: {exc}"))
                        continue
                    bound = rep.bound if not getattr(fam, "sampled", False) else "sampled-lower"
                    cells.append(EntropyCell(sigma.d, _names(F), delta, eps, fam.size, members, rep.count,
                                             bound, level_value(rep.count, sigma.d)))
    report = EntropyReport(cells, schedule.action.upper_bound_log() if schedule.action.symbolic else None,
                           not schedule.action.symbolic, partial)
    report.monotonicity_violations = monotonicity_violations(cells)
    return report


def _names(F) -> tuple[str, ...]:
    return tuple(format_element(s) for s in sorted(set(F), key=GroupElement.sort_key))


def monotonicity_violations(cells: Sequence[EntropyCell]) -> list[str]:
    """Value must not drop as delta grows nor rise as eps grows (fixed level and F)."""
    out = []
    by_key: dict[tuple, dict[tuple[float, float], float]] = {}
    for c in cells:
        if c.status != "ok" or c.bound != "exact":
            continue
        by_key.setdefault((c.d, c.F), {})[(c.delta, c.epsilon)] = c.value
    for (d, F), table in by_key.items():
        deltas = sorted({k[0] for k in table})
        epss = sorted({k[1] for k in table})
        for e in epss:
            seq = [table[(x, e)] for x in deltas if (x, e) in table]
            if any(b < a for a, b in zip(seq, seq[1:])):
                out.append(f"d={d} F={','.join(F)} eps={e}: value decreases as delta grows")
        for x in deltas:
            seq = [table[(x, e)] for e in epss if (x, e) in table]
            if any(b > a for a, b in zip(seq, seq[1:])):
                out.append(f"d={d} F={','.join(F)} delta={x}: value increases as eps grows")
    return out
