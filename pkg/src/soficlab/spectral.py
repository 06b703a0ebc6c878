"""Fuglede-Kadison determinants of ZG elements through finite quotients of Z^r.

Over Z^r / N Z^r, f acts by convolution as an integer d x d matrix.
The per-level value (1/d) log |det| converges to log det_LG f.  Up to
``exact_cap`` the determinant is an exact integer (fraction-free
elimination); beyond it numpy's LU log-determinant is used together with a
condition estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .actions import algebraic_action
from .entropy import EntropySchedule, FamilyPolicy, estimate, level_value
from .groups import LATTICE, residue_index, residues
from .ring import GroupRingElement, format_ring, l1_inverse
from .sofic import quotient_sofic

EXACT_CAP = 512


def _moduli(N, rank: int) -> tuple[int, ...]:
    if isinstance(N, int):
        return (N,) * rank
    N = tuple(int(m) for m in N)
    if len(N) != rank:
        raise ValueError(f"quotient of rank {len(N)} does not match the lattice rank {rank}")
    return N


def quotient_matrix(f: GroupRingElement, N) -> list[list[int]]:
    """Entry (a, b) = sum of f_s over s with s + a = b mod N (rows are row-major residues)."""
    spec = f.spec
    if spec.kind != LATTICE:
        raise ValueError("quotient matrices are defined for integer lattices")
    mods = _moduli(N, spec.rank)
    res = list(residues(mods))
    d = len(res)
    M = [[0] * d for _ in range(d)]
    for g, c in f.items():
        if Fraction(c).denominator != 1:
            raise ValueError("quotient matrices need integer coefficients")
        for a, r in enumerate(res):
            b = residue_index(tuple(x + y for x, y in zip(g.word, r)), mods)
            M[a][b] += int(c)
    return M


def bareiss_det(M: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free Gaussian elimination with row pivoting."""
    n = len(M)
    if n == 0:
        return 1
    A = np.array([[int(x) for x in row] for row in M], dtype=object)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k, k] == 0:
            nz = [i for i in range(k + 1, n) if A[i, k] != 0]
            if not nz:
                return 0
            i = nz[0]
            A[[k, i]] = A[[i, k]]
            sign = -sign
        piv = A[k, k]
        sub = A[k + 1:, k + 1:] * piv - np.outer(A[k + 1:, k], A[k, k + 1:])
        # every entry is divisible by the previous pivot
        A[k + 1:, k + 1:] = np.array([[x // prev for x in row] for row in sub], dtype=object) \
            if prev != 1 else sub
        A[k + 1:, k] = 0
        prev = piv
    return sign * int(A[n - 1, n - 1])


@dataclass(frozen=True)
class DetLevel:
    moduli: tuple[int, ...]
    d: int
    log_abs_det: float
    value: float
    exact: bool
    singular: bool
    det: int | None = None
    condition: float | None = None

    def as_dict(self) -> dict:
        return {"moduli": list(self.moduli), "d": self.d,
                "log_abs_det": None if self.singular else self.log_abs_det,
                "value": None if self.singular else self.value, "exact": self.exact,
                "singular": self.singular, "det": None if self.det is None else str(self.det),
                "condition": self.condition}


@dataclass
class DetReport:
    f: str
    levels: list[DetLevel]
    estimate: float
    spread: float
    last_k: int

    def as_dict(self) -> dict:
        return {"schema": "soficlab.det/1", "f": self.f, "levels": [lv.as_dict() for lv in self.levels],
                "estimate": self.estimate, "spread": self.spread, "last_k": self.last_k}


def det_level(f: GroupRingElement, N, exact_cap: int = EXACT_CAP) -> DetLevel:
    mods = _moduli(N, f.spec.rank)
    M = quotient_matrix(f, mods)
    d = len(M)
    if d <= exact_cap:
        det = bareiss_det(M)
        if det == 0:
            return DetLevel(mods, d, float("-inf"), float("-inf"), True, True, 0)
        a = abs(det)
        return DetLevel(mods, d, math.log(a), level_value(a, d), True, False, det)
    arr = np.array(M, dtype=float)
    sign, logdet = np.linalg.slogdet(arr)
    cond = float(np.linalg.cond(arr))
    if sign == 0 or not math.isfinite(logdet) or cond > 1e14:
        return DetLevel(mods, d, float("-inf"), float("-inf"), False, True, None, cond)
    return DetLevel(mods, d, float(logdet), float(logdet) / d, False, False, None, cond)


def fk_det_estimate(f: GroupRingElement, moduli: Sequence, exact_cap: int = EXACT_CAP,
                    last_k: int = 3) -> DetReport:
    """Per-level (1/d) log|det| and the mean of the last ``last_k`` nonsingular levels."""
    if f.is_zero():
        raise ValueError("f must be nonzero")
    levels = [det_level(f, N, exact_cap) for N in moduli]
    good = [lv.value for lv in levels if not lv.singular]
    if not good:
        raise ArithmeticError("every finite level is singular")
    tail = good[-last_k:]
    return DetReport(format_ring(f), levels, float(np.mean(tail)), float(max(tail) - min(tail)), last_k)


@dataclass
class DeningerReport:
    verdict: str
    estimate: float
    margin: float
    integer_inverse: bool
    inverse_support: int
    max_fraction_distance: float
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "log_det_estimate": self.estimate, "margin": self.margin,
                "integer_inverse": self.integer_inverse, "inverse_support": self.inverse_support,
                "max_fraction_distance": self.max_fraction_distance, "notes": self.notes}


CONSISTENT = "det-exceeds-one"
UNIT = "unit-detected"
INCONCLUSIVE = "inconclusive"


def deninger_check(f: GroupRingElement, moduli: Sequence, tol: float = 1e-9, margin: float = 1e-6,
                   exact_cap: int = EXACT_CAP) -> DeningerReport:
    """Is det f > 1 for an l^1-invertible f with no integer inverse?

    Raises NeumannConditionFailed or ResidualCheckFailed when l^1
    invertibility cannot be certified.  Integrality of the inverse is only
    screened numerically: an all-integer truncated inverse is reported as
    evidence of a unit, never as a proof.
    """
    inv = l1_inverse(f, tol)
    coeffs = [float(c) for _, c in inv.items() if abs(float(c)) > 10 * tol]
    dist = max((abs(c - round(c)) for c in coeffs), default=0.0)
    integer = dist <= 10 * tol + inv.tail
    rep = fk_det_estimate(f, moduli, exact_cap)
    notes = []
    if integer:
        verdict = UNIT
        notes.append("truncated inverse has integer coefficients; f looks like a unit of ZG")
    elif rep.estimate > margin:
        verdict = CONSISTENT
    else:
        verdict = INCONCLUSIVE
        notes.append("no integer inverse seen, but the determinant estimate does not clear the margin")
    return DeningerReport(verdict, rep.estimate, rep.estimate - margin, integer, len(coeffs), dist, notes)


@dataclass
class DetEntropyReport:
    det: DetReport
    rows: list[dict]
    lower_bound: float
    tolerance: float
    consistent: bool
    match: bool

    def as_dict(self) -> dict:
        return {"schema": "soficlab.det-entropy/1", "det": self.det.as_dict(), "rows": self.rows,
                "entropy_lower_bound": self.lower_bound, "tolerance": self.tolerance,
                "consistent": self.consistent, "match": self.match,
                "note": "one-sided check: the entropy side is a lower bound only"}


def det_vs_entropy(f: GroupRingElement, moduli: Sequence[int], epsilon: float = 0.25, delta: float = 0.5,
                   tolerance: float = 1e-9, samples: int | None = None, seed: int = 0,
                   budget: int = 10 ** 6, schedule: EntropySchedule | None = None) -> DetEntropyReport:
    """Compare per-level entropy lower bounds from L-point families with the determinant.

    Over Z the default schedule uses quotient levels Z/N for the given moduli,
    F = {-1, 0, 1} and binary digits.  ``consistent`` asserts
    lower bound <= det estimate + tolerance; ``match`` additionally asks the
    two to agree within the tolerance.  Both comparisons are made level by
    level; the last level's lower bound is also held against the aggregated
    estimate widened by its spread.
    """
    det = fk_det_estimate(f, moduli)
    if schedule is None:
        spec = f.spec
        act = algebraic_action(f)
        levels = [quotient_sofic(spec, _moduli(N, spec.rank), act.radius + 2) for N in moduli]
        F = spec.ball(1)
        schedule = EntropySchedule(act, levels, [F], [delta], [epsilon],
                                   FamilyPolicy("algebraic", budget, (0, 1), samples, seed, 1))
    ent = estimate(schedule)
    by_d: dict[int, float] = {}
    for c in ent.cells:
        if c.status == "ok":
            by_d[c.d] = max(by_d.get(c.d, float("-inf")), c.value)
    rows = []
    consistent, match = True, True
    for lv in det.levels:
        low = by_d.get(lv.d)
        row = {"d": lv.d, "det_value": None if lv.singular else lv.value, "entropy_lower": low}
        if low is not None and not lv.singular:
            row["ok"] = low <= lv.value + tolerance
            consistent &= row["ok"]
            match &= abs(low - lv.value) <= tolerance
        rows.append(row)
    lower = by_d[max(by_d)] if by_d else float("-inf")
    consistent = consistent and lower <= det.estimate + tolerance + det.spread
    match = consistent and match
    return DetEntropyReport(det, rows, lower, tolerance, consistent, match)
