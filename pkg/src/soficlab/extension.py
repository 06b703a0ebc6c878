"""Does a finite set of coordinate constraints extend to a point of the shift?

Full shifts: trivially, iff every constrained coordinate has an allowed symbol.
SFTs over Z: exactly, via the graph of allowed blocks restricted to its
essential part (blocks lying on a bi-infinite path).  SFTs over a finite
group: exactly, by backtracking over the whole group.  SFTs over other
groups: by backtracking on a window around the constraints; a failure there
is a proof of emptiness, a success is only window evidence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .actions import SFT, ActionSpec, Cylinder, FullShift, ProductAction
from .errors import BudgetExceeded
from .groups import LATTICE, QUOTIENT, ball_payloads

Payload = tuple[int, ...]

MAX_BLOCKS = 1 << 18


@dataclass(frozen=True)
class Extension:
    """Tri-state answer: ``exists`` is True/False, or None when the budget ran out."""

    exists: bool | None
    certified: bool
    method: str

    def __bool__(self) -> bool:
        return bool(self.exists)


def extends(action: ActionSpec, cyl: Cylinder, margin: int = 2, node_budget: int = 200_000) -> Extension:
    """Is the cylinder set nonempty inside X?"""
    if isinstance(action, FullShift):
        ok = all(syms & set(range(action.k)) for _, syms in cyl.allowed)
        return Extension(ok, True, "fullshift")
    if isinstance(action, ProductAction):
        return _extends_product(action, cyl, margin, node_budget)
    if isinstance(action, SFT):
        cons = {p: frozenset(s for s in syms if 0 <= s < action.k) for p, syms in cyl.allowed}
        if any(not s for s in cons.values()):
            return Extension(False, True, "empty-constraint")
        spec = action.spec
        if spec.kind == LATTICE and spec.rank == 1 and _block_graph_size(action) <= MAX_BLOCKS:
            return Extension(_extends_z(action, cons), True, "block-graph")
        if spec.kind == QUOTIENT:
            return _backtrack(action, cons, [g.word for g in spec.elements()], node_budget, certified=True)
        window = _window(action, cons, margin)
        res = _backtrack(action, cons, window, node_budget, certified=False)
        if res.exists is False:
            return Extension(False, True, res.method)
        return res
    raise TypeError("orbit independence is decided only for symbolic actions")


def _extends_product(action: ProductAction, cyl: Cylinder, margin: int, budget: int) -> Extension:
    left, right = [], []
    for p, syms in cyl.allowed:
        L = frozenset(a for a, _ in syms)
        R = frozenset(b for _, b in syms)
        if set(syms) != {(a, b) for a in L for b in R}:
            raise ValueError("product constraints must be rectangles L x R")
        left.append((p, L))
        right.append((p, R))
    a = extends(action.left, Cylinder(cyl.spec, tuple(left)), margin, budget)
    b = extends(action.right, Cylinder(cyl.spec, tuple(right)), margin, budget)
    if a.exists is False or b.exists is False:
        return Extension(False, True, "product")
    if a.exists is None or b.exists is None:
        return Extension(None, False, "product")
    return Extension(True, a.certified and b.certified, "product")


# -- Z: essential block graph --------------------------------------------------------------

def _span(action: SFT) -> tuple[int, int]:
    lo = min(o[0] for pat in action.forbidden for o, _ in pat.cells)
    hi = max(o[0] for pat in action.forbidden for o, _ in pat.cells)
    return lo, hi


def _block_graph_size(action: SFT) -> int:
    lo, hi = _span(action)
    return action.k ** max(2, hi - lo + 1)


@lru_cache(maxsize=64)
def essential_blocks(action: SFT) -> tuple[int, frozenset]:
    """(L, essential allowed blocks of length L) for an SFT over Z."""
    L = max(2, max(max(o[0] for o, _ in p.cells) - min(o[0] for o, _ in p.cells) + 1
                   for p in action.forbidden))
    rel = []
    for pat in action.forbidden:
        base = min(o[0] for o, _ in pat.cells)
        rel.append([(o[0] - base, s) for o, s in pat.cells])
    blocks = set()
    for w in itertools.product(range(action.k), repeat=L):
        bad = False
        for cells in rel:
            width = max(o for o, _ in cells) + 1
            for start in range(L - width + 1):
                if all(w[start + o] == s for o, s in cells):
                    bad = True
                    break
            if bad:
                break
        if not bad:
            blocks.add(w)
    changed = True
    while changed:
        changed = False
        heads = {b[:-1] for b in blocks}
        tails = {b[1:] for b in blocks}
        keep = {b for b in blocks if b[1:] in heads and b[:-1] in tails}
        if keep != blocks:
            blocks, changed = keep, True
    return L, frozenset(blocks)


def _extends_z(action: SFT, cons: Mapping[Payload, frozenset]) -> bool:
    L, blocks = essential_blocks(action)
    if not blocks:
        return False
    if not cons:
        return True
    pos = {p[0]: s for p, s in cons.items()}
    lo, hi = min(pos), max(pos)

    def fits(block, start):
        return all(block[j] in pos[start + j] for j in range(L) if start + j in pos)

    live = {b for b in blocks if fits(b, lo)}
    for start in range(lo + 1, hi + 1):
        nxt_heads = {b[1:] for b in live}
        live = {b for b in blocks if b[:-1] in nxt_heads and fits(b, start)}
        if not live:
            return False
    return bool(live)


# -- backtracking on a window ------------------------------------------------------------------

def _window(action: SFT, cons: Mapping[Payload, frozenset], margin: int) -> list[Payload]:
    spec = action.spec
    ball = ball_payloads(spec, margin)
    seen = set()
    out = []
    for p in sorted(cons) or [spec.identity_payload()]:
        for b in ball:
            q = spec.mul_payload(p, b)
            if q not in seen:
                seen.add(q)
                out.append(q)
    return out


def _backtrack(action: SFT, cons: Mapping[Payload, frozenset], window: list[Payload], budget: int,
               certified: bool) -> Extension:
    spec = action.spec
    wset = set(window)
    # every placement g of every pattern lying fully inside the window, indexed by its cells
    watch: dict[Payload, list[tuple]] = {p: [] for p in window}
    for pat in action.forbidden:
        for g in pat.placements(window):
            cells = tuple((spec.mul_payload(g, o), s) for o, s in pat.cells)
            if all(c in wset for c, _ in cells):
                for c, _ in cells:
                    watch[c].append(cells)
    order = sorted(window, key=lambda p: (p not in cons, len(cons.get(p, ())) or action.k))
    values: dict[Payload, int] = {}
    nodes = 0

    def ok(p) -> bool:
        for cells in watch[p]:
            if all(values.get(c) == s for c, s in cells):
                return False
        return True

    def rec(i: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("window backtracking budget exhausted")
        if i == len(order):
            return True
        p = order[i]
        for s in sorted(cons.get(p, range(action.k))):
            values[p] = s
            if ok(p) and rec(i + 1):
                return True
            del values[p]
        return False

    try:
        found = rec(0)
    except BudgetExceeded:
        return Extension(None, False, "window-backtrack")
    return Extension(found, certified, "exhaustive" if certified else "window-backtrack")
