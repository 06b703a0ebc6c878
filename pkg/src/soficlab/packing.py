"""Maximum independent sets of small conflict graphs (bitset branch and bound)."""

from __future__ import annotations

from typing import Sequence

from .errors import CapExceeded


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def components(adj: Sequence[int], mask: int) -> list[int]:
    out = []
    while mask:
        seed = mask & -mask
        comp, frontier = seed, seed
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= adj[v]
            nxt &= mask & ~comp
            comp |= nxt
            frontier = nxt
        out.append(comp)
        mask &= ~comp
    return out


def clique_cover_bound(adj: Sequence[int], cand: int) -> int:
    """Number of cliques in a greedy clique partition of ``cand`` (bounds the MIS)."""
    count = 0
    rem = cand
    while rem:
        v = (rem & -rem).bit_length() - 1
        clique = 1 << v
        common = adj[v] & rem
        while common:
            low = common & -common
            clique |= low
            common &= adj[low.bit_length() - 1]
        rem &= ~clique
        count += 1
    return count


def max_independent_set(adj: Sequence[int], node_budget: int = 2_000_000) -> list[int]:
    """Exact maximum independent set; ``adj[v]`` is the neighbour bitmask of v.

    Vertices of degree <= 1 are taken greedily (always safe), otherwise the
    search branches on a maximum-degree vertex.  Components are solved
    separately.  Raises CapExceeded when more than ``node_budget`` search
    nodes would be visited.
    """
    n = len(adj)
    full = (1 << n) - 1
    nodes = 0
    result: list[int] = []

    def solve(cand: int) -> int:
        best_mask = 0
        best_size = 0

        def rec(cand: int, chosen: int, size: int) -> None:
            nonlocal nodes, best_mask, best_size
            nodes += 1
            if nodes > node_budget:
                raise CapExceeded("maximum independent set search exceeded its node budget")
            while cand:
                pick = -1
                top, top_deg = -1, -1
                for v in _bits(cand):
                    deg = (adj[v] & cand).bit_count()
                    if deg <= 1:
                        pick = v
                        break
                    if deg > top_deg:
                        top, top_deg = v, deg
                if pick < 0:
                    break
                chosen |= 1 << pick
                size += 1
                cand &= ~((1 << pick) | adj[pick])
            if size + cand.bit_count() <= best_size:
                return
            if cand and size + clique_cover_bound(adj, cand) <= best_size:
                return
            if not cand:
                best_mask, best_size = chosen, size
                return
            rec(cand & ~((1 << top) | adj[top]), chosen | (1 << top), size + 1)
            rec(cand & ~(1 << top), chosen, size)

        rec(cand, 0, 0)
        return best_mask

    for comp in components(adj, full):
        result.extend(_bits(solve(comp)))
    return sorted(result)


def is_independent(adj: Sequence[int], vertices: Sequence[int]) -> bool:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return all(not (adj[v] & mask) for v in vertices)
