"""Groups with solvable word problem: Z^d, free groups, and finite quotients of Z^d.

Elements are stored as integer tuples ("payloads"):

* lattice ``Z^d``: the coordinate vector;
* quotient ``Z^d / N Z^d``: the residue vector, each entry in ``[0, N_i)``;
* free group ``F_r``: a reduced word, generator ``i`` written ``i`` and its
  inverse ``-i`` (``1 <= i <= r``).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import GroupMismatch, ParseError

LATTICE = "lattice"
FREE = "free"
QUOTIENT = "quotient"

# 'e' is reserved for the identity, so free generators skip it.
_LETTERS = "abcdfghijklmnopqrsuvwxyz"


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    rank: int
    moduli: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (LATTICE, FREE, QUOTIENT):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.kind == QUOTIENT:
            if len(self.moduli) != self.rank or any(m < 1 for m in self.moduli):
                raise ValueError("quotient needs one positive modulus per coordinate")
        elif self.moduli:
            raise ValueError("only quotients carry moduli")
        if self.kind == FREE and self.rank > len(_LETTERS):
            raise ValueError("free rank too large for the letter alphabet")

    @classmethod
    def lattice(cls, d: int) -> GroupSpec:
        return cls(LATTICE, d)

    @classmethod
    def free(cls, r: int) -> GroupSpec:
        return cls(FREE, r)

    @classmethod
    def quotient(cls, moduli: Iterable[int]) -> GroupSpec:
        moduli = tuple(int(m) for m in moduli)
        return cls(QUOTIENT, len(moduli), moduli)

    # -- payload arithmetic -------------------------------------------------
    def identity_payload(self) -> tuple[int, ...]:
        return () if self.kind == FREE else (0,) * self.rank

    def mul_payload(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        if self.kind == LATTICE:
            return tuple(x + y for x, y in zip(a, b))
        if self.kind == QUOTIENT:
            return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))
        i, n = 0, min(len(a), len(b))
        while i < n and a[-1 - i] == -b[i]:
            i += 1
        return a[: len(a) - i] + b[i:]

    def inv_payload(self, a: tuple[int, ...]) -> tuple[int, ...]:
        if self.kind == LATTICE:
            return tuple(-x for x in a)
        if self.kind == QUOTIENT:
            return tuple((-x) % m for x, m in zip(a, self.moduli))
        return tuple(-x for x in reversed(a))

    def length_payload(self, a: tuple[int, ...]) -> int:
        if self.kind == LATTICE:
            return sum(abs(x) for x in a)
        if self.kind == QUOTIENT:
            return sum(min(x, m - x) for x, m in zip(a, self.moduli))
        return len(a)

    def canonical(self, payload: Iterable[int]) -> tuple[int, ...]:
        """Bring an arbitrary payload into canonical form."""
        p = tuple(int(x) for x in payload)
        if self.kind == FREE:
            out: list[int] = []
            for g in p:
                if g == 0 or abs(g) > self.rank:
                    raise ValueError(f"bad free generator index {g}")
                if out and out[-1] == -g:
                    out.pop()
                else:
                    out.append(g)
            return tuple(out)
        if len(p) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(p)}")
        if self.kind == QUOTIENT:
            return tuple(x % m for x, m in zip(p, self.moduli))
        return p

    def generator_payloads(self) -> list[tuple[int, ...]]:
        """Canonical generators followed by their inverses, duplicates removed."""
        if self.kind == FREE:
            gens = [(i,) for i in range(1, self.rank + 1)]
        else:
            gens = [self.canonical(tuple(int(i == j) for j in range(self.rank))) for i in range(self.rank)]
        out: list[tuple[int, ...]] = []
        for g in gens + [self.inv_payload(g) for g in gens]:
            if g not in out:
                out.append(g)
        return out

    # -- element level helpers ---------------------------------------------
    def element(self, payload: Iterable[int]) -> GroupElement:
        return GroupElement(self, self.canonical(payload))

    def identity(self) -> GroupElement:
        return GroupElement(self, self.identity_payload())

    def generators(self) -> list[GroupElement]:
        return [GroupElement(self, p) for p in self.generator_payloads()]

    def ball(self, radius: int) -> list[GroupElement]:
        return [GroupElement(self, p) for p in ball_payloads(self, radius)]

    def order(self) -> int | None:
        if self.kind != QUOTIENT:
            return None
        n = 1
        for m in self.moduli:
            n *= m
        return n

    def elements(self) -> list[GroupElement]:
        """All elements of a finite quotient, in mixed-radix row-major order."""
        if self.kind != QUOTIENT:
            raise ValueError("only finite quotients can be enumerated")
        return [GroupElement(self, p) for p in residues(self.moduli)]

    def describe(self) -> str:
        if self.kind == LATTICE:
            return f"Z^{self.rank}"
        if self.kind == FREE:
            return f"F_{self.rank}"
        return "Z/(" + ",".join(str(m) for m in self.moduli) + ")"


@dataclass(frozen=True, slots=True)
class GroupElement:
    spec: GroupSpec
    word: tuple[int, ...]

    def __post_init__(self) -> None:
        w, spec = self.word, self.spec
        if spec.kind == FREE:
            for x, y in zip(w, w[1:]):
                if x == -y:
                    raise ValueError("free word is not reduced")
            if any(g == 0 or abs(g) > spec.rank for g in w):
                raise ValueError("free word uses an unknown generator")
        else:
            if len(w) != spec.rank:
                raise ValueError("wrong number of coordinates")
            if spec.kind == QUOTIENT and any(not 0 <= x < m for x, m in zip(w, spec.moduli)):
                raise ValueError("residue out of range")

    def __mul__(self, other: GroupElement) -> GroupElement:
        return group_mul(self, other)

    def inverse(self) -> GroupElement:
        return GroupElement(self.spec, self.spec.inv_payload(self.word))

    @property
    def length(self) -> int:
        return self.spec.length_payload(self.word)

    def is_identity(self) -> bool:
        return self.word == self.spec.identity_payload()

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"GroupElement({format_element(self)}, {self.spec.describe()})"

    def sort_key(self) -> tuple:
        return (self.length, self.word)


def group_mul(a: GroupElement, b: GroupElement) -> GroupElement:
    if a.spec != b.spec:
        raise GroupMismatch(f"cannot multiply elements of {a.spec.describe()} and {b.spec.describe()}")
    return GroupElement(a.spec, a.spec.mul_payload(a.word, b.word))


def inverse(a: GroupElement) -> GroupElement:
    return a.inverse()


def residues(moduli: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Residue vectors in mixed-radix row-major order (last coordinate fastest)."""
    if not moduli:
        yield ()
        return
    for head in range(moduli[0]):
        for rest in residues(moduli[1:]):
            yield (head,) + rest


def residue_index(r: tuple[int, ...], moduli: tuple[int, ...]) -> int:
    idx = 0
    for x, m in zip(r, moduli):
        idx = idx * m + x % m
    return idx


def ball_payloads(spec: GroupSpec, radius: int) -> list[tuple[int, ...]]:
    """Payloads of word length <= radius, sorted by (length, payload)."""
    if radius < 0:
        return []
    gens = spec.generator_payloads()
    start = spec.identity_payload()
    seen = {start: 0}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        if seen[p] == radius:
            continue
        for g in gens:
            q = spec.mul_payload(p, g)
            if q not in seen:
                seen[q] = seen[p] + 1
                queue.append(q)
    return sorted(seen, key=lambda p: (spec.length_payload(p), p))


# -- text format ------------------------------------------------------------

def _letter(g: int) -> str:
    ch = _LETTERS[abs(g) - 1]
    return ch if g > 0 else ch.upper()


def format_element(x: GroupElement) -> str:
    if x.spec.kind == FREE:
        return "".join(_letter(g) for g in x.word) if x.word else "e"
    return "(" + ",".join(str(v) for v in x.word) + ")"


_FACTOR = re.compile(r"\(\s*(-?\d+(?:\s*,\s*-?\d+)*)?\s*,?\s*\)|([A-Za-z])")
_POWER = re.compile(r"\^\s*(-?\d+)")


def parse_element(text: str, spec: GroupSpec) -> GroupElement:
    """Parse ``e``, ``(1,-2)``, ``abA``, ``t^-3`` or (rank-one lattice) a bare integer."""
    s = text.strip()
    if not s:
        raise ParseError("empty group element")
    if spec.kind != FREE and spec.rank == 1 and re.fullmatch(r"-?\d+", s):
        return spec.element((int(s),))
    result = spec.identity_payload()
    pos = 0
    while pos < len(s):
        if s[pos].isspace() or s[pos] == "*":
            pos += 1
            continue
        m = _FACTOR.match(s, pos)
        if not m:
            raise ParseError(f"cannot parse group element {text!r} at {s[pos:]!r}")
        pos = m.end()
        if m.group(2) is not None:
            factor = _letter_payload(m.group(2), spec, text)
        else:
            coords = [int(v) for v in (m.group(1) or "").replace(" ", "").split(",") if v]
            try:
                factor = spec.canonical(coords)
            except ValueError as exc:
                raise ParseError(f"{text!r}: {exc}") from None
        p = _POWER.match(s, pos)
        power = 1
        if p:
            power = int(p.group(1))
            pos = p.end()
        if power < 0:
            factor, power = spec.inv_payload(factor), -power
        for _ in range(power):
            result = spec.mul_payload(result, factor)
    return GroupElement(spec, result)


def _letter_payload(ch: str, spec: GroupSpec, text: str) -> tuple[int, ...]:
    if ch in "eE":
        return spec.identity_payload()
    low = ch.lower()
    if spec.kind != FREE and spec.rank == 1 and low == "t":
        idx = 1
    elif low in _LETTERS:
        idx = _LETTERS.index(low) + 1
    else:
        raise ParseError(f"unknown generator letter {ch!r} in {text!r}")
    if idx > spec.rank:
        raise ParseError(f"generator {ch!r} exceeds rank {spec.rank} in {text!r}")
    sign = 1 if ch == low else -1
    if spec.kind == FREE:
        return (sign * idx,)
    return spec.canonical(tuple(sign * int(j == idx - 1) for j in range(spec.rank)))


def parse_group(text: str) -> GroupSpec:
    """``Z``, ``Z^2``, ``F2``/``F_2``, ``Z/12`` or ``Z/(12,12)``."""
    s = text.strip().replace(" ", "")
    m = re.fullmatch(r"Z(?:\^(\d+))?", s)
    if m:
        return GroupSpec.lattice(int(m.group(1) or 1))
    m = re.fullmatch(r"F_?(\d+)", s)
    if m:
        return GroupSpec.free(int(m.group(1)))
    m = re.fullmatch(r"Z/\(?(\d+(?:,\d+)*)\)?", s)
    if m:
        return GroupSpec.quotient(int(v) for v in m.group(1).split(","))
    raise ParseError(f"unknown group {text!r}")
