"""Shift actions on finite windows: full shifts, SFTs, algebraic actions X_A.

A point of X is represented by a :class:`PointPattern`, its restriction to a
ball of radius R around the identity.  G acts by left translation,
``(sx)_t = x_{s^-1 t}``, which shrinks the window to radius ``R - |s|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import ParseError, WindowExhausted
from .groups import GroupElement, GroupSpec, ball_payloads, format_element, parse_element
from .ring import GroupRingElement, RingMatrix, inverse_residual, l1_inverse

Payload = tuple[int, ...]

DISCRETE = "discrete"
CIRCLE = "circle"


# -- points ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PointPattern:
    """Values of a point on the ball of radius ``radius`` around the identity.

    Symbolic values are hashable symbols; algebraic values are tuples of
    floats in [0, 1) and ``tail`` bounds their distance to the true point.
    """

    spec: GroupSpec
    radius: int
    values: Mapping[Payload, Any]
    tail: float = 0.0

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise WindowExhausted("negative window radius")
        if self.tail < 0:
            raise ValueError("tail bound must be nonnegative")
        missing = [p for p in ball_payloads(self.spec, self.radius) if p not in self.values]
        if missing:
            raise ValueError(f"window values missing at {missing[:3]}")

    @classmethod
    def from_function(cls, spec: GroupSpec, radius: int, fn: Callable[[GroupElement], Any],
                      tail: float = 0.0) -> PointPattern:
        vals = {p: fn(GroupElement(spec, p)) for p in ball_payloads(spec, radius)}
        return cls(spec, radius, vals, tail)

    @classmethod
    def constant(cls, spec: GroupSpec, radius: int, value: Any) -> PointPattern:
        return cls(spec, radius, {p: value for p in ball_payloads(spec, radius)})

    def __getitem__(self, g: GroupElement | Payload) -> Any:
        p = g.word if isinstance(g, GroupElement) else tuple(g)
        try:
            return self.values[p]
        except KeyError:
            raise WindowExhausted(f"position {p} lies outside the radius-{self.radius} window") from None

    def identity_value(self) -> Any:
        return self[self.spec.identity_payload()]

    def window(self) -> list[GroupElement]:
        return [GroupElement(self.spec, p) for p in ball_payloads(self.spec, self.radius)]

    def restrict(self, radius: int) -> PointPattern:
        if radius > self.radius:
            raise WindowExhausted("cannot enlarge a window by restriction")
        return PointPattern(self.spec, radius, {p: self.values[p] for p in ball_payloads(self.spec, radius)},
                            self.tail)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointPattern):
            return NotImplemented
        return (self.spec == other.spec and self.radius == other.radius
                and dict(self.values) == dict(other.values) and self.tail == other.tail)

    def __hash__(self) -> int:
        return hash((self.spec, self.radius, frozenset(self.values.items())))


def act(s: GroupElement, x: PointPattern) -> PointPattern:
    """Left translation (sx)_t = x_{s^-1 t} on the shrunken window."""
    if s.spec != x.spec:
        raise ValueError("group element and point live over different groups")
    R = x.radius - s.length
    if R < 0:
        raise WindowExhausted(f"|s| = {s.length} exceeds window radius {x.radius}")
    spec = x.spec
    sinv = spec.inv_payload(s.word)
    vals = {t: x.values[spec.mul_payload(sinv, t)] for t in ball_payloads(spec, R)}
    return PointPattern(spec, R, vals, x.tail)


def circle_distance(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


# -- actions ------------------------------------------------------------------------------

class ActionSpec:
    """Common interface; see :class:`FullShift`, :class:`SFT`, :class:`Algebraic`, :class:`ProductAction`."""

    symbolic: bool = True

    def rho_values(self, a: Any, b: Any) -> float:
        raise NotImplementedError

    def layout(self) -> tuple[tuple[str, int], ...]:
        """Per-component (kind, channels) description of identity values."""
        raise NotImplementedError

    def encode(self, value: Any) -> tuple:
        """Flatten an identity value into channel values following ``layout``."""
        raise NotImplementedError

    def admissible(self, x: PointPattern) -> bool:
        return True

    def symbols(self) -> tuple:
        raise TypeError("this action has no finite alphabet")

    def upper_bound_log(self) -> float | None:
        """log of the alphabet size when identity-coordinate counting bounds N_eps."""
        return None


@dataclass(frozen=True)
class FullShift(ActionSpec):
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("alphabet size must be >= 1")

    def symbols(self) -> tuple:
        return tuple(range(self.k))

    def rho_values(self, a: Any, b: Any) -> float:
        return 0.0 if a == b else 1.0

    def layout(self) -> tuple[tuple[str, int], ...]:
        return ((DISCRETE, 1),)

    def encode(self, value: Any) -> tuple:
        return (value,)

    def admissible(self, x: PointPattern) -> bool:
        return all(v in range(self.k) for v in x.values.values())

    def upper_bound_log(self) -> float:
        return math.log(self.k)

    def describe(self) -> str:
        return f"fullshift:{self.k}"


@dataclass(frozen=True)
class Pattern:
    """A finite labeling (offset -> symbol) that may not occur in a point."""

    spec: GroupSpec
    cells: tuple[tuple[Payload, int], ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("empty forbidden pattern")
        object.__setattr__(self, "cells", tuple(sorted(self.cells)))

    def occurs_at(self, g: Payload, lookup: Mapping[Payload, Any]) -> bool:
        mul = self.spec.mul_payload
        for o, sym in self.cells:
            v = lookup.get(mul(g, o))
            if v is None or v != sym:
                return False
        return True

    def placements(self, window: Iterable[Payload]) -> set[Payload]:
        """Translates g with g*o inside ``window`` for at least the first offset."""
        o0 = self.cells[0][0]
        inv = self.spec.inv_payload(o0)
        return {self.spec.mul_payload(w, inv) for w in window}

    def __str__(self) -> str:
        return ";".join(f"{format_element(GroupElement(self.spec, o))}={s}" for o, s in self.cells)


@dataclass(frozen=True)
class SFT(ActionSpec):
    k: int
    forbidden: tuple[Pattern, ...]
    spec: GroupSpec

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("alphabet size must be >= 1")
        for pat in self.forbidden:
            if pat.spec != self.spec:
                raise ValueError("pattern over a different group")
            if any(not 0 <= s < self.k for _, s in pat.cells):
                raise ValueError(f"pattern {pat} uses a symbol outside the alphabet")

    def symbols(self) -> tuple:
        return tuple(range(self.k))

    def rho_values(self, a: Any, b: Any) -> float:
        return 0.0 if a == b else 1.0

    def layout(self) -> tuple[tuple[str, int], ...]:
        return ((DISCRETE, 1),)

    def encode(self, value: Any) -> tuple:
        return (value,)

    def upper_bound_log(self) -> float:
        return math.log(self.k)

    def violations(self, values: Mapping[Payload, Any]) -> list[tuple[Pattern, Payload]]:
        found = []
        for pat in self.forbidden:
            for g in pat.placements(values):
                if pat.occurs_at(g, values):
                    found.append((pat, g))
        return found

    def admissible(self, x: PointPattern) -> bool:
        if any(v not in range(self.k) for v in x.values.values()):
            return False
        return not self.violations(x.values)

    def describe(self) -> str:
        return "sft:" + "|".join(str(p) for p in self.forbidden)


def golden_mean() -> SFT:
    """The no-two-adjacent-ones shift over Z."""
    Z = GroupSpec.lattice(1)
    return SFT(2, (Pattern(Z, (((0,), 1), ((1,), 1))),), Z)


def parse_sft(text: str, spec: GroupSpec, k: int | None = None) -> SFT:
    """One forbidden pattern per line, ``offset=symbol`` pairs separated by ``;``."""
    pats = []
    top = 0
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        cells = []
        for item in ln.split(";"):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise ParseError(f"expected offset=symbol, got {item!r}")
            off, sym = item.rsplit("=", 1)
            try:
                s = int(sym)
            except ValueError:
                raise ParseError(f"symbol must be an integer in {item!r}") from None
            if s < 0:
                raise ParseError(f"negative symbol in {item!r}")
            top = max(top, s)
            cells.append((parse_element(off, spec).word, s))
        offsets = [c[0] for c in cells]
        if len(set(offsets)) != len(offsets):
            raise ParseError(f"repeated offset in pattern {ln!r}")
        pats.append(Pattern(spec, tuple(cells)))
    if not pats:
        raise ParseError("no forbidden patterns found")
    k = max(2, top + 1) if k is None else k
    if top >= k:
        raise ParseError(f"symbol {top} outside alphabet of size {k}")
    return SFT(k, tuple(pats), spec)


@dataclass(frozen=True, eq=False)
class Algebraic(ActionSpec):
    """X_A = {x in ((R/Z)^G)^n : x A* = 0}, with a certified (A*)^-1."""

    A: RingMatrix
    inverse: RingMatrix
    residual: float
    radius: int
    symbolic = False

    def __post_init__(self) -> None:
        if not self.A.exact:
            raise ValueError("A must have exact integer entries")
        if self.inverse.exact:
            raise ValueError("the inverse is an l^1 approximant in float mode")

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def spec(self) -> GroupSpec:
        return self.A.spec

    def rho_values(self, a: Sequence[float], b: Sequence[float]) -> float:
        return max(circle_distance(x, y) for x, y in zip(a, b))

    def layout(self) -> tuple[tuple[str, int], ...]:
        return ((CIRCLE, self.n),)

    def encode(self, value: Any) -> tuple:
        return tuple(value)

    def admissible(self, x: PointPattern) -> bool:
        return all(len(v) == self.n and all(0.0 <= c < 1.0 for c in v) for v in x.values.values())

    def describe(self) -> str:
        return "algebraic:" + str(self.A)


def algebraic_action(A: RingMatrix | GroupRingElement, tol: float = 1e-9, scale=None) -> Algebraic:
    """Certify (A*)^-1 by a Neumann series and package X_A.

    The inverse is truncated where its l^1 tail drops below tol / (2 n ||A||_1),
    and the truncation radius becomes the action's window radius.
    """
    if isinstance(A, GroupRingElement):
        A = RingMatrix.scalar(A)
    Astar = A.star()
    inv = l1_inverse(Astar, tol / (2 * A.n * float(A.l1_norm())), scale)
    res = inverse_residual(Astar, inv)
    return Algebraic(A, inv, res, inv.radius())


@dataclass(frozen=True)
class ProductAction(ActionSpec):
    left: ActionSpec
    right: ActionSpec

    def __post_init__(self) -> None:
        if self.left.symbolic != self.right.symbolic:
            raise ValueError("product of a symbolic and an algebraic action is not supported")
        object.__setattr__(self, "symbolic", self.left.symbolic)

    def symbols(self) -> tuple:
        return tuple((a, b) for a in self.left.symbols() for b in self.right.symbols())

    def rho_values(self, a: Any, b: Any) -> float:
        return self.left.rho_values(a[0], b[0]) + self.right.rho_values(a[1], b[1])

    def layout(self) -> tuple[tuple[str, int], ...]:
        return self.left.layout() + self.right.layout()

    def encode(self, value: Any) -> tuple:
        return self.left.encode(value[0]) + self.right.encode(value[1])

    def project(self, x: PointPattern, side: int) -> PointPattern:
        return PointPattern(x.spec, x.radius, {p: v[side] for p, v in x.values.items()},
                            x.tail)

    def admissible(self, x: PointPattern) -> bool:
        try:
            return self.left.admissible(self.project(x, 0)) and self.right.admissible(self.project(x, 1))
        except (TypeError, IndexError):
            return False

    def upper_bound_log(self) -> float | None:
        a, b = self.left.upper_bound_log(), self.right.upper_bound_log()
        return None if a is None or b is None else a + b

    def describe(self) -> str:
        return f"product({self.left.describe()},{self.right.describe()})"


def product_action(a: ActionSpec, b: ActionSpec) -> ProductAction:
    """X x Y with the sum pseudometric."""
    if a.symbolic != b.symbolic:
        raise ValueError("mixed symbolic/algebraic product")
    return ProductAction(a, b)


def product_point(x: PointPattern, y: PointPattern) -> PointPattern:
    if x.spec != y.spec:
        raise ValueError("points over different groups")
    R = min(x.radius, y.radius)
    vals = {p: (x.values[p], y.values[p]) for p in ball_payloads(x.spec, R)}
    return PointPattern(x.spec, R, vals, x.tail + y.tail)


def rho(x: PointPattern, y: PointPattern, action: ActionSpec | None = None) -> float:
    """Identity-coordinate pseudometric.

    Without an action, symbols are compared with the discrete metric and
    float tuples with the max-coordinate circle distance.
    """
    a, b = x.identity_value(), y.identity_value()
    if action is not None:
        return action.rho_values(a, b)
    if isinstance(a, tuple) and a and isinstance(a[0], float):
        return max(circle_distance(u, v) for u, v in zip(a, b))
    return 0.0 if a == b else 1.0


def rho_tail(x: PointPattern, y: PointPattern) -> float:
    """Bound on how far ``rho`` can be from its value on the true points."""
    return x.tail + y.tail


def convolve_point(x: PointPattern, B: RingMatrix, positions: Iterable[Payload]) -> dict[Payload, tuple[float, ...]]:
    """(x B)_u = sum_i sum_w x_i(u w^-1) B_ij(w) for the given positions u."""
    spec = x.spec
    n = B.n
    out = {}
    for u in positions:
        row = []
        for j in range(n):
            acc = 0.0
            for i in range(n):
                for w, c in B.entries[i][j].terms.items():
                    t = spec.mul_payload(u, spec.inv_payload(w))
                    if t not in x.values:
                        raise WindowExhausted(f"window of radius {x.radius} too small for the convolution")
                    acc += c * x.values[t][i]
            row.append(acc)
        out[u] = tuple(row)
    return out


def checkable_positions(x: PointPattern, B: RingMatrix) -> list[Payload]:
    r = B.radius()
    return ball_payloads(x.spec, x.radius - r)


def membership_xa(x: PointPattern, A: RingMatrix | GroupRingElement, tol: float) -> bool:
    """True iff every checkable coordinate of x A* is within tol of an integer."""
    if isinstance(A, GroupRingElement):
        A = RingMatrix.scalar(A)
    Astar = A.star()
    pos = checkable_positions(x, Astar)
    if not pos:
        raise WindowExhausted("window too small to evaluate x A* at the identity")
    vals = convolve_point(x, Astar, pos)
    for v in vals.values():
        for c in v:
            if abs(c - round(c)) > tol:
                return False
    return True


# -- set tuples -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Cylinder:
    """Points whose coordinate at each listed position lies in the allowed set."""

    spec: GroupSpec
    allowed: tuple[tuple[Payload, frozenset], ...] = ()

    def __post_init__(self) -> None:
        merged: dict[Payload, frozenset] = {}
        for p, syms in self.allowed:
            syms = frozenset(syms)
            merged[p] = merged[p] & syms if p in merged else syms
        object.__setattr__(self, "allowed", tuple(sorted(merged.items(), key=lambda kv: kv[0])))

    @classmethod
    def whole(cls, spec: GroupSpec) -> Cylinder:
        return cls(spec, ())

    def constraints(self) -> dict[Payload, frozenset]:
        return dict(self.allowed)

    def is_empty(self) -> bool:
        return any(not syms for _, syms in self.allowed)

    def pullback(self, s: GroupElement) -> Cylinder:
        """s^-1 A = {x : sx in A}; the constraint at p moves to s^-1 p."""
        inv = self.spec.inv_payload(s.word)
        return Cylinder(self.spec, tuple((self.spec.mul_payload(inv, p), syms) for p, syms in self.allowed))

    def intersect(self, other: Cylinder) -> Cylinder:
        return Cylinder(self.spec, self.allowed + other.allowed)

    def contains(self, x: PointPattern) -> bool:
        return all(x[p] in syms for p, syms in self.allowed)

    def radius(self) -> int:
        return max((self.spec.length_payload(p) for p, _ in self.allowed), default=0)

    def __str__(self) -> str:
        if not self.allowed:
            return "cyl:*"
        return "cyl:" + ",".join(f"{format_element(GroupElement(self.spec, p))}={'|'.join(map(str, sorted(s, key=repr)))}"
                                 for p, s in self.allowed)


def cylinder(spec: GroupSpec, position: GroupElement | None, symbol: Any) -> Cylinder:
    p = spec.identity_payload() if position is None else position.word
    return Cylinder(spec, ((p, frozenset([symbol])),))


def product_cylinder(a: Cylinder, b: Cylinder, left_symbols: Sequence, right_symbols: Sequence) -> Cylinder:
    """A x B as a cylinder over pair symbols."""
    ca, cb = a.constraints(), b.constraints()
    out = []
    for p in sorted(set(ca) | set(cb)):
        L = ca.get(p, frozenset(left_symbols))
        R = cb.get(p, frozenset(right_symbols))
        out.append((p, frozenset((u, v) for u in L for v in R)))
    return Cylinder(a.spec, tuple(out))


@dataclass(frozen=True, eq=False)
class MetricBall:
    """Open ball {x : rho(x, center) < radius} for the identity-coordinate pseudometric."""

    center: PointPattern
    radius: float
    action: ActionSpec

    def contains(self, x: PointPattern) -> bool:
        return rho(x, self.center, self.action) < self.radius


AnySet = Union[Cylinder, MetricBall]


@dataclass(frozen=True)
class SetTuple:
    sets: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "sets", tuple(self.sets))
        if not self.sets:
            raise ValueError("a set tuple needs at least one set")

    @property
    def k(self) -> int:
        return len(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, i: int):
        return self.sets[i]

    def __iter__(self) -> Iterator:
        return iter(self.sets)

    def symbolic(self) -> bool:
        return all(isinstance(s, Cylinder) for s in self.sets)


def identity_cylinders(spec: GroupSpec, k: int) -> SetTuple:
    """(U_0, ..., U_{k-1}) with U_j = {x : x_e = j}."""
    return SetTuple(tuple(cylinder(spec, None, j) for j in range(k)))


def parse_cylinder(text: str, spec: GroupSpec) -> Cylinder:
    """``cyl:e=0``, ``cyl:(1)=0|1,e=1`` or ``cyl:*`` for the whole space."""
    s = text.strip()
    if s.startswith("cyl:"):
        s = s[4:]
    if s in ("*", ""):
        return Cylinder.whole(spec)
    cells = []
    depth, cur, parts = 0, "", []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    for part in parts:
        if "=" not in part:
            raise ParseError(f"expected position=symbol in {part!r}")
        pos, syms = part.rsplit("=", 1)
        try:
            allowed = frozenset(int(v) for v in syms.split("|") if v.strip())
        except ValueError:
            raise ParseError(f"bad symbols in {part!r}") from None
        cells.append((parse_element(pos, spec).word, allowed))
    return Cylinder(spec, tuple(cells))
