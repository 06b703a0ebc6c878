"""Integral group rings and truncated elements of l^1(G).

A :class:`GroupRingElement` is either exact (integer coefficients, tail 0) or a
float approximant carrying a rigorous bound on the l^1 mass it is missing.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from .errors import GroupMismatch, ModeMismatch, NeumannConditionFailed, ParseError, ResidualCheckFailed
from .groups import GroupElement, GroupSpec, format_element, parse_element

Payload = tuple[int, ...]
Number = Union[int, float]


def _round_up(x: float | Fraction) -> float:
    """Smallest float >= x (for nonnegative bounds)."""
    f = float(x)
    if Fraction(f) < Fraction(x):
        f = math.nextafter(f, math.inf)
    return f


def _add_into(acc: dict, key, value) -> None:
    v = acc.get(key, 0) + value
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


def _convolve(spec: GroupSpec, f: Mapping[Payload, Number], g: Mapping[Payload, Number]) -> dict:
    out: dict = {}
    mul = spec.mul_payload
    for p, a in f.items():
        for q, b in g.items():
            _add_into(out, mul(p, q), a * b)
    return out


@dataclass(frozen=True, eq=False)
class GroupRingElement:
    """Finitely supported sum of group elements with coefficients.

    ``terms`` maps payloads to nonzero coefficients.  In float mode ``tail``
    bounds the l^1 distance to the element being approximated.
    """

    spec: GroupSpec
    terms: Mapping[Payload, Number] = field(default_factory=dict)
    exact: bool = True
    tail: float = 0.0

    def __post_init__(self) -> None:
        if any(c == 0 for c in self.terms.values()):
            object.__setattr__(self, "terms", {p: c for p, c in self.terms.items() if c != 0})
        if self.tail < 0 or (self.exact and self.tail != 0):
            raise ValueError("tail bound must be >= 0 and vanish in exact mode")
        if self.exact and any(not isinstance(c, int) for c in self.terms.values()):
            raise ValueError("exact mode needs integer coefficients")

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, spec: GroupSpec, exact: bool = True) -> GroupRingElement:
        return cls(spec, {}, exact)

    @classmethod
    def one(cls, spec: GroupSpec, exact: bool = True) -> GroupRingElement:
        return cls(spec, {spec.identity_payload(): 1 if exact else 1.0}, exact)

    @classmethod
    def monomial(cls, g: GroupElement, coeff: Number = 1) -> GroupRingElement:
        exact = isinstance(coeff, int)
        return cls(g.spec, {g.word: coeff}, exact)

    @classmethod
    def from_items(cls, spec: GroupSpec, items: Iterable[tuple[GroupElement, Number]],
                   exact: bool | None = None, tail: float = 0.0) -> GroupRingElement:
        acc: dict = {}
        items = list(items)
        if exact is None:
            exact = all(isinstance(c, int) for _, c in items)
        for g, c in items:
            if g.spec != spec:
                raise GroupMismatch("element from a different group")
            _add_into(acc, g.word, c if exact else float(c))
        return cls(spec, acc, exact, tail)

    # -- basic protocol -----------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return (self.spec == other.spec and self.exact == other.exact
                and self.tail == other.tail and dict(self.terms) == dict(other.terms))

    def __hash__(self) -> int:
        return hash((self.spec, self.exact, self.tail, frozenset(self.terms.items())))

    def items(self) -> Iterator[tuple[GroupElement, Number]]:
        for p in sorted(self.terms, key=lambda p: (self.spec.length_payload(p), p)):
            yield GroupElement(self.spec, p), self.terms[p]

    def coefficient(self, g: GroupElement) -> Number:
        return self.terms.get(g.word, 0)

    def support(self) -> list[GroupElement]:
        return [g for g, _ in self.items()]

    def is_zero(self) -> bool:
        return not self.terms

    def radius(self) -> int:
        """Largest word length in the support (0 for the zero element)."""
        return max((self.spec.length_payload(p) for p in self.terms), default=0)

    def l1_norm(self) -> float | int:
        return sum(abs(c) for c in self.terms.values())

    def to_float(self) -> GroupRingElement:
        if not self.exact:
            return self
        return GroupRingElement(self.spec, {p: float(c) for p, c in self.terms.items()}, False, 0.0)

    def _check(self, other: GroupRingElement) -> None:
        if self.spec != other.spec:
            raise GroupMismatch("group ring elements over different groups")
        if self.exact != other.exact:
            raise ModeMismatch("cannot combine exact and float group ring elements")

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        self._check(other)
        acc = dict(self.terms)
        for p, c in other.terms.items():
            _add_into(acc, p, c)
        return GroupRingElement(self.spec, acc, self.exact, self.tail + other.tail)

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement(self.spec, {p: -c for p, c in self.terms.items()}, self.exact, self.tail)

    def __sub__(self, other: GroupRingElement) -> GroupRingElement:
        return self + (-other)

    def scale(self, c: Number) -> GroupRingElement:
        if self.exact and not isinstance(c, int):
            raise ModeMismatch("exact elements only scale by integers")
        return GroupRingElement(self.spec, {p: v * c for p, v in self.terms.items()}, self.exact,
                                self.tail * abs(c))

    def __mul__(self, other: GroupRingElement | int) -> GroupRingElement:
        if isinstance(other, (int, float)):
            return self.scale(other)
        return ring_mul(self, other)

    def __rmul__(self, other: int) -> GroupRingElement:
        return self.scale(other)

    def star(self) -> GroupRingElement:
        return involution(self)

    def __str__(self) -> str:
        return format_ring(self)

    def __repr__(self) -> str:
        mode = "exact" if self.exact else f"float, tail={self.tail:.3g}"
        return f"GroupRingElement({format_ring(self)!r}, {self.spec.describe()}, {mode})"


def ring_mul(f: GroupRingElement, g: GroupRingElement) -> GroupRingElement:
    """Convolution (fg)_s = sum_t f_t g_{t^-1 s}."""
    f._check(g)
    terms = _convolve(f.spec, f.terms, g.terms)
    if f.exact:
        return GroupRingElement(f.spec, terms, True)
    nf, ng = f.l1_norm(), g.l1_norm()
    tail = nf * g.tail + f.tail * ng + f.tail * g.tail
    return GroupRingElement(f.spec, terms, False, tail)


# -- matrices -----------------------------------------------------------------

@dataclass(frozen=True)
class RingMatrix:
    entries: tuple[tuple[GroupRingElement, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("RingMatrix must be square with dimension >= 1")
        first = rows[0][0]
        for r in rows:
            for e in r:
                if e.spec != first.spec:
                    raise GroupMismatch("matrix entries over different groups")
                if e.exact != first.exact:
                    raise ModeMismatch("matrix entries must share one coefficient mode")

    @classmethod
    def scalar(cls, f: GroupRingElement) -> RingMatrix:
        return cls(((f,),))

    @classmethod
    def identity(cls, n: int, spec: GroupSpec, exact: bool = True) -> RingMatrix:
        z, o = GroupRingElement.zero(spec, exact), GroupRingElement.one(spec, exact)
        return cls(tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def spec(self) -> GroupSpec:
        return self.entries[0][0].spec

    @property
    def exact(self) -> bool:
        return self.entries[0][0].exact

    @property
    def tail(self) -> float:
        return sum(e.tail for r in self.entries for e in r)

    def __getitem__(self, ij: tuple[int, int]) -> GroupRingElement:
        i, j = ij
        return self.entries[i][j]

    def l1_norm(self) -> float | int:
        return sum(e.l1_norm() for r in self.entries for e in r)

    def radius(self) -> int:
        return max(e.radius() for r in self.entries for e in r)

    def to_float(self) -> RingMatrix:
        return RingMatrix(tuple(tuple(e.to_float() for e in r) for r in self.entries))

    def __add__(self, other: RingMatrix) -> RingMatrix:
        self._check(other)
        return RingMatrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: RingMatrix) -> RingMatrix:
        self._check(other)
        return RingMatrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __mul__(self, other: RingMatrix) -> RingMatrix:
        self._check(other)
        n = self.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = GroupRingElement.zero(self.spec, self.exact)
                for k in range(n):
                    acc = acc + ring_mul(self.entries[i][k], other.entries[k][j])
                row.append(acc)
            rows.append(tuple(row))
        return RingMatrix(tuple(rows))

    def _check(self, other: RingMatrix) -> None:
        if self.n != other.n:
            raise ValueError("matrix dimension mismatch")
        if self.spec != other.spec:
            raise GroupMismatch("matrices over different groups")
        if self.exact != other.exact:
            raise ModeMismatch("cannot combine exact and float matrices")

    def star(self) -> RingMatrix:
        return involution(self)

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(format_ring(e) for e in r) for r in self.entries) + "]"


def involution(f: GroupRingElement | RingMatrix):
    """f* = sum f_s s^-1; for matrices the (i, j) entry of A* is (A_ji)*."""
    if isinstance(f, RingMatrix):
        n = f.n
        return RingMatrix(tuple(tuple(involution(f.entries[j][i]) for j in range(n)) for i in range(n)))
    inv = f.spec.inv_payload
    return GroupRingElement(f.spec, {inv(p): c for p, c in f.terms.items()}, f.exact, f.tail)


def l1_norm(f: GroupRingElement | RingMatrix) -> float | int:
    """Sum of absolute coefficients; tails are reported separately via ``.tail``."""
    return f.l1_norm()


# -- Neumann-series inversion ----------------------------------------------------

@dataclass(frozen=True)
class NeumannSplit:
    """A = c * g * (I - B) with g a group element (g = e for matrices)."""

    c: int | Fraction
    g: Payload
    B: tuple[tuple[dict, ...], ...]
    norm_B: Fraction


def _matrix_terms(A: RingMatrix) -> list[list[dict]]:
    return [[dict(e.terms) for e in row] for row in A.entries]


def _split(A: RingMatrix, c, g: Payload) -> NeumannSplit:
    spec, n = A.spec, A.n
    ginv = spec.inv_payload(g)
    e = spec.identity_payload()
    c = Fraction(c)
    B = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: dict = {}
            if i == j:
                acc[e] = Fraction(1)
            for p, v in A.entries[i][j].terms.items():
                _add_into(acc, spec.mul_payload(ginv, p), -Fraction(v) / c)
            row.append(acc)
        B.append(tuple(row))
    norm = sum((abs(v) for row in B for entry in row for v in entry.values()), Fraction(0))
    return NeumannSplit(c, g, tuple(B), norm)


def find_split(A: RingMatrix, scale=None) -> NeumannSplit:
    """Best split among the candidate scales; raises if none is contracting."""
    if not A.exact:
        raise ModeMismatch("Neumann inversion expects an exact integer matrix")
    spec = A.spec
    e = spec.identity_payload()
    candidates: list[tuple] = []
    if scale is not None:
        if isinstance(scale, tuple):
            c, g = scale
            candidates.append((c, g.word if isinstance(g, GroupElement) else tuple(g)))
        else:
            candidates.append((scale, e))
    else:
        for i in range(A.n):
            c = A.entries[i][i].terms.get(e, 0)
            if c:
                candidates.append((c, e))
        if A.n == 1:
            for p, c in A.entries[0][0].terms.items():
                candidates.append((c, p))
    best = None
    for c, g in candidates:
        if c == 0:
            continue
        s = _split(A, c, g)
        if best is None or s.norm_B < best.norm_B:
            best = s
    if best is None or best.norm_B >= 1:
        got = "none" if best is None else f"||B||_1 = {best.norm_B}"
        raise NeumannConditionFailed(f"no contracting split found ({got})")
    return best


def _mat_mul_float(spec: GroupSpec, X: list[list[dict]], Y: list[list[dict]]) -> list[list[dict]]:
    n = len(X)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: dict = {}
            for k in range(n):
                if X[i][k] and Y[k][j]:
                    for p, v in _convolve(spec, X[i][k], Y[k][j]).items():
                        _add_into(acc, p, v)
            row.append(acc)
        out.append(row)
    return out


def l1_inverse(A: RingMatrix | GroupRingElement, tol: float, scale=None,
               max_terms: int = 10_000):
    """Neumann-series inverse in M_n(l^1(G)) with a certified tail bound.

    The series is summed in floating point until the geometric estimate
    ||B||^(m+1) / (1 - ||B||) / |c| is below ``tol / 2``; the stored tail is
    then certified a posteriori from the exact residual E = I - A R:
    ||A^-1 - R||_1 <= ||R||_1 ||E||_1 / (1 - ||E||_1).
    Returns the same kind of object it was given.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    scalar_input = isinstance(A, GroupRingElement)
    M = RingMatrix.scalar(A) if scalar_input else A
    split = find_split(M, scale)
    spec, n = M.spec, M.n
    e = spec.identity_payload()
    q = float(split.norm_B)
    B = [[{p: float(v) for p, v in entry.items()} for entry in row] for row in split.B]
    power = [[({e: 1.0} if i == j else {}) for j in range(n)] for i in range(n)]
    total = [[dict(power[i][j]) for j in range(n)] for i in range(n)]
    abs_c = abs(float(split.c))
    m = 0
    while q > 0 and q ** (m + 1) / (1 - q) / abs_c > tol / 2:
        m += 1
        if m > max_terms:
            raise NeumannConditionFailed("Neumann series did not reach the tolerance")
        power = _mat_mul_float(spec, power, B)
        for i in range(n):
            for j in range(n):
                for p, v in power[i][j].items():
                    _add_into(total[i][j], p, v)
    # R = (sum B^m) g^-1 / c
    ginv = spec.inv_payload(split.g)
    cf = float(split.c)
    R = [[{spec.mul_payload(p, ginv): v / cf for p, v in total[i][j].items()} for j in range(n)]
         for i in range(n)]
    residual = _exact_residual(M, R)
    norm_R = sum(abs(Fraction(v)) for row in R for entry in row for v in entry.values())
    if residual >= 1:
        raise ResidualCheckFailed(f"residual {float(residual):.3g} is not contracting")
    tail = _round_up(norm_R * residual / (1 - residual))
    if tail > tol:
        raise ResidualCheckFailed(f"certified tail {tail:.3g} exceeds tolerance {tol:.3g}")
    if residual > 2 * Fraction(tol) * Fraction(M.l1_norm()):
        raise ResidualCheckFailed("a-posteriori residual check failed")
    entries = tuple(tuple(GroupRingElement(spec, R[i][j], False, tail) for j in range(n)) for i in range(n))
    out = RingMatrix(entries)
    return out.entries[0][0] if scalar_input else out


def _exact_residual(A: RingMatrix, R: list[list[dict]]) -> Fraction:
    """||I - A R||_1 computed in exact rational arithmetic."""
    spec, n = A.spec, A.n
    e = spec.identity_payload()
    total = Fraction(0)
    for i in range(n):
        for j in range(n):
            acc: dict = {e: Fraction(-1)} if i == j else {}
            for k in range(n):
                a = A.entries[i][k].terms
                r = {p: Fraction(v) for p, v in R[k][j].items()}
                for p, v in _convolve(spec, a, r).items():
                    _add_into(acc, p, v)
            total += sum((abs(v) for v in acc.values()), Fraction(0))
    return total


def inverse_residual(A: RingMatrix, R: RingMatrix) -> float:
    """||A R - I||_1 evaluated in exact arithmetic on the float coefficients."""
    return float(_exact_residual(A, [[dict(e.terms) for e in row] for row in R.entries]))


# -- text format -----------------------------------------------------------------

def _format_coeff(c: Number) -> str:
    return str(c) if isinstance(c, int) else repr(float(c))


def format_ring(f: GroupRingElement) -> str:
    """``coeff*word`` terms joined by ``+``; ``0`` for the zero element."""
    if f.is_zero():
        return "0"
    return "+".join(f"{_format_coeff(c)}*{format_element(g)}" for g, c in f.items())


_NUM = re.compile(r"(\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)")


def _split_terms(text: str) -> list[str]:
    terms, depth, cur = [], 0, ""
    prev = ""
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip() and prev not in "^*(,+-":
            if not (prev in "eE" and i >= 2 and text[i - 2].isdigit()):
                terms.append(cur)
                cur = ""
        cur += ch
        if not ch.isspace():
            prev = ch
    if cur.strip():
        terms.append(cur)
    return terms


def parse_ring(text: str, spec: GroupSpec) -> GroupRingElement:
    """Parse ``2-t``, ``3 - t - T``, ``2*(0)+-1*(1)`` or ``a + 2*bA``."""
    s = text.strip()
    if not s:
        raise ParseError("empty ring element")
    acc: dict = {}
    exact = True
    for raw in _split_terms(s):
        term = raw.strip()
        sign = 1
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:].strip()
        coeff: Number = 1
        m = _NUM.match(term)
        if m:
            num = m.group(1)
            if re.fullmatch(r"\d+", num):
                coeff = int(num)
            else:
                coeff = float(num)
                exact = False
            term = term[m.end():].strip()
            if term.startswith("*"):
                term = term[1:].strip()
        g = parse_element(term, spec).word if term else spec.identity_payload()
        _add_into(acc, g, sign * coeff)
    if not exact:
        acc = {p: float(c) for p, c in acc.items()}
    return GroupRingElement(spec, acc, exact)


def parse_matrix(text: str, spec: GroupSpec) -> RingMatrix:
    """Rows separated by ``;``, entries by ``,`` outside parentheses."""
    rows = []
    for row_text in text.split(";"):
        entries, depth, cur = [], 0, ""
        for ch in row_text:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            if ch == "," and depth == 0:
                entries.append(cur)
                cur = ""
            else:
                cur += ch
        entries.append(cur)
        rows.append(tuple(parse_ring(e.strip().strip("[]"), spec) for e in entries))
    return RingMatrix(tuple(rows))
