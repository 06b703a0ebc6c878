"""Finite permutation models sigma: G -> Sym(d) and their quality measures.

Points of ``{0, ..., d-1}`` are 0-based in the Python API; the text format
writes images 1-based.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError, SoficOverflow, SupportError
from .groups import LATTICE, GroupElement, GroupSpec, ball_payloads, format_element, parse_element, residue_index, residues

EXACT_QUOTIENT = "exact-quotient"
PERTURBED = "perturbed"
CUSTOM = "custom"

DEFAULT_MAX_D = 1 << 20


@dataclass(frozen=True, eq=False)
class SoficMap:
    """A size-d assignment of permutations to a finite support in G.

    ``table`` maps payloads to int arrays of images (read-only numpy arrays).
    """

    spec: GroupSpec
    d: int
    table: Mapping[tuple[int, ...], np.ndarray]
    provenance: str = CUSTOM
    moduli: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("d must be positive")
        frozen = {}
        for p, perm in self.table.items():
            arr = np.asarray(perm, dtype=np.int64).copy()
            if arr.shape != (self.d,) or not np.array_equal(np.sort(arr), np.arange(self.d)):
                raise ValueError(f"image list for {p} is not a permutation of {self.d} points")
            arr.setflags(write=False)
            frozen[tuple(p)] = arr
        object.__setattr__(self, "table", frozen)
        e = self.spec.identity_payload()
        if e not in frozen:
            raise ValueError("support must contain the identity")
        for p in frozen:
            if self.spec.inv_payload(p) not in frozen:
                raise ValueError("support must be inverse-closed")
        if self.provenance == EXACT_QUOTIENT and not np.array_equal(frozen[e], np.arange(self.d)):
            raise ValueError("exact quotient maps send the identity to the identity permutation")

    # -- evaluation ------------------------------------------------------------
    def support(self) -> list[GroupElement]:
        return sorted((GroupElement(self.spec, p) for p in self.table), key=GroupElement.sort_key)

    def __contains__(self, s: GroupElement) -> bool:
        return s.spec == self.spec and s.word in self.table

    def perm(self, s: GroupElement) -> np.ndarray:
        try:
            return self.table[s.word]
        except KeyError:
            raise SupportError(f"{format_element(s)} is outside the support of this sofic map") from None

    def __call__(self, s: GroupElement, a: int) -> int:
        return int(self.perm(s)[a])

    def support_radius(self) -> int:
        """Largest R such that the whole ball of radius R lies in the support."""
        R = 0
        while all(p in self.table for p in ball_payloads(self.spec, R + 1)):
            R += 1
            if R > 10_000:
                break
        return R

    def fingerprint(self) -> str:
        """Stable hash of the map (used as the sigma reference in dumps)."""
        h = hashlib.sha256()
        h.update(self.spec.describe().encode())
        h.update(str(self.d).encode())
        for p in sorted(self.table):
            h.update(repr(p).encode())
            h.update(self.table[p].tobytes())
        return h.hexdigest()[:16]


def quotient_sofic(spec: GroupSpec, moduli: Sequence[int], support_radius: int,
                   max_d: int = DEFAULT_MAX_D) -> SoficMap:
    """Translation action of a ball in Z^r on Z^r / N Z^r, indexed row-major."""
    if spec.kind != LATTICE:
        raise ValueError("quotient sofic maps are built for integer lattices")
    moduli = tuple(int(m) for m in moduli)
    if len(moduli) != spec.rank or any(m < 1 for m in moduli):
        raise ValueError("need one modulus >= 1 per lattice coordinate")
    if support_radius < 0:
        raise ValueError("support radius must be nonnegative")
    d = 1
    for m in moduli:
        d *= m
    if d > max_d:
        raise SoficOverflow(f"d = {d} exceeds the configured maximum {max_d}")
    res = np.array(list(residues(moduli)), dtype=np.int64).reshape(d, len(moduli))
    mods = np.array(moduli, dtype=np.int64)
    weights = np.array([int(np.prod(moduli[i + 1:])) for i in range(len(moduli))], dtype=np.int64)
    table = {}
    for p in ball_payloads(spec, support_radius):
        moved = (res + np.array(p, dtype=np.int64)) % mods
        table[p] = moved @ weights
    return SoficMap(spec, d, table, EXACT_QUOTIENT, moduli)


def index_of(residue: Sequence[int], moduli: Sequence[int]) -> int:
    return residue_index(tuple(residue), tuple(moduli))


def perturb(sigma: SoficMap, m: int, seed: int, keep_identity: bool = True) -> SoficMap:
    """Compose each permutation with a random permutation moving at most m points."""
    if not 0 <= m <= sigma.d:
        raise ValueError("m must lie in [0, d]")
    rng = np.random.default_rng(seed)
    e = sigma.spec.identity_payload()
    table = {}
    for p in sorted(sigma.table):
        perm = sigma.table[p]
        if m == 0 or (keep_identity and p == e):
            table[p] = perm
            continue
        pts = rng.choice(sigma.d, size=m, replace=False)
        pi = np.arange(sigma.d)
        pi[pts] = pts[rng.permutation(m)]
        table[p] = pi[perm]
    return SoficMap(sigma.spec, sigma.d, table, PERTURBED if m else sigma.provenance, sigma.moduli)


def multiplicativity_defect(sigma: SoficMap, s: GroupElement, t: GroupElement) -> Fraction:
    """1 - |{a : sigma_st(a) = sigma_s(sigma_t(a))}| / d."""
    st = s * t
    ps, pt, pst = sigma.perm(s), sigma.perm(t), sigma.perm(st)
    good = int(np.count_nonzero(pst == ps[pt]))
    return 1 - Fraction(good, sigma.d)


def freeness_defect(sigma: SoficMap, s: GroupElement, t: GroupElement) -> Fraction:
    """|{a : sigma_s(a) = sigma_t(a)}| / d for s != t."""
    if s == t:
        raise ValueError("freeness defect needs distinct group elements")
    return Fraction(int(np.count_nonzero(sigma.perm(s) == sigma.perm(t))), sigma.d)


def hamming(tau: Sequence[int], tau2: Sequence[int]) -> Fraction:
    """Normalized Hamming distance between two permutations of the same size."""
    a, b = np.asarray(tau), np.asarray(tau2)
    if a.shape != b.shape:
        raise ValueError("permutations of different sizes")
    if a.size == 0:
        return Fraction(0)
    return Fraction(int(np.count_nonzero(a != b)), a.size)


def custom_sofic(spec: GroupSpec, images: Mapping[GroupElement, Iterable[int]]) -> SoficMap:
    table = {g.word: np.asarray(list(v)) for g, v in images.items()}
    d = len(next(iter(table.values())))
    return SoficMap(spec, d, table, CUSTOM)


# -- text format ------------------------------------------------------------------

def dump_sofic(sigma: SoficMap) -> str:
    lines = [f"d={sigma.d}"]
    for s in sigma.support():
        imgs = " ".join(str(int(x) + 1) for x in sigma.perm(s))
        lines.append(f"{format_element(s)}: {imgs}")
    return "\n".join(lines) + "\n"


def load_sofic(text: str, spec: GroupSpec, provenance: str = CUSTOM) -> SoficMap:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("d="):
        raise ParseError("sofic map file must start with 'd=<int>'")
    try:
        d = int(lines[0][2:])
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}") from None
    table = {}
    for ln in lines[1:]:
        if ":" not in ln:
            raise ParseError(f"missing ':' in {ln!r}")
        head, tail = ln.split(":", 1)
        g = parse_element(head, spec)
        try:
            imgs = [int(x) - 1 for x in tail.split()]
        except ValueError:
            raise ParseError(f"bad image list in {ln!r}") from None
        if len(imgs) != d:
            raise ParseError(f"expected {d} images in {ln!r}")
        if g.word in table:
            raise ParseError(f"duplicate support element {head.strip()!r}")
        table[g.word] = imgs
    try:
        return SoficMap(spec, d, table, provenance)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
