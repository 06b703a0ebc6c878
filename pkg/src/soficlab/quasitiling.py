"""Tilings of sofic approximations by translates sigma(F)c, and what is built from them.

Everything here is finite and exactly checkable: each construction stores
its witnesses (disjointified subsets, bucket labels, matchings) and the
validators recount every claimed inequality from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvariantViolation, NotEvenCover, PreconditionViolation
from .groups import GroupElement, GroupSpec, format_element, residue_index
from .sofic import SoficMap


def _sorted(F: Iterable[GroupElement]) -> list[GroupElement]:
    return sorted(set(F), key=GroupElement.sort_key)


def tile(sigma: SoficMap, F: Sequence[GroupElement], c: int) -> list[int]:
    """sigma(F)c as a list, one entry per s in F (in the order of F)."""
    return [int(sigma.perm(s)[c]) for s in F]


def injective_centers(sigma: SoficMap, F: Sequence[GroupElement]) -> np.ndarray:
    """Mask of a with s -> sigma_s(a) injective on F."""
    if len(F) <= 1:
        return np.ones(sigma.d, dtype=bool)
    M = np.sort(np.stack([sigma.perm(s) for s in F]), axis=0)
    return np.all(M[1:] != M[:-1], axis=0)


def good_set(sigma: SoficMap, S: Iterable[GroupElement]) -> np.ndarray:
    """a with sigma_st(a) = sigma_s sigma_t(a), sigma_s(a) != sigma_s'(a), sigma_e(a) = a on S u S^-1.

    Products st outside the support of sigma are skipped.
    """
    S = _sorted(list(S) + [s.inverse() for s in S])
    ok = injective_centers(sigma, S)
    ok &= sigma.perm(sigma.spec.identity()) == np.arange(sigma.d)
    for s in S:
        for t in S:
            st = s * t
            if st in sigma:
                ok &= sigma.perm(st) == sigma.perm(s)[sigma.perm(t)]
    return ok


# -- density selection ---------------------------------------------------------------------

@dataclass(frozen=True)
class DensitySelection:
    V: tuple[int, ...]
    bound: Fraction
    lam: Fraction

    @property
    def holds(self) -> bool:
        return len(self.V) >= self.bound


def density_select(sigma: SoficMap, F: Sequence[GroupElement], B: Iterable[int], J: Iterable[int],
                   lam: float | Fraction) -> DensitySelection:
    """V = {a in B : |sigma(F)a n J| > lam |F|}, with the cardinality bound checked."""
    F = _sorted(F)
    B = sorted(set(int(b) for b in B))
    lam = Fraction(lam).limit_denominator(10 ** 12) if isinstance(lam, float) else Fraction(lam)
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    inj = injective_centers(sigma, F)
    bad = [b for b in B if not inj[b]]
    if bad:
        raise PreconditionViolation(f"sigma is not injective on F at {len(bad)} points of B, e.g. {bad[:5]}")
    inJ = np.zeros(sigma.d, dtype=bool)
    inJ[list(set(int(j) for j in J))] = True
    nJ = int(inJ.sum())
    hits = np.zeros(sigma.d, dtype=np.int64)
    for s in F:
        hits += inJ[sigma.perm(s)]
    V = tuple(b for b in B if hits[b] > lam * len(F))
    bound = (len(B) * (1 - lam) - sigma.d + nJ) / (1 - lam)
    sel = DensitySelection(V, bound, lam)
    if not sel.holds:
        raise InvariantViolation(f"|V| = {len(V)} below the guaranteed {float(bound):.3f}")
    return sel


# -- even covers ---------------------------------------------------------------------------------

@dataclass
class Refinement:
    """An eta-disjoint subfamily: ``order`` lists chosen keys, ``hats`` their disjoint parts."""

    order: list
    hats: dict
    union: set
    d: int

    @property
    def cover(self) -> Fraction:
        return Fraction(len(self.union), self.d)


def even_cover_check(family: Mapping, d: int, delta: float, multiplicity: int | None = None) -> int:
    """Verify the delta-even cover condition; return the multiplicity used."""
    counts = np.zeros(d, dtype=np.int64)
    total = 0
    for A in family.values():
        idx = np.fromiter(A, dtype=np.int64)
        counts[idx] += 1
        total += len(A)
    M = int(counts.max()) if multiplicity is None else multiplicity
    if counts.max(initial=0) > M:
        raise NotEvenCover(f"a point is covered {int(counts.max())} > {M} times")
    if total < (1 - delta) * M * d - 1e-9:
        raise NotEvenCover(f"total size {total} below (1 - delta) M d = {(1 - delta) * M * d:.3f}")
    return M


def even_cover_refine(family: Mapping, eta: float, delta: float, d: int, initial: Sequence = (),
                      multiplicity: int | None = None, target: float | None = None,
                      check: bool = True) -> Refinement:
    """Enlarge an eta-disjoint subcollection greedily, in the family's key order.

    A set is accepted when its part outside the current union keeps at least
    (1 - eta) of it.  The union only grows, so one pass yields a maximal
    subcollection; maximality forces the eta (1 - delta) cover.  With
    ``target`` the pass stops once the union reaches target * d.
    """
    if check:
        even_cover_check(family, d, delta, multiplicity)
    union: set = set()
    order, hats = [], {}
    for key in initial:
        A = set(family[key])
        hat = A - union
        if len(hat) < (1 - eta) * len(A):
            raise PreconditionViolation("the initial subcollection is not eta-disjoint in the given order")
        order.append(key)
        hats[key] = frozenset(hat)
        union |= hat
    chosen = set(order)
    for key, A in family.items():
        if target is not None and len(union) >= target * d:
            break
        if key in chosen:
            continue
        hat = set(A) - union
        if len(hat) >= (1 - eta) * len(A):
            order.append(key)
            hats[key] = frozenset(hat)
            union |= hat
            chosen.add(key)
    res = Refinement(order, hats, union, d)
    if target is None and check and res.cover < eta * (1 - delta) - 1e-12:
        raise InvariantViolation(f"cover {float(res.cover):.4f} below eta(1 - delta)")
    return res


def eta_disjoint_witness(sets: Sequence[Iterable[int]], eta: float) -> list[frozenset] | None:
    """Greedy disjointified subsets in the given order, or None if some part is too small."""
    union: set = set()
    hats = []
    for A in sets:
        A = set(A)
        hat = A - union
        if len(hat) < (1 - eta) * len(A):
            return None
        hats.append(frozenset(hat))
        union |= hat
    return hats


# -- quasitilings --------------------------------------------------------------------------------

@dataclass
class TileSystem:
    d: int
    shapes: list[list[GroupElement]]
    centers: list[list[int]]
    hats: list[dict]
    eta: float
    tau: float
    cover: Fraction
    occupancy: list[Fraction] = field(default_factory=list)
    good_fraction: float = 1.0

    def tiles(self, sigma: SoficMap):
        for k, F in enumerate(self.shapes):
            for c in self.centers[k]:
                yield k, c, tile(sigma, F, c)

    def as_dict(self) -> dict:
        return {"d": self.d, "eta": self.eta, "tau": self.tau,
                "shapes": [[format_element(s) for s in F] for F in self.shapes],
                "centers": self.centers,
                "hats": [{str(c): sorted(h) for c, h in H.items()} for H in self.hats],
                "cover": str(self.cover), "cover_float": float(self.cover),
                "occupancy": [str(x) for x in self.occupancy], "good_fraction": self.good_fraction}


@dataclass(frozen=True)
class TileValidation:
    injective: bool
    cross_disjoint: bool
    hats_valid: bool
    cover: Fraction
    cover_matches: bool
    centers_in_V: bool

    @property
    def ok(self) -> bool:
        return self.injective and self.cross_disjoint and self.hats_valid and self.cover_matches \
            and self.centers_in_V


def validate_tiles(ts: TileSystem, sigma: SoficMap, V: Iterable[int] | None = None) -> TileValidation:
    """Recount every TileSystem claim from sigma and the stored witnesses."""
    injective, hats_valid = True, True
    owner: dict[int, int] = {}
    cross = True
    used: set = set()
    for k, c, pts in ts.tiles(sigma):
        if len(set(pts)) != len(pts):
            injective = False
        for p in pts:
            if owner.setdefault(p, k) != k:
                cross = False
        hat = ts.hats[k].get(c)
        if hat is None or not hat <= set(pts) or len(hat) < (1 - ts.eta) * len(pts) or hat & used:
            hats_valid = False
        else:
            used |= hat
    cover = Fraction(len(owner), ts.d)
    in_V = True
    if V is not None:
        Vs = set(V)
        in_V = all(c in Vs for C in ts.centers for c in C)
    return TileValidation(injective, cross, hats_valid, cover, cover == ts.cover, in_V)


def _nested(shapes: Sequence[Sequence[GroupElement]]) -> bool:
    return all(set(a) <= set(b) for a, b in zip(shapes, shapes[1:]))


def quasitile(sigma: SoficMap, shapes: Sequence[Sequence[GroupElement]], V: Iterable[int], eta: float,
              tau: float = 0.0, reference: Sequence[float] | None = None,
              delta: float | None = None) -> TileSystem:
    """Greedy quasitiling: largest shape first, centers in ascending order.

    A center c of shape F_k is taken when s -> sigma_s(c) is injective on
    F_k, sigma(F_k)c misses every tile of a larger shape, and at least
    (1 - eta)|F_k| of it lies outside the tiles already chosen for F_k.
    """
    shapes = [_sorted(F) for F in shapes]
    if not shapes or not _nested(shapes):
        raise PreconditionViolation("shapes must be nonempty and nested F_1 <= ... <= F_l")
    e = sigma.spec.identity()
    if e not in shapes[0]:
        raise PreconditionViolation("the smallest shape must contain the identity")
    V = sorted(set(int(v) for v in V))
    if len(V) < (1 - tau) * sigma.d - 1e-9:
        raise PreconditionViolation(f"|V| = {len(V)} < (1 - tau) d")
    good = good_set(sigma, shapes[-1])
    d = sigma.d
    covered = np.zeros(d, dtype=bool)
    centers: list[list[int]] = [[] for _ in shapes]
    hats: list[dict] = [{} for _ in shapes]
    for k in reversed(range(len(shapes))):
        F = shapes[k]
        P = np.stack([sigma.perm(s) for s in F])  # P[:, c] = sigma(F)c
        inj = injective_centers(sigma, F)
        shape_union = np.zeros(d, dtype=bool)
        need = (1 - eta) * len(F)
        for c in V:
            if not inj[c]:
                continue
            pts = P[:, c]
            if covered[pts].any():
                continue
            fresh = ~shape_union[pts]
            if fresh.sum() < need:
                continue
            centers[k].append(c)
            hats[k][c] = frozenset(int(p) for p in pts[fresh])
            shape_union[pts] = True
        covered |= shape_union
    occupancy = [Fraction(len(set().union(*[tile(sigma, shapes[k], c) for c in centers[k]])), d)
                 if centers[k] else Fraction(0) for k in range(len(shapes))]
    ts = TileSystem(d, shapes, centers, hats, eta, tau, Fraction(int(covered.sum()), d), occupancy,
                    float(good.mean()))
    if reference is not None and delta is not None:
        gap = sum(abs(float(o) - r) for o, r in zip(occupancy, reference))
        if gap >= delta:
            raise InvariantViolation(f"occupancies differ from the reference by {gap:.4f} >= {delta}")
    return ts


# -- matched tiles -----------------------------------------------------------------------------

@dataclass
class MatchedTiles:
    C1: list[int]
    C2: list[int]
    phi: dict
    hats1: dict
    hats2: dict
    buckets: dict
    checks: dict
    partial: bool

    def as_dict(self) -> dict:
        return {"C1": self.C1, "C2": self.C2, "phi": {str(k): v for k, v in self.phi.items()},
                "checks": self.checks, "partial": self.partial}


def tau_prime(tau: float) -> float:
    return tau / 2 + (2 - 2 * tau) / (2 - tau)


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def matched_tiles(sigma: SoficMap, F: Sequence[GroupElement], B1: Iterable[int], B2: Iterable[int],
                  J1: Iterable[int], J2: Iterable[int], tau: float | Fraction, eta: float,
                  truncate: bool = False, check_preconditions: bool = True) -> MatchedTiles:
    """Two eta-disjoint tile families and a matching with (tau/2)^2 |F| joint hits per tile.

    Pipeline: density selection for J1, greedy refinement into W1, buckets by
    the first ceil(|F| tau/2) elements of F sending c into J1, and for each
    bucket a density selection for J2 on that subset followed by a
    refinement that keeps all earlier C2 tiles.  Buckets are matched by
    cardinality.  All conclusions are recounted and reported.
    """
    F = _sorted(F)
    d = sigma.d
    tau = Fraction(tau).limit_denominator(10 ** 9)
    B1, B2 = sorted(set(map(int, B1))), sorted(set(map(int, B2)))
    J1, J2 = set(map(int, J1)), set(map(int, J2))
    if not 0 < tau <= 1 or not 0 < eta < 0.5:
        raise ValueError("need 0 < tau <= 1 and 0 < eta < 1/2")
    if check_preconditions:
        tp = tau / 2 + (2 - 2 * tau) / (2 - tau)
        for name, B in (("B1", B1), ("B2", B2)):
            if len(B) < tp * d:
                raise PreconditionViolation(f"|{name}| = {len(B)} < (tau/2 + (2-2tau)/(2-tau)) d = {float(tp * d):.2f}")
        for name, J in (("J1", J1), ("J2", J2)):
            if len(J) < tau * d:
                raise PreconditionViolation(f"|{name}| = {len(J)} < tau d")
    lam = tau / 2 if tau < 1 else Fraction(1, 2)
    delta = float((2 - tau) / 2)
    V1 = density_select(sigma, F, B1, J1, lam).V
    fam1 = {c: tile(sigma, F, c) for c in V1}
    target = float(eta * tau / 2) if truncate else None
    W1 = even_cover_refine(fam1, eta, delta, d, multiplicity=len(F), target=target) if fam1 else \
        Refinement([], {}, set(), d)
    m = _ceil_frac(len(F) * tau / 2)
    buckets: dict[tuple, list[int]] = {}
    for c in W1.order:
        hit = tuple(i for i, s in enumerate(F) if int(sigma.perm(s)[c]) in J1)[:m]
        buckets.setdefault(hit, []).append(c)
    C1: list[int] = []
    C2: list[int] = []
    phi: dict[int, int] = {}
    fam2_all: dict[int, list[int]] = {}
    for key in sorted(buckets):
        Fj = [F[i] for i in key]
        V2 = density_select(sigma, Fj, B2, J2, lam).V
        prev = list(C2)
        fam = {c: tile(sigma, F, c) for c in prev}
        for c in V2:
            if c not in fam:
                fam[c] = tile(sigma, F, c)
        W2 = even_cover_refine(fam, eta, delta, d, initial=prev, multiplicity=len(F), check=False)
        new = [c for c in W2.order[len(prev):]]
        take = min(len(buckets[key]), len(new))
        for a, b in zip(buckets[key][:take], new[:take]):
            C1.append(a)
            C2.append(b)
            phi[a] = b
        fam2_all.update({c: fam[c] for c in new[:take]})
    hats1 = eta_disjoint_witness([fam1[c] for c in C1], eta)
    hats2 = eta_disjoint_witness([tile(sigma, F, c) for c in C2], eta)
    cover1 = Fraction(len(set().union(*map(set, (fam1[c] for c in C1)))) if C1 else 0, d)
    cover2 = Fraction(len(set().union(*map(set, (tile(sigma, F, c) for c in C2)))) if C2 else 0, d)
    need = tau ** 2 / 4 * len(F)
    joint = min((sum(1 for s in F if int(sigma.perm(s)[c]) in J1 and int(sigma.perm(s)[phi[c]]) in J2)
                 for c in C1), default=None)
    checks = {
        "eta_disjoint_1": hats1 is not None,
        "eta_disjoint_2": hats2 is not None,
        "cover_1": float(cover1), "cover_2": float(cover2),
        "cover_required": float(eta * tau / 16),
        "cover_ok": cover1 >= eta * tau / 16 and cover2 >= eta * tau / 16,
        "min_joint_hits": joint, "joint_required": float(need),
        "joint_ok": joint is not None and joint >= need,
        "bijection_ok": len(set(phi.values())) == len(phi) == len(C1),
        "in_B": set(C1) <= set(B1) and set(C2) <= set(B2),
        "buckets": len(buckets),
    }
    partial = not all(checks[k] for k in ("eta_disjoint_1", "eta_disjoint_2", "cover_ok", "joint_ok",
                                          "bijection_ok", "in_B"))
    return MatchedTiles(C1, C2, phi,
                        dict(zip(C1, hats1 or [])), dict(zip(C2, hats2 or [])),
                        {",".join(map(str, k)): v for k, v in buckets.items()}, checks, partial)


@dataclass
class MatchedLayers:
    """Matched tiles for nested shapes F_1 <= ... <= F_l, built from the largest down."""

    shapes: list[list[GroupElement]]
    C1: list[list[int]]
    C2: list[list[int]]
    phi: list[dict]
    union1: set
    union2: set
    partial: bool
    notes: list[str]


def matched_layers(sigma: SoficMap, shapes: Sequence[Sequence[GroupElement]], B: Iterable[int],
                   J1: Iterable[int], J2: Iterable[int], tau: float, eta: float,
                   keep_fraction: float | None = None) -> MatchedLayers:
    """Layered matched tiles with cross-layer disjointness, trimmed to ``keep_fraction`` d.

    Layer k only uses centers whose F_k-tile misses the tiles of the larger
    layers on the same side.  A layer is skipped when the covered part is
    already a third of 1 - tau' - eta' (eta' = (1 - tau')/2).  Trimming keeps
    tiles of side 1 (largest shapes first) until the union reaches
    keep_fraction * d, and always keeps at least one tile.
    """
    shapes = [_sorted(F) for F in shapes]
    if not _nested(shapes):
        raise PreconditionViolation("shapes must be nested")
    B = sorted(set(map(int, B)))
    d = sigma.d
    tp = tau_prime(tau)
    eta_p = (1 - tp) / 2
    C1: list[list[int]] = [[] for _ in shapes]
    C2: list[list[int]] = [[] for _ in shapes]
    phis: list[dict] = [{} for _ in shapes]
    used = [np.zeros(d, dtype=bool), np.zeros(d, dtype=bool)]
    notes = []
    partial = False
    for k in reversed(range(len(shapes))):
        F = shapes[k]
        theta = max(float(u.mean()) for u in used)
        if 1 - tp - eta_p < 3 * theta:
            notes.append(f"layer {k}: skipped, covered fraction {theta:.4f} already large")
            continue
        P = np.stack([sigma.perm(s) for s in F])
        Bk = [[c for c in B if not used[i][P[:, c]].any()] for i in range(2)]
        try:
            mt = matched_tiles(sigma, F, Bk[0], Bk[1], J1, J2, tau, eta, check_preconditions=False)
        except (PreconditionViolation, NotEvenCover, InvariantViolation) as exc:
            notes.append(f"layer {k}: {exc}")
            partial = True
            continue
        partial = partial or mt.partial
        C1[k], C2[k], phis[k] = mt.C1, mt.C2, mt.phi
        for c in mt.C1:
            used[0][P[:, c]] = True
        for c in mt.C2:
            used[1][P[:, c]] = True
    if keep_fraction is not None:
        kept1: list[list[int]] = [[] for _ in shapes]
        union: set = set()
        for k in reversed(range(len(shapes))):
            for c in C1[k]:
                if union and len(union) >= keep_fraction * d:
                    break
                kept1[k].append(c)
                union |= set(tile(sigma, shapes[k], c))
        C1 = kept1
        C2 = [[phis[k][c] for c in C1[k]] for k in range(len(shapes))]
        phis = [{c: phis[k][c] for c in C1[k]} for k in range(len(shapes))]
    u1 = set().union(*[set(tile(sigma, shapes[k], c)) for k in range(len(shapes)) for c in C1[k]]) \
        if any(C1) else set()
    u2 = set().union(*[set(tile(sigma, shapes[k], c)) for k in range(len(shapes)) for c in C2[k]]) \
        if any(C2) else set()
    return MatchedLayers(shapes, C1, C2, phis, u1, u2, partial, notes)


# -- the approximately commuting permutation -------------------------------------------------------

@dataclass
class BijectionResult:
    phi: np.ndarray
    defects: dict
    max_defect: Fraction
    overlap: Fraction
    lam: float
    epsilon: float
    tau: float
    checks: dict
    notes: list[str]

    @property
    def ok(self) -> bool:
        return self.checks["permutation"] and self.checks["defect_ok"] and self.checks["overlap_ok"]

    def as_dict(self) -> dict:
        return {"defects": {k: str(v) for k, v in self.defects.items()},
                "max_defect": str(self.max_defect), "max_defect_float": float(self.max_defect),
                "overlap": str(self.overlap), "overlap_float": float(self.overlap), "lambda": self.lam,
                "epsilon": self.epsilon, "tau": self.tau, "checks": self.checks, "notes": self.notes,
                "phi": [int(v) for v in self.phi]}


def commutation_defect(phi: np.ndarray, perm: np.ndarray) -> Fraction:
    """rho_Hamm(phi sigma_s, sigma_s phi)."""
    return Fraction(int(np.count_nonzero(phi[perm] != perm[phi])), len(phi))


def _hat_offsets(sigma: SoficMap, F: Sequence[GroupElement], c: int, hat: frozenset) -> set[int]:
    return {i for i, s in enumerate(F) if int(sigma.perm(s)[c]) in hat}


def commuting_bijection(sigma: SoficMap, Y: Iterable[int], Z: Iterable[int], F: Sequence[GroupElement],
                        epsilon: float, big_shapes: Sequence[Sequence[GroupElement]],
                        small_shapes: Sequence[Sequence[GroupElement]], eta: float = 0.1,
                        tau: float | None = None) -> BijectionResult:
    """A permutation phi with phi sigma_s close to sigma_s phi and phi(Y) meeting Z.

    Big tiles come from matched tiles between Y and Z (trimmed to about
    (1 - tau')/24 d); small tiles quasitile what remains, separately on the
    two sides, and are matched by cardinality per shape.  phi sends
    sigma_s(c) to sigma_s(c') on the jointly disjoint parts of matched tiles,
    fixes what it can of the rest and pairs up the leftovers in order.
    """
    d = sigma.d
    Y, Z = sorted(set(map(int, Y))), sorted(set(map(int, Z)))
    F = _sorted(F)
    if tau is None:
        tau = min(len(Y), len(Z)) / d / 2
    if min(len(Y), len(Z)) < 2 * tau * d - 1e-9:
        raise PreconditionViolation("|Y|/d and |Z|/d must be at least 2 tau")
    tp = tau_prime(tau)
    lam = tau ** 2 * (1 - tp) / 384
    notes: list[str] = []
    big_shapes = [_sorted(S) for S in big_shapes]
    small_shapes = [_sorted(S) for S in small_shapes]
    B = np.nonzero(good_set(sigma, list(F) + list(big_shapes[-1])))[0]
    layers = matched_layers(sigma, big_shapes, B, Y, Z, tau, eta, keep_fraction=(1 - tp) / 24)
    notes += layers.notes
    pairs: list[tuple[list[GroupElement], int, int, frozenset, frozenset]] = []
    hats = [{}, {}]
    for side, C in ((0, layers.C1), (1, layers.C2)):
        seq = [(k, c) for k in reversed(range(len(big_shapes))) for c in C[k]]
        w = eta_disjoint_witness([tile(sigma, big_shapes[k], c) for k, c in seq], eta)
        if w is None:
            raise InvariantViolation("big tiles are not eta-disjoint")
        hats[side] = dict(zip(seq, w))
    for k in range(len(big_shapes)):
        for c in layers.C1[k]:
            c2 = layers.phi[k][c]
            pairs.append((big_shapes[k], c, c2, hats[0][(k, c)], hats[1][(k, c2)]))
    # small tiles avoid the big ones on each side
    Fs = small_shapes[-1]
    Ps = np.stack([sigma.perm(s) for s in Fs])
    small = []
    for union in (layers.union1, layers.union2):
        mask = np.zeros(d, dtype=bool)
        mask[list(union)] = True
        V = [int(c) for c in B if not mask[Ps[:, c]].any()]
        theta = 1 - len(V) / d
        ts = quasitile(sigma, small_shapes, V, eta, tau=min(theta + 1e-12, 1.0))
        small.append(ts)
    for k, Fk in enumerate(small_shapes):
        a, b = small[0].centers[k], small[1].centers[k]
        m = min(len(a), len(b))
        for c, c2 in zip(a[:m], b[:m]):
            pairs.append((Fk, c, c2, small[0].hats[k][c], small[1].hats[k][c2]))
    phi = -np.ones(d, dtype=np.int64)
    taken = np.zeros(d, dtype=bool)
    for shape, c, c2, h1, h2 in pairs:
        common = _hat_offsets(sigma, shape, c, h1) & _hat_offsets(sigma, shape, c2, h2)
        for i in sorted(common):
            src, dst = int(sigma.perm(shape[i])[c]), int(sigma.perm(shape[i])[c2])
            if phi[src] >= 0 or taken[dst]:
                raise InvariantViolation("disjointified tiles overlap")
            phi[src] = dst
            taken[dst] = True
    free_src = [a for a in range(d) if phi[a] < 0]
    for a in free_src:
        if not taken[a]:
            phi[a] = a
            taken[a] = True
    rest_src = [a for a in range(d) if phi[a] < 0]
    rest_dst = [a for a in range(d) if not taken[a]]
    for a, b in zip(rest_src, rest_dst):
        phi[a] = b
    is_perm = bool(np.array_equal(np.sort(phi), np.arange(d)))
    if not is_perm:
        raise InvariantViolation("the assembled map is not a permutation")
    defects = {format_element(s): commutation_defect(phi, sigma.perm(s)) for s in F}
    worst = max(defects.values(), default=Fraction(0))
    Zmask = np.zeros(d, dtype=bool)
    Zmask[Z] = True
    overlap = Fraction(int(Zmask[phi[Y]].sum()), d)
    checks = {"permutation": is_perm, "defect_ok": worst < Fraction(epsilon).limit_denominator(10 ** 12),
              "overlap_ok": overlap >= lam, "big_tiles": sum(len(C) for C in layers.C1),
              "small_tiles": sum(min(len(a), len(b)) for a, b in zip(small[0].centers, small[1].centers)),
              "partial": layers.partial}
    return BijectionResult(phi, defects, worst, overlap, lam, epsilon, tau, checks, notes)


# -- residually finite mixing ------------------------------------------------------------------------

def right_translation(spec: GroupSpec) -> dict:
    """sigma'(s)(t) = t s^-1 on a finite quotient, as index arrays (row-major residues)."""
    elems = spec.elements()
    out = {}
    for s in elems:
        sinv = s.inverse()
        out[s.word] = np.array([residue_index((t * sinv).word, spec.moduli) for t in elems], dtype=np.int64)
    return out


@dataclass(frozen=True)
class MixingReport:
    s: tuple[int, ...]
    achieved: Fraction
    bound: Fraction
    average: Fraction
    identity_holds: bool

    @property
    def ok(self) -> bool:
        return self.identity_holds and self.achieved >= self.bound


def rf_mixing_check(table: Mapping[tuple, np.ndarray], Y: Iterable[int]) -> MixingReport:
    """Exact check of the averaged symmetric-difference identity and a witness s.

    (1/|Q|) sum_s |s Y triangle Y| = 2 (|Y|/|Q|)(|Q| - |Y|), and some s has
    |s Y triangle Y| / |Q| >= 2 (|Y|/|Q|)(1 - |Y|/|Q|).
    """
    keys = sorted(table)
    n = len(table[keys[0]])
    Ymask = np.zeros(n, dtype=bool)
    Ymask[list(set(map(int, Y)))] = True
    y = int(Ymask.sum())
    best_s, best = keys[0], -1
    total = 0
    for s in keys:
        moved = np.zeros(n, dtype=bool)
        moved[table[s][Ymask]] = True
        diff = int(np.count_nonzero(moved ^ Ymask))
        total += diff
        if diff > best:
            best_s, best = s, diff
    average = Fraction(total, n)
    rhs = Fraction(2 * y * (n - y), n)
    bound = 2 * Fraction(y, n) * (1 - Fraction(y, n))
    return MixingReport(best_s, Fraction(best, n), bound, average, average == rhs)
