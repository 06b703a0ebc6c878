"""Independence sets: orbit version over windows F, sofic version over {0..d-1},
shattering extraction, the branch split for covers, and Li-Yorke scans."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .actions import (
    ActionSpec,
    Algebraic,
    Cylinder,
    FullShift,
    MetricBall,
    PointPattern,
    ProductAction,
    SetTuple,
    algebraic_action,
    convolve_point,
    product_cylinder,
)
from .errors import CapExceeded, InvariantViolation, SigmaQualityError, WindowExhausted
from .extension import extends
from .groups import GroupElement, ball_payloads, format_element
from .microstates import (
    Microstate,
    algebraic_microstate,
    fullshift_microstate,
    is_microstate,
    microstate_hash,
)
from .sofic import SoficMap

OMEGA_CAP = 1 << 20
DENSITY_CAP = 20
KM_CAP = 16


# -- orbit independence -----------------------------------------------------------------------

@dataclass(frozen=True)
class IndependenceVerdict:
    """``holds`` is True/False, or None when some pattern could not be decided."""

    holds: bool | None
    certified: bool
    failing: tuple[int, ...] | None = None
    undecided: int = 0

    def __bool__(self) -> bool:
        return bool(self.holds)


def _cylinders(A: SetTuple) -> tuple[Cylinder, ...]:
    if not A.symbolic():
        raise TypeError("orbit independence needs cylinder sets; metric balls use the sofic variant")
    return tuple(A.sets)


def check_independence(J: Iterable[GroupElement], A: SetTuple, action: ActionSpec,
                       margin: int = 2, node_budget: int = 200_000) -> IndependenceVerdict:
    """For every omega: J -> {0..k-1}, is the intersection of s^-1 A_omega(s) over s in J nonempty?"""
    if not action.symbolic:
        raise TypeError("orbit independence is decided only for symbolic actions")
    cyls = _cylinders(A)
    J = sorted(set(J), key=GroupElement.sort_key)
    if len(cyls) ** len(J) > OMEGA_CAP:
        raise CapExceeded(f"{len(cyls)}^{len(J)} patterns exceed the enumeration cap")
    pulled = [[c.pullback(s) for c in cyls] for s in J]
    spec = cyls[0].spec
    certified = True
    undecided = 0
    for omega in itertools.product(range(len(cyls)), repeat=len(J)):
        cyl = Cylinder(spec, ())
        for row, j in zip(pulled, omega):
            cyl = cyl.intersect(row[j])
        res = extends(action, cyl, margin, node_budget)
        if res.exists is False:
            return IndependenceVerdict(False, True, omega)
        if res.exists is None:
            undecided += 1
        certified = certified and res.certified
    if undecided:
        return IndependenceVerdict(None, False, None, undecided)
    return IndependenceVerdict(True, certified)


def is_independence_set(J: Iterable[GroupElement], A: SetTuple, action: ActionSpec) -> bool | None:
    """Tri-state: True, False, or None when the search budget ran out."""
    return check_independence(J, A, action).holds


@dataclass(frozen=True)
class DensityResult:
    q: Fraction
    J: tuple[GroupElement, ...]
    F_size: int
    exact: bool
    certified: bool

    def as_dict(self) -> dict:
        return {"q": str(self.q), "q_float": float(self.q), "J": [format_element(s) for s in self.J],
                "F_size": self.F_size, "exact": self.exact, "certified": self.certified}


def independence_density(F: Iterable[GroupElement], A: SetTuple, action: ActionSpec, mode: str = "exact",
                         cap: int = DENSITY_CAP) -> DensityResult:
    """Largest independence subset J of F (exact), or a maximal one (greedy).

    Independence is hereditary, so the exact search only extends sets that
    are themselves independence sets, and prunes branches that cannot beat
    the incumbent.  Undecided patterns count as failures: the result is then
    a certified lower bound only.
    """
    F = sorted(set(F), key=GroupElement.sort_key)
    if mode not in ("exact", "greedy"):
        raise ValueError("mode must be 'exact' or 'greedy'")
    if mode == "exact" and len(F) > cap:
        raise CapExceeded(f"|F| = {len(F)} exceeds the exact-mode cap {cap}")
    if not F:
        return DensityResult(Fraction(1), (), 0, True, True)
    cache: dict[tuple, IndependenceVerdict] = {}
    certified = True

    def indep(S: tuple) -> bool:
        nonlocal certified
        if S not in cache:
            cache[S] = check_independence([F[i] for i in S], A, action)
        v = cache[S]
        if v.holds is None or not v.certified:
            certified = False
        return v.holds is True

    if mode == "greedy":
        chosen: tuple = ()
        for i in range(len(F)):
            if indep(chosen + (i,)):
                chosen = chosen + (i,)
        J = tuple(F[i] for i in chosen)
        return DensityResult(Fraction(len(J), len(F)), J, len(F), False, certified)

    best: tuple = ()

    def rec(i: int, cur: tuple) -> None:
        nonlocal best
        if len(cur) + (len(F) - i) <= len(best):
            return
        if i == len(F):
            best = cur
            return
        nxt = cur + (i,)
        if indep(nxt):
            rec(i + 1, nxt)
        rec(i + 1, cur)

    rec(0, ())
    J = tuple(F[i] for i in best)
    return DensityResult(Fraction(len(J), len(F)), J, len(F), True, certified)


@dataclass(frozen=True)
class ProductDensityReport:
    q: Fraction
    r: Fraction
    J: tuple[GroupElement, ...]
    J1: tuple[GroupElement, ...]
    F_size: int
    product_valid: bool | None

    @property
    def inequality_holds(self) -> bool:
        return len(self.J1) >= self.q * self.r * self.F_size

    def as_dict(self) -> dict:
        return {"q": str(self.q), "r": str(self.r), "J": [format_element(s) for s in self.J],
                "J1": [format_element(s) for s in self.J1], "F_size": self.F_size,
                "bound": str(self.q * self.r * self.F_size), "inequality_holds": self.inequality_holds,
                "product_valid": self.product_valid}


def product_tuple(A: SetTuple, B: SetTuple, left: ActionSpec, right: ActionSpec) -> SetTuple:
    """(A_i x B_j) for all pairs (i, j), as cylinders over pair symbols."""
    ls, rs = left.symbols(), right.symbols()
    return SetTuple(tuple(product_cylinder(a, b, ls, rs) for a in _cylinders(A) for b in _cylinders(B)))


def product_density_check(F: Iterable[GroupElement], A: SetTuple, X: ActionSpec, B: SetTuple,
                          Y: ActionSpec) -> ProductDensityReport:
    """Find J in F for A, then J1 in J for B, and validate J1 for A x B on X x Y."""
    F = sorted(set(F), key=GroupElement.sort_key)
    first = independence_density(F, A, X)
    second = independence_density(first.J, B, Y)
    J1 = second.J
    if not J1:
        valid: bool | None = True
    else:
        valid = is_independence_set(J1, product_tuple(A, B, X, Y), ProductAction(X, Y))
    q = first.q
    r = second.q if first.J else Fraction(0)
    return ProductDensityReport(q, r, first.J, J1, len(F), valid)


# -- sofic independence ---------------------------------------------------------------------------

def _contains(S, x: PointPattern) -> bool:
    return S.contains(x)


@dataclass
class SoficIndependenceReport:
    holds: bool
    J: tuple[int, ...]
    patterns_checked: int
    sampled: bool
    failures: int = 0
    first_failure: tuple[int, ...] | None = None
    witnesses: dict = field(default_factory=dict)
    failure_rate_upper: float | None = None

    def __bool__(self) -> bool:
        return self.holds

    def as_dict(self) -> dict:
        return {"holds": self.holds, "J": list(self.J), "patterns_checked": self.patterns_checked,
                "sampled": self.sampled, "failures": self.failures,
                "first_failure": list(self.first_failure) if self.first_failure else None,
                "failure_rate_upper": self.failure_rate_upper,
                "witnesses": {",".join(map(str, k)): v for k, v in sorted(self.witnesses.items())}}


def _patterns(k: int, n: int, samples: int | None, seed: int):
    if samples is None:
        if k ** n > OMEGA_CAP:
            raise CapExceeded(f"{k}^{n} patterns exceed the cap; pass a sample count")
        yield from itertools.product(range(k), repeat=n)
        return
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        yield tuple(int(v) for v in rng.integers(0, k, size=n))


def clopper_pearson_upper(failures: int, trials: int, alpha: float = 0.05) -> float:
    """One-sided upper confidence bound on a failure rate."""
    from scipy.stats import beta

    if failures >= trials:
        return 1.0
    return float(beta.ppf(1 - alpha, failures + 1, trials - failures))


def fullshift_witness(pattern: Sequence[int], J: Sequence[int], A: SetTuple, sigma: SoficMap,
                      action: ActionSpec, radius: int, fill: int = 0) -> Microstate | None:
    """phi_omega' realizing the pattern at J: omega' pinned through the cylinder constraints."""
    spec = sigma.spec
    omega: dict[int, frozenset] = {}
    for a, j in zip(J, pattern):
        for p, syms in _cylinders(A)[j].allowed:
            if spec.length_payload(p) > radius:
                raise WindowExhausted("cylinder position outside the microstate window")
            b = int(sigma.table[spec.inv_payload(p)][a])  # phi(a)_p = omega(sigma_{p^-1}(a))
            omega[b] = omega[b] & syms if b in omega else frozenset(syms)
    symbols = action.symbols()
    values = []
    for b in range(sigma.d):
        allowed = omega.get(b)
        if allowed is None:
            values.append(symbols[fill])
            continue
        ok = [s for s in symbols if s in allowed]
        if not ok:
            return None
        values.append(ok[0])
    return fullshift_microstate(values, sigma, radius, action)


def sofic_independence_check(J: Iterable[int], A: SetTuple, F: Sequence[GroupElement], delta: float,
                             sigma: SoficMap, action: ActionSpec, radius: int = 1,
                             samples: int | None = None, seed: int = 0,
                             generator: Callable[[tuple[int, ...]], Microstate | None] | None = None,
                             keep_witnesses: bool = False) -> SoficIndependenceReport:
    """For each pattern omega on J, build a witness and validate it.

    A witness must lie in Map(rho, F, delta, sigma) and satisfy
    phi(a) in A_omega(a) for a in J.  Full shifts use phi_omega' with pinned
    coordinates; other actions must pass ``generator``.
    """
    J = tuple(sorted(set(int(a) for a in J)))
    if any(not 0 <= a < sigma.d for a in J):
        raise ValueError("indices must lie in {0..d-1}")
    k = len(A)
    if generator is None:
        if not isinstance(action, FullShift) and not (isinstance(action, ProductAction)
                                                      and action.symbolic):
            raise ValueError("no witness generator for this action; pass one explicitly")

        def generator(pattern):
            return fullshift_witness(pattern, J, A, sigma, action, radius)

    checked = failures = 0
    first = None
    witnesses = {}
    for pattern in _patterns(k, len(J), samples, seed):
        checked += 1
        phi = generator(pattern)
        ok = phi is not None
        if ok:
            ok = bool(is_microstate(phi, F, delta))
            ok = ok and all(_contains(A[j], phi[a]) for a, j in zip(J, pattern))
        if ok and keep_witnesses:
            witnesses[pattern] = microstate_hash(phi)
        if not ok:
            failures += 1
            if first is None:
                first = pattern
            if samples is None:
                break
    upper = clopper_pearson_upper(failures, checked) if samples is not None else None
    return SoficIndependenceReport(failures == 0, J, checked, samples is not None, failures, first,
                                   witnesses, upper)


# -- the algebraic construction --------------------------------------------------------------

@dataclass
class IndependenceCertificate:
    J: tuple[int, ...]
    d: int
    density: Fraction
    bound: Fraction
    lambda_size: int
    K: tuple[str, ...]
    patterns_checked: int
    sampled: bool
    all_valid: bool
    worst_defect: float
    worst_ball_margin: float
    witnesses: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"J": list(self.J), "d": self.d, "density": str(self.density), "bound": str(self.bound),
                "lambda_size": self.lambda_size, "K": list(self.K),
                "patterns_checked": self.patterns_checked, "sampled": self.sampled,
                "all_valid": self.all_valid, "worst_defect": self.worst_defect,
                "worst_ball_margin": self.worst_ball_margin,
                "witnesses": {",".join(map(str, k)): v for k, v in sorted(self.witnesses.items())}}


def injectivity_locus(sigma: SoficMap, K: Sequence[GroupElement]) -> np.ndarray:
    """Indices a with sigma_s(a) != sigma_t(a) for all distinct s, t in K^-1."""
    perms = np.stack([sigma.perm(s.inverse()) for s in K])
    srt = np.sort(perms, axis=0)
    return np.all(srt[1:] != srt[:-1], axis=0) if len(K) > 1 else np.ones(sigma.d, dtype=bool)


def disjoint_translates(sigma: SoficMap, K: Sequence[GroupElement], candidates: Iterable[int]) -> list[int]:
    """Greedy maximal set of candidates whose sets K^-1 a are pairwise disjoint (ascending order)."""
    Kinv = [sigma.perm(s.inverse()) for s in K]
    used = np.zeros(sigma.d, dtype=bool)
    out = []
    for a in candidates:
        pts = [int(p[a]) for p in Kinv]
        if not used[pts].any():
            used[pts] = True
            out.append(int(a))
    return out


def lpoint_from_z(z: Mapping[tuple, Sequence[int]], action: Algebraic, radius: int) -> PointPattern:
    """The point P(z (A*)^-1) on a window, for finitely supported integer z."""
    spec = action.spec
    g = action.inverse
    n = action.n
    vals = {}
    for u in ball_payloads(spec, radius):
        row = []
        for j in range(n):
            acc = 0.0
            for v, zv in z.items():
                w = spec.mul_payload(spec.inv_payload(v), u)  # (z g)_u = sum_v z_v g(v^-1 u)
                for i in range(n):
                    acc += zv[i] * g.entries[i][j].terms.get(w, 0.0)
            row.append(acc % 1.0)
        vals[u] = tuple(0.0 if c >= 1.0 else c for c in row)
    tail = max(abs(c) for zv in z.values() for c in zv) * float(g.tail) if z else 0.0
    return PointPattern(spec, radius, vals, tail + 1e-15)


def z_from_point(x: PointPattern, action: Algebraic, positions: Iterable[tuple],
                 tol: float = 1e-6) -> dict[tuple, tuple[int, ...]]:
    """Integer z = x~ A* on the given positions, where x~ lifts x to [0,1)."""
    Astar = action.A.star()
    vals = convolve_point(x, Astar, positions)
    out = {}
    for p, v in vals.items():
        r = tuple(int(round(c)) for c in v)
        if max(abs(c - ri) for c, ri in zip(v, r)) > tol:
            raise ValueError("ball center is not (numerically) a point of X_A")
        out[p] = r
    return out


def algebraic_independence_set(A, K: Sequence[GroupElement], sigma: SoficMap, U: SetTuple,
                               F: Sequence[GroupElement], delta: float, samples: int | None = None,
                               seed: int = 0, radius: int | None = None,
                               keep_witnesses: bool = False) -> IndependenceCertificate:
    """The construction for X_A: disjoint K^-1-translates inside the injectivity locus.

    Base points z_j = x~_j A* come from the ball centers.  For each pattern
    omega, xi(sigma_t(a)) = (z_omega(a))_{t^-1} on K^-1 a (a in J) and 0
    elsewhere, and the L-point microstate built from xi is validated
    against Map(rho, F, delta, sigma) and the balls (with tail bounds).
    """
    action = A if isinstance(A, Algebraic) else algebraic_action(A)
    K = sorted(set(K), key=GroupElement.sort_key)
    if any(not isinstance(b, MetricBall) for b in U):
        raise TypeError("algebraic independence sets use metric balls")
    lam = injectivity_locus(sigma, K)
    lam_size = int(lam.sum())
    if 2 * lam_size < sigma.d:
        raise SigmaQualityError(f"injectivity locus has density {lam_size / sigma.d:.4f} < 1/2")
    J = disjoint_translates(sigma, K, np.nonzero(lam)[0])
    bound = Fraction(sigma.d, 2 * len(K) ** 2)
    if len(J) < bound:
        raise InvariantViolation(f"|J| = {len(J)} below d/(2|K|^2) = {float(bound):.4f}")
    M = int(action.A.l1_norm())
    Kpos = [s.word for s in K]
    zs = [z_from_point(ball.center, action, Kpos) for ball in U]
    if any(max((abs(c) for v in z.values() for c in v), default=0) > M for z in zs):
        raise InvariantViolation("base point exceeds the bound ||A||_1")
    if radius is None:
        radius = max([1] + [s.length for s in F])
    Kinv = [(s, sigma.perm(s.inverse())) for s in K]
    checked, all_valid = 0, True
    worst_def, worst_margin = 0.0, math.inf
    witnesses = {}
    for pattern in _patterns(len(U), len(J), samples, seed):
        checked += 1
        xi = np.zeros((sigma.d, action.n), dtype=np.int64)
        for a, j in zip(J, pattern):
            for s, perm in Kinv:  # t = s^-1 in K^-1, (z)_{t^-1} = z_s
                xi[int(perm[a])] = zs[j][s.word]
        phi = algebraic_microstate(xi, action, sigma, M, radius)
        rep = is_microstate(phi, F, delta)
        worst_def = max(worst_def, rep.worst)
        ok = rep.holds and rep.worst + rep.tail < delta
        for a, j in zip(J, pattern):
            ball = U[j]
            dist = action.rho_values(phi[a].identity_value(), ball.center.identity_value())
            margin = ball.radius - dist - phi[a].tail - ball.center.tail
            worst_margin = min(worst_margin, margin)
            ok = ok and margin > 0
        all_valid = all_valid and ok
        if keep_witnesses:
            witnesses[pattern] = microstate_hash(phi)
    return IndependenceCertificate(tuple(J), sigma.d, Fraction(len(J), sigma.d), bound, lam_size,
                                   tuple(format_element(s) for s in K), checked, samples is not None,
                                   all_valid, worst_def, worst_margin, witnesses)


# -- shattering ----------------------------------------------------------------------------------

@dataclass(frozen=True)
class Shattering:
    I: tuple[int, ...]
    table: dict
    exact: bool


def _clean(S: Iterable[Sequence], alphabet: Sequence) -> tuple[list[tuple], int]:
    rows = sorted({tuple(s) for s in S})
    n = len(rows[0]) if rows else 0
    if any(len(r) != n for r in rows):
        raise ValueError("all tuples must have the same length")
    return rows, n


def shattered(rows: Sequence[tuple], I: Sequence[int], alphabet: Sequence) -> bool:
    alpha = set(alphabet)
    seen = {tuple(r[i] for i in I) for r in rows}
    seen = {p for p in seen if all(v in alpha for v in p)}
    return len(seen) == len(alpha) ** len(I)


def _table(rows: Sequence[tuple], I: Sequence[int], alphabet: Sequence) -> dict:
    alpha = set(alphabet)
    out = {}
    for r in rows:
        p = tuple(r[i] for i in I)
        if all(v in alpha for v in p) and p not in out:
            out[p] = r
    return out


def km_extract(S: Iterable[Sequence], k: int | None = None, mode: str = "exact",
               alphabet: Sequence | None = None, cap: int = KM_CAP) -> Shattering:
    """Largest coordinate set I with S|_I the full cube over the alphabet.

    Symbols default to 1..k.  Coordinates holding symbols outside the
    alphabet never help shatter.  Exact mode searches level by level:
    shattered sets are closed under subsets, so a candidate of size m+1 is
    tested only if all its m-subsets were shattered.
    """
    if alphabet is None:
        if k is None or k < 2:
            raise ValueError("k >= 2 is required")
        alphabet = tuple(range(1, k + 1))
    alphabet = tuple(alphabet)
    rows, n = _clean(S, alphabet)
    if mode not in ("exact", "greedy"):
        raise ValueError("mode must be 'exact' or 'greedy'")
    if mode == "exact" and n > cap:
        raise CapExceeded(f"n = {n} exceeds the exact-mode cap {cap}")
    if not rows:
        return Shattering((), {}, mode == "exact")
    if mode == "greedy":
        I: list[int] = []
        for i in range(n):
            if shattered(rows, I + [i], alphabet):
                I.append(i)
        return Shattering(tuple(I), _table(rows, I, alphabet), False)
    level = [(i,) for i in range(n) if shattered(rows, (i,), alphabet)]
    best: tuple = ()
    size_bound = int(math.floor(math.log(len(rows)) / math.log(len(alphabet)) + 1e-9)) if rows else 0
    while level:
        best = level[0]
        if len(best) >= size_bound:
            break
        current = set(level)
        nxt = []
        for a in level:
            for j in range(a[-1] + 1, n):
                cand = a + (j,)
                if all(cand[:m] + cand[m + 1:] in current for m in range(len(cand) - 1)) \
                        and shattered(rows, cand, alphabet):
                    nxt.append(cand)
        level = nxt
    return Shattering(best, _table(rows, best, alphabet), True)


# -- splitting a cover ------------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitResult:
    I: tuple[int, ...]
    branch: int
    ratio: Fraction
    table: dict
    sizes: tuple[int, int]


def decomposition_split(J: Sequence[int], A: SetTuple, parts: tuple[Any, Any],
                        witnesses: Mapping[tuple[int, ...], Microstate]) -> SplitResult:
    """Shrink J to I, independent for (A_{1,b}, A_2, ..., A_k) for one branch b.

    ``witnesses[omega]`` realizes omega on J for the tuple A, whose first set
    is the union of ``parts``.  Each witness is relabelled per branch (the
    first set becomes the part it lands in, anything else becomes an
    outside symbol) and the largest shattered coordinate set is extracted.
    Branch 0 wins ties.
    """
    J = tuple(J)
    k = len(A)
    if not J:
        return SplitResult((), 0, Fraction(1), {}, (0, 0))
    results = []
    for b, part in enumerate(parts):
        rowmap: dict[tuple, tuple] = {}
        for omega in sorted(witnesses):
            rowmap.setdefault(_relabel(omega, witnesses[omega], J, part), omega)
        sh = km_extract(rowmap, alphabet=tuple(range(k)))
        table = {pattern: rowmap[row] for pattern, row in sh.table.items()}
        results.append((len(sh.I), b, sh, table))
    _, b, sh, table = max(results, key=lambda t: (t[0], -t[1]))
    I = tuple(J[i] for i in sh.I)
    return SplitResult(I, b, Fraction(len(I), len(J)), table, (results[0][0], results[1][0]))


def _relabel(omega, phi, J, part) -> tuple:
    return tuple((0 if part is not None and part.contains(phi[a]) else -1) if j == 0 else j
                 for a, j in zip(J, omega))


def validate_split(res: SplitResult, A: SetTuple, parts: tuple[Any, Any],
                   witnesses: Mapping[tuple[int, ...], Microstate], J: Sequence[int],
                   F: Sequence[GroupElement], delta: float) -> bool:
    """Every pattern on I has a stored witness in Map(...) landing in the branch tuple."""
    branch_sets = [parts[res.branch]] + list(A.sets[1:])
    for pattern in itertools.product(range(len(A)), repeat=len(res.I)):
        if not res.I:
            break
        omega = res.table.get(pattern)
        if omega is None:
            return False
        phi = witnesses[omega]
        if not is_microstate(phi, F, delta):
            return False
        for a, j in zip(res.I, pattern):
            S = branch_sets[j]
            if S is None or not S.contains(phi[a]):
                return False
    return True


# -- Li-Yorke evidence ------------------------------------------------------------------------------

@dataclass
class LiYorkeReport:
    radius: int
    annuli: list[dict]
    tail_sup: list[float]
    tail_inf: list[float]
    note: str = "finite-radius evidence only; no limit is claimed"

    def evidence(self, a: float, b: float) -> bool:
        """Every tail r < |s| <= R reaches rho >= a and rho <= b."""
        return all(hi >= a and lo <= b for hi, lo in zip(self.tail_sup[:-1], self.tail_inf[:-1]))

    def as_dict(self) -> dict:
        return {"radius": self.radius, "annuli": self.annuli, "tail_sup": self.tail_sup,
                "tail_inf": self.tail_inf, "note": self.note}


def li_yorke_scan(x: PointPattern, y: PointPattern, R: int, a: float, b: float,
                  action: ActionSpec | None = None) -> LiYorkeReport:
    """sup/inf of rho(sx, sy) over each sphere |s| = r <= R, plus tails r < |s| <= R.

    rho(sx, sy) compares (sx)_e = x_{s^-1} with y_{s^-1}.
    """
    if min(x.radius, y.radius) < R:
        raise WindowExhausted(f"windows of radius {min(x.radius, y.radius)} are smaller than R = {R}")
    spec = x.spec
    rho = action.rho_values if action is not None else (lambda u, v: 0.0 if u == v else 1.0)
    spheres: dict[int, list] = {}
    for p in ball_payloads(spec, R):
        spheres.setdefault(spec.length_payload(p), []).append(p)
    annuli = []
    for r in range(R + 1):
        best_hi, best_lo = None, None
        vals = []
        for p in spheres.get(r, []):
            q = spec.inv_payload(p)
            v = rho(x.values[q], y.values[q])
            vals.append(v)
            if v >= a and best_hi is None:
                best_hi = format_element(GroupElement(spec, p))
            if v <= b and best_lo is None:
                best_lo = format_element(GroupElement(spec, p))
        annuli.append({"r": r, "sup": max(vals), "inf": min(vals),
                       "witness_high": best_hi, "witness_low": best_lo})
    tail_sup = [max(row["sup"] for row in annuli[r + 1:]) if r < R else float("nan") for r in range(R + 1)]
    tail_inf = [min(row["inf"] for row in annuli[r + 1:]) if r < R else float("nan") for r in range(R + 1)]
    return LiYorkeReport(R, annuli, tail_sup, tail_inf)
