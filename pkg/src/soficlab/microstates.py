"""Microstates phi: {0..d-1} -> X, their pseudometrics, and separated counting."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .actions import (
    DISCRETE,
    ActionSpec,
    Algebraic,
    FullShift,
    PointPattern,
    ProductAction,
    algebraic_action,
    convolve_point,
)
from .errors import BudgetExceeded, CapExceeded, SupportError, WindowExhausted
from .groups import GroupElement, ball_payloads, format_element
from .packing import max_independent_set
from .sofic import SoficMap

INF = "inf"
TWO = "2"

DEFAULT_PAIR_BUDGET = 1 << 14
_EPS64 = 2.0 ** -52


@dataclass(frozen=True, eq=False)
class Microstate:
    sigma: SoficMap
    action: ActionSpec
    entries: tuple[PointPattern, ...]
    info: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) != self.sigma.d:
            raise ValueError(f"expected {self.sigma.d} entries, got {len(self.entries)}")

    @property
    def d(self) -> int:
        return self.sigma.d

    def __getitem__(self, a: int) -> PointPattern:
        return self.entries[a]

    def identity_values(self) -> list:
        return [x.identity_value() for x in self.entries]

    def tail(self) -> float:
        return max((x.tail for x in self.entries), default=0.0)


def _check_pair(phi: Microstate, psi: Microstate) -> None:
    if phi.d != psi.d:
        raise ValueError("microstates of different sizes")


def _pointwise(phi: Microstate, psi: Microstate) -> list[float]:
    _check_pair(phi, psi)
    act = phi.action
    return [act.rho_values(x.identity_value(), y.identity_value()) for x, y in zip(phi.entries, psi.entries)]


def rho2_maps(phi: Microstate, psi: Microstate) -> float:
    """((1/d) sum_a rho(phi(a), psi(a))^2)^(1/2)."""
    vals = _pointwise(phi, psi)
    return math.sqrt(sum(v * v for v in vals) / len(vals))


def rhoinf_maps(phi: Microstate, psi: Microstate) -> float:
    return max(_pointwise(phi, psi))


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of the Map(rho, F, delta, sigma) test, one defect per s in F."""

    holds: bool
    delta: float
    defects: tuple[tuple[str, float], ...]
    tail: float = 0.0

    def __bool__(self) -> bool:
        return self.holds

    @property
    def worst(self) -> float:
        return max((v for _, v in self.defects), default=0.0)

    @property
    def certified(self) -> bool:
        """True when the defects stay below delta even after adding the tail bound."""
        return all(v + self.tail < self.delta for _, v in self.defects)


def equivariance_defect(phi: Microstate, s: GroupElement) -> float:
    """rho_2(phi o sigma_s, alpha_s o phi) using identity coordinates."""
    perm = phi.sigma.perm(s)
    sinv = s.inverse().word
    act = phi.action
    total = 0.0
    for a, x in enumerate(phi.entries):
        if s.length > x.radius:
            raise WindowExhausted(f"entry {a} has window radius {x.radius} < |s| = {s.length}")
        lhs = phi.entries[int(perm[a])].identity_value()
        rhs = x.values[sinv]  # (s phi(a))_e = phi(a)_{s^-1}
        r = act.rho_values(lhs, rhs)
        total += r * r
    return math.sqrt(total / phi.d)


def is_microstate(phi: Microstate, F: Iterable[GroupElement], delta: float) -> MembershipReport:
    """phi in Map(rho, F, delta, sigma): every s-defect strictly below delta."""
    defects = []
    for s in sorted(set(F), key=GroupElement.sort_key):
        if s not in phi.sigma:
            raise SupportError(f"{format_element(s)} is outside the sofic support")
        defects.append((format_element(s), equivariance_defect(phi, s)))
    holds = all(v < delta for _, v in defects) and all(phi.action.admissible(x) for x in phi.entries)
    return MembershipReport(holds, delta, tuple(defects), 2 * phi.tail())


# -- constructors -----------------------------------------------------------------------------

def fullshift_microstate(omega: Sequence[Any], sigma: SoficMap, radius: int,
                         action: ActionSpec | None = None) -> Microstate:
    """phi_omega(a)_t = omega(sigma_{t^-1}(a)) on the ball of radius R."""
    if len(omega) != sigma.d:
        raise ValueError("omega must have one symbol per point")
    if action is None:
        action = FullShift(max(int(v) for v in omega) + 1)
    spec = sigma.spec
    window = ball_payloads(spec, radius)
    perms = {}
    for t in window:
        tinv = spec.inv_payload(t)
        if tinv not in sigma.table:
            raise SupportError(f"radius {radius} exceeds the sofic support")
        perms[t] = sigma.table[tinv]
    omega = list(omega)
    entries = tuple(PointPattern(spec, radius, {t: omega[int(perms[t][a])] for t in window})
                    for a in range(sigma.d))
    return Microstate(sigma, action, entries)


def _as_algebraic(A) -> Algebraic:
    if isinstance(A, Algebraic):
        return A
    return algebraic_action(A)


def _xi_array(xi, d: int, n: int) -> np.ndarray:
    arr = np.asarray(xi, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(d, 1) if n == 1 else arr.reshape(d, n)
    if arr.shape != (d, n):
        raise ValueError(f"xi must have shape ({d}, {n})")
    return arr


def algebraic_microstate(xi, A, sigma: SoficMap, M: int, radius: int | None = None,
                         F: Iterable[GroupElement] | None = None, delta: float | None = None) -> Microstate:
    """phi(a) = P(h(a) (A*)^-1) with h(a)_v = xi(sigma_{v^-1}(a)).

    Coordinates are phi(a)_u[j] = sum_{i, w} g_ij(w) xi_i(sigma_{w u^-1}(a))
    mod 1, where g = (A*)^-1 is the certified truncated inverse.  When F and
    delta are given, the report in ``info`` carries the counting quantities
    from the construction (the locus where sigma is multiplicative on the
    truncation support, and the truncation term).
    """
    action = _as_algebraic(A)
    spec, n, d = action.spec, action.n, sigma.d
    if sigma.spec != spec:
        raise ValueError("sofic map and ring matrix live over different groups")
    X = _xi_array(xi, d, n)
    if X.size and np.abs(X).max() > M:
        raise ValueError("||xi||_inf exceeds the bound M")
    if radius is None:
        radius = max(1, action.A.radius())
    g = action.inverse
    window = ball_payloads(spec, radius)
    vals = np.zeros((len(window), d, n))
    for ui, u in enumerate(window):
        uinv = spec.inv_payload(u)
        for i in range(n):
            for j in range(n):
                for w, c in g.entries[i][j].terms.items():
                    key = spec.mul_payload(w, uinv)
                    perm = sigma.table.get(key)
                    if perm is None:
                        raise SupportError("sofic support does not cover the convolution radius "
                                           f"{g.radius() + radius}")
                    vals[ui, :, j] += c * X[perm, i]
    vals = np.mod(vals, 1.0)
    vals[vals >= 1.0] = 0.0
    gnorm = float(g.l1_norm())
    trunc = M * max(sum(g.entries[i][j].tail for i in range(n)) for j in range(n))
    rounding = 4 * _EPS64 * (M * gnorm + 1) * max(1, len(window))
    tail = trunc + rounding
    entries = tuple(
        PointPattern(spec, radius, {u: tuple(float(v) for v in vals[ui, a]) for ui, u in enumerate(window)}, tail)
        for a in range(d))
    info: dict[str, Any] = {"M": M, "truncation_radius": g.radius(), "tail": tail,
                            "inverse_residual": action.residual}
    if F is not None:
        info.update(lpoint_thresholds(action, sigma, F, M, delta))
    return Microstate(sigma, action, entries, info)


def lpoint_thresholds(action: Algebraic, sigma: SoficMap, F: Iterable[GroupElement], M: int,
                      delta: float | None) -> dict[str, Any]:
    """Size of the good locus and the truncation term used by the L-point construction."""
    spec = action.spec
    K = set()
    for row in action.inverse.entries:
        for e in row:
            K.update(e.terms)
    Kinv = [spec.inv_payload(w) for w in K]
    good = np.ones(sigma.d, dtype=bool)
    for s in F:
        ps = sigma.perm(s)
        for t in Kinv:
            ts = spec.mul_payload(t, s.word)
            if t not in sigma.table or ts not in sigma.table:
                good[:] = False
                break
            good &= sigma.table[t][ps] == sigma.table[ts]
    frac = float(good.mean())
    out: dict[str, Any] = {"lambda_fraction": frac,
                           "truncation_term": 2 * M * float(action.inverse.tail)}
    if delta is not None:
        need = 1 - (delta / 2) ** 2
        out["lambda_required"] = need
        out["thresholds_met"] = frac >= need and out["truncation_term"] < delta / 2
    return out


def xa_residual(phi: Microstate) -> float:
    """max over entries of the distance of (phi(a) A*)_e to the nearest integer."""
    action = phi.action
    if not isinstance(action, Algebraic):
        raise TypeError("membership residual is defined for algebraic microstates")
    Astar = action.A.star()
    e = phi.sigma.spec.identity_payload()
    worst = 0.0
    for x in phi.entries:
        if x.radius < Astar.radius():
            raise WindowExhausted("window too small to evaluate x A* at the identity")
        v = convolve_point(x, Astar, [e])[e]
        worst = max(worst, max(abs(c - round(c)) for c in v))
    return worst


def xa_tolerance(phi: Microstate) -> float:
    """Propagated bound for ``xa_residual``: ||A||_1 times the entry tail."""
    return float(phi.action.A.l1_norm()) * phi.tail() + 1e-12


# -- families (vectorized identity coordinates) ----------------------------------------------

@dataclass
class CoordinateSet:
    """Identity coordinates of a set of microstates: array (m, d, channels)."""

    coords: np.ndarray
    layout: tuple[tuple[str, int], ...]
    tail: float = 0.0

    @property
    def size(self) -> int:
        return int(self.coords.shape[0])

    @property
    def d(self) -> int:
        return int(self.coords.shape[1])

    def subset(self, idx) -> CoordinateSet:
        return CoordinateSet(self.coords[idx], self.layout, self.tail)


def pointwise_rho(X: np.ndarray, Y: np.ndarray, layout) -> np.ndarray:
    """rho at each index, broadcasting over leading axes; channels on the last axis."""
    out = None
    c = 0
    for kind, width in layout:
        x, y = X[..., c:c + width], Y[..., c:c + width]
        if kind == DISCRETE:
            part = np.any(x != y, axis=-1).astype(float)
        else:
            diff = np.abs(x - y) % 1.0
            part = np.minimum(diff, 1.0 - diff).max(axis=-1)
        out = part if out is None else out + part
        c += width
    return out


def coordinate_set(S: Sequence[Microstate]) -> CoordinateSet:
    if not S:
        raise ValueError("empty microstate set")
    action = S[0].action
    rows = [[action.encode(x.identity_value()) for x in phi.entries] for phi in S]
    dtype = np.int64 if all(k == DISCRETE for k, _ in action.layout()) else float
    if dtype is np.int64:
        rows = [[tuple(_sym_key(v) for v in r) for r in row] for row in rows]
    return CoordinateSet(np.asarray(rows, dtype=dtype), action.layout(), max(phi.tail() for phi in S))


_SYMBOLS: dict = {}


def _sym_key(v) -> int:
    """Stable integer code for arbitrary hashable symbols."""
    if isinstance(v, (int, np.integer)):
        return int(v)
    return _SYMBOLS.setdefault(v, -1 - len(_SYMBOLS))


def _unconstrained(action: ActionSpec) -> bool:
    if isinstance(action, FullShift):
        return True
    if isinstance(action, ProductAction):
        return _unconstrained(action.left) and _unconstrained(action.right)
    return False


class FullShiftFamily:
    """All phi_omega with omega ranging over alphabet^d."""

    def __init__(self, action: ActionSpec, sigma: SoficMap, radius: int = 1, budget: int = 10 ** 6):
        self.action, self.sigma, self.radius = action, sigma, radius
        self.alphabet = tuple(action.symbols())
        self.size = len(self.alphabet) ** sigma.d
        if self.size > budget:
            raise BudgetExceeded(f"family size {self.size} exceeds budget {budget}")
        self.codes = np.array([[_sym_key(c) for c in action.encode(s)] for s in self.alphabet], dtype=np.int64)
        k, d = len(self.alphabet), sigma.d
        dtype = np.int8 if k <= 127 else np.int32
        omegas = np.indices((k,) * d, dtype=dtype).reshape(d, -1).T if d else np.zeros((1, 0), dtype)
        self.omegas = omegas

    def coordinates(self) -> CoordinateSet:
        e = self.sigma.spec.identity_payload()
        idx = self.omegas[:, self.sigma.table[e]]
        return CoordinateSet(self.codes[idx], self.action.layout())

    def defects(self, F: Sequence[GroupElement]) -> np.ndarray:
        """(m, |F|) array of rho_2 equivariance defects."""
        sig = self.sigma
        e = sig.spec.identity_payload()
        out = np.zeros((self.size, len(F)))
        for j, s in enumerate(F):
            if s.length > self.radius:
                raise WindowExhausted("family window radius too small for F")
            ps = sig.perm(s)
            lhs = self.codes[self.omegas[:, sig.table[e][ps]]]
            rhs = self.codes[self.omegas[:, ps]]
            r = pointwise_rho(lhs, rhs, self.action.layout())
            out[:, j] = np.sqrt((r ** 2).mean(axis=1))
        return out

    def admissible(self) -> np.ndarray:
        if _unconstrained(self.action):
            return np.ones(self.size, dtype=bool)
        return np.array([all(self.action.admissible(x) for x in self.member(i).entries)
                         for i in range(self.size)], dtype=bool)

    def member(self, i: int) -> Microstate:
        omega = [self.alphabet[int(c)] for c in self.omegas[i]]
        return fullshift_microstate(omega, self.sigma, self.radius, self.action)


class AlgebraicFamily:
    """L-point microstates for xi in digits^(d x n), all of them or a seeded sample."""

    def __init__(self, action: Algebraic, sigma: SoficMap, digits: Sequence[int] = (0, 1),
                 radius: int = 1, budget: int = 10 ** 6, samples: int | None = None, seed: int = 0):
        self.action, self.sigma, self.radius = action, sigma, radius
        self.digits = tuple(int(v) for v in digits)
        self.M = max(abs(v) for v in self.digits)
        n, d = action.n, sigma.d
        total = len(self.digits) ** (d * n)
        if samples is None:
            if total > budget:
                raise BudgetExceeded(f"family size {total} exceeds budget {budget}")
            codes = np.indices((len(self.digits),) * (d * n)).reshape(d * n, -1).T
            self.sampled = False
        else:
            rng = np.random.default_rng(seed)
            codes = rng.integers(0, len(self.digits), size=(samples, d * n))
            self.sampled = True
        self.xis = np.asarray(self.digits)[codes].reshape(-1, d, n)
        self.size = int(self.xis.shape[0])
        g = action.inverse
        self.tail = self.M * max(sum(g.entries[i][j].tail for i in range(n)) for j in range(n)) \
            + 4 * _EPS64 * (self.M * float(g.l1_norm()) + 1)

    def _values_at(self, u: tuple[int, ...]) -> np.ndarray:
        spec, sig, g = self.action.spec, self.sigma, self.action.inverse
        n = self.action.n
        uinv = spec.inv_payload(u)
        out = np.zeros((self.size, sig.d, n))
        for i in range(n):
            for j in range(n):
                for w, c in g.entries[i][j].terms.items():
                    perm = sig.table.get(spec.mul_payload(w, uinv))
                    if perm is None:
                        raise SupportError("sofic support does not cover the convolution radius")
                    out[:, :, j] += c * self.xis[:, perm, i]
        out = np.mod(out, 1.0)
        out[out >= 1.0] = 0.0
        return out

    def coordinates(self) -> CoordinateSet:
        return CoordinateSet(self._values_at(self.action.spec.identity_payload()), self.action.layout(), self.tail)

    def defects(self, F: Sequence[GroupElement]) -> np.ndarray:
        base = self._values_at(self.action.spec.identity_payload())
        out = np.zeros((self.size, len(F)))
        for j, s in enumerate(F):
            if s.length > self.radius:
                raise WindowExhausted("family window radius too small for F")
            ps = self.sigma.perm(s)
            shifted = self._values_at(self.action.spec.inv_payload(s.word))
            r = pointwise_rho(base[:, ps], shifted, self.action.layout())
            out[:, j] = np.sqrt((r ** 2).mean(axis=1))
        return out

    def admissible(self) -> np.ndarray:
        return np.ones(self.size, dtype=bool)

    def member(self, i: int) -> Microstate:
        return algebraic_microstate(self.xis[i], self.action, self.sigma, self.M, self.radius)


# -- separated counting ------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationReport:
    epsilon: float
    metric: str
    count: int
    bound: str  # "exact" | "greedy-lower"
    n_input: int
    n_classes: int
    method: str
    seed: int | None = None
    selected: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {"epsilon": self.epsilon, "metric": self.metric, "count": self.count, "bound": self.bound,
                "n_input": self.n_input, "n_classes": self.n_classes, "method": self.method,
                "seed": self.seed}


def _unique_rows(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    flat = np.ascontiguousarray(X.reshape(X.shape[0], -1))
    if flat.shape[1] == 0:
        return flat[:1], np.zeros(1, dtype=np.int64)
    view = flat.view(np.dtype((np.void, flat.dtype.itemsize * flat.shape[1]))).ravel()
    _, first = np.unique(view, return_index=True)
    first.sort()
    return flat[first], first


def _distance_to(X: np.ndarray, row: np.ndarray, layout, metric: str) -> np.ndarray:
    r = pointwise_rho(X, row[None, ...], layout)
    if metric == INF:
        return r.max(axis=1)
    return np.sqrt((r ** 2).mean(axis=1))


def _quantum(layout, metric: str, d: int) -> float:
    if all(kind == DISCRETE for kind, _ in layout):
        return 1.0 if metric == INF else math.sqrt(1.0 / d)
    return 0.0


def separated_count(S: Sequence[Microstate] | CoordinateSet, eps: float, metric: str = INF,
                    mode: str = "exact", seed: int = 0, pair_budget: int = DEFAULT_PAIR_BUDGET,
                    node_budget: int = 2_000_000, max_points: int = 1 << 16) -> SeparationReport:
    """Largest (rho, eps)-separated subset, exactly or as a greedy lower bound.

    Points at distance 0 form one class (rho is a pseudometric).  When every
    positive distance is >= eps (symbolic identity-coordinate metric and small
    eps) the classes themselves are separated and the count is exact without
    search.  Otherwise exact mode runs a maximum independent set search on
    the "< eps" conflict graph, restricted to its non-isolated vertices, whose
    pair count must stay within ``pair_budget``.
    """
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if metric not in (INF, TWO):
        raise ValueError("metric must be 'inf' or '2'")
    if mode not in ("exact", "greedy"):
        raise ValueError("mode must be 'exact' or 'greedy'")
    cs = S if isinstance(S, CoordinateSet) else coordinate_set(list(S))
    m = cs.size
    if m == 0:
        return SeparationReport(eps, metric, 0, "exact", 0, 0, "empty")
    U, first = _unique_rows(cs.coords)
    U = U.reshape((-1,) + cs.coords.shape[1:])
    u = U.shape[0]
    q = _quantum(cs.layout, metric, cs.d) if cs.d else 0.0
    if u == 1 or (q > 0 and eps <= q):
        return SeparationReport(eps, metric, u, "exact", m, u, "classes", None, tuple(int(i) for i in first))
    if mode == "greedy":
        rng = np.random.default_rng(seed)
        order = rng.permutation(u)
        chosen: list[int] = []
        for i in order:
            if chosen:
                dist = _distance_to(U[chosen], U[i], cs.layout, metric)
                if dist.min() < eps:
                    continue
            chosen.append(int(i))
        sel = tuple(sorted(int(first[i]) for i in chosen))
        return SeparationReport(eps, metric, len(chosen), "greedy-lower", m, u, "greedy", seed, sel)
    if u > max_points:
        raise CapExceeded(f"{u} distinct points exceed the exact-mode limit {max_points}")
    adj = [0] * u
    for i in range(u - 1):
        dist = _distance_to(U[i + 1:], U[i], cs.layout, metric)
        for j in np.nonzero(dist < eps)[0]:
            jj = i + 1 + int(j)
            adj[i] |= 1 << jj
            adj[jj] |= 1 << i
    isolated = [i for i in range(u) if not adj[i]]
    busy = [i for i in range(u) if adj[i]]
    if len(busy) * (len(busy) - 1) // 2 > pair_budget:
        raise CapExceeded(f"conflict graph with {len(busy)} non-isolated points exceeds the pair budget")
    pos = {v: k for k, v in enumerate(busy)}
    sub = [0] * len(busy)
    for v in busy:
        mask = 0
        rest = adj[v]
        while rest:
            low = rest & -rest
            mask |= 1 << pos[low.bit_length() - 1]
            rest ^= low
        sub[pos[v]] = mask
    mis = [busy[k] for k in max_independent_set(sub, node_budget)]
    chosen = sorted(isolated + mis)
    sel = tuple(sorted(int(first[i]) for i in chosen))
    return SeparationReport(eps, metric, len(chosen), "exact", m, u, "mis", None, sel)


def spanning_count(S: Sequence[Microstate] | CoordinateSet, eps: float, metric: str = INF) -> int:
    """Size of a greedy (rho, eps)-spanning subset: every point lies within < eps of it."""
    cs = S if isinstance(S, CoordinateSet) else coordinate_set(list(S))
    U, _ = _unique_rows(cs.coords)
    U = U.reshape((-1,) + cs.coords.shape[1:])
    covered = np.zeros(U.shape[0], dtype=bool)
    count = 0
    for i in range(U.shape[0]):
        if covered[i]:
            continue
        count += 1
        covered |= _distance_to(U, U[i], cs.layout, metric) < eps
    return count


# -- dump format -----------------------------------------------------------------------------------

def _json_value(v):
    if isinstance(v, tuple):
        return [_json_value(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(repr(float(v))) if math.isfinite(v) else str(v)
    return v


def dump_microstate(phi: Microstate) -> str:
    """Canonical JSON text; identical microstates give identical strings."""
    spec = phi.sigma.spec
    entries = []
    for x in phi.entries:
        cells = [[format_element(GroupElement(spec, p)), _json_value(x.values[p])]
                 for p in ball_payloads(spec, x.radius)]
        entries.append({"radius": x.radius, "tail": x.tail, "values": cells})
    record = {"d": phi.d, "sigma": phi.sigma.fingerprint(), "entries": entries}
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def microstate_hash(phi: Microstate) -> str:
    return hashlib.sha256(dump_microstate(phi).encode()).hexdigest()
