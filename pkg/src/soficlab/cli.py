"""Command-line entry point: ``soficlab <command> [options]``.

Every command writes one JSON report (stdout or ``--out``) holding the
resolved configuration, its hash, a hash of the package source, a timestamp
and the command's result.  Exit codes: 0 success, 2 validation failure,
3 budget exhausted (partial report still written), 4 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import json
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .actions import (FullShift, MetricBall, PointPattern, SetTuple, algebraic_action, golden_mean,
                      identity_cylinders, parse_sft, product_action)
from .entropy import EntropyCell, EntropySchedule, FamilyPolicy, estimate, monotonicity_violations
from .errors import (BudgetExceeded, CapExceeded, InvariantViolation, NeumannConditionFailed, ParseError,
                     PreconditionViolation, ResidualCheckFailed, SigmaQualityError, SoficLabError)
from .groups import GroupElement, GroupSpec, parse_element, parse_group
from .independence import (algebraic_independence_set, independence_density, km_extract, li_yorke_scan,
                           lpoint_from_z, product_density_check)
from .microstates import INF, TWO
from .quasitiling import commuting_bijection, quasitile, right_translation, rf_mixing_check, validate_tiles
from .ring import parse_ring
from .sofic import quotient_sofic
from .spectral import det_level, det_vs_entropy, deninger_check

EXIT_OK, EXIT_VALIDATION, EXIT_BUDGET, EXIT_CONFIG = 0, 2, 3, 4
SCHEMA = "soficlab.report/1"

# keys that do not change the result and stay out of the config hash
_RUNTIME_KEYS = {"out", "csv", "jobs", "config", "command", "func"}


class ConfigError(Exception):
    pass


# -- small parsers -------------------------------------------------------------------------------

def int_list(text: str) -> list[int]:
    """``4..10``, ``4..10:2`` or ``4,6,9``."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            rng, _, step = part.partition(":")
            lo, hi = rng.split("..")
            out.extend(range(int(lo), int(hi) + 1, int(step) if step else 1))
        else:
            out.append(int(part))
    if not out:
        raise ConfigError(f"empty integer list {text!r}")
    return out


def float_list(text: str) -> list[float]:
    vals = [float(v) for v in str(text).split(",") if v.strip()]
    if not vals:
        raise ConfigError(f"empty number list {text!r}")
    return vals


def _elements(text: str, spec: GroupSpec) -> list[GroupElement]:
    """``ball:2``, a lattice range ``0..9`` (rank 1), or ``;``-separated elements."""
    text = text.strip()
    if text.startswith("ball:"):
        return spec.ball(int(text[5:]))
    if ".." in text and ";" not in text and spec.rank == 1 and "(" not in text:
        return [spec.element((v,)) for v in int_list(text)]
    return [parse_element(t, spec) for t in text.split(";") if t.strip()]


def _symbolic_action(name: str, sft_file: str | None, spec: GroupSpec):
    if sft_file:
        path = Path(sft_file)
        if not path.exists():
            raise ConfigError(f"SFT file {sft_file} does not exist")
        return parse_sft(path.read_text(), spec)
    if name.startswith("fullshift"):
        return FullShift(int(name[len("fullshift"):] or 2))
    if name == "golden":
        return golden_mean()
    if name == "product23":
        return product_action(FullShift(2), FullShift(3))
    raise ConfigError(f"unknown preset {name!r}; try fullshift2, fullshift3, product23, golden")


def _parallel_map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# -- commands ------------------------------------------------------------------------------------
# each returns (result dict, status) with status in {"ok", "validation-failure", "partial"}

def _entropy_level(job: tuple) -> list[dict]:
    cfg, N = job
    spec = GroupSpec.lattice(1)
    if cfg["ring"]:
        action = algebraic_action(parse_ring(cfg["ring"], spec))
        radius = action.radius + cfg["radius"] + 1
        policy = FamilyPolicy("algebraic", cfg["budget"], tuple(cfg["digits"]), cfg["samples"], cfg["seed"],
                              cfg["radius"])
    else:
        action = _symbolic_action(cfg["preset"], cfg["sft"], spec)
        radius = cfg["radius"]
        policy = FamilyPolicy("fullshift", cfg["budget"], seed=cfg["seed"], radius=cfg["radius"])
    sigma = quotient_sofic(spec, (N,), radius)
    F = [_elements(f, spec) for f in cfg["F"]]
    sched = EntropySchedule(action, [sigma], F, cfg["deltas"], cfg["epsilons"], policy, cfg["metric"],
                            cfg["mode"])
    rep = estimate(sched)
    return [c.as_dict() | {"upper_bound": rep.upper_bound} for c in rep.cells]


def cmd_entropy(args) -> tuple[dict, str]:
    cfg = {"ring": args.ring, "preset": args.preset, "sft": args.sft, "radius": args.radius,
           "budget": args.budget, "digits": int_list(args.digits), "samples": args.samples, "seed": args.seed,
           "F": args.F, "deltas": float_list(args.deltas), "epsilons": float_list(args.epsilons),
           "metric": args.metric, "mode": args.mode}
    levels = int_list(args.levels)
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError("levels must be strictly increasing")
    cells = [c for part in _parallel_map(_entropy_level, [(cfg, N) for N in levels], args.jobs) for c in part]
    objs = [EntropyCell(c["d"], tuple(c["F"]), c["delta"], c["epsilon"], c["family_size"], c["members"],
                        c["count"], c["bound"], float(c["value"]), c["status"]) for c in cells]
    viol = monotonicity_violations(objs)
    partial = any(c["status"] != "ok" for c in cells)
    result = {"schema": "soficlab.entropy/1", "rows": [{k: v for k, v in c.items() if k != "upper_bound"}
                                                       for c in cells],
              "upper_bound": cells[0]["upper_bound"] if cells else None,
              "monotonicity_violations": viol, "partial": partial}
    status = "partial" if partial else ("validation-failure" if viol else "ok")
    return result, status


def cmd_density(args) -> tuple[dict, str]:
    spec = GroupSpec.lattice(1)
    X = _symbolic_action(args.preset, args.sft, spec)
    F = _elements(args.F, spec)
    k = args.k or len(X.symbols())
    A = identity_cylinders(spec, k)
    if args.product:
        Y = _symbolic_action(args.product, None, spec)
        B = identity_cylinders(spec, args.k2 or len(Y.symbols()))
        rep = product_density_check(F, A, X, B, Y)
        ok = rep.inequality_holds and rep.product_valid is True
        return rep.as_dict(), "ok" if ok else "validation-failure"
    res = independence_density(F, A, X, args.mode)
    return res.as_dict(), "ok" if res.certified else "partial"


def cmd_indep(args) -> tuple[dict, str]:
    spec = GroupSpec.lattice(1)
    action = algebraic_action(parse_ring(args.ring, spec))
    centers = [lpoint_from_z({spec.identity_payload(): (v,)}, action, action.radius + 2)
               for v in int_list(args.centers)]
    U = SetTuple(tuple(MetricBall(c, args.ball_radius, action) for c in centers))
    sigma = quotient_sofic(spec, (args.d,), action.radius + 2 * args.K + 2)
    K = spec.ball(args.K)
    F = _elements(args.F, spec)
    cert = algebraic_independence_set(action, K, sigma, U, F, args.delta, args.samples, args.seed)
    result = {"J": list(cert.J), "d": cert.d, "density": str(cert.density), "bound": str(cert.bound),
              "lambda_size": cert.lambda_size, "K": list(cert.K), "patterns_checked": cert.patterns_checked,
              "sampled": cert.sampled, "all_valid": cert.all_valid, "worst_defect": cert.worst_defect,
              "worst_ball_margin": cert.worst_ball_margin,
              "centers_identity_values": [c.identity_value() for c in centers]}
    ok = cert.all_valid and len(cert.J) >= cert.bound
    return result, "ok" if ok else "validation-failure"


def _read_rows(path: str) -> list[tuple[int, ...]]:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"input file {path} does not exist")
    rows = []
    for ln in p.read_text().splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln:
            rows.append(tuple(int(v) for v in ln.replace(",", " ").split()))
    return rows


def cmd_km(args) -> tuple[dict, str]:
    if args.input:
        rows = _read_rows(args.input)
    else:
        rng = random.Random(args.seed)
        rows = [tuple(rng.randint(1, args.k) for _ in range(args.n)) for _ in range(args.m)]
    res = km_extract(rows, args.k, args.mode)
    table = {",".join(map(str, pat)): list(row) for pat, row in sorted(res.table.items())}
    return {"I": list(res.I), "size": len(res.I), "exact": res.exact, "rows": len(rows), "table": table}, "ok"


def cmd_tile(args) -> tuple[dict, str]:
    mods = int_list(args.moduli)
    spec = GroupSpec.lattice(len(mods))
    radii = int_list(args.radii)
    sigma = quotient_sofic(spec, mods, 2 * max(radii) + 1)
    shapes = [spec.ball(r) for r in radii]
    ts = quasitile(sigma, shapes, range(sigma.d), args.eta, args.tau)
    val = validate_tiles(ts, sigma, range(sigma.d))
    result = ts.as_dict() | {"validation": {"injective": val.injective, "cross_disjoint": val.cross_disjoint,
                                            "hats_valid": val.hats_valid, "cover_matches": val.cover_matches,
                                            "ok": val.ok},
                             "cover_target": 1 - args.tau - args.eta}
    ok = val.ok and ts.cover >= 1 - args.tau - args.eta - 1e-12
    return result, "ok" if ok else "validation-failure"


def _bijection_trial(job: tuple) -> dict:
    cfg, seed = job
    spec = GroupSpec.lattice(1)
    N = cfg["N"]
    sigma = quotient_sofic(spec, (N,), 2 * max(cfg["big"], max(cfg["small"])) + 2)
    rng = random.Random(seed)
    m = round(cfg["density"] * N)
    Y, Z = rng.sample(range(N), m), rng.sample(range(N), m)
    F = [spec.element((1,)), spec.element((-1,))]
    r = commuting_bijection(sigma, Y, Z, F, cfg["epsilon"], [spec.ball(cfg["big"])],
                            [spec.ball(s) for s in cfg["small"]], cfg["eta"], cfg["tau"])
    return {"seed": seed, "ok": r.ok, "max_defect": float(r.max_defect), "overlap": float(r.overlap),
            "lambda": r.lam, "big_tiles": r.checks["big_tiles"], "small_tiles": r.checks["small_tiles"]}


def cmd_bijection(args) -> tuple[dict, str]:
    cfg = {"N": args.N, "density": args.density, "epsilon": args.epsilon, "tau": args.tau, "eta": args.eta,
           "big": args.big_radius, "small": int_list(args.small_radii)}
    rows = _parallel_map(_bijection_trial, [(cfg, s) for s in int_list(args.seeds)], args.jobs)
    mixing = None
    if args.rf_trials:
        rng = random.Random(args.seed)
        table = right_translation(GroupSpec.quotient((args.N,)))
        reps = [rf_mixing_check(table, [i for i in range(args.N) if rng.random() < 0.5])
                for _ in range(args.rf_trials)]
        mixing = {"trials": len(reps), "all_ok": all(r.ok for r in reps)}
    ok = all(r["ok"] for r in rows) and (mixing is None or mixing["all_ok"])
    return {"rows": rows, "all_ok": ok, "rf_mixing": mixing}, "ok" if ok else "validation-failure"


def _det_job(job: tuple) -> dict:
    ring, rank, N, cap = job
    spec = GroupSpec.lattice(rank)
    return det_level(parse_ring(ring, spec), N, cap).as_dict()


def cmd_det(args) -> tuple[dict, str]:
    spec = parse_group(args.group)
    if spec.kind != "lattice":
        raise ConfigError("determinants are computed over Z^r")
    f = parse_ring(args.ring, spec)
    moduli = int_list(args.moduli)
    rows = _parallel_map(_det_job, [(args.ring, spec.rank, N, args.exact_cap) for N in moduli], args.jobs)
    good = [r["value"] for r in rows if not r["singular"]]
    if not good:
        return {"rows": rows, "error": "every finite level is singular"}, "validation-failure"
    tail = good[-args.last_k:]
    result = {"schema": "soficlab.det/1", "f": args.ring, "rows": rows, "estimate": sum(tail) / len(tail),
              "spread": max(tail) - min(tail), "last_k": args.last_k}
    status = "ok"
    if args.deninger:
        try:
            result["deninger"] = deninger_check(f, moduli, exact_cap=args.exact_cap).as_dict()
        except (NeumannConditionFailed, ResidualCheckFailed) as exc:
            result["deninger"] = {"verdict": "not-certified", "error": str(exc)}
            status = "validation-failure"
    if args.entropy:
        cmp = det_vs_entropy(f, moduli, samples=args.samples, seed=args.seed)
        result["entropy"] = {"rows": cmp.rows, "lower_bound": cmp.lower_bound, "consistent": cmp.consistent,
                             "match": cmp.match}
        if not cmp.consistent:
            status = "validation-failure"
    return result, status


def _pattern(text: str, spec: GroupSpec):
    syms = [int(c) for c in text.strip()]
    if len(syms) % 2 == 0:
        raise ConfigError("points are given as odd-length symbol strings centered at 0")
    R = len(syms) // 2
    return PointPattern(spec, R, {(i - R,): v for i, v in enumerate(syms)})


def cmd_liyorke(args) -> tuple[dict, str]:
    spec = GroupSpec.lattice(1)
    x, y = _pattern(args.x, spec), _pattern(args.y, spec)
    R = args.R if args.R is not None else min(x.radius, y.radius)
    rep = li_yorke_scan(x, y, R, args.a, args.b, FullShift(max(max(x.values.values()),
                                                                max(y.values.values())) + 1))
    out = rep.as_dict()
    out["tail_sup"] = [None if math.isnan(v) else v for v in out["tail_sup"]]
    out["tail_inf"] = [None if math.isnan(v) else v for v in out["tail_inf"]]
    out["evidence"] = rep.evidence(args.a, args.b)
    return out, "ok"


def cmd_validate(args) -> tuple[dict, str]:
    path = Path(args.report)
    if not path.exists():
        raise ConfigError(f"report {args.report} does not exist")
    stored = json.loads(path.read_text())
    if stored.get("schema") != SCHEMA:
        raise ConfigError("not a soficlab report")
    cfg = dict(stored["config"])
    command = stored["command"]
    sub = build_parser()._subparsers_by_name[command]  # type: ignore[attr-defined]
    ns = argparse.Namespace(**{a.dest: a.default for a in sub._actions if a.dest != "help"})
    for key, value in cfg.items():
        setattr(ns, key, value)
    ns.jobs = 1
    result, status = COMMANDS[command](ns)
    replay = _canonical(_sanitize(result))
    same = replay == _canonical(stored["result"])
    return {"replayed": command, "config_hash": stored.get("config_hash"), "identical": same,
            "stored_status": stored.get("status"), "replay_status": status}, "ok" if same else "validation-failure"


COMMANDS: dict[str, Callable[[Any], tuple[dict, str]]] = {
    "entropy": cmd_entropy, "density": cmd_density, "indep": cmd_indep, "km": cmd_km, "tile": cmd_tile,
    "bijection": cmd_bijection, "det": cmd_det, "liyorke": cmd_liyorke, "validate": cmd_validate,
}


# -- parser --------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="soficlab", description="Finite-level sofic entropy experiments.")
    parser.add_argument("--version", action="version", version=f"soficlab {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    by_name = {}

    def sub(name: str, help_text: str) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file whose keys mirror the flags (flags win)")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--csv", help="also write the report's rows as CSV")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for independent jobs")
        p.add_argument("--seed", type=int, default=0)
        by_name[name] = p
        return p

    p = sub("entropy", "per-level entropy estimates over quotient levels Z/N")
    p.add_argument("--preset", default="fullshift2")
    p.add_argument("--sft", help="file with forbidden patterns (overrides --preset)")
    p.add_argument("--ring", help="use the algebraic action X_f for this f in ZZ")
    p.add_argument("--levels", default="4..10")
    p.add_argument("--F", action="append", help="F chain entry (ball:r or element list); repeatable")
    p.add_argument("--deltas", default="0.5")
    p.add_argument("--epsilons", default="0.5")
    p.add_argument("--metric", choices=[INF, TWO], default=INF)
    p.add_argument("--mode", choices=["exact", "greedy"], default="exact")
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--budget", type=int, default=10 ** 6)
    p.add_argument("--digits", default="0,1")
    p.add_argument("--samples", type=int)

    p = sub("density", "exact independence density for identity cylinders")
    p.add_argument("--preset", default="golden")
    p.add_argument("--sft")
    p.add_argument("--F", default="0..9")
    p.add_argument("--k", type=int)
    p.add_argument("--mode", choices=["exact", "greedy"], default="exact")
    p.add_argument("--product", help="second preset: run the two-stage product check")
    p.add_argument("--k2", type=int)

    p = sub("indep", "independence set construction for X_f with L-point witnesses")
    p.add_argument("--ring", default="2-t")
    p.add_argument("--d", type=int, default=32)
    p.add_argument("--K", type=int, default=1, help="radius of K")
    p.add_argument("--centers", default="0,1", help="identity values of z for each ball center")
    p.add_argument("--ball-radius", type=float, default=0.1)
    p.add_argument("--F", default="1;-1")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--samples", type=int)

    p = sub("km", "largest shattered coordinate set")
    p.add_argument("--input", help="rows of symbols, one per line")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--mode", choices=["exact", "greedy"], default="exact")

    p = sub("tile", "greedy quasitiling of Z^r / N Z^r by nested balls")
    p.add_argument("--moduli", default="60")
    p.add_argument("--radii", default="1,3")
    p.add_argument("--eta", type=float, default=0.2)
    p.add_argument("--tau", type=float, default=0.0)

    p = sub("bijection", "approximately commuting bijections on Z/N")
    p.add_argument("--N", type=int, default=240)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--tau", type=float, default=0.25)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--big-radius", type=int, default=10)
    p.add_argument("--small-radii", default="3,6")
    p.add_argument("--seeds", default="0..19")
    p.add_argument("--rf-trials", type=int, default=0, help="also run the mixing identity on random subsets")

    p = sub("det", "Fuglede-Kadison determinant through finite quotients")
    p.add_argument("--ring", default="2-t")
    p.add_argument("--group", default="Z")
    p.add_argument("--moduli", default="4..32")
    p.add_argument("--exact-cap", type=int, default=512)
    p.add_argument("--last-k", type=int, default=3)
    p.add_argument("--deninger", action="store_true", help="add the det > 1 screening report")
    p.add_argument("--entropy", action="store_true", help="compare with entropy lower bounds")
    p.add_argument("--samples", type=int)

    p = sub("liyorke", "sup/inf of rho(sx, sy) over spheres of Z")
    p.add_argument("--x", required=True, help="odd-length symbol string centered at 0")
    p.add_argument("--y", required=True)
    p.add_argument("--R", type=int)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)

    p = sub("validate", "replay a stored report and compare results")
    p.add_argument("report")

    parser._subparsers_by_name = by_name  # type: ignore[attr-defined]
    return parser


# -- reports -------------------------------------------------------------------------------------

def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str, allow_nan=False)


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(_canonical(cfg).encode()).hexdigest()[:16]


def code_hash() -> str:
    h = hashlib.sha256()
    for p in sorted(Path(__file__).parent.glob("*.py")):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()[:16]


def _sanitize(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def write_csv(path: str, result: dict) -> None:
    rows = result.get("rows") or []
    if not rows:
        return
    keys = sorted({k for r in rows for k in r})
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file {args.config} does not exist")
        try:
            cfg = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not JSON: {exc}") from None
        sub = parser._subparsers_by_name[args.command]  # type: ignore[attr-defined]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise ConfigError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    if getattr(args, "F", None) is None and args.command == "entropy":
        args.F = ["ball:1"]
    return args


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except ConfigError as exc:
        print(f"soficlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in _RUNTIME_KEYS}
    code = EXIT_OK
    try:
        result, status = COMMANDS[args.command](args)
    except (ConfigError, ParseError) as exc:
        print(f"soficlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BudgetExceeded, CapExceeded) as exc:
        result, status = {"error": str(exc)}, "partial"
    except (InvariantViolation, PreconditionViolation, SigmaQualityError, NeumannConditionFailed,
            ResidualCheckFailed) as exc:
        result, status = {"error": f"{type(exc).__name__}: {exc}"}, "validation-failure"
    except (SoficLabError, ValueError) as exc:
        print(f"soficlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if status == "validation-failure":
        code = EXIT_VALIDATION
    elif status == "partial":
        code = EXIT_BUDGET
    report = {"schema": SCHEMA, "command": args.command, "config": cfg, "config_hash": config_hash(cfg),
              "code_hash": code_hash(), "version": __version__,
              "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
              "status": status, "result": _sanitize(result)}
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        write_csv(args.csv, report["result"])
    return code


if __name__ == "__main__":
    raise SystemExit(main())
