"""``critline`` command-line front end.

Exit codes: 0 success (and, for reproduction commands, the published constant
is matched); 1 numeric failure, constant missed or non-bracketing interval;
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from scipy.optimize import bisect

from . import __version__, presets
from ._backend import BACKEND, worker_count
from .config import ConfigError, load_config
from .functional import FunctionalNotPositive, NumericError, evaluate_report
from .optimizer import SearchSpace, optimize
from .verify import run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TABLE1_HEADER = ["eta", "C_eta", "K", "R"]


def _clean(obj):
    # JSON has no infinities; encode non-finite floats as null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False)


def _emit(obj, out=None) -> None:
    (out or sys.stdout).write(dumps(obj) + "\n")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def fmt(x) -> str:
    return "" if x is None else format(float(x), ".12g")


# --------------------------------------------------------------------------
# commands


def cmd_theorem1(args) -> int:
    if args.variant == "simple":
        pre = presets.theorem1_simple(presets.P3_QUINTIC if args.p3 == "quintic" else presets.P3_PRINTED)
        choice = {"p3": pre.mollifier.piece(3).coeffs[1]}
    else:
        pre = presets.theorem1_critical(args.q_reading)
        choice = {"reading": args.q_reading}
    cfg = pre.config(quad_order=args.quad_order)
    t0 = time.perf_counter()
    variant = presets.preset_variant(pre.name, cfg, **choice)
    report = evaluate_report(pre.shift, pre.mollifier, cfg, variant)
    elapsed = time.perf_counter() - t0
    _emit(report.to_dict())
    ok = report.proportion is not None and abs(report.proportion - pre.target) <= presets.THEOREM1_TOL
    shown = "none (K <= 0)" if report.proportion is None else f"{report.proportion:.6f}"
    _note(
        f"{pre.name}: proportion {shown}, target {pre.target} +/- {presets.THEOREM1_TOL:g}, "
        f"{'PASS' if ok else 'FAIL'} ({elapsed:.2f} s, {report.backend} kernel)"
    )
    return EXIT_OK if ok else EXIT_FAIL


def parse_grid(text: str) -> list:
    if text.strip() == "":
        return []
    try:
        grid = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid eta grid {text!r}") from None
    if any(not math.isfinite(v) or v < 0 for v in grid):
        raise argparse.ArgumentTypeError("eta values must be finite and nonnegative")
    return grid


def table1_rows(grid) -> list:
    """``(eta, C or None, K, R)`` per grid point, in grid order."""

    def row(eta):
        C, K, R = presets.c_of_eta_details(eta)
        return eta, C, K, R

    n = min(worker_count(), max(1, len(grid)))
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(row, grid))
    return [row(e) for e in grid]


def table1_csv(rows) -> str:
    infeasible = any(C is None for _, C, _, _ in rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_NONE)
    w.writerow(TABLE1_HEADER + (["status"] if infeasible else []))
    for eta, C, K, R in rows:
        line = [fmt(eta), fmt(C), fmt(K), fmt(R)]
        if infeasible:
            line.append("infeasible" if C is None else "ok")
        w.writerow(line)
    return buf.getvalue()


def cmd_table1(args) -> int:
    grid = args.grid
    if grid is None and args.config:
        grid = load_config(args.config).table1_grid
    if grid is None:
        grid = list(presets.TABLE1)
    if any(g < 0 for g in grid):
        raise ConfigError("key 'table1.grid': eta values must be nonnegative")
    rows = table1_rows(grid)
    text = table1_csv(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    ok = True
    for eta, C, _, _ in rows:
        if eta in presets.TABLE1:
            hit = C is not None and abs(C - presets.TABLE1[eta]) <= presets.TABLE1_TOL
            ok = ok and hit
            if not hit:
                _note(f"eta={eta:g}: C={fmt(C) or 'infeasible'} misses {presets.TABLE1[eta]}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_evaluate(args) -> int:
    rc = load_config(args.config)
    try:
        cfg, mol, spec = rc.eval_config(), rc.mollifier(), rc.shift()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    found = presets.identify_preset(cfg.R, mol, spec) if spec.mode == "low_T" else None
    variant = presets.preset_variant(found[0], cfg, **found[1]) if found else None
    report = evaluate_report(spec, mol, cfg, variant)
    _emit(report.to_dict())
    if report.proportion is None:
        _note(f"functional not positive (K={report.K!r}); no bound")
        return EXIT_FAIL
    return EXIT_OK


def _search_space(rc) -> SearchSpace:
    ob = rc.optimize
    if ob.degrees is not None:
        degrees = ob.degrees
    else:
        rc.require("mollifier")
        rc.require("shift_poly")
        degrees = [max(1, len(p) - 1) for p in rc.pieces] + [max(1, len(rc.shift_poly) - 1)]
    return SearchSpace(
        degrees=tuple(degrees), mode=rc.mode, eta=rc.eta,
        p1_basis=ob.p1_basis, shift_basis=ob.shift_basis,
        bounds=None if ob.bounds is None else tuple(map(tuple, ob.bounds)),
    )


def cmd_optimize(args) -> int:
    rc = load_config(args.config)
    ob = rc.optimize
    budget = args.budget if args.budget is not None else ob.budget
    seed = args.seed if args.seed is not None else ob.seed
    warm_flag = ob.warm_start if args.warm_start is None else args.warm_start
    try:
        space = _search_space(rc)
        cfg = rc.eval_config(fallback_R=1.0)
        if warm_flag:
            rc.require("R")
        warm = space.encode(rc.R, rc.mollifier(), rc.shift()) if warm_flag else None
        if budget < 0:
            raise ValueError("budget must be nonnegative")
        result = optimize(space, cfg, budget, seed, warm_start=warm, restarts=ob.restarts)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = result.to_dict()
    out["budget"] = budget
    out["seed"] = seed
    out["warm_start"] = warm_flag
    out["search_space"] = {
        "degrees": list(space.degrees), "mode": space.mode, "eta": space.eta,
        "p1_basis": space.p1_basis, "shift_basis": space.shift_basis,
        "bounds": space.bounds_array().tolist(),
    }
    _emit(out)
    _note(f"best proportion {result.best_proportion:.6f} after {result.evaluations} evaluations")
    return EXIT_OK if math.isfinite(result.best_proportion) else EXIT_FAIL


def cmd_verify(args) -> int:
    rows = run_checks()
    width = max(len(r["case"]) for r in rows)
    for r in rows:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"{status}  {r['check']:<20} {r['case']:<{width}}  {r['value']:.3e} <= {r['tolerance']:.0e}")
    failed = sum(not r["passed"] for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


ROOT_XTOL = 1e-3


def cmd_root(args) -> int:
    lo, hi = args.lo, args.hi
    if not (0 <= lo < hi):
        raise ConfigError("bracket needs 0 <= lo < hi")
    f_lo, f_hi = presets.c_of_eta(lo), presets.c_of_eta(hi)
    if f_lo * f_hi > 0:
        _note(f"C(eta) does not change sign on [{lo}, {hi}]: C(lo)={f_lo:.6g}, C(hi)={f_hi:.6g}")
        return EXIT_FAIL
    root = bisect(presets.c_of_eta, lo, hi, xtol=ROOT_XTOL)
    _emit({"root": root, "bracket": [lo, hi], "xtol": ROOT_XTOL, "C_lo": f_lo, "C_hi": f_hi})
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="critline",
        description="Mollified-moment proportion bounds for critical zeros of Dirichlet L-functions.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernel)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theorem1", help="reproduce the simple / critical zero proportions")
    p.add_argument("--variant", choices=sorted(presets.THEOREM1_PRESETS), required=True)
    p.add_argument("--p3", choices=("printed", "quintic"), default="printed",
                   help="P_3 coefficient of the simple set (default: printed)")
    p.add_argument("--q-reading", choices=presets.Q_READINGS, default="symmetric",
                   help="reading of the critical set's Q (default: symmetric)")
    p.add_argument("--quad-order", type=int, default=64)
    p.set_defaults(func=cmd_theorem1)

    p = sub.add_parser("table1", help="C(eta) on an eta grid, as CSV")
    p.add_argument("--grid", type=parse_grid, default=None, help="comma-separated eta values")
    p.add_argument("--csv", metavar="PATH", help="write CSV here instead of stdout")
    p.add_argument("--config", metavar="PATH", help="JSON config whose table1.grid is used")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("evaluate", help="evaluate the functional for a JSON config")
    p.add_argument("--config", required=True, metavar="PATH")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="Nelder-Mead search from a JSON config")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--warm-start", action=argparse.BooleanOptionalAction, default=None,
                   help="start from the config's coefficients (overrides optimize.warm_start)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="brute-force identity checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("root", help="bisection root of C(eta)")
    p.add_argument("--lo", type=float, default=4.5)
    p.add_argument("--hi", type=float, default=5.5)
    p.set_defaults(func=cmd_root)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _note(f"critline {args.command}: config error: {exc}")
        return EXIT_USAGE
    except (NumericError, FunctionalNotPositive, ArithmeticError) as exc:
        _note(f"critline {args.command}: numeric failure: {exc}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
