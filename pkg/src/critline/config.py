"""JSON run-configuration ingestion and validation.

Top-level keys::

    mode            "low_T" (default) or "eta"
    eta             number, default 0
    R               number, required for evaluate / optimize
    mollifier       {"I": int (optional), "pieces": [[c0, c1, ...], ...]}
    shift_poly      [c0, c1, ...]  (Q in low_T mode, P in eta mode)
    quad_order      int, default 64
    jet_order_cap   int, default 8
    series_switch   number, default 0.5
    optimize        {budget 5000, seed 0, restarts 4, bounds null,
                     warm_start false, degrees null, p1_basis "monomial",
                     shift_basis "symmetric"}
    table1          {grid: [eta, ...]}

Coefficient arrays are ascending by power.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .functional import ETA, LOW_T, EvalConfig, MollifierSet, ShiftPolynomialSpec


class ConfigError(ValueError):
    pass


TOP_KEYS = {
    "mode", "eta", "R", "mollifier", "shift_poly", "quad_order",
    "jet_order_cap", "series_switch", "optimize", "table1",
}
MOLLIFIER_KEYS = {"I", "pieces"}
OPTIMIZE_KEYS = {
    "budget", "seed", "restarts", "bounds", "warm_start", "degrees",
    "p1_basis", "shift_basis",
}
TABLE1_KEYS = {"grid"}


@dataclass
class OptimizeBlock:
    budget: int = 5000
    seed: int = 0
    restarts: int = 4
    bounds: Optional[list] = None
    warm_start: bool = False
    degrees: Optional[list] = None
    p1_basis: str = "monomial"
    shift_basis: str = "symmetric"


@dataclass
class RunConfig:
    mode: str = LOW_T
    eta: float = 0.0
    R: Optional[float] = None
    pieces: Optional[list] = None
    shift_poly: Optional[list] = None
    quad_order: int = 64
    jet_order_cap: int = 8
    series_switch: float = 0.5
    optimize: OptimizeBlock = field(default_factory=OptimizeBlock)
    table1_grid: Optional[list] = None

    def eval_config(self, fallback_R: Optional[float] = None) -> EvalConfig:
        """Evaluation settings; ``fallback_R`` stands in when ``R`` is absent
        (the optimizer overwrites ``R`` per candidate)."""
        if self.R is None and fallback_R is None:
            self.require("R")
        return EvalConfig(
            R=self.R if self.R is not None else fallback_R, eta=self.eta, quad_order=self.quad_order,
            series_switch=self.series_switch, jet_order_cap=self.jet_order_cap,
        )

    def mollifier(self) -> MollifierSet:
        self.require("mollifier")
        return MollifierSet(self.pieces)

    def shift(self) -> ShiftPolynomialSpec:
        self.require("shift_poly")
        return ShiftPolynomialSpec(self.shift_poly, self.mode)

    def require(self, key: str) -> None:
        attr = "pieces" if key == "mollifier" else key
        if getattr(self, attr) is None:
            raise ConfigError(f"missing required key '{key}'")


def _line_of(text: str, key: str) -> Optional[int]:
    idx = text.find(f'"{key.split(".")[-1]}"')
    return None if idx < 0 else text.count("\n", 0, idx) + 1


class _Reader:
    def __init__(self, text: str):
        self.text = text

    def fail(self, key: str, msg: str):
        line = _line_of(self.text, key)
        where = f" (line {line})" if line else ""
        raise ConfigError(f"key '{key}'{where}: {msg}")

    def check_keys(self, obj, allowed, prefix=""):
        if not isinstance(obj, dict):
            self.fail(prefix.rstrip(".") or "<root>", "expected an object")
        for k in obj:
            if k not in allowed:
                self.fail(prefix + k, "unknown key")

    def number(self, obj, key, path, default=None):
        if key not in obj:
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(path, "expected a finite number")
        return float(v)

    def integer(self, obj, key, path, default=None):
        if key not in obj:
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(path, "expected an integer")
        return v

    def vector(self, v, path):
        if not isinstance(v, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in v
        ):
            self.fail(path, "expected an array of finite numbers")
        return [float(x) for x in v]


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ConfigError(f"key '{k}': duplicated")
        out[k] = v
    return out


def parse_config(text: str) -> RunConfig:
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    rd = _Reader(text)
    rd.check_keys(raw, TOP_KEYS)
    cfg = RunConfig()
    if "mode" in raw:
        if raw["mode"] not in (LOW_T, ETA):
            rd.fail("mode", f"expected '{LOW_T}' or '{ETA}'")
        cfg.mode = raw["mode"]
    cfg.eta = rd.number(raw, "eta", "eta", 0.0)
    if cfg.eta < 0:
        rd.fail("eta", "must be nonnegative")
    cfg.R = rd.number(raw, "R", "R")
    if cfg.R is not None and cfg.R <= 0:
        rd.fail("R", "must be positive")
    cfg.quad_order = rd.integer(raw, "quad_order", "quad_order", 64)
    cfg.jet_order_cap = rd.integer(raw, "jet_order_cap", "jet_order_cap", 8)
    cfg.series_switch = rd.number(raw, "series_switch", "series_switch", 0.5)

    if "mollifier" in raw:
        mol = raw["mollifier"]
        rd.check_keys(mol, MOLLIFIER_KEYS, "mollifier.")
        if "pieces" not in mol:
            rd.fail("mollifier.pieces", "missing")
        pieces = mol["pieces"]
        if not isinstance(pieces, list) or not pieces:
            rd.fail("mollifier.pieces", "expected a nonempty array of coefficient arrays")
        cfg.pieces = [rd.vector(p, f"mollifier.pieces[{i}]") for i, p in enumerate(pieces)]
        I = rd.integer(mol, "I", "mollifier.I")
        if I is not None and I != len(pieces):
            rd.fail("mollifier.I", f"is {I} but {len(pieces)} pieces are given")
    if "shift_poly" in raw:
        cfg.shift_poly = rd.vector(raw["shift_poly"], "shift_poly")

    if "optimize" in raw:
        o = raw["optimize"]
        rd.check_keys(o, OPTIMIZE_KEYS, "optimize.")
        ob = OptimizeBlock()
        ob.budget = rd.integer(o, "budget", "optimize.budget", ob.budget)
        ob.seed = rd.integer(o, "seed", "optimize.seed", ob.seed)
        ob.restarts = rd.integer(o, "restarts", "optimize.restarts", ob.restarts)
        if "warm_start" in o:
            if not isinstance(o["warm_start"], bool):
                rd.fail("optimize.warm_start", "expected true or false")
            ob.warm_start = o["warm_start"]
        if o.get("bounds") is not None:
            b = o["bounds"]
            if not isinstance(b, list):
                rd.fail("optimize.bounds", "expected an array of [lo, hi] pairs")
            ob.bounds = [rd.vector(pair, "optimize.bounds") for pair in b]
            if any(len(pair) != 2 for pair in ob.bounds):
                rd.fail("optimize.bounds", "each entry must be [lo, hi]")
        if o.get("degrees") is not None:
            d = o["degrees"]
            if not isinstance(d, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in d):
                rd.fail("optimize.degrees", "expected an array of integers")
            ob.degrees = d
        for key in ("p1_basis", "shift_basis"):
            if key in o:
                if not isinstance(o[key], str):
                    rd.fail(f"optimize.{key}", "expected a string")
                setattr(ob, key, o[key])
        cfg.optimize = ob

    if "table1" in raw:
        t = raw["table1"]
        rd.check_keys(t, TABLE1_KEYS, "table1.")
        if "grid" in t:
            cfg.table1_grid = rd.vector(t["grid"], "table1.grid")
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    return parse_config(text)
