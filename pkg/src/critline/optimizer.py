"""Derivative-free search for coefficient sets maximizing the proportion bound.

Parameters are packed into a flat vector ``theta = [R, P_1 free, P_2, ...,
P_I, shift free]`` in which the side conditions are eliminated:

* ``P_1(0) = 0`` and ``P_1(1) = 1``: in the ``monomial`` basis the top
  coefficient is ``1 - sum(lower)``; in the ``omx`` basis
  ``P_1 = x + sum c_k x (1-x)^k``.
* ``P_j(0) = 0`` for ``j >= 2``: only ``x^1 .. x^d`` are free.
* shift polynomial: ``Q(0) = 1`` (low-T) or ``P((1+eta)/2) = 1`` (eta).  The
  ``symmetric`` basis ``Q = 1 - sum r_k B_k`` with
  ``B_k(x) = int_0^x (t(1-t))^(k-1) dt`` additionally keeps
  ``Q'(x) = Q'(1-x)``; in eta mode ``P(x) = Q(1/2 - x)`` re-pinned at
  ``(1+eta)/2``.

Nelder-Mead comes from scipy; restarts run on a thread pool (the compiled
kernel releases the GIL) and are merged deterministically.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from ._backend import worker_count
from .functional import (
    ETA,
    LOW_T,
    EvalConfig,
    FunctionalNotPositive,
    MollifierSet,
    NumericError,
    ShiftPolynomialSpec,
    functional_value,
    proportion,
)
from .polynomial import Polynomial, compose_affine

R_BOUNDS = (0.3, 1.5)
COEFF_BOUND = 8.0
MIN_RESTART_BUDGET = 100
DEFAULT_RESTARTS = 4
P1_BASES = ("monomial", "omx")
SHIFT_BASES = ("monomial", "symmetric")


def _sym_basis(k: int) -> Polynomial:
    # int_0^x (t(1-t))^(k-1) dt
    t = Polynomial([0.0, 1.0, -1.0])
    base = Polynomial([1.0])
    for _ in range(k - 1):
        base = base * t
    c = base.coeffs or (0.0,)
    return Polynomial([0.0] + [v / (i + 1) for i, v in enumerate(c)])


@dataclass(frozen=True)
class SearchSpace:
    """Degrees ``(deg P_1, ..., deg P_I, deg shift)`` plus bases and bounds."""

    degrees: tuple
    mode: str = LOW_T
    eta: float = 0.0
    p1_basis: str = "monomial"
    shift_basis: str = "symmetric"
    bounds: Optional[tuple] = None

    def __post_init__(self):
        degs = tuple(int(d) for d in self.degrees)
        object.__setattr__(self, "degrees", degs)
        if len(degs) < 2:
            raise ValueError("degrees needs at least deg P_1 and the shift degree")
        if len(degs) - 1 > 3 or max(degs) > 8:
            raise ValueError("search limited to I <= 3 and degree <= 8")
        if degs[0] < 1 or any(d < 0 for d in degs):
            raise ValueError("deg P_1 must be >= 1 and all degrees nonnegative")
        if self.mode not in (LOW_T, ETA):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.p1_basis not in P1_BASES:
            raise ValueError(f"unknown P_1 basis {self.p1_basis!r}")
        if self.shift_basis not in SHIFT_BASES:
            raise ValueError(f"unknown shift basis {self.shift_basis!r}")
        if self.shift_basis == "symmetric" and degs[-1] % 2 == 0:
            raise ValueError("the symmetric shift basis needs an odd degree")
        if self.bounds is not None:
            b = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
            if len(b) != self.dim:
                raise ValueError(f"bounds has {len(b)} entries, expected {self.dim}")
            if any(not lo < hi for lo, hi in b):
                raise ValueError("each bound needs lo < hi")
            object.__setattr__(self, "bounds", b)

    @property
    def I(self) -> int:  # noqa: E743
        return len(self.degrees) - 1

    @property
    def shift_degree(self) -> int:
        return self.degrees[-1]

    @property
    def layout(self) -> list:
        """``(name, count)`` blocks of the parameter vector."""
        d = self.degrees
        blocks = [("R", 1), ("P1", d[0] - 1)]
        blocks += [(f"P{j}", d[j - 1]) for j in range(2, self.I + 1)]
        ns = (d[-1] + 1) // 2 if self.shift_basis == "symmetric" else d[-1]
        blocks.append(("shift", ns))
        return blocks

    @property
    def dim(self) -> int:
        return sum(n for _, n in self.layout)

    def bounds_array(self) -> np.ndarray:
        if self.bounds is not None:
            return np.array(self.bounds, dtype=float)
        b = np.tile([-COEFF_BOUND, COEFF_BOUND], (self.dim, 1))
        b[0] = R_BOUNDS
        return b

    def _split(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            raise ValueError(f"parameter vector must have length {self.dim}")
        out, i = {}, 0
        for name, n in self.layout:
            out[name] = theta[i:i + n]
            i += n
        return out

    def decode(self, theta):
        """``(R, MollifierSet, ShiftPolynomialSpec)`` for a parameter vector."""
        parts = self._split(theta)
        R = float(parts["R"][0])
        d1 = self.degrees[0]
        free = parts["P1"]
        if self.p1_basis == "monomial":
            p1 = Polynomial([0.0, *free, 1.0 - float(np.sum(free))] if d1 > 1 else [0.0, 1.0])
        else:
            x = Polynomial([0.0, 1.0])
            omx = Polynomial([1.0, -1.0])
            p1, term = x, x
            for c in free:
                term = term * omx
                p1 = p1 + float(c) * term
        pieces = [p1] + [Polynomial([0.0, *parts[f"P{j}"]]) for j in range(2, self.I + 1)]
        return R, MollifierSet(pieces), self._shift(parts["shift"])

    def _shift(self, s) -> ShiftPolynomialSpec:
        s = [float(v) for v in s]
        if self.mode == LOW_T:
            if self.shift_basis == "monomial":
                return ShiftPolynomialSpec(Polynomial([1.0, *s]), LOW_T)
            q = Polynomial([1.0])
            for k, r in enumerate(s, start=1):
                q = q - r * _sym_basis(k)
            return ShiftPolynomialSpec(q, LOW_T)
        c = (1.0 + self.eta) / 2.0
        p = Polynomial([1.0])
        if self.shift_basis == "monomial":
            # P(x) = 1 + sum r_j (x - c)^j
            y = Polynomial([-c, 1.0])
            yj = Polynomial([1.0])
            for r in s:
                yj = yj * y
                p = p + r * yj
            return ShiftPolynomialSpec(p, ETA)
        for k, r in enumerate(s, start=1):
            b = _sym_basis(k)
            p = p - r * (compose_affine(b, -1.0, 0.5) - Polynomial([b(0.5 - c)]))
        return ShiftPolynomialSpec(p, ETA)

    def encode(self, R: float, mol: MollifierSet, spec: ShiftPolynomialSpec, tol: float = 1e-5) -> np.ndarray:
        """Parameter vector decoding to (the projection of) the given set.

        The decode map is affine in every coordinate but ``R``, so the
        coordinates follow from a least-squares solve on its columns.  Printed
        coefficient sets satisfy the side conditions only to rounding, so the
        projection may move coefficients by up to ``tol``; more raises.
        """
        target = self._flatten(R, mol, spec)
        base = np.zeros(self.dim)
        base[0] = R
        y0 = self._flatten(*self.decode(base))
        A = np.empty((y0.size, self.dim - 1))
        for i in range(1, self.dim):
            e = base.copy()
            e[i] = 1.0
            A[:, i - 1] = self._flatten(*self.decode(e)) - y0
        sol, *_ = np.linalg.lstsq(A, target - y0, rcond=None) if self.dim > 1 else (np.zeros(0),)
        theta = np.concatenate([[R], sol])
        err = np.max(np.abs(self._flatten(*self.decode(theta)) - target))
        if err > tol * max(1.0, np.max(np.abs(target))):
            raise ValueError("coefficient set is not representable in this search space")
        return theta

    def _flatten(self, R, mol, spec) -> np.ndarray:
        d = self.degrees
        if mol.I != self.I:
            raise ValueError(f"mollifier has {mol.I} pieces, search space has {self.I}")
        out = []
        for j in range(self.I):
            p = mol.pieces[j]
            if p.degree > d[j]:
                raise ValueError(f"P_{j + 1} degree {p.degree} exceeds {d[j]}")
            out.extend(p.padded(d[j] + 1))
        if spec.mode != self.mode:
            raise ValueError("shift polynomial mode does not match search space")
        if spec.poly.degree > d[-1]:
            raise ValueError(f"shift degree {spec.poly.degree} exceeds {d[-1]}")
        out.extend(spec.poly.padded(d[-1] + 1))
        return np.asarray(out, dtype=float)


def objective(params, space: SearchSpace, cfg: EvalConfig) -> float:
    """Proportion bound at ``params``; ``-inf`` if infeasible or out of bounds."""
    theta = np.asarray(params, dtype=float)
    b = space.bounds_array()
    if not np.all(np.isfinite(theta)) or np.any(theta < b[:, 0]) or np.any(theta > b[:, 1]):
        return -math.inf
    R, mol, spec = space.decode(theta)
    run = replace(cfg, R=R, eta=space.eta)
    try:
        K = functional_value(spec, mol, run)
        return proportion(K, R)
    except (FunctionalNotPositive, NumericError, OverflowError):
        return -math.inf


@dataclass
class OptimResult:
    best_params: dict
    best_proportion: float
    evaluations: int
    trace: list
    theta: list = field(default_factory=list)
    restarts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "best_params": self.best_params,
            "best_proportion": self.best_proportion,
            "evaluations": self.evaluations,
            "trace": [list(t) for t in self.trace],
            "theta": list(self.theta),
            "restarts": self.restarts,
        }


class _BudgetExhausted(Exception):
    pass


class _Run:
    """One restart: a counted objective with its own evaluation log."""

    def __init__(self, space, cfg, budget):
        self.space, self.cfg, self.budget = space, cfg, budget
        self.values: list = []
        self.best = (-math.inf, None)

    def __call__(self, theta) -> float:
        if len(self.values) >= self.budget:
            raise _BudgetExhausted
        v = objective(theta, self.space, self.cfg)
        self.values.append(v)
        if v > self.best[0]:
            self.best = (v, np.array(theta, dtype=float))
        # Nelder-Mead minimizes; keep the sentinel finite-free ordering
        return -v if math.isfinite(v) else math.inf


def _nelder_mead(run: _Run, x0, bounds) -> None:
    x = np.asarray(x0, dtype=float)
    b = [tuple(r) for r in bounds]
    last = -math.inf
    while run.budget - len(run.values) > len(x) + 1:
        try:
            minimize(
                run, x, method="Nelder-Mead", bounds=b,
                options={
                    "maxfev": run.budget - len(run.values),
                    "xatol": 1e-10, "fatol": 1e-13, "adaptive": len(x) > 4,
                },
            )
        except _BudgetExhausted:
            return
        best, arg = run.best
        if arg is None or best <= last + 1e-12:
            return
        last, x = best, arg


def _start_points(space, cfg, warm, seed, restarts, run_budget):
    """Deterministic restart origins; cold origins are resampled until feasible."""
    rng = np.random.default_rng(seed)
    b = space.bounds_array()
    lo, hi = b[:, 0], b[:, 1]
    starts, spent = [], []
    for i in range(restarts):
        if warm is not None and i == 0:
            starts.append(np.array(warm, dtype=float))
            spent.append([])
            continue
        tried = []
        for _ in range(max(1, run_budget // 10)):
            if warm is not None:
                x = np.clip(warm + rng.normal(0.0, 0.05, space.dim) * (hi - lo), lo, hi)
            else:
                x = rng.uniform(lo, hi)
            v = objective(x, space, cfg)
            tried.append(v)
            if math.isfinite(v):
                break
        starts.append(x)
        spent.append(tried)
    return starts, spent


def _decoded(space: SearchSpace, theta) -> dict:
    R, mol, spec = space.decode(theta)
    return {
        "R": R,
        "mode": space.mode,
        "eta": space.eta,
        "mollifier": [list(p.coeffs) for p in mol.pieces],
        "shift_poly": list(spec.poly.coeffs),
    }


def optimize(
    space: SearchSpace,
    cfg: EvalConfig,
    budget: int,
    seed: int,
    warm_start: Optional[Sequence[float]] = None,
    restarts: int = DEFAULT_RESTARTS,
    workers: Optional[int] = None,
) -> OptimResult:
    """Multi-start Nelder-Mead maximizing the proportion bound.

    ``budget`` caps objective evaluations across all restarts (start-point
    sampling included).  Below ``MIN_RESTART_BUDGET`` the warm start is
    returned unchanged.  Results depend only on ``(space, cfg, budget, seed,
    warm_start, restarts)``, never on the worker count.
    """
    warm = None if warm_start is None else np.asarray(warm_start, dtype=float)
    if warm is not None and warm.shape != (space.dim,):
        raise ValueError(f"warm start must have length {space.dim}")
    if budget < MIN_RESTART_BUDGET:
        if warm is None:
            raise ValueError(f"budget must be at least {MIN_RESTART_BUDGET} without a warm start")
        return _result(space, cfg, warm, 0, [], [])
    if restarts < 1:
        raise ValueError("restarts must be positive")
    L = min(restarts, budget // MIN_RESTART_BUDGET)
    per = budget // L
    starts, spent = _start_points(space, cfg, warm, seed, L, per)
    bounds = space.bounds_array()

    def work(i):
        run = _Run(space, cfg, per - len(spent[i]))
        _nelder_mead(run, starts[i], bounds)
        return run

    n = workers if workers is not None else worker_count()
    if n > 1 and L > 1:
        with ThreadPoolExecutor(max_workers=min(n, L)) as pool:
            runs = list(pool.map(work, range(L)))
    else:
        runs = [work(i) for i in range(L)]

    log = []
    best_v, best_theta, info = -math.inf, starts[0], []
    for i, run in enumerate(runs):
        log.extend(spent[i])
        log.extend(run.values)
        v, arg = run.best
        info.append({"restart": i, "evaluations": len(spent[i]) + len(run.values), "best": v})
        # strict comparison: ties go to the lowest restart index
        if arg is not None and v > best_v:
            best_v, best_theta = v, arg
    return _result(space, cfg, best_theta, len(log), log, info)


def _result(space, cfg, theta, evaluations, log, info) -> OptimResult:
    trace, best = [], -math.inf
    for i, v in enumerate(log):
        if v > best:
            best = v
            trace.append((i + 1, v))
    # re-evaluated here, never taken from the search log
    value = objective(theta, space, cfg)
    return OptimResult(
        best_params=_decoded(space, theta),
        best_proportion=value,
        evaluations=evaluations,
        trace=trace,
        theta=[float(t) for t in theta],
        restarts=info,
    )
