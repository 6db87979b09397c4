"""Mollified-moment functional and the resulting critical-zero proportion bounds.

The functional is assembled from

* the kernels ``U_m(a, u)`` (:func:`u_kernel`),
* the bilinear form ``F(a, b; u)`` (:func:`f_kernel`) and its integral over
  ``u`` in ``[0, 1]`` (:func:`moment_integral`),
* the shift operators ``Q(-d/da) Q(-d/db)`` (low-height regime,
  :func:`k_low_t`) or ``P(c + d/da) P(c + d/db)`` (``T ~ Q^eta``,
  :func:`k_eta`), realised on :class:`~critline.bijet.BiJet` coefficients.

The exponential inside the ``U_m`` integrals is ``exp(-a*mu)``, with the
integration variable in the exponent.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _backend
from .bijet import (
    BiJet,
    apply_shift_operator,
    exp_jet,
    shifted_operator_weights,
    variable_a,
    variable_b,
)
from .polynomial import (
    SERIES_SWITCH,
    Polynomial,
    as_polynomial,
    compose_affine,
    derivative,
    evaluate,
    integrate_poly_exp,
    monomial,
)

KERNEL_EXPONENT = "exp(-a*mu)"
LOW_T = "low_T"
ETA = "eta"


class FunctionalNotPositive(ValueError):
    """The moment functional is <= 0, so no proportion bound follows."""


class NumericError(ArithmeticError):
    pass


@dataclass(frozen=True)
class MollifierSet:
    """Mollifier pieces ``P_1, ..., P_I``."""

    pieces: tuple

    def __init__(self, pieces: Sequence):
        if len(pieces) < 1:
            raise ValueError("a mollifier needs at least one piece")
        object.__setattr__(self, "pieces", tuple(as_polynomial(p) for p in pieces))

    @property
    def I(self) -> int:  # noqa: E743
        return len(self.pieces)

    def piece(self, l: int) -> Polynomial:
        """``P_l`` for ``1 <= l <= I``; the zero polynomial beyond ``I``."""
        if 1 <= l <= self.I:
            return self.pieces[l - 1]
        return Polynomial()

    def as_array(self) -> np.ndarray:
        d = max(1, max(len(p.coeffs) for p in self.pieces))
        return np.array([p.padded(d) for p in self.pieces], dtype=float)

    def negated(self) -> "MollifierSet":
        return MollifierSet([-p for p in self.pieces])


@dataclass(frozen=True)
class ShiftPolynomialSpec:
    """The shift polynomial: ``Q`` (``mode='low_T'``) or ``P`` (``mode='eta'``)."""

    poly: Polynomial
    mode: str = LOW_T

    def __post_init__(self):
        object.__setattr__(self, "poly", as_polynomial(self.poly))
        if self.mode not in (LOW_T, ETA):
            raise ValueError(f"unknown shift-polynomial mode {self.mode!r}")


@dataclass(frozen=True)
class EvalConfig:
    R: float
    eta: float = 0.0
    quad_order: int = 64
    series_switch: float = SERIES_SWITCH
    jet_order_cap: int = 8

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        if self.quad_order < 16:
            raise ValueError("quad_order must be at least 16")
        if not 0 < self.series_switch <= 1:
            raise ValueError("series_switch must lie in (0, 1]")
        if self.jet_order_cap < 0:
            raise ValueError("jet_order_cap must be nonnegative")


@dataclass
class ProportionReport:
    K: float
    proportion: Optional[float]
    constraint_violations: list
    config_echo: dict
    kernel_variant: dict
    mode: str = LOW_T
    backend: str = field(default_factory=lambda: _backend.BACKEND)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@functools.lru_cache(maxsize=32)
def gauss_legendre(n: int):
    """Nodes and weights of the ``n``-point Gauss-Legendre rule on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


# --------------------------------------------------------------------------
# kernels


def u_kernel(m: int, a, u: float, mol: MollifierSet, switch: float = SERIES_SWITCH):
    """``U_m(a, u)`` for ``0 <= m <= I``; ``a`` may be a float or a BiJet.

    ``U_0`` and ``U_m`` for ``m >= 2`` carry ``a P_m(1-u) + P_m'(1-u)`` (with
    ``P_1`` in ``U_0``); every ``m >= 1`` carries ``-(m+1) P_{m+1}(1-u)``;
    the integral terms run over ``l = m+2 .. I``.
    """
    I = mol.I
    if not 0 <= m <= I:
        raise ValueError(f"kernel index {m} outside [0, {I}]")
    w = 1.0 - u
    total = 0.0
    if m == 0 or m >= 2:
        p = mol.piece(1 if m == 0 else m)
        total = a * evaluate(p, w) + evaluate(derivative(p), w)
    if m >= 1:
        total = total - (m + 1) * evaluate(mol.piece(m + 1), w)
    if w > 0.0:
        for l in range(m + 2, I + 1):
            k = l - m - 2
            coef = math.comb(l, m) * (-1.0) ** (l - m) / math.factorial(k)
            integrand = compose_affine(mol.piece(l), -1.0, w) * monomial(k)
            total = total + coef * integrate_poly_exp(integrand, a, w, switch)
    return total


@functools.lru_cache(maxsize=16)
def _pair_weights(I: int) -> tuple:
    return tuple(
        tuple(
            sum(math.factorial(k) * math.comb(m1, k) * math.comb(m2, k) for k in range(min(m1, m2) + 1))
            / math.factorial(m1 + m2)
            for m2 in range(I + 1)
        )
        for m1 in range(I + 1)
    )


def f_kernel(a, b, u: float, mol: MollifierSet, switch: float = SERIES_SWITCH):
    """The bilinear form ``F(a, b; u) = sum c_{m1 m2} U_m1(a,u) U_m2(b,u) u^(m1+m2)``."""
    I = mol.I
    C = _pair_weights(I)
    ua = [u_kernel(m, a, u, mol, switch) for m in range(I + 1)]
    ub = [u_kernel(m, b, u, mol, switch) for m in range(I + 1)]
    total = 0.0
    for m1 in range(I + 1):
        row = 0.0
        for m2 in range(I + 1):
            row = row + (C[m1][m2] * u ** (m1 + m2)) * ub[m2]
        total = total + ua[m1] * row
    return total


def _affine_seed(x):
    """``(var, value, slope)`` if ``x`` is constant or ``c + s*(v - v0)`` in one variable."""
    if not isinstance(x, BiJet):
        return None, float(x), 0.0
    g = x.coeffs
    mask = g != 0.0
    mask[0, 0] = False
    da = g[1, 0] if g.shape[0] > 1 else 0.0
    db = g[0, 1] if g.shape[1] > 1 else 0.0
    if g.shape[0] > 1:
        mask[1, 0] = False
    if g.shape[1] > 1:
        mask[0, 1] = False
    if mask.any() or (da != 0.0 and db != 0.0):
        return False
    if da != 0.0:
        return "a", x.value, float(da)
    if db != 0.0:
        return "b", x.value, float(db)
    return None, x.value, 0.0


def moment_integral(a, b, mol: MollifierSet, cfg: EvalConfig, generic: bool = False):
    """Gauss-Legendre value of ``∫_0^1 F(a, b; u) du`` for real or jet ``a``, ``b``.

    When each argument is affine in at most one (distinct) shift variable the
    Taylor grid comes from the compiled kernel; otherwise, or with
    ``generic=True``, ``F`` is evaluated node by node in jet arithmetic.
    """
    nodes, weights = gauss_legendre(cfg.quad_order)
    sa, sb = _affine_seed(a), _affine_seed(b)
    fast = not generic and sa is not False and sb is not False and (sa[0] is None or sa[0] != sb[0])
    if not fast:
        total = 0.0
        for u, w in zip(nodes, weights):
            total = total + float(w) * f_kernel(a, b, float(u), mol, cfg.series_switch)
        return total

    jet = a if isinstance(a, BiJet) else b if isinstance(b, BiJet) else None

    def order(var):
        if var == "a":
            return jet.order_a
        if var == "b":
            return jet.order_b
        return 0

    (va, xa, slope_a), (vb, xb, slope_b) = sa, sb
    grid = _backend.moment_grid(
        mol.as_array(), xa, slope_a, order(va), xb, slope_b, order(vb),
        nodes, weights, cfg.series_switch,
    )
    if jet is None:
        return float(grid[0, 0])
    out = np.zeros_like(jet.coeffs)
    if va == "a" or (va is None and vb == "b"):
        out[: grid.shape[0], : grid.shape[1]] = grid
    else:
        out[: grid.shape[1], : grid.shape[0]] = grid.T
    return BiJet(jet.base_a, jet.base_b, out)


# --------------------------------------------------------------------------
# functionals


def _jet_order(poly: Polynomial, cfg: EvalConfig) -> int:
    order = max(poly.degree, 0)
    if order > cfg.jet_order_cap:
        raise ValueError(
            f"shift polynomial degree {order} exceeds jet_order_cap {cfg.jet_order_cap}"
        )
    return order


def _seeds(base: float, order: int):
    return variable_a(base, base, order, order), variable_b(base, base, order, order)


def low_t_bracket(mol: MollifierSet, cfg: EvalConfig, order: int, generic: bool = False) -> BiJet:
    """Jet of ``(∫F(a,b) - e^{-a-b} ∫F(-b,-a)) / (a+b)`` at ``a = b = -R``."""
    a, b = _seeds(-cfg.R, order)
    direct = moment_integral(a, b, mol, cfg, generic)
    mirror = moment_integral(-b, -a, mol, cfg, generic)
    return (direct - exp_jet(-a - b) * mirror) / (a + b)


def _finite(K: float) -> float:
    if not math.isfinite(K):
        raise NumericError(f"functional evaluated to non-finite value {K}")
    return K


def k_low_t(qspec: ShiftPolynomialSpec, mol: MollifierSet, cfg: EvalConfig) -> float:
    """``Q(-d/da) Q(-d/db)`` applied to the low-height bracket at ``a = b = -R``."""
    q = qspec.poly
    bracket = low_t_bracket(mol, cfg, _jet_order(q, cfg))
    w = shifted_operator_weights(q, 0.0, -1)
    return _finite(apply_shift_operator(w, w, bracket))


def eta_brackets(mol: MollifierSet, cfg: EvalConfig, order: int, generic: bool = False):
    """Jets of ``∫F(a,b)/(a+b)`` and ``e^{-a-b} ∫F(-b,-a)/(a+b)`` at ``a = b = -R/(1+eta)``."""
    a, b = _seeds(-cfg.R / (1.0 + cfg.eta), order)
    direct = moment_integral(a, b, mol, cfg, generic)
    mirror = moment_integral(-b, -a, mol, cfg, generic)
    s = a + b
    return direct / s, exp_jet(-a - b) * mirror / s


def k_eta(pspec: ShiftPolynomialSpec, mol: MollifierSet, cfg: EvalConfig) -> float:
    """The ``T ~ Q^eta`` functional with shift operators ``P((1 +- eta)/2 + D)``."""
    p = pspec.poly
    eta = cfg.eta
    first, second = eta_brackets(mol, cfg, _jet_order(p, cfg))
    wp = shifted_operator_weights(p, (1.0 + eta) / 2.0, 1)
    wm = shifted_operator_weights(p, (1.0 - eta) / 2.0, 1)
    mirror_weight = math.exp(2.0 * eta * cfg.R / (1.0 + eta))
    K = apply_shift_operator(wp, wp, first) - mirror_weight * apply_shift_operator(wm, wm, second)
    return _finite(K)


def functional_value(spec: ShiftPolynomialSpec, mol: MollifierSet, cfg: EvalConfig) -> float:
    if spec.mode == LOW_T:
        return k_low_t(spec, mol, cfg)
    return k_eta(spec, mol, cfg)


def proportion(K: float, R: float) -> float:
    """Proportion bound ``1 - log(K)/R``."""
    if not R > 0:
        raise ValueError("R must be positive")
    if not K > 0:
        raise FunctionalNotPositive("functional not positive: no bound")
    return 1.0 - math.log(K) / R


# --------------------------------------------------------------------------
# constraints


def check_constraints(mol: MollifierSet, sp: ShiftPolynomialSpec, eta: float = 0.0, grid: int = 101) -> list:
    """Named residuals of the mollifier and shift-polynomial side conditions.

    Reports only; nothing is rejected.  The last three entries are the literal
    ``Q'(x) + Q'(1-x) = 0``, the odd-support form ``Q(x) + Q(1-x) = 2`` and the
    symmetric-derivative form ``Q'(x) = Q'(1-x)``.
    """
    out = []
    p1 = mol.piece(1)
    out.append({"name": "P1(0)", "residual": abs(evaluate(p1, 0.0))})
    out.append({"name": "P1(1)-1", "residual": abs(evaluate(p1, 1.0) - 1.0)})
    for j in range(2, mol.I + 1):
        out.append({"name": f"P{j}(0)", "residual": abs(evaluate(mol.piece(j), 0.0))})
    if sp.mode == LOW_T:
        q = sp.poly
        out.append({"name": "Q(0)-1", "residual": abs(evaluate(q, 0.0) - 1.0)})
    else:
        out.append(
            {"name": "P((1+eta)/2)-1", "residual": abs(evaluate(sp.poly, (1.0 + eta) / 2.0) - 1.0)}
        )
        q = compose_affine(sp.poly, -1.0, 0.5)
    dq = derivative(q)
    xs = np.linspace(0.0, 1.0, grid)
    out.append(
        {
            "name": "max|Q'(x)+Q'(1-x)|",
            "residual": float(max(abs(evaluate(dq, x) + evaluate(dq, 1.0 - x)) for x in xs)),
        }
    )
    out.append(
        {
            "name": "max|Q(x)+Q(1-x)-2|",
            "residual": float(max(abs(evaluate(q, x) + evaluate(q, 1.0 - x) - 2.0) for x in xs)),
        }
    )
    out.append(
        {
            "name": "max|Q'(x)-Q'(1-x)|",
            "residual": float(max(abs(evaluate(dq, x) - evaluate(dq, 1.0 - x)) for x in xs)),
        }
    )
    return out


# --------------------------------------------------------------------------
# reports


def evaluate_report(
    spec: ShiftPolynomialSpec,
    mol: MollifierSet,
    cfg: EvalConfig,
    kernel_variant: Optional[dict] = None,
) -> ProportionReport:
    """Evaluate the functional and package it with constraint residuals."""
    K = functional_value(spec, mol, cfg)
    try:
        prop = proportion(K, cfg.R)
    except FunctionalNotPositive:
        prop = None
    variant = {"exponent": KERNEL_EXPONENT}
    if kernel_variant:
        variant.update(kernel_variant)
    echo = dataclasses.asdict(cfg)
    echo["mode"] = spec.mode
    echo["mollifier"] = [list(p.coeffs) for p in mol.pieces]
    echo["shift_poly"] = list(spec.poly.coeffs)
    return ProportionReport(
        K=K,
        proportion=prop,
        constraint_violations=check_constraints(mol, spec, cfg.eta),
        config_echo=echo,
        kernel_variant=variant,
        mode=spec.mode,
    )
