"""Truncated bivariate Taylor jets in the shift variables ``(a, b)``.

A :class:`BiJet` carries the Taylor coefficients of a function of ``(a, b)``
about a fixed base point up to orders ``(order_a, order_b)``.  The
differential operators ``P(c + d/da) P(c + d/db)`` are then applied to the
coefficient grid directly (:func:`apply_shift_operator`).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .polynomial import Polynomial, derivative, evaluate


class JetError(ArithmeticError):
    pass


class BiJet:
    """``coeffs[i, j]`` is the coefficient of ``(a - base_a)**i (b - base_b)**j``."""

    __slots__ = ("base_a", "base_b", "coeffs")
    __array_ufunc__ = None  # make numpy scalars defer to the reflected operators

    def __init__(self, base_a: float, base_b: float, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 2:
            raise ValueError("jet coefficients must form a 2-d grid")
        c.flags.writeable = False
        self.base_a = float(base_a)
        self.base_b = float(base_b)
        self.coeffs = c

    # -- construction ---------------------------------------------------

    @classmethod
    def constant(cls, c: float, base_a: float, base_b: float, order_a: int, order_b: int) -> "BiJet":
        g = np.zeros((order_a + 1, order_b + 1))
        g[0, 0] = c
        return cls(base_a, base_b, g)

    @classmethod
    def variable_a(cls, base_a: float, base_b: float, order_a: int, order_b: int) -> "BiJet":
        g = np.zeros((order_a + 1, order_b + 1))
        g[0, 0] = base_a
        if order_a >= 1:
            g[1, 0] = 1.0
        return cls(base_a, base_b, g)

    @classmethod
    def variable_b(cls, base_a: float, base_b: float, order_a: int, order_b: int) -> "BiJet":
        g = np.zeros((order_a + 1, order_b + 1))
        g[0, 0] = base_b
        if order_b >= 1:
            g[0, 1] = 1.0
        return cls(base_a, base_b, g)

    # -- inspection -------------------------------------------------------

    @property
    def order_a(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def order_b(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def value(self) -> float:
        return float(self.coeffs[0, 0])

    def partial(self, i: int, j: int) -> float:
        """Mixed partial ``d^i/da^i d^j/db^j`` at the base point."""
        return math.factorial(i) * math.factorial(j) * float(self.coeffs[i, j])

    def __repr__(self) -> str:
        return f"BiJet(base=({self.base_a}, {self.base_b}), coeffs={self.coeffs.tolist()})"

    # -- arithmetic -------------------------------------------------------

    def _like(self, grid) -> "BiJet":
        return BiJet(self.base_a, self.base_b, grid)

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, BiJet):
            if (
                other.coeffs.shape != self.coeffs.shape
                or other.base_a != self.base_a
                or other.base_b != self.base_b
            ):
                raise JetError("jet base point or order mismatch")
            return other.coeffs
        g = np.zeros_like(self.coeffs)
        g[0, 0] = float(other)
        return g

    def __add__(self, other) -> "BiJet":
        return self._like(self.coeffs + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "BiJet":
        return self._like(self.coeffs - self._coerce(other))

    def __rsub__(self, other) -> "BiJet":
        return self._like(self._coerce(other) - self.coeffs)

    def __neg__(self) -> "BiJet":
        return self._like(-self.coeffs)

    def __pos__(self) -> "BiJet":
        return self

    def scale(self, s: float) -> "BiJet":
        return self._like(self.coeffs * float(s))

    def __mul__(self, other) -> "BiJet":
        if not isinstance(other, BiJet):
            return self.scale(other)
        y = self._coerce(other)
        return self._like(_cauchy(self.coeffs, y))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BiJet":
        if not isinstance(other, BiJet):
            return self.scale(1.0 / float(other))
        return self._like(_solve_div(self.coeffs, self._coerce(other)))

    def __rtruediv__(self, other) -> "BiJet":
        return self._like(_solve_div(self._coerce(other), self.coeffs))

    def __pow__(self, n: int) -> "BiJet":
        if not isinstance(n, int) or n < 0:
            raise JetError("jets support nonnegative integer powers only")
        out = BiJet.constant(1.0, self.base_a, self.base_b, self.order_a, self.order_b)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def exp(self) -> "BiJet":
        return exp_jet(self)


def _cauchy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    na, nb = x.shape
    out = np.zeros_like(x)
    for p in range(na):
        for q in range(nb):
            xv = x[p, q]
            if xv != 0.0:
                out[p:, q:] += xv * y[: na - p, : nb - q]
    return out


def _solve_div(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    y00 = y[0, 0]
    if y00 == 0.0:
        raise JetError("jet division by infinitesimal")
    na, nb = x.shape
    z = np.zeros_like(x)
    for i in range(na):
        for j in range(nb):
            s = x[i, j]
            for p in range(i + 1):
                for q in range(j + 1):
                    if p or q:
                        s -= y[p, q] * z[i - p, j - q]
            z[i, j] = s / y00
    return z


def constant(c: float, base_a: float, base_b: float, order_a: int, order_b: int) -> BiJet:
    return BiJet.constant(c, base_a, base_b, order_a, order_b)


def variable_a(base_a: float, base_b: float, order_a: int, order_b: int) -> BiJet:
    return BiJet.variable_a(base_a, base_b, order_a, order_b)


def variable_b(base_a: float, base_b: float, order_a: int, order_b: int) -> BiJet:
    return BiJet.variable_b(base_a, base_b, order_a, order_b)


def exp_jet(x: BiJet) -> BiJet:
    """Truncated exponential ``exp(v) * sum_n (x - v)^n / n!``."""
    v = x.value
    h = x - v
    nmax = x.order_a + x.order_b
    term = BiJet.constant(1.0, x.base_a, x.base_b, x.order_a, x.order_b)
    total = term
    for n in range(1, nmax + 1):
        term = term * h * (1.0 / n)
        total = total + term
    return total * math.exp(v)


def apply_shift_operator(weights_a: Sequence[float], weights_b: Sequence[float], x: BiJet) -> float:
    """Apply ``(sum_i wa[i] D_a^i)(sum_j wb[j] D_b^j)`` to ``x`` at its base point."""
    if len(weights_a) > x.order_a + 1 or len(weights_b) > x.order_b + 1:
        raise JetError("insufficient jet order")
    total = 0.0
    for i, wa in enumerate(weights_a):
        for j, wb in enumerate(weights_b):
            total += wa * wb * x.partial(i, j)
    return total


def shifted_operator_weights(p: Polynomial, c: float, sign: int = 1) -> list:
    """Weights ``sign**j * p^(j)(c) / j!`` so that ``p(c + sign*D) = sum_j w_j D^j``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    out = []
    q = p
    for j in range(max(len(p.coeffs), 1)):
        out.append(sign**j * evaluate(q, c) / math.factorial(j))
        q = derivative(q)
    return out
