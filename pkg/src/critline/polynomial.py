"""Dense univariate polynomials and closed-form polynomial-times-exponential integrals.

Every routine here is generic over the scalar type: plain floats or
:class:`critline.bijet.BiJet` values can be passed wherever an argument is
documented as a *scalar*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

# Default |a*T| below which the power series replaces the closed form.
SERIES_SWITCH = 0.5
SERIES_TERMS = 30


def scalar_value(x) -> float:
    """Constant term of a scalar (the float itself, or a jet's base value)."""
    return float(getattr(x, "value", x))


def scalar_exp(x):
    if hasattr(x, "exp"):
        return x.exp()
    return math.exp(x)


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with ``coeffs[k]`` the coefficient of ``x**k``.

    Trailing zeros are stripped, so the zero polynomial has ``coeffs == ()``.
    """

    coeffs: tuple

    def __init__(self, coeffs: Iterable[float] = ()):
        c = [float(v) for v in coeffs]
        while c and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient (-1 for the zero polynomial)."""
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0.0,) * (n - len(self.coeffs))
        b = other.coeffs + (0.0,) * (n - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(c * float(other) for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        return derivative(self)

    def compose_affine(self, s: float, t: float) -> "Polynomial":
        return compose_affine(self, s, t)

    def padded(self, n: int) -> list:
        """Coefficient list zero-padded (never truncated) to length ``n``."""
        return list(self.coeffs) + [0.0] * max(0, n - len(self.coeffs))


def evaluate(p: Polynomial, x):
    """Horner evaluation of ``p`` at a real or jet argument."""
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def derivative(p: Polynomial) -> Polynomial:
    return Polynomial(k * c for k, c in enumerate(p.coeffs) if k > 0)


def compose_affine(p: Polynomial, s: float, t: float) -> Polynomial:
    """Return ``q`` with ``q(x) == p(s*x + t)``, expanded binomially."""
    n = len(p.coeffs)
    out = [0.0] * n
    for i, c in enumerate(p.coeffs):
        if c == 0.0:
            continue
        for j in range(i + 1):
            out[j] += c * math.comb(i, j) * s**j * t ** (i - j)
    return Polynomial(out)


def monomial(k: int) -> Polynomial:
    if k < 0:
        raise ValueError("monomial degree must be nonnegative")
    return Polynomial([0.0] * k + [1.0])


# --------------------------------------------------------------------------
# integrals of mu^k exp(-a mu) over [0, T]


def _moment_series(k: int, a, T: float, terms: int = SERIES_TERMS):
    # sum_n (-a)^n T^(k+n+1) / (n! (k+n+1))
    total = 0.0
    power = 1.0  # (-a T)^n / n!
    for n in range(terms):
        total = total + power * (T ** (k + 1) / (k + n + 1))
        power = power * (-a * T) * (1.0 / (n + 1))
    return total


def _moment_closed(k: int, a, T: float):
    # k!/a^(k+1) * (1 - e^{-aT} sum_{j<=k} (aT)^j/j!).  The bracket equals
    # e^{-aT} * sum_{j>k} (aT)^j/j!, which is summed directly while the tail
    # terms stay smaller than the head (|aT| < k + 2) to avoid cancellation.
    x = a * T
    x0 = scalar_value(x)
    lead = math.factorial(k) / a ** (k + 1)
    if abs(x0) < k + 2:
        order = getattr(a, "order_a", 0) + getattr(a, "order_b", 0)
        nterms = 40 + order + int(4 * abs(x0))
        term = x ** (k + 1) * (1.0 / math.factorial(k + 1))
        tail = term
        for j in range(k + 2, k + 1 + nterms):
            term = term * x * (1.0 / j)
            tail = tail + term
        return lead * scalar_exp(-x) * tail
    head = 0.0
    term = 1.0
    for j in range(k + 1):
        head = head + term
        term = term * x * (1.0 / (j + 1))
    return lead * (1.0 - scalar_exp(-x) * head)


def exp_moment(k: int, a, T: float, switch: float = SERIES_SWITCH):
    """``∫_0^T mu^k exp(-a mu) dmu`` for integer ``k >= 0`` and ``T >= 0``.

    Uses the closed form when ``|a T| >= switch`` and the convergent power
    series in ``a`` otherwise, so ``a = 0`` is handled without special cases.
    """
    if k < 0:
        raise ValueError("moment index must be nonnegative")
    if T < 0:
        raise ValueError("upper limit must be nonnegative")
    if T == 0.0:
        return 0.0 * a
    if abs(scalar_value(a) * T) < switch:
        return _moment_series(k, a, T)
    return _moment_closed(k, a, T)


def integrate_poly_exp(p: Polynomial, a, T: float, switch: float = SERIES_SWITCH):
    """``∫_0^T p(mu) exp(-a mu) dmu`` as a coefficient sum of :func:`exp_moment`."""
    total = 0.0
    for k, c in enumerate(p.coeffs):
        if c != 0.0:
            total = total + c * exp_moment(k, a, T, switch)
    return total


def as_polynomial(p: Union[Polynomial, Sequence[float]]) -> Polynomial:
    return p if isinstance(p, Polynomial) else Polynomial(p)
