"""Brute-force checks of two finitely verifiable identities used by the kernel.

* the nested-integral identity that collapses ``m`` iterated integrals over
  ``x_1 ... x_m <= D`` into a single integral with a ``log^(m-1)`` weight;
* the prime-tuple product identity that produces the
  ``k! C(m1, k) C(m2, k)`` weights of ``F(a, b; u)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .polynomial import Polynomial, as_polynomial


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class PrimeTuplePattern:
    primes: tuple
    m1: int
    m2: int

    def __post_init__(self):
        ps = tuple(int(p) for p in self.primes)
        object.__setattr__(self, "primes", ps)
        if len(set(ps)) != len(ps):
            raise ValueError("primes must be distinct")
        if not all(_is_prime(p) for p in ps):
            raise ValueError("all entries must be prime")
        if len(ps) > 6 or self.m1 > 6 or self.m2 > 6:
            raise ValueError("enumeration limited to 6 primes and m <= 6")
        if self.m1 < 1 or self.m2 < 1:
            raise ValueError("m1, m2 must be positive")


def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def _simplex_side(m: int, f: Polynomial, L: float, alpha: float, n: int) -> float:
    # x_i = exp(t_i): nested integral over t_1 + ... + t_m <= L of
    # f(exp(sum t)) exp(-alpha sum t)
    x, w = _gl(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    s = np.zeros(1)
    wt = np.ones(1)
    rem = np.full(1, L)
    for _ in range(m):
        t = np.outer(rem, x).ravel()
        wt = np.outer(wt * rem, w).ravel()
        s = np.repeat(s, n) + t
        rem = np.repeat(rem, n) - t
    g = np.polynomial.polynomial.polyval(np.exp(s), np.asarray(f.coeffs or (0.0,)))
    return float(np.sum(wt * g * np.exp(-alpha * s)))


def _log_weight_side(m: int, f: Polynomial, D: float, alpha: float, n: int) -> float:
    # direct Gauss-Legendre in x on [1, D]
    x, w = _gl(n)
    xs = 1.0 + 0.5 * (D - 1.0) * (x + 1.0)
    ws = 0.5 * (D - 1.0) * w
    fx = np.polynomial.polynomial.polyval(xs, np.asarray(f.coeffs or (0.0,)))
    vals = fx * np.log(xs) ** (m - 1) / (math.factorial(m - 1) * xs ** (1.0 + alpha))
    return float(np.sum(ws * vals))


def lemma36_sides(m: int, f, D: float, alpha: float, quad_order: int = 24):
    """Both sides of the nested-integral identity for ``1 <= m <= 4``."""
    if not 1 <= m <= 4:
        raise ValueError("nesting depth limited to 1..4")
    if D <= 1:
        raise ValueError("D must exceed 1")
    f = as_polynomial(f)
    lhs = _simplex_side(m, f, math.log(D), alpha, quad_order)
    rhs = _log_weight_side(m, f, D, alpha, 2 * quad_order)
    return lhs, rhs


def lemma36_residual(m: int, f, D: float, alpha: float, quad_order: int = 24) -> float:
    lhs, rhs = lemma36_sides(m, f, D, alpha, quad_order)
    return abs(lhs - rhs)


def _tuple_sum(logs: Sequence[float], length: int, squared: int) -> float:
    # ordered tuples of distinct primes; the first `squared` entries carry log^2
    terms = []
    for tup in itertools.permutations(range(len(logs)), length):
        v = 1.0
        for pos, idx in enumerate(tup):
            v *= logs[idx] ** 2 if pos < squared else logs[idx]
        terms.append(v)
    return math.fsum(terms)


def lemma37_sides(pat: PrimeTuplePattern):
    """``(lhs, rhs)`` of the prime-tuple product identity, by enumeration."""
    logs = [math.log(p) for p in pat.primes]
    m1, m2 = pat.m1, pat.m2
    lhs = _tuple_sum(logs, m1, 0) * _tuple_sum(logs, m2, 0)
    rhs = math.fsum(
        math.factorial(k) * math.comb(m1, k) * math.comb(m2, k) * _tuple_sum(logs, m1 + m2 - k, k)
        for k in range(min(m1, m2) + 1)
    )
    return lhs, rhs


def _rel_gap(lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale == 0.0 else abs(lhs - rhs) / scale


LEMMA36_TOL = 1e-8
LEMMA37_TOL = 1e-12
LEMMA36_GRID = dict(
    m=(1, 2, 3),
    f=((1.0,), (0.0, 1.0), (0.0, 0.0, 1.0)),
    alpha=(0.0, 0.3, -0.2),
    D=(2.0, math.e, 10.0),
)
LEMMA37_PRIME_SETS = ((2, 3, 5), (2, 3, 5, 7), (2, 3, 5, 7, 11))


def run_checks() -> list:
    """Every identity check on the standard grids, as result rows."""
    rows = []
    g = LEMMA36_GRID
    for m, f, alpha, D in itertools.product(g["m"], g["f"], g["alpha"], g["D"]):
        r = lemma36_residual(m, Polynomial(f), D, alpha)
        rows.append(
            {
                "check": "nested_integral",
                "case": f"m={m} f={list(f)} alpha={alpha} D={D:.6g}",
                "value": r,
                "tolerance": LEMMA36_TOL,
                "passed": r <= LEMMA36_TOL,
            }
        )
    for primes in LEMMA37_PRIME_SETS:
        for m1, m2 in itertools.product((1, 2, 3), repeat=2):
            lhs, rhs = lemma37_sides(PrimeTuplePattern(primes, m1, m2))
            gap = _rel_gap(lhs, rhs)
            rows.append(
                {
                    "check": "prime_tuple_product",
                    "case": f"primes={list(primes)} m1={m1} m2={m2}",
                    "value": gap,
                    "tolerance": LEMMA37_TOL,
                    "passed": gap <= LEMMA37_TOL,
                }
            )
    return rows
