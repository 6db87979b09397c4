"""Pure-Python implementation of the moment-grid kernel.

Used when the compiled ``_kernel_c`` extension is unavailable, and as the
reference the compiled kernel is benchmarked and tested against.
"""

from __future__ import annotations

import math

import numpy as np

from .polynomial import exp_moment


def pair_weights(I: int) -> np.ndarray:
    """``sum_k k! C(m1,k) C(m2,k) / (m1+m2)!`` for ``0 <= m1, m2 <= I``."""
    c = np.zeros((I + 1, I + 1))
    for m1 in range(I + 1):
        for m2 in range(I + 1):
            s = sum(
                math.factorial(k) * math.comb(m1, k) * math.comb(m2, k)
                for k in range(min(m1, m2) + 1)
            )
            c[m1, m2] = s / math.factorial(m1 + m2)
    return c


def _poly(c, x):
    acc = 0.0
    for v in c[::-1]:
        acc = acc * x + v
    return acc


def _dpoly(c, x):
    acc = 0.0
    for k in range(len(c) - 1, 0, -1):
        acc = acc * x + k * c[k]
    return acc


def _reflect(c, w):
    # coefficients of mu -> p(w - mu)
    n = len(c)
    out = [0.0] * n
    for i in range(n):
        if c[i] != 0.0:
            for j in range(i + 1):
                out[j] += c[i] * math.comb(i, j) * w ** (i - j) * (-1.0) ** j
    return out


def kernel_jets(pieces, x0: float, slope: float, order: int, u: float, switch: float) -> np.ndarray:
    """Univariate Taylor coefficients of ``U_m(x0 + slope*eps, u)`` in ``eps``.

    Returns an ``(I+1, order+1)`` array; row ``m`` holds ``U_m``.
    """
    I = len(pieces)
    w = 1.0 - u
    J = np.zeros((I + 1, order + 1))
    for m in range(I + 1):
        own = 1 if m == 0 else m
        if m == 0 or m >= 2:
            p = pieces[own - 1]
            pv = _poly(p, w)
            J[m, 0] += x0 * pv + _dpoly(p, w)
            if order >= 1:
                J[m, 1] += slope * pv
        if m >= 1 and m + 1 <= I:
            J[m, 0] -= (m + 1) * _poly(pieces[m], w)
        if w <= 0.0:
            continue
        for l in range(m + 2, I + 1):
            k = l - m - 2
            coef = math.comb(l, m) * (-1.0) ** (l - m) / math.factorial(k)
            r = _reflect(pieces[l - 1], w)
            for n in range(order + 1):
                s = 0.0
                for j, cj in enumerate(r):
                    if cj != 0.0:
                        s += cj * exp_moment(k + n + j, x0, w, switch)
                J[m, n] += coef * (-slope) ** n / math.factorial(n) * s
    return J


def moment_grid(pieces, x0, sx, ox, y0, sy, oy, nodes, weights, switch):
    """Taylor grid of ``∫_0^1 F(x0 + sx*eps, y0 + sy*delta; u) du``.

    ``pieces`` is an ``(I, D)`` array of mollifier coefficients (row ``l-1``
    is ``P_l``).  The result has shape ``(ox+1, oy+1)``.
    """
    pieces = [list(map(float, row)) for row in np.asarray(pieces, dtype=float)]
    I = len(pieces)
    C = pair_weights(I)
    msum = np.add.outer(np.arange(I + 1), np.arange(I + 1))
    grid = np.zeros((ox + 1, oy + 1))
    for u, wt in zip(nodes, weights):
        JX = kernel_jets(pieces, x0, sx, ox, u, switch)
        JY = JX if (y0 == x0 and sy == sx and oy == ox) else kernel_jets(pieces, y0, sy, oy, u, switch)
        M = C * u**msum
        grid += wt * (JX.T @ M @ JY)
    return grid
