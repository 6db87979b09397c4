# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled moment-grid kernel; mirrors ``critline._kernel_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, pow
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef enum:
    MAXK = 64


cdef double _fact[MAXK + 1]
cdef double _binom[MAXK + 1][MAXK + 1]


cdef void _init_tables() noexcept:
    cdef int i, j
    _fact[0] = 1.0
    for i in range(1, MAXK + 1):
        _fact[i] = _fact[i - 1] * i
    for i in range(MAXK + 1):
        for j in range(MAXK + 1):
            _binom[i][j] = 0.0
        _binom[i][0] = 1.0
        for j in range(1, i + 1):
            _binom[i][j] = _binom[i - 1][j - 1] + (_binom[i - 1][j] if j < i else 0.0)

_init_tables()


cdef double _moment(int k, double a, double T, double switch) noexcept nogil:
    cdef double x, term, tail, head, lead, total, power
    cdef int j, n, nterms
    if T == 0.0:
        return 0.0
    x = a * T
    if fabs(x) < switch:
        total = 0.0
        power = 1.0
        for n in range(30):
            total += power * (pow(T, k + 1) / (k + n + 1))
            power *= (-x) / (n + 1)
        return total
    lead = _fact[k] / pow(a, k + 1)
    if fabs(x) < k + 2:
        nterms = 40 + <int>(4 * fabs(x))
        term = pow(x, k + 1) / _fact[k + 1]
        tail = term
        for j in range(k + 2, k + 1 + nterms):
            term *= x / j
            tail += term
        return lead * exp(-x) * tail
    head = 0.0
    term = 1.0
    for j in range(k + 1):
        head += term
        term *= x / (j + 1)
    return lead * (1.0 - exp(-x) * head)


cdef double _poly(const double* c, int d, double x) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(d - 1, -1, -1):
        acc = acc * x + c[i]
    return acc


cdef double _dpoly(const double* c, int d, double x) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(d - 1, 0, -1):
        acc = acc * x + i * c[i]
    return acc


cdef void _kernel_jets(const double* P, int I, int D, double x0, double slope,
                       int order, double u, double switch,
                       double* J, double* refl) noexcept nogil:
    # J is (I+1) x (order+1), row-major; refl is scratch of length D
    cdef int m, own, l, k, n, j, i
    cdef double w = 1.0 - u
    cdef double pv, coef, s, sg, wp
    cdef const double* p
    for i in range((I + 1) * (order + 1)):
        J[i] = 0.0
    for m in range(I + 1):
        if m == 0 or m >= 2:
            own = 1 if m == 0 else m
            p = P + (own - 1) * D
            pv = _poly(p, D, w)
            J[m * (order + 1)] += x0 * pv + _dpoly(p, D, w)
            if order >= 1:
                J[m * (order + 1) + 1] += slope * pv
        if m >= 1 and m + 1 <= I:
            J[m * (order + 1)] -= (m + 1) * _poly(P + m * D, D, w)
        if w <= 0.0:
            continue
        for l in range(m + 2, I + 1):
            k = l - m - 2
            coef = _binom[l][m] * (1.0 if (l - m) % 2 == 0 else -1.0) / _fact[k]
            p = P + (l - 1) * D
            for j in range(D):
                refl[j] = 0.0
            for i in range(D):
                if p[i] != 0.0:
                    wp = 1.0
                    for j in range(i, -1, -1):
                        # j runs downward so w^(i-j) accumulates
                        refl[j] += p[i] * _binom[i][j] * wp * (1.0 if j % 2 == 0 else -1.0)
                        wp *= w
            sg = 1.0
            for n in range(order + 1):
                s = 0.0
                for j in range(D):
                    if refl[j] != 0.0:
                        s += refl[j] * _moment(k + n + j, x0, w, switch)
                J[m * (order + 1) + n] += coef * sg / _fact[n] * s
                sg *= -slope


def moment_grid(pieces, double x0, double sx, int ox, double y0, double sy, int oy,
                nodes, weights, double switch):
    """Taylor grid of the u-integral of F; see ``_kernel_py.moment_grid``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] P = np.ascontiguousarray(pieces, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] U = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] W = np.ascontiguousarray(weights, dtype=np.float64)
    cdef int I = P.shape[0]
    cdef int D = P.shape[1]
    if D + ox + oy + I + 2 > MAXK:
        raise ValueError("polynomial degree plus jet order exceeds kernel tables")
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] G = np.zeros((ox + 1, oy + 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] C = np.zeros((I + 1, I + 1))
    cdef int m1, m2, kk, q, i, j, nn
    cdef double s, u, wt, um
    for m1 in range(I + 1):
        for m2 in range(I + 1):
            s = 0.0
            for kk in range(min(m1, m2) + 1):
                s += _fact[kk] * _binom[m1][kk] * _binom[m2][kk]
            C[m1, m2] = s / _fact[m1 + m2]
    cdef double* JX = <double*> malloc((I + 1) * (ox + 1) * sizeof(double))
    cdef double* JY = <double*> malloc((I + 1) * (oy + 1) * sizeof(double))
    cdef double* H = <double*> malloc((I + 1) * (ox + 1) * sizeof(double))
    cdef double* refl = <double*> malloc((D + 1) * sizeof(double))
    cdef double* upow = <double*> malloc((2 * I + 1) * sizeof(double))
    cdef double* Pp = &P[0, 0]
    cdef double* Cp = &C[0, 0]
    cdef double* Gp = &G[0, 0]
    cdef int same = (x0 == y0 and sx == sy and ox == oy)
    cdef int nnodes = U.shape[0]
    try:
        with nogil:
            for nn in range(nnodes):
                u = U[nn]
                wt = W[nn]
                _kernel_jets(Pp, I, D, x0, sx, ox, u, switch, JX, refl)
                if same:
                    for i in range((I + 1) * (oy + 1)):
                        JY[i] = JX[i]
                else:
                    _kernel_jets(Pp, I, D, y0, sy, oy, u, switch, JY, refl)
                upow[0] = 1.0
                for q in range(1, 2 * I + 1):
                    upow[q] = upow[q - 1] * u
                # H[m2, i] = sum_m1 C[m1, m2] u^(m1+m2) JX[m1, i]
                for m2 in range(I + 1):
                    for i in range(ox + 1):
                        s = 0.0
                        for m1 in range(I + 1):
                            s += Cp[m1 * (I + 1) + m2] * upow[m1 + m2] * JX[m1 * (ox + 1) + i]
                        H[m2 * (ox + 1) + i] = s
                for i in range(ox + 1):
                    for j in range(oy + 1):
                        s = 0.0
                        for m2 in range(I + 1):
                            s += H[m2 * (ox + 1) + i] * JY[m2 * (oy + 1) + j]
                        Gp[i * (oy + 1) + j] += wt * s
    finally:
        free(JX)
        free(JY)
        free(H)
        free(refl)
        free(upow)
    return G
