# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stepping kernels: banded complex solves and the explicit RHS.

The implicit diffusion matrix is constant along a run, so its banded LU
factorization (no pivoting; the matrix is strictly diagonally dominant for
the step sizes we use) is computed once and reapplied every step.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.complex128_t cplx


def tri_factor(cnp.ndarray[cplx, ndim=1] dl,
               cnp.ndarray[cplx, ndim=1] dg,
               cnp.ndarray[cplx, ndim=1] du):
    """LU factorization of a tridiagonal system (Thomas), no pivoting."""
    cdef Py_ssize_t n = dg.shape[0]
    cdef cnp.ndarray[cplx, ndim=1] low = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] diag = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i
    diag[0] = dg[0]
    low[0] = 0
    for i in range(1, n):
        low[i] = dl[i] / diag[i - 1]
        diag[i] = dg[i] - low[i] * du[i - 1]
    return low, diag, du.copy()


def tri_solve_factored(fact, cnp.ndarray[cplx, ndim=1] rhs):
    cdef cnp.ndarray[cplx, ndim=1] low = fact[0]
    cdef cnp.ndarray[cplx, ndim=1] diag = fact[1]
    cdef cnp.ndarray[cplx, ndim=1] up = fact[2]
    cdef Py_ssize_t n = diag.shape[0]
    cdef cnp.ndarray[cplx, ndim=1] x = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i
    x[0] = rhs[0]
    for i in range(1, n):
        x[i] = rhs[i] - low[i] * x[i - 1]
    x[n - 1] = x[n - 1] / diag[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (x[i] - up[i] * x[i + 1]) / diag[i]
    return x


def penta_factor(cnp.ndarray[cplx, ndim=2] bands):
    """LU of a pentadiagonal system in scipy banded layout, no pivoting.

    Layout: ab[2+i-j, j] = a[i, j]; multipliers are stored in place of the
    eliminated subdiagonals.
    """
    cdef Py_ssize_t n = bands.shape[1]
    cdef cnp.ndarray[cplx, ndim=2] lu = bands.copy()
    cdef Py_ssize_t i
    cdef cplx m1, m2
    for i in range(n - 1):
        m1 = lu[3, i] / lu[2, i]
        lu[3, i] = m1
        lu[2, i + 1] = lu[2, i + 1] - m1 * lu[1, i + 1]
        if i + 2 < n:
            lu[1, i + 2] = lu[1, i + 2] - m1 * lu[0, i + 2]
            m2 = lu[4, i] / lu[2, i]
            lu[4, i] = m2
            lu[3, i + 1] = lu[3, i + 1] - m2 * lu[1, i + 1]
            lu[2, i + 2] = lu[2, i + 2] - m2 * lu[0, i + 2]
    return lu


def penta_solve_factored(fact, cnp.ndarray[cplx, ndim=1] rhs):
    cdef cnp.ndarray[cplx, ndim=2] lu = fact
    cdef Py_ssize_t n = lu.shape[1]
    cdef cnp.ndarray[cplx, ndim=1] x = rhs.copy()
    cdef Py_ssize_t i
    for i in range(1, n):
        x[i] = x[i] - lu[3, i - 1] * x[i - 1]
        if i >= 2:
            x[i] = x[i] - lu[4, i - 2] * x[i - 2]
    x[n - 1] = x[n - 1] / lu[2, n - 1]
    if n >= 2:
        x[n - 2] = (x[n - 2] - lu[1, n - 1] * x[n - 1]) / lu[2, n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - lu[1, i + 1] * x[i + 1] - lu[0, i + 2] * x[i + 2]) / lu[2, i]
    return x


def cn_rhs(cnp.ndarray[cplx, ndim=1] w,
           cnp.ndarray[cplx, ndim=1] prev,
           cnp.ndarray[cnp.float64_t, ndim=1] y,
           double h, double p, double delta, double beta,
           double half_ds, double c_new, double c_old,
           int order, bint reaction):
    """Fused IMEX right side: w + half_ds*L_h(w) + c_new*N(w) + c_old*prev.

    Returns (rhs, N(w)).  L_h = (1+i beta) D2 - (y/2) D1 with the 4th-order
    stencils degrading to 2nd order one point from each boundary; N is the
    reaction.  Boundary entries are left as w and patched by the caller.
    """
    cdef Py_ssize_t n = w.shape[0]
    cdef cnp.ndarray[cplx, ndim=1] rhs = w.copy()
    cdef cnp.ndarray[cplx, ndim=1] react = np.zeros(n, dtype=np.complex128)
    cdef Py_ssize_t i
    cdef cplx cb = 1.0 + 1j * beta
    cdef cplx cd = 1.0 + 1j * delta
    cdef cplx lap, drift_v, rv
    cdef double inv2h = 1.0 / (2.0 * h)
    cdef double inv12h = 1.0 / (12.0 * h)
    cdef double invh2 = 1.0 / (h * h)
    cdef double inv12h2 = invh2 / 12.0
    cdef double mod2, pw
    cdef double pm1_half = (p - 1.0) * 0.5
    cdef double invpm1 = 1.0 / (p - 1.0)
    cdef bint pow_one = pm1_half == 1.0
    for i in range(1, n - 1):
        if order == 4 and i >= 2 and i <= n - 3:
            lap = (-w[i - 2] + 16.0 * w[i - 1] - 30.0 * w[i]
                   + 16.0 * w[i + 1] - w[i + 2]) * inv12h2
            drift_v = (w[i - 2] - 8.0 * w[i - 1] + 8.0 * w[i + 1]
                       - w[i + 2]) * inv12h
        else:
            lap = (w[i - 1] - 2.0 * w[i] + w[i + 1]) * invh2
            drift_v = (w[i + 1] - w[i - 1]) * inv2h
        rhs[i] = rhs[i] + half_ds * (cb * lap - 0.5 * y[i] * drift_v)
        if reaction:
            mod2 = w[i].real * w[i].real + w[i].imag * w[i].imag
            pw = mod2 if pow_one else mod2 ** pm1_half
            rv = cd * (pw - invpm1) * w[i]
            react[i] = rv
            rhs[i] = rhs[i] + c_new * rv + c_old * prev[i]
    return rhs, react


def drift_reaction_rhs(cnp.ndarray[cplx, ndim=1] w,
                       cnp.ndarray[cnp.float64_t, ndim=1] y,
                       double h, double p, double delta,
                       int order, bint reaction, bint drift):
    """Fused explicit RHS: optional -(y/2) w' plus the reaction terms."""
    cdef Py_ssize_t n = w.shape[0]
    cdef cnp.ndarray[cplx, ndim=1] out = np.zeros(n, dtype=np.complex128)
    cdef Py_ssize_t i
    cdef cplx dw, cd = 1.0 + 1j * delta
    cdef double inv2h = 1.0 / (2.0 * h)
    cdef double inv12h = 1.0 / (12.0 * h)
    cdef double mod2, pw
    cdef double pm1_half = (p - 1.0) * 0.5
    cdef double invpm1 = 1.0 / (p - 1.0)
    for i in range(1, n - 1):
        if drift:
            if order == 4 and i >= 2 and i <= n - 3:
                dw = (w[i - 2] - 8.0 * w[i - 1] + 8.0 * w[i + 1] - w[i + 2]) * inv12h
            else:
                dw = (w[i + 1] - w[i - 1]) * inv2h
            out[i] = -0.5 * y[i] * dw
        if reaction:
            mod2 = w[i].real * w[i].real + w[i].imag * w[i].imag
            pw = mod2 ** pm1_half
            out[i] = out[i] + cd * (pw - invpm1) * w[i]
    return out
