"""Pure-numpy fallback for the stepping kernels.

Mirrors the compiled module's API; the banded solves go through scipy's
LAPACK wrappers (refactored each call), the RHS through array slicing.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded


def tri_factor(dl, dg, du):
    ab = np.zeros((3, len(dg)), dtype=np.complex128)
    ab[0, 1:] = du[:-1]
    ab[1, :] = dg
    ab[2, :-1] = dl[1:]
    return ab


def tri_solve_factored(fact, rhs):
    return solve_banded((1, 1), fact, rhs)


def penta_factor(bands):
    return np.asarray(bands, dtype=np.complex128)


def penta_solve_factored(fact, rhs):
    return solve_banded((2, 2), fact, rhs)


def cn_rhs(w, prev, y, h, p, delta, beta, half_ds, c_new, c_old, order,
           reaction):
    n = len(w)
    cb = 1.0 + 1j * beta
    lin = np.zeros(n, dtype=np.complex128)
    h2 = h * h
    if order == 4 and n >= 5:
        lin[2:-2] = cb * (
            -w[:-4] + 16 * w[1:-3] - 30 * w[2:-2] + 16 * w[3:-1] - w[4:]
        ) / (12 * h2) - 0.5 * y[2:-2] * (
            w[:-4] - 8 * w[1:-3] + 8 * w[3:-1] - w[4:]
        ) / (12 * h)
        for i in (1, n - 2):
            lin[i] = cb * (w[i - 1] - 2 * w[i] + w[i + 1]) / h2 - 0.5 * y[i] * (
                w[i + 1] - w[i - 1]
            ) / (2 * h)
    else:
        lin[1:-1] = cb * (w[:-2] - 2 * w[1:-1] + w[2:]) / h2 - 0.5 * y[1:-1] * (
            w[2:] - w[:-2]
        ) / (2 * h)
    react = np.zeros(n, dtype=np.complex128)
    if reaction:
        cd = 1.0 + 1j * delta
        mod2 = w.real**2 + w.imag**2
        pm1h = (p - 1.0) / 2.0
        pw = mod2 if pm1h == 1.0 else mod2**pm1h
        inner = cd * (pw - 1.0 / (p - 1.0)) * w
        react[1:-1] = inner[1:-1]
    rhs = w + half_ds * lin + c_new * react + c_old * prev
    rhs[0] = w[0]
    rhs[-1] = w[-1]
    return rhs, react


def drift_reaction_rhs(w, y, h, p, delta, order, reaction, drift=True):
    n = len(w)
    out = np.zeros(n, dtype=np.complex128)
    if not drift:
        pass
    elif order == 4 and n >= 5:
        out[2:-2] = -0.5 * y[2:-2] * (
            (w[:-4] - 8.0 * w[1:-3] + 8.0 * w[3:-1] - w[4:]) / (12.0 * h)
        )
        out[1] = -0.5 * y[1] * (w[2] - w[0]) / (2.0 * h)
        out[-2] = -0.5 * y[-2] * (w[-1] - w[-3]) / (2.0 * h)
    else:
        out[1:-1] = -0.5 * y[1:-1] * (w[2:] - w[:-2]) / (2.0 * h)
    if reaction:
        cd = 1.0 + 1j * delta
        mod2 = w.real**2 + w.imag**2
        inner = cd * (mod2 ** ((p - 1.0) / 2.0) - 1.0 / (p - 1.0)) * w
        out[1:-1] += inner[1:-1]
    return out
