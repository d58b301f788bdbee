"""Spectral machinery for the drift-diffusion operator with complex diffusivity.

The operator L_beta q = (1+i beta) q'' - y q'/2 is formally self-adjoint
against the complex Gaussian weight

    rho_beta(y) = exp(-y^2 / (4(1+i beta))) / (4 pi (1+i beta))^(1/2).

Its polynomial eigenfunctions f_n (monic, L_beta f_n = -n/2 f_n) follow the
classical monic-Hermite recurrence with complex variance 2(1+i beta).  The
perturbed operator L_{beta,delta} q = L_beta q + (1+i delta) Re q is only
R-linear; it admits a Jordan-type polynomial basis

    L h_n = -(n/2) h_n,            h_n  = i y^n + lower order,
    L ht_n = (1-n/2) ht_n + c_n h_{n-2},   ht_n = (1+i delta) y^n + lower,

with real c_n.  Both families are built here exactly by a triangular solve;
``c_n`` comes out of the solve rather than being assumed.

Everything exact lives on GaussComplex coefficients; the numeric entry
points (sampled projections, the semigroup kernel) use numpy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .exact import (
    GaussComplex,
    Poly,
    imag_part,
    is_zero,
    real_part,
    to_complex,
)


class GridTooNarrow(ValueError):
    """Sampling grid does not cover the weight's support to tolerance."""


@dataclass(frozen=True)
class WeightParams:
    """The complex Gaussian weight parameter."""

    beta: Fraction

    def variance(self) -> GaussComplex:
        # sigma^2 of the weight seen as a (complex) Gaussian: 2(1+i beta).
        return GaussComplex(2, 2 * self.beta)


def rho_weight(y: np.ndarray, beta: float) -> np.ndarray:
    """rho_beta on a float grid."""
    c = 1.0 + 1j * beta
    return np.exp(-np.asarray(y) ** 2 / (4.0 * c)) / np.sqrt(4.0 * np.pi * c)


def rho_weight_abs(y: np.ndarray, beta: float) -> np.ndarray:
    return np.exp(-np.asarray(y) ** 2 / (4.0 * (1.0 + beta**2))) / np.sqrt(
        4.0 * np.pi * np.sqrt(1.0 + beta**2)
    )


def hermite_f(n: int, beta: Fraction) -> Poly:
    """Monic eigenfunction f_n of L_beta, exactly.

    Recurrence for monic orthogonal polynomials of a Gaussian with variance
    2(1+i beta):  f_{n+1} = y f_n - 2(1+i beta) n f_{n-1}.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    var2 = GaussComplex(2, 2 * Fraction(beta))
    fs = [Poly([GaussComplex(1)]), Poly([GaussComplex(0), GaussComplex(1)])]
    y = Poly.monomial(1, GaussComplex(1))
    for k in range(1, n):
        fs.append(y * fs[k] - (k * var2) * fs[k - 1])
    return fs[n]


def gaussian_moment(k: int, beta: Fraction) -> GaussComplex:
    """Exact moment integral of y^k against rho_beta (normalized weight)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k % 2 == 1:
        return GaussComplex(0)
    var2 = GaussComplex(2, 2 * Fraction(beta))
    m = GaussComplex(1)
    # (k-1)!! * var2^(k/2)
    for j in range(1, k, 2):
        m = m * j
    return m * var2 ** (k // 2)


def integrate_poly(p: Poly, beta: Fraction):
    """Exact integral of a polynomial against rho_beta."""
    acc = 0
    for k, c in enumerate(p.coeffs):
        if is_zero(c):
            continue
        acc = acc + c * gaussian_moment(k, beta)
    return acc


def f_norm(n: int, beta: Fraction) -> GaussComplex:
    """Exact value of the self-inner-product of f_n against rho_beta."""
    var2 = GaussComplex(2, 2 * Fraction(beta))
    fact = 1
    for j in range(2, n + 1):
        fact *= j
    return fact * var2**n


def apply_L(p: Poly, beta: Fraction, delta: Optional[Fraction] = None) -> Poly:
    """Exact image under L_beta, or under L_{beta,delta} when delta given."""
    one_ib = GaussComplex(1, Fraction(beta))
    y = Poly.monomial(1, GaussComplex(1))
    out = one_ib * p.deriv().deriv() - Fraction(1, 2) * (y * p.deriv())
    if delta is not None:
        out = out + GaussComplex(1, Fraction(delta)) * p.real_part()
    return out


def _build_h(n: int, beta: Fraction, delta: Fraction) -> Poly:
    """h_n by matching coefficients from the top degree down (unique)."""
    one_ib = GaussComplex(1, beta)
    coeffs: list = [GaussComplex(0)] * (n + 1)
    coeffs[n] = GaussComplex(0, 1)
    k = n - 2
    while k >= 0:
        rhs = -(one_ib * ((k + 2) * (k + 1))) * coeffs[k + 2]
        u, v = rhs.re, rhs.im
        m2 = Fraction(n - k, 2)
        x = u / (m2 + 1)
        yim = (v - delta * x) / m2
        coeffs[k] = GaussComplex(x, yim)
        k -= 2
    return Poly(coeffs)


def _htilde_free_im(n: int, beta: Fraction, delta: Fraction) -> Fraction:
    # The Jordan partner ht_n is unique only up to a real multiple of
    # h_{n-2}.  This pins the conventional representative: ht_2 is the
    # (1+i delta)-multiple of a real polynomial, higher ones have a real
    # y^(n-2) coefficient.
    if n == 2:
        return 2 * delta * (beta * delta - 1)
    return Fraction(0)


def _build_htilde(n: int, beta: Fraction, delta: Fraction, h_lower: Poly):
    """ht_n and the coupling constant c_n, by the same triangular solve.

    At degree n-2 the real part of the coefficient equation is forced and
    the imaginary part fixes c_n; the free imaginary coefficient is set by
    the normalization convention above.
    """
    one_ib = GaussComplex(1, beta)
    coeffs: list = [GaussComplex(0)] * (n + 1)
    coeffs[n] = GaussComplex(1, delta)
    cn = Fraction(0)
    k = n - 2
    while k >= 0:
        rhs = -(one_ib * ((k + 2) * (k + 1))) * coeffs[k + 2]
        if k == n - 2:
            # The unknown c_n multiplies h_{n-2}, whose degree-k coefficient
            # is exactly i, so the real balance forces Re and the imaginary
            # balance reads delta*x = Im(rhs) + c_n.
            u, v = rhs.re, rhs.im
            x = u
            cn = delta * x - v
            coeffs[k] = GaussComplex(x, _htilde_free_im(n, beta, delta))
        else:
            rhs = rhs + cn * h_lower.coeff(k)
            u, v = rhs.re, rhs.im
            m = Fraction(n - k, 2) - 1
            x = u / (m + 1)
            yim = (v - delta * x) / m
            coeffs[k] = GaussComplex(x, yim)
        k -= 2
    return Poly(coeffs), cn


@dataclass
class ModeCoeffs:
    """Decomposition of a field over the Jordan basis.

    q/q_tilde are the real coordinates along h_n/ht_n, Q the complex
    coordinates along the f_n, remainder whatever is left (exact Poly for
    polynomial input, sampled residual for grid input).
    """

    q: list
    q_tilde: list
    Q: list
    remainder: object = None

    def as_floats(self, kappa: float = None):
        qf = [to_complex(v, kappa).real for v in self.q]
        qtf = [to_complex(v, kappa).real for v in self.q_tilde]
        Qf = [to_complex(v, kappa) for v in self.Q]
        return qf, qtf, Qf


class BasisTable:
    """Exact Jordan basis up to degree M, with float views for the solver."""

    def __init__(self, M: int, p: Fraction, delta: Fraction, beta: Fraction):
        if M < 2 or M % 2 != 0:
            raise ValueError("M must be an even integer >= 2")
        self.M = M
        self.p = Fraction(p)
        self.delta = Fraction(delta)
        self.beta = Fraction(beta)
        self.f = [hermite_f(n, beta) for n in range(M + 1)]
        self.fnorm = [f_norm(n, beta) for n in range(M + 1)]
        self.h: list[Poly] = []
        self.h_tilde: list[Poly] = []
        self.c: list[Fraction] = []
        for n in range(M + 1):
            self.h.append(_build_h(n, beta, self.delta))
            h_lower = self.h[n - 2] if n >= 2 else Poly.zero()
            ht, cn = _build_htilde(n, beta, self.delta, h_lower)
            self.h_tilde.append(ht)
            self.c.append(cn)
        self._verify()
        # f-basis expansions of h/ht, used by the triangular conversion.
        self.h_in_f = [self._f_expand_gc(hn) for hn in self.h]
        self.ht_in_f = [self._f_expand_gc(hn) for hn in self.h_tilde]

    # -- exact checks ------------------------------------------------------

    def _verify(self):
        for n in range(self.M + 1):
            img = apply_L(self.h[n], self.beta, self.delta)
            if not (img + Fraction(n, 2) * self.h[n]).is_zero():
                raise ArithmeticError(f"h_{n} eigen-relation failed")
            img = apply_L(self.h_tilde[n], self.beta, self.delta)
            want = (1 - Fraction(n, 2)) * self.h_tilde[n]
            if n >= 2:
                want = want + self.c[n] * self.h[n - 2]
            if not (img - want).is_zero():
                raise ArithmeticError(f"ht_{n} Jordan relation failed")

    # -- exact projections ---------------------------------------------------

    def _f_expand_gc(self, p: Poly) -> list:
        """Coefficients of p over the monic f-basis (exact, any scalar kind)."""
        out = [0] * (p.degree + 1 if not p.is_zero() else 0)
        rem = p
        while not rem.is_zero():
            n = rem.degree
            c = rem.coeff(n)
            out[n] = c
            fn = self.f[n] if n <= self.M else hermite_f(n, self.beta)
            rem = rem - c * fn
            if not rem.is_zero() and rem.degree >= n:
                raise ArithmeticError("f-expansion failed to reduce degree")
        return out

    def f_expand(self, p: Poly) -> list:
        return self._f_expand_gc(p)

    def decompose(self, p: Poly) -> ModeCoeffs:
        """Exact P = sum(q_n h_n + qt_n ht_n) + remainder over the table.

        The remainder is the exact part of the f-expansion beyond degree M
        (zero whenever deg P <= M).
        """
        Q = self.f_expand(p)
        rem = Poly.zero(p.var)
        for n in range(self.M + 1, len(Q)):
            if not is_zero(Q[n]):
                rem = rem + Q[n] * hermite_f(n, self.beta)
        Q = list(Q) + [0] * max(0, self.M + 1 - len(Q))
        adj = list(Q[: self.M + 1])
        q = [0] * (self.M + 1)
        qt = [0] * (self.M + 1)
        for n in range(self.M, -1, -1):
            a = adj[n]
            qt_n = real_part(a)
            q_n = imag_part(a) - self.delta * qt_n
            q[n] = q_n
            qt[n] = qt_n
            for j in range(n):
                a_h = self.h_in_f[n][j] if j < len(self.h_in_f[n]) else 0
                a_t = self.ht_in_f[n][j] if j < len(self.ht_in_f[n]) else 0
                adj[j] = adj[j] - q_n * a_h - qt_n * a_t
        return ModeCoeffs(q=q, q_tilde=qt, Q=list(Q[: self.M + 1]), remainder=rem)

    def reconstruct(self, modes: ModeCoeffs) -> Poly:
        acc = Poly.zero()
        for n in range(self.M + 1):
            acc = acc + modes.q[n] * self.h[n] + modes.q_tilde[n] * self.h_tilde[n]
        if isinstance(modes.remainder, Poly):
            acc = acc + modes.remainder
        return acc

    # -- float views ---------------------------------------------------------

    def float_views(self, kappa: float = None) -> "BasisFloats":
        return BasisFloats(self, kappa)


def build_basis(M: int, p, delta, beta) -> BasisTable:
    """Construct the Jordan basis table for the given parameters."""
    return BasisTable(M, Fraction(p), Fraction(delta), Fraction(beta))


def project_poly(p: Poly, table: BasisTable) -> ModeCoeffs:
    """Exact projection of a polynomial onto the Jordan basis."""
    return table.decompose(p)


class BasisFloats:
    """Float-precision basis data for grid projections."""

    def __init__(self, table: BasisTable, kappa: float = None):
        self.M = table.M
        self.delta = float(table.delta)
        self.beta = float(table.beta)
        self.f_coeffs = [np.array(f.to_complex_coeffs(kappa)) for f in table.f]
        self.h_coeffs = [np.array(h.to_complex_coeffs(kappa)) for h in table.h]
        self.ht_coeffs = [
            np.array(h.to_complex_coeffs(kappa)) for h in table.h_tilde
        ]
        self.fnorm = np.array([complex(v) for v in table.fnorm])
        self.h_in_f = [
            np.array([to_complex(c, kappa) for c in row]) for row in table.h_in_f
        ]
        self.ht_in_f = [
            np.array([to_complex(c, kappa) for c in row]) for row in table.ht_in_f
        ]

    def eval_f(self, n: int, y: np.ndarray) -> np.ndarray:
        return np.polyval(self.f_coeffs[n][::-1], y)

    def eval_h(self, n: int, y: np.ndarray) -> np.ndarray:
        return np.polyval(self.h_coeffs[n][::-1], y)

    def eval_ht(self, n: int, y: np.ndarray) -> np.ndarray:
        return np.polyval(self.ht_coeffs[n][::-1], y)

    def convert_Q(self, Q: np.ndarray):
        """Triangular (Q_n) -> (q_n, qt_n) back-substitution."""
        M = self.M
        adj = np.array(Q, dtype=complex)
        q = np.zeros(M + 1)
        qt = np.zeros(M + 1)
        for n in range(M, -1, -1):
            a = adj[n]
            qt[n] = a.real
            q[n] = a.imag - self.delta * a.real
            for j in range(n):
                hf = self.h_in_f[n][j] if j < len(self.h_in_f[n]) else 0.0
                tf = self.ht_in_f[n][j] if j < len(self.ht_in_f[n]) else 0.0
                adj[j] -= q[n] * hf + qt[n] * tf
        return q, qt


def project_sampled(
    samples: np.ndarray,
    y: np.ndarray,
    table_or_floats,
    quadrature: str = "trapezoid",
    gh_nodes: int = 200,
    tail_tol: float = 1e-14,
) -> ModeCoeffs:
    """Numeric projection of grid samples onto the Jordan basis.

    ``quadrature`` is "trapezoid" (grid-native; spectrally accurate for the
    exponentially decaying integrand) or "gauss-hermite" (the samples are
    spline-interpolated onto Hermite nodes of the real weight, with the
    residual complex phase folded into the integrand).
    """
    bf = (
        table_or_floats
        if isinstance(table_or_floats, BasisFloats)
        else table_or_floats.float_views()
    )
    y = np.asarray(y, dtype=float)
    q_arr = np.asarray(samples, dtype=complex)
    beta = bf.beta
    tail = rho_weight_abs(np.array([abs(y[0]), abs(y[-1])]), beta).max()
    if tail > tail_tol:
        raise GridTooNarrow(
            f"|rho| = {tail:.2e} at the grid edge exceeds {tail_tol:.0e}"
        )
    M = bf.M
    Q = np.zeros(M + 1, dtype=complex)
    if quadrature == "trapezoid":
        rho = rho_weight(y, beta)
        wq = q_arr * rho
        for n in range(M + 1):
            Q[n] = np.trapezoid(wq * bf.eval_f(n, y), y) / bf.fnorm[n]
    elif quadrature == "gauss-hermite":
        from scipy.interpolate import CubicSpline
        from scipy.special import roots_hermite

        x, w = roots_hermite(gh_nodes)
        scale = 2.0 * np.sqrt(1.0 + beta**2)
        yn = scale * x
        inside = (yn >= y[0]) & (yn <= y[-1])
        spl_re = CubicSpline(y, q_arr.real)
        spl_im = CubicSpline(y, q_arr.imag)
        qv = np.zeros_like(yn, dtype=complex)
        qv[inside] = spl_re(yn[inside]) + 1j * spl_im(yn[inside])
        # rho with the Gaussian removed: a pure phase over the GH weight.
        phase = np.exp(1j * beta * yn**2 / (4.0 * (1.0 + beta**2)))
        pref = scale / np.sqrt(4.0 * np.pi * (1.0 + 1j * beta))
        for n in range(M + 1):
            integ = qv * bf.eval_f(n, yn) * phase
            Q[n] = pref * np.sum(w * integ) / bf.fnorm[n]
    else:
        raise ValueError(f"unknown quadrature rule {quadrature!r}")
    q, qt = bf.convert_Q(Q)
    recon = np.zeros_like(q_arr)
    for n in range(M + 1):
        recon += q[n] * bf.eval_h(n, y) + qt[n] * bf.eval_ht(n, y)
    return ModeCoeffs(
        q=list(q), q_tilde=list(qt), Q=list(Q), remainder=q_arr - recon
    )


def semigroup_kernel(s: float, y, x, beta: float):
    """Heat kernel of L_beta: value of e^{s L}(y, x), s > 0."""
    if s <= 0:
        raise ValueError("s must be > 0")
    c = 1.0 + 1j * beta
    decay = 1.0 - np.exp(-s)
    ye = np.asarray(y) * np.exp(-s / 2.0)
    return np.exp(-np.abs(np.asarray(x) - ye) ** 2 / (4.0 * c * decay)) / np.sqrt(
        4.0 * np.pi * c * decay
    )


def semigroup_apply(
    s: float, y: np.ndarray, x: np.ndarray, values: np.ndarray, beta: float
) -> np.ndarray:
    """Quadrature of the kernel against sampled data: (e^{s L} v)(y)."""
    out = np.empty(len(y), dtype=complex)
    for i, yi in enumerate(y):
        out[i] = np.trapezoid(semigroup_kernel(s, yi, x, beta) * values, x)
    return out
