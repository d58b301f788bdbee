"""Spectral machinery: eigenfunctions, Jordan basis, projections, kernel."""

from fractions import Fraction as F

import numpy as np
import pytest

from cglblow.exact import GaussComplex, Poly, is_zero
from cglblow.spectral import (
    GridTooNarrow,
    apply_L,
    build_basis,
    f_norm,
    gaussian_moment,
    hermite_f,
    integrate_poly,
    project_poly,
    project_sampled,
    rho_weight,
    semigroup_apply,
    semigroup_kernel,
)


def gc(a, b=0):
    return GaussComplex(F(a), F(b))


def hermite_oracle(n, beta):
    """Physicists' Hermite H_n rescaled to monic in y/(2 sqrt(1+i beta)).

    H_n has parity n, so the surviving powers satisfy n - j even and the
    rescaling factors (4(1+i beta))^((n-j)/2) / 2^n stay Gaussian rational.
    """
    hs = [[F(1)], [F(0), F(2)]]
    for k in range(1, n):
        nxt = [F(0)] * (k + 2)
        for j, c in enumerate(hs[k]):
            nxt[j + 1] += 2 * c
        for j, c in enumerate(hs[k - 1]):
            nxt[j] -= 2 * k * c
        hs.append(nxt)
    scale = gc(4, 4 * F(beta))  # 4(1+i beta)
    out = [gc(0)] * (n + 1)
    for j, c in enumerate(hs[n]):
        if c == 0:
            continue
        assert (n - j) % 2 == 0
        out[j] = F(c) * scale ** ((n - j) // 2) * F(1, 2**n)
    return Poly(out)


class TestEigenfunctions:
    def test_f0_f2_f4(self):
        assert hermite_f(0, F(1, 2)) == Poly([gc(1)])
        assert hermite_f(2, F(1, 2)) == Poly([gc(-2, -1), gc(0), gc(1)])
        assert hermite_f(4, F(0)) == Poly([gc(12), gc(0), gc(-12), gc(0), gc(1)])

    @pytest.mark.parametrize("n", range(7))
    @pytest.mark.parametrize("beta", [F(0), F(1, 2), F(-3, 7)])
    def test_matches_hermite_oracle(self, n, beta):
        assert hermite_f(n, beta) == hermite_oracle(n, beta)

    @pytest.mark.parametrize("n", range(9))
    def test_eigenrelation_exact(self, n):
        beta = F(1, 2)
        fn = hermite_f(n, beta)
        assert (apply_L(fn, beta) + F(n, 2) * fn).is_zero()


class TestMoments:
    def test_normalization(self):
        assert gaussian_moment(0, F(1, 2)) == gc(1)

    def test_second_moment(self):
        assert gaussian_moment(2, F(1, 2)) == gc(2, 1)

    def test_fourth_moment_real(self):
        assert gaussian_moment(4, F(0)) == gc(12)

    def test_odd_vanish(self):
        assert gaussian_moment(3, F(2, 3)) == gc(0)

    @pytest.mark.parametrize("k", [0, 2, 4, 6])
    def test_quadrature_oracle(self, k):
        beta = 0.5
        y = np.linspace(-60, 60, 200001)
        val = np.trapezoid(y**k * rho_weight(y, beta), y)
        assert abs(val - complex(gaussian_moment(k, F(1, 2)))) < 1e-10

    def test_f_norm(self):
        beta = F(1, 3)
        for n in range(6):
            fn = hermite_f(n, beta)
            assert integrate_poly(fn * fn, beta) == f_norm(n, beta)

    def test_orthogonality(self):
        beta = F(2, 5)
        fs = [hermite_f(n, beta) for n in range(8)]
        for n in range(8):
            for m in range(n):
                assert is_zero(integrate_poly(fs[n] * fs[m], beta))


class TestJordanBasis:
    def test_apply_L_variants(self):
        beta, delta = F(1, 2), F(1)
        f2 = hermite_f(2, beta)
        assert apply_L(f2, beta) == -1 * f2
        basis = build_basis(6, F(3), delta, beta)
        assert apply_L(basis.h[6], beta, delta) == F(-3) * basis.h[6]
        one = Poly([gc(1)])
        assert apply_L(one, beta, delta) == Poly([gc(1, 1)])

    def test_printed_h2(self):
        basis = build_basis(6, F(3), F(1), F(1, 2))
        assert basis.h[2] == Poly([gc(F(1, 2), F(-5, 2)), gc(0), gc(0, 1)])

    def test_jordan_relations_all_n(self):
        basis = build_basis(8, F(2), F(1), F(1, 3))
        for n in range(9):
            img = apply_L(basis.h[n], F(1, 3), F(1))
            assert (img + F(n, 2) * basis.h[n]).is_zero()
            img = apply_L(basis.h_tilde[n], F(1, 3), F(1))
            want = (1 - F(n, 2)) * basis.h_tilde[n]
            if n >= 2:
                want = want + basis.c[n] * basis.h[n - 2]
            assert (img - want).is_zero()


class TestProjectPoly:
    def setup_method(self):
        self.basis = build_basis(6, F(3), F(1), F(1, 2))

    def test_eigenfunction_projects_to_single_Q(self):
        m = project_poly(self.basis.f[2], self.basis)
        assert m.Q[2] == gc(1)
        assert all(is_zero(m.Q[n]) for n in range(7) if n != 2)

    def test_iy2_example(self):
        m = project_poly(Poly.monomial(2, gc(0, 1)), self.basis)
        assert m.q[2] == gc(1) and m.q[0] == gc(3) and m.q_tilde[0] == gc(F(-1, 2))

    def test_basis_element(self):
        m = project_poly(self.basis.h_tilde[5], self.basis)
        assert m.q_tilde[5] == gc(1)
        assert sum(1 for v in m.q + m.q_tilde if not is_zero(v)) == 1

    def test_reconstruction_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(12):
            coeffs = [gc(int(a), int(b)) for a, b in
                      rng.integers(-9, 9, size=(7, 2))]
            p = Poly(coeffs)
            m = project_poly(p, self.basis)
            assert self.basis.reconstruct(m) == p

    def test_excess_degree_goes_to_remainder(self):
        p = Poly.monomial(8, gc(1))
        m = project_poly(p, self.basis)
        assert not m.remainder.is_zero()
        assert self.basis.reconstruct(m) == p


class TestProjectSampled:
    def setup_method(self):
        self.basis = build_basis(6, F(3), F(1), F(1, 2))
        self.y = np.linspace(-40, 40, 8001)
        self.bf = self.basis.float_views()

    def test_consistency_with_exact(self):
        f3 = self.bf.eval_f(3, self.y)
        m = project_sampled(f3, self.y, self.bf)
        assert abs(m.Q[3] - 1.0) < 1e-8
        assert max(abs(m.Q[n]) for n in range(7) if n != 3) < 1e-8

    def test_identity_decomposition(self):
        g = np.exp(-self.y**2).astype(complex)
        m = project_sampled(g, self.y, self.bf)
        recon = np.zeros_like(g)
        for n in range(7):
            recon += m.q[n] * self.bf.eval_h(n, self.y)
            recon += m.q_tilde[n] * self.bf.eval_ht(n, self.y)
        resid = np.abs(recon + m.remainder - g)
        # roundoff scales with the high-degree basis values at the far edge
        assert np.max(resid[np.abs(self.y) <= 10]) < 1e-10
        assert np.max(resid) < 1e-8

    def test_gauss_hermite_rule_agrees(self):
        g = np.exp(-(self.y**2) / 8.0) * (1.0 + 0.3j * self.y**2)
        m1 = project_sampled(g, self.y, self.bf, quadrature="trapezoid")
        m2 = project_sampled(g, self.y, self.bf, quadrature="gauss-hermite")
        assert np.max(np.abs(np.array(m1.Q) - np.array(m2.Q))) < 1e-7

    def test_narrow_grid_rejected(self):
        y = np.linspace(-3, 3, 301)
        with pytest.raises(GridTooNarrow):
            project_sampled(np.ones_like(y, dtype=complex), y, self.bf)

    def test_profile_unit_mode(self):
        # the profile core times the unit direction: qt0 -> kappa as s grows
        from cglblow.constants import derive_params
        from cglblow.profilefield import FloatParams, phi0

        pm = derive_params(3, 1)
        fp = FloatParams.from_exact(pm, mu=0.0)
        s = 1e4
        samples = phi0(self.y / s**0.25, fp).astype(complex)
        m = project_sampled(samples, self.y, self.bf)
        assert abs(m.q_tilde[0] - fp.kappa) < 0.05 * fp.kappa

    def test_weighted_remainder_bound(self):
        # analog of the weighted projector bound: fitted constant is stable
        rng = np.random.default_rng(5)
        consts = []
        for _ in range(10):
            coeffs = rng.uniform(-1, 1, 8) + 1j * rng.uniform(-1, 1, 8)
            vals = np.polyval(coeffs, self.y)
            m = project_sampled(vals, self.y, self.bf)
            wt = 1.0 + np.abs(self.y) ** 7
            consts.append(
                np.max(np.abs(m.remainder) / wt) / np.max(np.abs(vals) / wt)
            )
        consts = np.array(consts)
        # C depends on the truncation degree (the excess eigenfunction has
        # large low-order coefficients); what matters is stability
        assert consts.max() < 2000.0
        assert consts.max() <= 4.0 * np.median(consts)


class TestSemigroupKernel:
    def test_point_value(self):
        v = semigroup_kernel(np.log(2.0), 0.0, 0.0, 0.0)
        assert abs(v - (2 * np.pi) ** -0.5) < 1e-14

    def test_long_time_limit(self):
        x = np.linspace(-3, 3, 7)
        v = semigroup_kernel(60.0, 1.7, x, 0.5)
        assert np.max(np.abs(v - rho_weight(x, 0.5))) < 1e-12

    def test_normalization(self):
        x = np.linspace(-60, 60, 40001)
        for s, yv in [(0.3, 0.0), (1.0, 2.5), (2.0, -4.0)]:
            val = np.trapezoid(semigroup_kernel(s, yv, x, 0.5), x)
            assert abs(val - 1.0) < 1e-10

    def test_eigen_decay_by_quadrature(self):
        beta = F(1, 2)
        x = np.linspace(-60, 60, 24001)
        f2 = np.polyval(hermite_f(2, beta).to_complex_coeffs()[::-1], x)
        y = np.linspace(-2, 2, 9)
        out = semigroup_apply(0.7, y, x, f2, 0.5)
        want = np.exp(-0.7) * np.polyval(
            hermite_f(2, beta).to_complex_coeffs()[::-1], y
        )
        assert np.max(np.abs(out - want)) < 1e-8


class TestPrintedTableFidelity:
    @pytest.mark.parametrize("p,d", [
        (F(3), F(1)), (F(2), F(1)), (F(3, 2), F(2)), (F(3), F(2)),
        (F(7), F(3)), (F(4), F(3, 2)),
    ])
    def test_constructed_equals_printed_with_documented_corrections(self, p, d):
        from cglblow.constants import derive_params
        from cglblow.verify import (
            printed_basis_corrections,
            printed_basis_table,
        )

        pm = derive_params(p, d)
        basis = build_basis(6, pm.p, pm.delta, pm.beta)
        hp, htp = printed_basis_table(pm.p, pm.delta, pm.beta)
        corr = printed_basis_corrections(pm.beta, pm.delta)
        for n, printed in hp.items():
            want = printed + (Poly([corr[("h", 6, 0)]]) if n == 6 else Poly([]))
            assert basis.h[n] == want
        for n, printed in htp.items():
            want = printed + (Poly([corr[("ht", 6, 0)]]) if n == 6 else Poly([]))
            assert basis.h_tilde[n] == want
        if d == 1:
            # the misprints vanish at delta = 1: literal fidelity there
            assert basis.h[6] == hp[6] and basis.h_tilde[6] == htp[6]
