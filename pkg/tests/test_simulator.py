"""Time stepping, modulation, diagnostics, shooting, final profile."""

import numpy as np
import pytest

from cglblow.constants import derive_params, mu_critical
from cglblow.profilefield import EvalContext, InitialDataSpec, rest_Rstar
from cglblow.simulate import (
    SimConfig,
    SimState,
    Simulator,
    final_profile,
    linear_eigenmode_error,
)
from cglblow.stepping import Stepper, get_backend
from cglblow.spectral import hermite_f


@pytest.fixture(scope="module")
def pm():
    pm = derive_params(3, 1)
    return pm.with_mu(mu_critical(pm).mu)


def small_config(pm, **kw):
    defaults = dict(
        params=pm, L=88.0, N=2048, ds=1e-3, s0=100.0, s_end=100.5,
        K=12.0, A=20.0,
    )
    defaults.update(kw)
    return SimConfig(**defaults)


class TestStepper:
    def test_scheme_order(self):
        # global error ratios on the decaying eigenmode reference
        errs = {}
        for scheme in ("imex1", "imex2"):
            errs[scheme] = [
                linear_eigenmode_error(
                    2, 0.5, L=12.0, dy=0.02, ds=ds, s_end=0.5,
                    scheme=scheme, space_order=4,
                )[0]
                for ds in (4e-3, 2e-3)
            ]
        r1 = errs["imex1"][0] / errs["imex1"][1]
        r2 = errs["imex2"][0] / errs["imex2"][1]
        assert 1.6 < r1 < 2.6
        assert 3.2 < r2 < 4.8

    def test_max_principle_analog(self):
        rng = np.random.default_rng(11)
        y = np.linspace(-88, 88, 2048)
        stp = Stepper(y, 5e-4, 0.5, 3.0, 1.0, scheme="imex1", reaction=False)
        for _ in range(20):
            w = rng.uniform(-1, 1, len(y)) + 1j * rng.uniform(-1, 1, len(y))
            w[0] = w[-1] = 0.0
            out = stp.propagate_linear(w)
            assert np.max(np.abs(out)) <= np.max(np.abs(w)) * (1.0 + 1e-12)

    def test_backends_agree(self):
        y = np.linspace(-30, 30, 801)
        w0 = np.exp(-(y**2) / 4.0).astype(complex)
        outs = {}
        for name in ("python", "compiled"):
            try:
                K = get_backend(name)
            except ImportError:
                pytest.skip("compiled backend unavailable")
            stp = Stepper(y, 1e-3, 0.5, 3.0, 1.0, scheme="imex2", backend=K)
            w = w0.copy()
            for _ in range(50):
                w = stp.step(w, 0.0, 0.0)
            outs[name] = w
        assert np.max(np.abs(outs["python"] - outs["compiled"])) < 1e-12

    def test_linear_eigen_decay(self):
        rel, _ = linear_eigenmode_error(2, 0.5, L=12.0, dy=0.02, ds=1e-3,
                                        s_end=1.0)
        assert rel < 1e-4


class TestSingleStep:
    def test_profile_residual_oracle(self, pm):
        # one step from the pure profile moves w by about ds * ||R*||
        cfg = small_config(pm, scheme="imex1")
        sim = Simulator(cfg)
        w = np.exp(1j * sim.Phi(cfg.s0, 0.0)) * sim.phi_grid(cfg.s0)
        st = SimState(w=w, s=cfg.s0, theta=0.0)
        sim.step(st)
        q = (
            np.exp(-1j * sim.Phi(st.s, 0.0)) * st.w
            - sim.phi_grid(st.s)
        )
        ctx = EvalContext(sim.fp, cfg.s0)
        rnorm = np.max(np.abs(rest_Rstar(sim.y, ctx)))
        dq = np.max(np.abs(q))
        assert 0.2 * cfg.ds * rnorm < dq < 5.0 * cfg.ds * rnorm


class TestModulation:
    def test_phase_recovery(self, pm):
        from cglblow.profilefield import initial_data

        cfg = small_config(pm)
        sim = Simulator(cfg)
        spec = InitialDataSpec(s0=cfg.s0, d0_tilde=0.3, d1_tilde=-0.2,
                               K=cfg.K, A=cfg.A)
        psi = initial_data(spec, sim.fp, sim.combos, sim.bf, sim.y).psi
        theta_star = 0.137
        w = np.exp(1j * (sim.Phi(cfg.s0, theta_star))) * (
            sim.phi_grid(cfg.s0) + psi
        )
        st = SimState(w=w, s=cfg.s0, theta=0.0)
        assert sim.modulate(st)
        assert abs(st.theta - theta_star) < 1e-9
        _, qn, _, _ = sim.project_q(st)
        assert abs(qn[0]) < 1e-9

    def test_q0_held_at_zero_along_run(self, pm):
        cfg = small_config(pm, s_end=100.2)
        sim = Simulator(cfg)
        spec = InitialDataSpec(s0=cfg.s0, d0_tilde=0.0, d1_tilde=0.0,
                               K=cfg.K, A=cfg.A)
        res = sim.run(spec)
        assert max(abs(v) for v in res.history["q0"]) < 1e-9


class TestDiagnose:
    def test_zero_error_state(self, pm):
        # q = 0: every raw mode vanishes; the null combination shows the
        # pure drift offset |At2|/s scaled by its bound
        cfg = small_config(pm)
        sim = Simulator(cfg)
        w = np.exp(1j * sim.Phi(cfg.s0, 0.0)) * sim.phi_grid(cfg.s0)
        st = SimState(w=w, s=cfg.s0, theta=0.0)
        record, ratios = sim.diagnose(st, 0.0)
        assert abs(record["qt2"]) < 1e-12
        want = abs(sim.combos["At2"]) / cfg.s0 * cfg.s0**1.25 / cfg.A**10
        assert abs(ratios["Qt2"] - want) < 1e-12 + 0.01 * want
        assert record["qe_norm"] < 1e-12

    def test_null_mode_combination(self, pm):
        cfg = small_config(pm)
        sim = Simulator(cfg)
        spec = InitialDataSpec(s0=cfg.s0, d0_tilde=0.0, d1_tilde=0.0,
                               K=cfg.K, A=cfg.A)
        st = sim.initial_state(spec)
        sim.modulate(st)
        record, _ = sim.diagnose(st, 0.0)
        # Qt2 = qt2 - At2/s starts at the cutoff-truncation level
        assert abs(record["Qt2"]) < 1e-6


@pytest.fixture(scope="module")
def run(pm):
    cfg = small_config(pm, s_end=101.5)
    sim = Simulator(cfg)
    spec = InitialDataSpec(s0=cfg.s0, d0_tilde=0.0, d1_tilde=0.05,
                           K=cfg.K, A=cfg.A)
    return cfg, sim, sim.run(spec)


class TestRunLaws:

    def test_no_exit(self, run):
        cfg, sim, res = run
        assert res.report.exit_s is None

    def test_expanding_mode_odes(self, run):
        # |Qt0' - Qt0| <= C/s^(7/4) and |qt1' - qt1/2| <= C/s^(3/2)
        cfg, sim, res = run
        h = res.history
        s = np.array(h["s"])
        Qt0 = np.array(h["Qt0"])
        qt1 = np.array(h["qt1"])
        ds = s[1] - s[0]
        sl = slice(200, -1)
        dQt0 = np.gradient(Qt0, ds)
        dqt1 = np.gradient(qt1, ds)
        c0 = np.max(np.abs(dQt0 - Qt0)[sl] * s[sl] ** 1.75)
        c1 = np.max(np.abs(dqt1 - 0.5 * qt1)[sl] * s[sl] ** 1.5)
        assert c0 < 1.0
        assert c1 < 1.0

    def test_null_mode_targets_drift(self, run):
        cfg, sim, res = run
        h = res.history
        qt2s = np.array(h["qt2"]) * np.array(h["s"])
        At2 = sim.combos["At2"]
        assert abs(qt2s[-1] - At2) < 0.2 * abs(At2)

    def test_theta_prime_envelope(self, run):
        cfg, sim, res = run
        h = res.history
        s = np.array(h["s"])
        tp = np.abs(np.array(h["theta_prime"]))[50:]
        envelope = cfg.A**10 / s[50:] ** 1.25
        assert np.all(tp <= envelope)

    def test_determinism(self, pm):
        cfg = small_config(pm, s_end=100.05)
        spec = InitialDataSpec(s0=cfg.s0, d0_tilde=0.1, d1_tilde=0.1,
                               K=cfg.K, A=cfg.A)
        h1 = Simulator(cfg).run(spec).history
        h2 = Simulator(cfg).run(spec).history
        for k in h1:
            assert np.array_equal(np.array(h1[k]), np.array(h2[k])), k


class TestKernelCrossCheck:
    def test_flow_matches_kernel_quadrature(self):
        rel, kerr = linear_eigenmode_error(
            2, 0.5, L=14.0, dy=0.01, ds=2e-4, s_end=0.5, kernel_check=True
        )
        assert kerr < 1e-6


class TestFinalProfile:
    def test_phase_modulus(self, pm):
        x = np.array([1e-4])
        v = final_profile(x, pm)
        ll = 2.0 * abs(np.log(1e-4))
        from cglblow.profilefield import FloatParams

        fp = FloatParams.from_exact(pm)
        core = fp.b * x**2 / np.sqrt(ll)
        assert abs(abs(v[0]) - core ** (-1.0 / (fp.p - 1.0))) < 1e-10

    def test_power_law_ratio(self, pm):
        from cglblow.profilefield import FloatParams

        fp = FloatParams.from_exact(pm)
        for x in (1e-3, 1e-4):
            r = abs(final_profile(np.array([x]), pm)[0]) / abs(
                final_profile(np.array([x / 2]), pm)[0]
            )
            want = (
                (fp.b * x**2 / np.sqrt(2 * abs(np.log(x))))
                / (fp.b * (x / 2) ** 2 / np.sqrt(2 * abs(np.log(x / 2))))
            ) ** (-1.0 / (fp.p - 1.0))
            assert abs(r / want - 1.0) < 0.05

    def test_log_slope(self, pm):
        xs = np.array([1e-6, 1e-7, 1e-8])
        vals = np.abs(final_profile(xs, pm))
        slopes = np.diff(np.log(vals)) / np.diff(np.log(xs))
        assert abs(slopes[-1] - (-1.0)) < 0.05  # -2/(p-1) = -1 at p = 3

    def test_domain(self, pm):
        with pytest.raises(ValueError):
            final_profile(np.array([1.5]), pm)


class TestShooting:
    def test_corner_quadrants_and_monotonicity(self, pm):
        from cglblow.shooting import exit_sign_pattern, shoot

        cfg = small_config(pm, N=1024, s_end=100.6)
        res = shoot(cfg, grid_n=4, refine=False, workers=1)
        corners = [
            p for p in res.probes if (abs(p.d0), abs(p.d1)) == (2.0, 2.0)
        ]
        assert exit_sign_pattern(corners) == {(-1, -1), (-1, 1), (1, -1), (1, 1)}
        # exit-map second component increases with d1 at fixed d0
        by_d0 = {}
        for p in res.probes:
            by_d0.setdefault(p.d0, []).append((p.d1, p.phi1))
        for d0, rows in by_d0.items():
            rows.sort()
            vals = [v for _, v in rows]
            assert all(a < b for a, b in zip(vals, vals[1:]))
        # the trapped direction survives longest
        assert res.best.exit_s > min(p.exit_s for p in corners)


class TestNullModeDecayRate:
    def test_tracks_decay_constant(self, pm):
        # displace the null combination and fit its decay exponent; the
        # construction predicts Qt2' ~ H1 Qt2 / s with H1 = -3/2, tracked
        # within 25 percent past s0 + 2
        import numpy as np
        from cglblow.profilefield import cutoff_chi

        cfg = small_config(pm, s_end=104.0)
        sim = Simulator(cfg)
        spec = InitialDataSpec(s0=cfg.s0, d0_tilde=0.0, d1_tilde=0.0,
                               K=cfg.K, A=cfg.A)
        st = sim.initial_state(spec)
        chi = cutoff_chi(2 * sim.y, cfg.s0, cfg.K)
        st.w = st.w + np.exp(1j * sim.Phi(cfg.s0, st.theta)) * 1e-4 * (
            sim._ht_vals[2] * chi
        )
        sim.modulate(st)
        ss, qq = [], []
        nsteps = int(round((cfg.s_end - cfg.s0) / cfg.ds))
        for it in range(nsteps):
            sim.step(st)
            sim.modulate(st)
            if it % 50 == 0:
                rec, _ = sim.diagnose(st, 0.0)
                ss.append(rec["s"])
                qq.append(rec["Qt2"])
        ss, qq = np.array(ss), np.array(qq)
        mask = ss >= cfg.s0 + 2.0
        slope = np.polyfit(np.log(ss[mask]), np.log(np.abs(qq[mask])), 1)[0]
        assert abs(slope - (-1.5)) <= 0.25 * 1.5
