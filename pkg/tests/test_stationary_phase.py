"""Phase, gradient, Hessian, classification, solvers and the saddle weight."""

import math
import warnings

import numpy as np
import pytest

from dopshift import dispersion as disp
from dopshift import fields as fld
from dopshift import stationary_phase as sph
from dopshift import trajectory as trj
from dopshift.errors import (DegeneratePoint, EvanescentRegime, NoConvergence,
                             NotAContraction)

PLASMA = disp.ColdPlasma(omega_p=1.0)
VACUUM = disp.NonDispersive(eps=1.0, mu=1.0)


def plasma_ctx(x2=4.0, t=1.0, w0=2.0, mach=0.5):
    return sph.PhaseContext(
        t=t, x=(0.0, x2, 0.0), omega0=w0,
        trajectory=trj.StraightLine(velocity=(0.0, mach, 0.0)),
        dispersion=PLASMA)


class TestPhase:
    def test_static_vacuum_point(self):
        ctx = sph.PhaseContext(t=0.0, x=(1.0, 0.0, 0.0), omega0=0.0,
                               trajectory=trj.OffsetLine(v=0.0, H=0.0),
                               dispersion=VACUUM)
        assert sph.phase(ctx, 1.0, 0.0) == pytest.approx(1.0)

    def test_carrier_at_observation_time(self):
        # omega = omega0 and tau = t: S = k(omega0) r - omega0 t
        ctx = plasma_ctx(x2=3.0, t=0.8)
        s = disp.sample(PLASMA, 2.0)
        g = trj.geometry(ctx.trajectory, ctx.x, 0.8)
        assert sph.phase(ctx, 2.0, 0.8) == pytest.approx(
            s.k.real * g.r - 2.0 * 0.8, rel=1e-14)

    def test_plasma_value(self):
        # k = sqrt(3) at omega = 2, range 3, t = tau = 0, omega0 = 0
        ctx = sph.PhaseContext(t=0.0, x=(0.0, 3.0, 0.0), omega0=0.0,
                               trajectory=trj.OffsetLine(v=0.0, H=0.0),
                               dispersion=PLASMA)
        assert sph.phase(ctx, 2.0, 0.0) == pytest.approx(3.0 * math.sqrt(3.0),
                                                         rel=1e-14)

    def test_evanescent_raises(self):
        ctx = plasma_ctx()
        with pytest.raises(EvanescentRegime):
            sph.phase(ctx, 0.5, 0.0)


class TestGradient:
    def test_zero_at_solution(self):
        ctx = plasma_ctx()
        sp = sph.solve_newton(ctx, tol=1e-12)
        g = sph.gradient(ctx, sp.omega_s, sp.tau_s)
        assert np.hypot(*g) <= 1e-12

    def test_nondispersive_omega_independent_retardation(self):
        ctx = sph.PhaseContext(t=0.5, x=(0.0, 6.0, 0.0), omega0=1.0,
                               trajectory=trj.OffsetLine(v=0.3, H=0.0),
                               dispersion=VACUUM)
        g1 = sph.gradient(ctx, 1.0, -2.0)[0]
        g2 = sph.gradient(ctx, 4.0, -2.0)[0]
        assert g1 == pytest.approx(g2, rel=1e-15)
        r = trj.geometry(ctx.trajectory, ctx.x, -2.0).r
        assert g1 == pytest.approx(r - (0.5 - (-2.0)), rel=1e-14)


class TestHessian:
    def test_head_on_constant_speed_determinant(self):
        # constant radial speed: det = -(1 - v/c)**2 at the stationary point
        ctx = sph.PhaseContext(t=0.0, x=(0.0, 10.0, 0.0), omega0=1.0,
                               trajectory=trj.StraightLine(velocity=(0, 0.5, 0)),
                               dispersion=VACUUM)
        sp = sph.solve_newton(ctx)
        assert sp.det == pytest.approx(-(1 - 0.5) ** 2, rel=1e-12)
        assert sp.signature == 0

    def test_stationary_source_structure(self):
        ctx = sph.PhaseContext(t=2.0, x=(0.0, 3.0, 0.0), omega0=2.0,
                               trajectory=trj.OffsetLine(v=0.0, H=0.0),
                               dispersion=PLASMA)
        h = sph.hessian(ctx, 2.0, 0.0)
        s = disp.sample(PLASMA, 2.0)
        assert h[0, 0] == pytest.approx(s.k_second * 3.0, rel=1e-14)
        assert h[0, 1] == h[1, 0] == 1.0
        assert h[1, 1] == 0.0


class TestDerivativeConsistency:
    def test_gradient_and_hessian_match_finite_differences(self):
        rng = np.random.default_rng(42)
        ctx = plasma_ctx(x2=5.0, t=1.2, w0=2.5, mach=0.4)
        for _ in range(50):
            w = float(rng.uniform(1.3, 6.0))
            tau = float(rng.uniform(-4.0, 1.0))
            g = sph.gradient(ctx, w, tau)
            hw, ht = 1e-6 * max(1, abs(w)), 1e-6 * max(1, abs(tau))
            fd0 = (sph.phase(ctx, w + hw, tau)
                   - sph.phase(ctx, w - hw, tau)) / (2 * hw)
            fd1 = (sph.phase(ctx, w, tau + ht)
                   - sph.phase(ctx, w, tau - ht)) / (2 * ht)
            assert fd0 == pytest.approx(g[0], rel=1e-6, abs=1e-6)
            assert fd1 == pytest.approx(g[1], rel=1e-6, abs=1e-6)
            h = sph.hessian(ctx, w, tau)
            gp = np.array(sph.gradient(ctx, w + hw, tau))
            gm = np.array(sph.gradient(ctx, w - hw, tau))
            tp = np.array(sph.gradient(ctx, w, tau + ht))
            tm = np.array(sph.gradient(ctx, w, tau - ht))
            fdh = np.column_stack(((gp - gm) / (2 * hw), (tp - tm) / (2 * ht)))
            assert np.allclose(fdh, h, rtol=1e-5, atol=1e-7)


class TestClassify:
    def test_positive_definite(self):
        det, sig = sph.classify(np.eye(2))
        assert (det, sig) == (1.0, 2)

    def test_hyperbolic(self):
        det, sig = sph.classify(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert (det, sig) == (-1.0, 0)

    def test_shifted(self):
        det, sig = sph.classify(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert det == pytest.approx(3.0)
        assert sig == 2

    def test_degenerate_raises(self):
        with pytest.raises(DegeneratePoint):
            sph.classify(np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_swap_invariance(self):
        rng = np.random.default_rng(8)
        p = np.array([[0.0, 1.0], [1.0, 0.0]])
        for _ in range(50):
            h = rng.normal(size=(2, 2))
            h = h + h.T
            try:
                det, sig = sph.classify(h)
            except DegeneratePoint:
                continue
            det2, sig2 = sph.classify(p @ h @ p)
            assert det2 == pytest.approx(det, rel=1e-12)
            assert sig2 == sig


class TestSolvers:
    def test_newton_matches_plasma_closed_form(self):
        ctx = plasma_ctx()
        sp = sph.solve_newton(ctx, tol=1e-12)
        closed = fld.plasma_doppler_closed_form(2.0, 1.0, 0.5, True)
        assert sp.omega_s == pytest.approx(closed, rel=1e-9)
        assert sp.converged and sp.residual_norm <= 1e-12

    def test_nondispersive_converges_from_closed_seed(self):
        ctx = sph.PhaseContext(t=0.0, x=(0.0, 10.0, 0.0), omega0=1.0,
                               trajectory=trj.StraightLine(velocity=(0, 0.5, 0)),
                               dispersion=VACUUM)
        sp = sph.solve_newton(ctx)
        assert sp.iterations <= 3
        assert sp.omega_s == pytest.approx(2.0, rel=1e-12)

    def test_newton_no_convergence_diagnostics(self):
        ctx = plasma_ctx()
        with pytest.raises(NoConvergence) as err:
            sph.solve_newton(ctx, tol=1e-10, max_iter=1, seed=(5.0, -20.0))
        diag = err.value.diagnostics
        assert diag is not None and not diag.converged

    def test_fixed_point_stationary_source_one_iteration(self):
        ctx = sph.PhaseContext(t=2.0, x=(0.0, 3.0, 0.0), omega0=2.0,
                               trajectory=trj.OffsetLine(v=0.0, H=0.0),
                               dispersion=PLASMA)
        sp = sph.solve_fixed_point(ctx)
        s = disp.sample(PLASMA, 2.0)
        assert sp.iterations == 1
        assert sp.omega_s == 2.0
        assert sp.tau_s == 2.0 - 3.0 / s.v_group

    def test_fixed_point_static_source_without_dispersion(self):
        ctx = sph.PhaseContext(t=2.0, x=(0.0, 3.0, 0.0), omega0=2.0,
                               trajectory=trj.OffsetLine(v=0.0, H=0.0),
                               dispersion=VACUUM)
        sp = sph.solve_fixed_point(ctx)
        assert sp.omega_s == 2.0
        assert sp.tau_s == 2.0 - 3.0 / 1.0      # group speed is c here

    def test_fixed_point_agrees_with_newton(self):
        ctx = plasma_ctx()
        tol = 1e-12
        a = sph.solve_newton(ctx, tol=tol)
        b = sph.solve_fixed_point(ctx, tol=tol)
        assert abs(a.omega_s - b.omega_s) <= 10 * tol
        assert abs(a.tau_s - b.tau_s) <= 10 * tol

    def test_fixed_point_refuses_non_contraction(self):
        # near-cutoff carrier with a huge range: k'' r well above 1
        ctx = plasma_ctx(x2=200.0, w0=1.05, mach=0.0)
        with pytest.raises(NotAContraction):
            sph.solve_fixed_point(ctx)

    def test_grid_deduplicates(self):
        ctx = plasma_ctx()
        pts = sph.solve_grid(ctx, (1.5, 6.0), (-8.0, 0.9), n_omega=5, n_tau=5)
        assert len(pts) >= 1
        for a, b in zip(pts, pts[1:]):
            assert abs(a.tau_s - b.tau_s) > 1e-6

    def test_retardation_positive(self):
        ctx = plasma_ctx()
        sp = sph.solve_newton(ctx)
        s = disp.sample(PLASMA, sp.omega_s)
        g = trj.geometry(ctx.trajectory, ctx.x, sp.tau_s)
        assert ctx.t - sp.tau_s > 0
        assert ctx.t - sp.tau_s == pytest.approx(g.r / s.v_group, rel=1e-10)


class TestEnvelopeIdentity:
    def test_phase_time_derivative_is_minus_frequency(self):
        # d/dt of S(t, x, omega_s(t), tau_s(t)) must equal -omega_s(t)
        dt = 1e-4
        vals = {}
        for t in (1.0 - dt, 1.0, 1.0 + dt):
            ctx = plasma_ctx(t=t)
            sp = sph.solve_newton(ctx, tol=1e-13)
            vals[t] = (sph.phase(ctx, sp.omega_s, sp.tau_s), sp.omega_s)
        dF = (vals[1.0 + dt][0] - vals[1.0 - dt][0]) / (2 * dt)
        assert dF == pytest.approx(-vals[1.0][1], rel=1e-4)


class TestContribution:
    def test_elliptic_model_value(self):
        # S = (w**2+t**2)/2 at the origin: det 1, signature +2, S = 0
        for lam in (5.0, 40.0, 333.0):
            got = sph.saddle_contribution(lam, 0.0, 1.0, 2, 1.0)
            assert got == pytest.approx(2j * math.pi / lam, rel=1e-15)

    def test_hyperbolic_model_value(self):
        got = sph.saddle_contribution(25.0, 0.0, -1.0, 0, 1.0)
        assert got == pytest.approx(2 * math.pi / 25.0, rel=1e-15)

    def test_fold_scale_into_phase_bit_for_bit(self):
        lam, s_val, det, sig, amp = 37.0, 0.8127, -2.31, 0, 0.4 + 0.1j
        unfolded = sph.saddle_contribution(lam, s_val, det, sig, amp)
        folded = sph.saddle_contribution(1.0, lam * s_val, lam * lam * det,
                                         sig, amp)
        assert folded == unfolded

    def test_degenerate_rejected(self):
        with pytest.raises(DegeneratePoint):
            sph.saddle_contribution(10.0, 0.0, 0.0, 0, 1.0)

    def test_field_phase_contribution_vs_quadrature(self):
        # direct quadrature of the actual field phase around a solved plasma
        # stationary point must reproduce the saddle weight to O(1/lam);
        # the window keeps the box inside the propagating band
        from dopshift import oracle as orc
        lam = 60.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ctx = sph.PhaseContext(t=1.0, x=(0.0, 4.0, 0.0), omega0=2.0,
                                   trajectory=trj.StraightLine(
                                       velocity=(0.0, 0.5, 0.0)),
                                   dispersion=PLASMA, lam=lam)
        sp = sph.solve_newton(ctx, tol=1e-13)
        s0 = sph.phase(ctx, sp.omega_s, sp.tau_s)
        ww, tw = 0.25, 0.9
        ig = orc.OscillatoryIntegrand(
            amplitude=lambda u, v: np.exp(-0.5 * ((u / ww) ** 2
                                                  + (v / tw) ** 2)),
            phase=np.vectorize(
                lambda u, v: sph.phase(ctx, float(u) + sp.omega_s,
                                       float(v) + sp.tau_s) - s0),
            lam=lam)
        res = orc.oscillatory_integral_2d(ig, R0=0.7, tol=1e-5,
                                          max_doublings=2)
        pred = sph.saddle_contribution(lam, 0.0, sp.det, sp.signature, 1.0)
        assert abs(res.value - pred) / abs(res.value) <= 3.0 / lam

    def test_context_contribution_matches_parts(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ctx = sph.PhaseContext(t=1.0, x=(0.0, 4.0, 0.0), omega0=2.0,
                                   trajectory=trj.StraightLine(
                                       velocity=(0.0, 0.5, 0.0)),
                                   dispersion=PLASMA, lam=4.0)
        sp = sph.solve_newton(ctx)
        s_val = sph.phase(ctx, sp.omega_s, sp.tau_s)
        assert sph.contribution(ctx, sp, 1.0 + 0.0j) == \
            sph.saddle_contribution(4.0, s_val, sp.det, sp.signature, 1.0 + 0.0j)


class TestStationaryIdentity:
    def test_doppler_identity_at_solutions(self):
        rng = np.random.default_rng(100)
        for _ in range(25):
            ctx = plasma_ctx(x2=float(rng.uniform(3, 8)),
                             t=float(rng.uniform(0, 1.5)),
                             w0=float(rng.uniform(1.5, 4)),
                             mach=float(rng.uniform(0, 0.7)))
            sp = sph.solve_newton(ctx, tol=1e-11)
            s = disp.sample(PLASMA, sp.omega_s)
            g = trj.geometry(ctx.trajectory, ctx.x, sp.tau_s)
            assert abs(sp.omega_s - ctx.omega0 - s.k.real * g.v_rad) \
                <= 1e-8 * max(1.0, ctx.omega0)


def test_concurrent_observer_sweep_is_deterministic():
    # solvers hold no shared state: a threaded sweep over observer positions
    # must reproduce the serial result bit for bit
    from concurrent.futures import ThreadPoolExecutor

    def solve_at(x2):
        ctx = plasma_ctx(x2=x2)
        sp = sph.solve_newton(ctx, tol=1e-12)
        return sp.omega_s, sp.tau_s

    xs = [3.0 + 0.1 * i for i in range(24)]
    serial = [solve_at(x) for x in xs]
    with ThreadPoolExecutor(max_workers=8) as pool:
        threaded = list(pool.map(solve_at, xs))
    assert threaded == serial


def test_context_validation():
    with pytest.raises(ValueError):
        sph.PhaseContext(t=0.0, x=(0, 1, 0), omega0=-1.0,
                         trajectory=trj.OffsetLine(), dispersion=VACUUM)
    with pytest.raises(ValueError):
        sph.PhaseContext(t=0.0, x=(0, 1, 0), omega0=1.0,
                         trajectory=trj.OffsetLine(), dispersion=VACUUM,
                         lam=0.5)
    with pytest.warns(UserWarning):
        sph.PhaseContext(t=0.0, x=(0, 1, 0), omega0=1.0,
                         trajectory=trj.OffsetLine(), dispersion=VACUUM,
                         lam=5.0)
