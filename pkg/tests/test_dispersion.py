"""Material response: closed-form values, branch selection, derivative
consistency and the plasma identities."""

import math

import numpy as np
import pytest

from dopshift import dispersion as disp
from dopshift.errors import DegenerateMedium, EvanescentRegime, ZeroFrequency
from dopshift.units import omega_from_thz

LORENTZ = disp.lorentz_from_thz()


class TestPermittivity:
    def test_plasma_direct_substitution(self):
        m = disp.ColdPlasma(omega_p=1.0)
        assert disp.permittivity(m, 2.0) == 0.75

    def test_plasma_cutoff(self):
        m = disp.ColdPlasma(omega_p=1.0)
        assert disp.permittivity(m, 1.0) == 0.0

    def test_plasma_zero_frequency_raises(self):
        with pytest.raises(ZeroFrequency):
            disp.permittivity(disp.ColdPlasma(omega_p=1.0), 0.0)

    def test_lorentz_high_frequency_limit(self):
        w = omega_from_thz(1e6)
        assert abs(disp.permittivity(LORENTZ, w) - 1.0) < 1e-4

    def test_lorentz_static_value(self):
        # at omega = 0 the single-resonance response is 1 + (w_P/w_T)**2
        expected = 1.0 + (298.42 / 409.82) ** 2
        got = disp.permittivity(LORENTZ, 0.0)
        assert got.imag == 0.0
        assert got.real == pytest.approx(expected, rel=1e-12)


class TestPermeability:
    def test_plasma_is_vacuum(self):
        m = disp.ColdPlasma(omega_p=1.0)
        for w in (0.5, 1.0, 7.0):
            assert disp.permeability(m, w) == 1.0

    def test_lorentz_static_value(self):
        expected = 1.0 + (171.09 / 397.89) ** 2
        assert disp.permeability(LORENTZ, 0.0).real == pytest.approx(
            expected, rel=1e-12)

    def test_nondispersive_constant(self):
        assert disp.permeability(disp.NonDispersive(eps=2.0, mu=3.0), 5.0) == 3.0


class TestRefractionIndex:
    def test_vacuum(self):
        assert disp.branch_sqrt_product(1.0, 1.0) == 1.0

    def test_double_negative_gives_negative_real_part(self):
        n = disp.branch_sqrt_product(-1.0 + 1e-9j, -1.0 + 1e-9j)
        assert n.real == pytest.approx(-1.0, abs=1e-8)

    def test_lorentz_band_is_left_handed(self):
        n = disp.refraction_index(LORENTZ, omega_from_thz(420.0))
        assert n.real < 0

    def test_degenerate_medium_raises(self):
        with pytest.raises(DegenerateMedium):
            disp.branch_sqrt_product(0.0, 1.0)

    def test_square_recovers_product_randomized(self):
        # branch choice must keep n**2 == eps*mu for eps, mu off the cut
        rng = np.random.default_rng(3)
        for _ in range(200):
            eps = complex(rng.uniform(-5, 5), rng.uniform(1e-6, 5))
            mu = complex(rng.uniform(-5, 5), rng.uniform(1e-6, 5))
            n = disp.branch_sqrt_product(eps, mu)
            assert abs(n * n - eps * mu) <= 1e-12 * abs(eps * mu)


class TestSample:
    def test_plasma_velocity_identity_point(self):
        s = disp.sample(disp.ColdPlasma(omega_p=1.0), 2.0)
        assert s.v_phase == pytest.approx(2.0 / math.sqrt(3.0), rel=1e-14)
        assert s.v_group == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-14)
        assert s.v_phase * s.v_group == pytest.approx(1.0, rel=1e-12)

    def test_plasma_velocity_identity_sweep(self):
        m = disp.ColdPlasma(omega_p=1.0)
        for w in np.linspace(1.01, 40.0, 200):
            s = disp.sample(m, float(w))
            assert s.v_phase * s.v_group == pytest.approx(1.0, rel=1e-12)

    def test_plasma_evanescent_branch(self):
        s = disp.sample(disp.ColdPlasma(omega_p=2.0), 1.0)
        assert not s.propagating
        assert s.k.real == 0.0 and s.k.imag == pytest.approx(math.sqrt(3.0))
        assert s.v_group is None
        with pytest.raises(EvanescentRegime):
            s.require_propagating()

    def test_nondispersive_no_dispersion(self):
        s = disp.sample(disp.NonDispersive(eps=1.0, mu=1.0), 3.7)
        assert s.v_phase == s.v_group == 1.0
        assert s.k_second == 0.0

    def test_lorentz_marker_phase_velocity(self):
        s = disp.sample(LORENTZ, omega_from_thz(417.82))
        assert s.v_phase == pytest.approx(-0.31673, abs=5e-4)

    def test_band_negativity_grid(self):
        for f in np.linspace(410.0, 432.0, 100):
            assert disp.sample(LORENTZ, omega_from_thz(float(f))).n.real < 0

    def test_pure_function(self):
        w = omega_from_thz(421.3)
        a, b = disp.sample(LORENTZ, w), disp.sample(LORENTZ, w)
        assert a == b

    def test_sample_matches_pointwise_ops(self):
        w = omega_from_thz(424.0)
        s = disp.sample(LORENTZ, w)
        assert s.eps == disp.permittivity(LORENTZ, w)
        assert s.mu == disp.permeability(LORENTZ, w)
        assert s.n == disp.refraction_index(LORENTZ, w)
        assert abs(s.n * s.n - s.eps * s.mu) <= 1e-12 * abs(s.eps * s.mu)


class TestGroupVelocityDerivatives:
    """v_group must equal 1/k' with k' cross-checked by central differences."""

    @pytest.mark.parametrize("model,omegas", [
        (disp.ColdPlasma(omega_p=1.0), np.linspace(1.2, 8.0, 25)),
        (disp.NonDispersive(eps=2.0, mu=1.5), np.linspace(0.5, 5.0, 10)),
        (LORENTZ, omega_from_thz(np.linspace(411.0, 432.5, 25))),
    ])
    def test_against_finite_difference(self, model, omegas):
        for w in np.atleast_1d(omegas):
            w = float(w)
            s = disp.sample(model, w)
            h = 1e-6 * w
            kp = (disp.sample(model, w + h).k.real
                  - disp.sample(model, w - h).k.real) / (2 * h)
            assert abs(s.v_group - 1.0 / kp) <= 1e-5 * abs(s.v_group)

    def test_k_second_against_finite_difference(self):
        for w in omega_from_thz(np.linspace(412.0, 432.0, 15)):
            w = float(w)
            s = disp.sample(LORENTZ, w)
            h = 1e-5 * w
            kpp = (disp.sample(LORENTZ, w + h).k.real
                   - 2 * disp.sample(LORENTZ, w).k.real
                   + disp.sample(LORENTZ, w - h).k.real) / h ** 2
            assert kpp == pytest.approx(s.k_second, rel=1e-4)


def test_model_validation():
    with pytest.raises(ValueError):
        disp.NonDispersive(eps=-1.0, mu=1.0)
    with pytest.raises(ValueError):
        disp.ColdPlasma(omega_p=-0.1)
    with pytest.raises(ValueError):
        disp.LorentzMetamaterial(omega_pe=1, omega_te=0.0, gamma_e=0,
                                 omega_pm=1, omega_tm=1, gamma_m=0)
