import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from casimir.constants import CODATA2018
from casimir.dielectric import (
    DrudeModel, DrudeParams, ExtrapolationPolicy, MaterialComposition, OpticalTable,
    TabulatedModel, damping_from_resistivity, drude_eps_imag_axis, drude_eps_real_axis,
    kk_eps_imag_axis, load_optical_table, plasma_frequency, resistivity_spectrum,
)
from casimir.errors import ExtrapolationError, InputError
from casimir.materials import HANDBOOK_FITS

EPS0 = CODATA2018.eps_0
AU = DrudeParams(1.37e16, 3.74e13)


def mp_drude(wp, wt, w):
    mpmath.mp.dps = 40
    wp, wt, w = mpmath.mpf(wp), mpmath.mpf(wt), mpmath.mpf(w)
    return complex(1 - wp**2 / (w * (w + 1j * wt)))


class TestDrudeParams:
    def test_zero_damping_needs_flag(self):
        with pytest.raises(InputError):
            DrudeParams(1e16, 0.0)
        DrudeParams(1e16, 0.0, ideal_plasma=True)

    def test_negative_plasma_frequency(self):
        with pytest.raises(InputError):
            DrudeParams(-1.0, 1e13)

    def test_rho_round_trip(self):
        p = DrudeParams.from_resistivity(1.37e16, 2.25e-8)
        assert p.rho_0() == pytest.approx(2.25e-8, rel=1e-15)


class TestRealAxis:
    def test_vacuum(self):
        assert drude_eps_real_axis(DrudeParams(0.0, 1e14), 1e15) == 1 + 0j

    def test_gold_at_1e14(self):
        eps = complex(drude_eps_real_axis(AU, 1e14))
        ref = mp_drude(1.37e16, 3.74e13, 1e14)
        assert eps == pytest.approx(ref, rel=1e-14)
        assert eps.real == pytest.approx(-1.65e4, rel=5e-3)
        assert eps.imag == pytest.approx(6.2e3, rel=1e-2)

    def test_high_frequency_asymptote(self):
        w = 100 * AU.omega_tau
        im = drude_eps_real_axis(AU, w).imag
        assert im == pytest.approx(AU.omega_p**2 * AU.omega_tau / w**3, rel=1e-3)

    @pytest.mark.parametrize("w", [0.0, -1e14])
    def test_domain(self, w):
        with pytest.raises(InputError):
            drude_eps_real_axis(AU, w)

    @given(st.floats(1e10, 1e19))
    def test_absorption_nonnegative(self, w):
        assert drude_eps_real_axis(AU, w).imag >= 0


class TestImagAxis:
    def test_vacuum(self):
        assert drude_eps_imag_axis(DrudeParams(0.0, 1e14), 1e15) == 1

    def test_hand_values(self):
        assert drude_eps_imag_axis(AU, 1e15) == pytest.approx(1 + 1.8769e32 / (1e15 * 1.0374e15))
        assert drude_eps_imag_axis(AU, 1e15) == pytest.approx(181.9, abs=0.05)
        assert drude_eps_imag_axis(AU, 2.468e14) == pytest.approx(2677, rel=5e-4)

    def test_zero_rejected(self):
        with pytest.raises(InputError):
            drude_eps_imag_axis(AU, 0.0)

    def test_monotone(self):
        z = np.logspace(9, 19, 400)
        eps = drude_eps_imag_axis(AU, z)
        assert np.all(np.diff(eps) < 0)
        assert np.all(eps > 1)


def drude_table(p, lo=11, hi=19, n=600):
    return OpticalTable.from_drude(p, np.logspace(lo, hi, n))


class TestOpticalTable:
    def test_invariants(self):
        w = np.array([1.0, 2.0, 3.0, 4.0])
        with pytest.raises(InputError):
            OpticalTable(w[:3], w[:3], w[:3])
        with pytest.raises(InputError):
            OpticalTable(w[::-1], w, w)
        with pytest.raises(InputError):
            OpticalTable(w, w, -w)
        with pytest.raises(InputError):
            OpticalTable(w - 1, w, w)

    def test_read_only(self):
        t = drude_table(AU, n=10)
        with pytest.raises(ValueError):
            t.omega[0] = 1.0

    def test_csv_omega(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("# comment\nomega_rad_s,eps_re,eps_im\n3e14,-1,2\n1e14,-3,4\n2e14,-2,3\n4e14,0,1\n")
        t = load_optical_table(f)
        assert t.omega.tolist() == [1e14, 2e14, 3e14, 4e14]
        assert t.eps_im.tolist() == [4, 3, 2, 1]

    def test_csv_nk(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("lambda_um,n,k\n1,1,2\n2,2,3\n3,3,4\n4,4,5\n")
        t = load_optical_table(f)
        # longest wavelength is the lowest frequency: (4 + 5i)^2 = -9 + 40i
        assert t.eps_re[0] == pytest.approx(-9)
        assert t.eps_im[0] == pytest.approx(40)
        assert t.omega[0] == pytest.approx(2 * math.pi * CODATA2018.c / 4e-6)

    def test_csv_bad_header(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(InputError):
            load_optical_table(f)


class TestKramersKronig:
    def test_vacuum_table(self):
        w = np.logspace(12, 16, 20)
        t = OpticalTable(w, np.ones_like(w), np.zeros_like(w))
        assert np.all(kk_eps_imag_axis(t, np.logspace(12, 17, 7)) == 1)

    def test_drude_identity(self):
        t = drude_table(AU)
        z = np.logspace(13, 17, 81)
        kk = kk_eps_imag_axis(t, z)
        assert np.max(np.abs(kk / drude_eps_imag_axis(AU, z) - 1)) < 1e-4

    @settings(max_examples=15, deadline=None)
    @given(st.floats(15.0, 17.0), st.floats(13.0, 15.0))
    def test_drude_identity_property(self, lg_wp, lg_wt):
        p = DrudeParams(10**lg_wp, 10**lg_wt)
        t = OpticalTable.from_drude(p, np.logspace(lg_wt - 3, 20, 900))
        z = np.logspace(lg_wt - 1, lg_wt + 3, 9)
        assert np.max(np.abs(kk_eps_imag_axis(t, z) / drude_eps_imag_axis(p, z) - 1)) < 1e-4

    def test_narrow_line_constant(self):
        # Lorentzian line at 1e17 rad/s, width 1e14, strength f
        w0, g, f = 1e17, 1e14, 2.0
        w = np.union1d(np.logspace(14, 19, 2000), np.linspace(w0 - 200 * g, w0 + 200 * g, 4001))
        eps = 1 + f * w0**2 / (w0**2 - w**2 - 1j * g * w)
        t = OpticalTable(w, eps.real, eps.imag)
        z = np.array([1e13, 1e14, 1e15])
        out = kk_eps_imag_axis(t, z, ExtrapolationPolicy(None, None))
        # a line far above zeta adds its static strength f
        assert out == pytest.approx(1 + f, rel=2e-3)
        assert np.ptp(out) < 3 * f * (z.max() / w0) ** 2

    def test_closed_form_tails_match_general_exponent(self):
        t = drude_table(AU)
        z = np.logspace(12, 18, 13)
        a = kk_eps_imag_axis(t, z)
        b = kk_eps_imag_axis(t, z, ExtrapolationPolicy(1 + 1e-9, 3 + 1e-9))
        assert np.allclose(a, b, rtol=1e-7)

    def test_tails_matter(self):
        t = drude_table(AU, lo=12, hi=16, n=300)
        z = np.array([1e13])
        with_tails = kk_eps_imag_axis(t, z)
        without = kk_eps_imag_axis(t, z, ExtrapolationPolicy(None, None))
        assert with_tails > without
        assert with_tails == pytest.approx(drude_eps_imag_axis(AU, z), rel=1e-3)

    @pytest.mark.parametrize("lo,hi", [(2.0, 3.0), (1.0, 0.0), (2.5, -1.0)])
    def test_divergent_policy(self, lo, hi):
        with pytest.raises(ExtrapolationError):
            ExtrapolationPolicy(lo, hi)

    def test_monotone_and_limit(self):
        t = drude_table(AU)
        z = np.logspace(11, 20, 200)
        eps = kk_eps_imag_axis(t, z)
        assert np.all(np.diff(eps) < 0)
        assert eps[-1] - 1 < 1e-6

    def test_tabulated_model_static_limit(self):
        t = drude_table(AU)
        assert math.isinf(TabulatedModel(t).static_eps)
        finite = TabulatedModel(t, ExtrapolationPolicy(None, 3.0)).static_eps
        assert 1 < finite < math.inf


class TestResistivity:
    def test_drude_constant(self):
        w = [1e13, 1e14, 1e15]
        eps = drude_eps_real_axis(AU, np.array(w))
        rho = [r for _, r in resistivity_spectrum(zip(w, eps))]
        assert rho[0] == pytest.approx(2.25e-8, rel=2e-3)
        assert max(rho) / min(rho) == pytest.approx(1, abs=1e-12)
        assert rho[0] == pytest.approx(AU.omega_tau / (EPS0 * AU.omega_p**2), rel=1e-13)

    def test_lossless_plasma(self):
        wp = 1e16
        w = np.array([1e13, 1e14, 1e15])
        spec = resistivity_spectrum(zip(w, 1 - wp**2 / w**2 + 0j))
        assert all(r == 0 for _, r in spec)

    def test_undefined_point(self):
        spec = resistivity_spectrum([(1e14, 1.0), (1e14, 2.0)])
        assert math.isnan(spec[0][1]) and not math.isnan(spec[1][1])

    @pytest.mark.parametrize("key,rho", [("au-2", 2.44), ("al-2", 2.83)])
    def test_fitted_entries(self, key, rho):
        wp, wt, _ = HANDBOOK_FITS[key]
        w = np.array([3e13, 1e14, 4e14])
        spec = resistivity_spectrum(zip(w, drude_eps_real_axis(DrudeParams(wp, wt), w)))
        assert spec[1][1] / 1e-8 == pytest.approx(rho, abs=0.01)

    @pytest.mark.parametrize("key", sorted(HANDBOOK_FITS))
    def test_all_fitted_entries_consistent(self, key):
        wp, wt, rho = HANDBOOK_FITS[key]
        assert DrudeParams(wp, wt).rho_0() / 1e-8 == pytest.approx(rho, rel=1e-2)


class TestPlasmaFrequency:
    def test_gold(self):
        wp = plasma_frequency(MaterialComposition(19300, 0.197, 1))
        assert wp == pytest.approx(1.37e16, rel=5e-3)

    def test_aluminium(self):
        wp = plasma_frequency(MaterialComposition(2700, 0.02698, 3))
        assert wp == pytest.approx(2.40e16, rel=5e-3)

    def test_insulator(self):
        assert plasma_frequency(MaterialComposition(2700, 0.02698, 0)) == 0

    @given(st.floats(0.1, 10), st.floats(0.1, 10))
    def test_scaling(self, k, m):
        base = plasma_frequency(MaterialComposition(19300, 0.197, 1.0, 1.0))
        wp = plasma_frequency(MaterialComposition(19300, 0.197, k, m))
        assert wp == pytest.approx(base * math.sqrt(k / m), rel=1e-12)

    def test_invalid(self):
        with pytest.raises(InputError):
            MaterialComposition(-1, 0.197, 1)


class TestDamping:
    @pytest.mark.parametrize("wp,rho,wt", [
        (1.37e16, 2.25e-8, 3.74e13),
        (2.40e16, 2.65e-8, 1.35e14),
        (1.69e16, 3.0e-7, 7.59e14),
    ])
    def test_values(self, wp, rho, wt):
        assert damping_from_resistivity(wp, rho) == pytest.approx(wt, rel=2e-3)

    @given(st.floats(1e15, 1e17), st.floats(1e-9, 1e-5))
    def test_round_trip(self, wp, rho):
        p = DrudeParams(wp, damping_from_resistivity(wp, rho))
        assert p.rho_0() == pytest.approx(rho, rel=1e-14)

    def test_model_wrappers(self):
        m = DrudeModel(AU)
        assert m.eps_imag(1e15) == drude_eps_imag_axis(AU, 1e15)
        assert math.isinf(m.static_eps) and m.static_k2 == 0
        plasma = DrudeModel(DrudeParams(1e16, 0.0, ideal_plasma=True))
        assert plasma.static_k2 == 1e32
