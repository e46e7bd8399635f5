import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from sivkit import cosmology as cosmo
from sivkit.cosmology import BackgroundState
from sivkit.errors import DomainError, UnsupportedModelError
from sivkit.gauge import CosmologyParams

P03 = CosmologyParams(omega_m=0.3)
# mpmath, 30 digits: ((0.9^3 - 0.3) / 0.7)^(2/3)
A_AT_09 = 0.72150525977193501546


def flat_dust_symbols():
    t, om = sp.symbols("t omega_m", positive=True)
    a = ((t**3 - om) / (1 - om)) ** sp.Rational(2, 3)
    return t, om, a


class TestClosedFormsSymbolic:
    """The closed forms used in the package, re-derived with sympy."""

    def test_hubble(self):
        t, om, a = flat_dust_symbols()
        assert sp.simplify(sp.diff(a, t) / a - 2 * t**2 / (t**3 - om)) == 0

    def test_acceleration(self):
        t, om, a = flat_dust_symbols()
        expected = 2 * t * (t**3 - 2 * om) / (t**3 - om) ** 2
        assert sp.simplify(sp.diff(a, t, 2) / a - expected) == 0

    def test_equations_hold_with_conserved_density(self):
        t, om, a = flat_dust_symbols()
        h = sp.diff(a, t) / a
        rho = 3 * (h**2 - 2 * h / t)
        assert sp.simplify(rho - 12 * om * t / (t**3 - om) ** 2) == 0
        assert sp.simplify(rho * a**3 / t - 12 * om / (1 - om) ** 2) == 0
        add = sp.diff(a, t, 2) / a
        assert sp.simplify(-rho / 6 - (add - h / t)) == 0
        assert sp.simplify(2 * add + h**2 - 4 * h / t) == 0


class TestAnalytic:
    def test_anchors(self):
        assert cosmo.scale_factor_analytic(1.0, P03) == pytest.approx(1.0, abs=1e-15)
        assert cosmo.scale_factor_analytic(P03.t_in(), P03) == 0.0

    @given(st.floats(0.0, 0.99))
    def test_anchors_all_densities(self, om):
        p = CosmologyParams(omega_m=om)
        assert abs(cosmo.scale_factor_analytic(1.0, p) - 1.0) <= 1e-14
        assert abs(cosmo.scale_factor_analytic(p.t_in(), p)) <= 1e-14

    def test_scale_factor_value(self):
        assert cosmo.scale_factor_analytic(0.9, P03) == pytest.approx(A_AT_09, rel=1e-14)

    def test_hubble_values(self):
        assert cosmo.hubble_analytic(1.0, CosmologyParams(omega_m=0.0)) == pytest.approx(2.0)
        assert cosmo.hubble_analytic(1.0, P03) == pytest.approx(2.8571, abs=5e-5)
        assert cosmo.hubble_analytic(1e6, P03) == pytest.approx(2e-6, rel=1e-12)

    def test_hubble_matches_difference(self):
        h = 1e-6
        a = lambda t: cosmo.scale_factor_analytic(t, P03)
        fd = (math.log(a(1 + h)) - math.log(a(1 - h))) / (2 * h)
        assert fd == pytest.approx(cosmo.hubble_analytic(1.0, P03), rel=1e-8)

    def test_acceleration_matches_difference(self):
        t, h = 0.85, 1e-3
        a = lambda x: cosmo.scale_factor_analytic(x, P03)
        stencil = -a(t + 2 * h) + 16 * a(t + h) - 30 * a(t) + 16 * a(t - h) - a(t - 2 * h)
        fd = stencil / (12 * h * h) / a(t)
        assert fd == pytest.approx(cosmo.a_ddot_over_a_analytic(t, P03), rel=1e-6)

    def test_density(self):
        assert cosmo.density_from_friedmann(1.0, P03) == pytest.approx(7.3469, abs=5e-5)
        assert cosmo.density_from_friedmann(1e4, P03) < 1e-10
        ts = np.linspace(0.01, 5, 20)
        assert np.all(cosmo.density_from_friedmann(ts, CosmologyParams(omega_m=0.0)) == 0)

    def test_before_big_bang(self):
        with pytest.raises(DomainError):
            cosmo.scale_factor_analytic(0.5, P03)
        with pytest.raises(DomainError):
            cosmo.hubble_analytic(P03.t_in(), P03)

    def test_non_flat_has_no_closed_form(self):
        with pytest.raises(UnsupportedModelError):
            cosmo.scale_factor_analytic(0.9, CosmologyParams(k=1))
        with pytest.raises(UnsupportedModelError):
            cosmo.scale_factor_analytic(0.9, CosmologyParams(cs2=1 / 3))

    @pytest.mark.parametrize("k", [-1, 0, 1])
    def test_present_day_hubble_satisfies_constraint(self, k):
        p = CosmologyParams(omega_m=0.3, k=k)
        h0 = cosmo.present_day_hubble(p)
        assert 3 * 0.3 * h0 * h0 / 3 == pytest.approx(k + h0 * h0 - 2 * h0, rel=1e-14)


class TestResiduals:
    def test_analytic_state_at_09(self):
        r = cosmo.friedmann_residuals(cosmo.analytic_state(0.9, P03), P03)
        assert max(map(abs, r)) < 1e-10

    @given(st.floats(0.0, 0.95), st.floats(1e-3, 5.0))
    @settings(max_examples=1000)
    def test_analytic_states_relative(self, om, dt):
        p = CosmologyParams(omega_m=om)
        s = cosmo.analytic_state(p.t_in() + dt, p)
        h = s.hubble
        scale = h * h + abs(2 * h / s.t) + s.rho
        assert max(map(abs, cosmo.friedmann_residuals(s, p))) <= 1e-10 * scale

    def test_empty_model_exact(self):
        p = CosmologyParams(omega_m=0.0)
        for t in (0.125, 0.5, 2.0):
            s = BackgroundState(t=t, a=t * t, a_dot=2 * t, rho=0.0, a_ddot=2.0)
            assert cosmo.friedmann_residuals(s, p) == (0.0, 0.0, 0.0)

    def test_perturbed_state_detected(self):
        s = cosmo.analytic_state(0.9, P03)
        bad = BackgroundState(s.t, 1.01 * s.a, s.a_dot, s.rho, s.a_ddot)
        assert abs(cosmo.friedmann_residuals(bad, P03)[0]) > 1e-3

    def test_missing_acceleration_gives_nan(self):
        s = BackgroundState(0.9, 0.7, 0.5, 1.0)
        r1, r2, r3 = cosmo.friedmann_residuals(s, P03)
        assert math.isfinite(r1) and math.isnan(r2) and math.isnan(r3)


class TestIntegration:
    def test_reaches_present(self):
        h = cosmo.integrate_background(P03, (0.68, 1.0), tol=1e-12)
        assert h.a[-1] == pytest.approx(1.0, abs=1e-10)

    def test_empty_model_grows_as_t_squared(self):
        h = cosmo.integrate_background(CosmologyParams(omega_m=0.0), (0.1, 1.0), tol=1e-12)
        assert h.a[-1] / h.a[0] == pytest.approx(100.0, rel=1e-10)

    @pytest.mark.parametrize("tol", [1e-8, 1e-10, 1e-12])
    @pytest.mark.parametrize("om", [0.0, 0.1, 0.3, 0.5])
    def test_oracle_equivalence(self, om, tol):
        p = CosmologyParams(omega_m=om)
        ts = np.linspace(p.t_in() + 1e-3, 2.0, 400)
        h = cosmo.integrate_background(p, (ts[0], ts[-1]), tol=tol, sample_t=ts)
        dev = np.abs(h.a / cosmo.scale_factor_analytic(ts, p) - 1.0)
        assert dev.max() <= 10 * tol

    @pytest.mark.parametrize("om", [0.1, 0.3, 0.5])
    def test_conservation_dust(self, om):
        p = CosmologyParams(omega_m=om)
        h = cosmo.integrate_background(p, (p.t_in() + 1e-3, 2.0), tol=1e-12, n_samples=500)
        assert h.conservation_drift() < 1e-9

    def test_conservation_radiation(self):
        p = CosmologyParams(omega_m=0.3, cs2=1.0 / 3.0)
        h = cosmo.integrate_from_present(p, 0.75, 2.0, tol=1e-12, n_samples=500)
        assert cosmo.conservation_exponents(p.cs2) == (4.0, 2.0)
        assert h.conservation_drift() < 1e-9

    @pytest.mark.parametrize("k", [-1, 1])
    def test_curved_models_stay_consistent(self, k):
        p = CosmologyParams(omega_m=0.3, k=k)
        h = cosmo.integrate_from_present(p, 0.8, 1.5, tol=1e-12, n_samples=50)
        assert h.conservation_drift() < 1e-9
        assert h.at(1.0).a == pytest.approx(1.0, abs=1e-15)

    def test_frozen_gauge_is_einstein_de_sitter(self):
        h = cosmo.integrate_background(P03, (0.01, 1.0), tol=1e-12, n_samples=300,
                                       freeze_gauge=True)
        slope = np.polyfit(np.log(h.t), np.log(h.a), 1)[0]
        assert slope == pytest.approx(2.0 / 3.0, abs=1e-6)
        r = cosmo.friedmann_residuals(h.samples[100], P03, freeze_gauge=True)
        assert max(map(abs, r)) < 1e-9

    def test_numeric_density_agrees(self):
        h = cosmo.integrate_background(P03, (0.7, 1.2), tol=1e-12)
        assert cosmo.density_from_friedmann(0.9, P03, history=h) == pytest.approx(
            cosmo.density_from_friedmann(0.9, P03), rel=1e-9)

    def test_non_flat_needs_initial_state(self):
        with pytest.raises(DomainError):
            cosmo.integrate_background(CosmologyParams(k=1), (0.8, 1.0))

    def test_start_before_big_bang(self):
        with pytest.raises(DomainError):
            cosmo.integrate_background(P03, (0.5, 1.0))

    @pytest.mark.parametrize("tol", [1e-15, 1e-2])
    def test_tolerance_range(self, tol):
        with pytest.raises(DomainError):
            cosmo.integrate_background(P03, (0.7, 1.0), tol=tol)

    def test_negative_density_rejected(self):
        with pytest.raises(DomainError, match="negative density"):
            cosmo.integrate_background(P03, (0.8, 1.0), initial=(0.5, 0.1))

    def test_collapse_detected(self):
        p = CosmologyParams(omega_m=0.3, k=1)
        with pytest.raises(DomainError, match="reached zero"):
            cosmo.integrate_background(p, (0.8, 50.0), initial=(0.5, 0.2))

    def test_dense_output_bounds(self):
        h = cosmo.integrate_background(P03, (0.7, 1.0))
        with pytest.raises(DomainError):
            h.at(1.5)


class TestTable:
    def test_anchors(self):
        tab = cosmo.expansion_table(P03, 3)
        last = dict(zip(cosmo.TABLE_COLUMNS, tab.rows()[-1]))
        assert len(tab) == 3
        assert last["t"] == 1.0 and last["lambda"] == 1.0
        assert last["tau"] == pytest.approx(13.8, rel=1e-15) and last["a"] == pytest.approx(1.0)

    def test_empty_model_start(self):
        tab = cosmo.expansion_table(CosmologyParams(omega_m=0.0), 2)
        assert tab.columns["t"][0] == pytest.approx(1e-6)

    def test_monotone(self):
        tab = cosmo.expansion_table(CosmologyParams(omega_m=0.5), 100)
        assert np.all(np.diff(tab.columns["a"]) > 0)

    def test_linear_tau_spacing(self):
        tab = cosmo.expansion_table(P03, 5, spacing="linear-tau")
        assert np.allclose(np.diff(tab.columns["tau"]), np.diff(tab.columns["tau"])[0], rtol=1e-9)

    def test_curved_table(self):
        tab = cosmo.expansion_table(CosmologyParams(k=-1), 10, t_min=0.75)
        assert tab.columns["a"][-1] == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        a = cosmo.expansion_table(P03, 50).rows()
        b = cosmo.expansion_table(P03, 50).rows()
        assert a == b

    @pytest.mark.parametrize("kw", [{"n_samples": 1}, {"n_samples": 5, "spacing": "log"},
                                    {"n_samples": 5, "t_min": 0.2}])
    def test_bad_arguments(self, kw):
        with pytest.raises(DomainError):
            cosmo.expansion_table(P03, **kw)
