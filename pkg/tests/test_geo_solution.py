"""Closed-form solution in geometric coordinates: mu, its frame derivatives and the sharp estimates."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from relshock._numerics import central_derivative
from relshock.errors import AtSingularity
from relshock.fluid_state import fluid_from_invariants
from relshock.geo_solution import sharp_estimate_report, verify_sharp_estimates


def mu_on_plateau(t, U, eos):
    """mu = (n/c)(1 + t G) with G = (U^2/2 - 1)/10 and R0 from the closed-form inverse of A."""
    y = 0.1 * (-U + U**3 / 6.0)
    R = 2.0 * np.arctanh(2.0 * (1.5 / (y + 1.5) - 1.0))
    state = fluid_from_invariants(R, np.zeros_like(R), eos)
    return state.n_factor / state.c * (1.0 + t * 0.1 * (0.5 * U**2 - 1.0))


class TestMu:
    def test_initial_value_is_n_over_c(self, sol):
        U = np.linspace(-1.9, 1.9, 39)
        assert_allclose(sol.mu(0.0, U), 1.0 / sol.c_over_n(U), rtol=1e-15)

    def test_reference_state_outside_support(self, sol):
        # R0 = 0, G = 0: n/c = 2 for c = 1/2, and mu never changes
        assert_allclose(sol.mu(np.array([0.0, 7.0, 30.0]), 2.5), 2.0, rtol=1e-15)

    def test_matches_independent_plateau_formula(self, sol, eos):
        t = np.linspace(0.0, 10.0, 11)[:, None]
        U = np.linspace(-1.0, 1.0, 41)[None, :]
        assert_allclose(sol.mu(t, U), mu_on_plateau(t, U, eos), rtol=0, atol=1e-11)

    def test_vanishes_at_crease(self, sol):
        assert abs(float(sol.mu(10.0, 0.0))) <= 1e-15

    @given(st.floats(0.0, 12.0), st.floats(0.0, 12.0), st.floats(0.0, 1.0), st.floats(-1.9, 1.9))
    def test_affine_in_time(self, t1, t2, a, U):
        mix = a * t1 + (1 - a) * t2
        lhs = float(self.sol.mu(mix, U))
        rhs = a * float(self.sol.mu(t1, U)) + (1 - a) * float(self.sol.mu(t2, U))
        assert lhs == pytest.approx(rhs, abs=1e-13)

    @pytest.fixture(autouse=True)
    def _bind(self, sol):
        self.sol = sol


class TestFrameDerivatives:
    T = np.linspace(0.0, 11.0, 12)[:, None]
    U = np.linspace(-1.8, 1.8, 37)[None, :]

    def test_L_mu_is_time_derivative(self, sol):
        fd = (sol.mu(self.T + 0.5, self.U) - sol.mu(self.T - 0.5, self.U)) / 1.0
        assert_allclose(sol.L_mu(self.T, self.U), fd, atol=1e-14)

    def test_Xbreve_mu_is_U_derivative(self, sol):
        fd = central_derivative(lambda u: sol.mu(self.T, u), np.broadcast_to(self.U, (12, 37)), 1e-3, order=6)
        assert_allclose(sol.Xbreve_mu(self.T, self.U), fd, atol=1e-9)

    def test_XX_mu_is_second_U_derivative(self, sol):
        fd = central_derivative(lambda u: sol.Xbreve_mu(self.T, u), np.broadcast_to(self.U, (12, 37)), 1e-3, order=6)
        assert_allclose(sol.XbreveXbreve_mu(self.T, self.U), fd, atol=1e-8)

    def test_g_derivative_cross_check(self, sol):
        U = np.linspace(-1.8, 1.8, 37)
        assert_allclose(sol.scalars(U).g_U, sol.n_over_c_derivative_fd(U), atol=1e-10)

    def test_all_fields_agrees_with_evaluators(self, sol):
        f = sol.all_fields(self.T, self.U)
        assert_allclose(f["mu"], sol.mu(self.T, self.U), rtol=0, atol=0)
        assert_allclose(f["XX_mu"], sol.XbreveXbreve_mu(self.T, self.U), rtol=0, atol=0)


class TestTransversalDerivative:
    def test_formula(self, sol, data):
        t = np.array([0.0, 3.0, 9.0])[:, None]
        U = np.linspace(-1.5, 1.5, 13)[None, :]
        _, dR, _ = data.R0_derivatives(U)
        assert_allclose(sol.partial1_Rplus(t, U), -dR / (1.0 + t * data.G(U)), rtol=1e-15)

    def test_raises_on_singular_curve(self, sol):
        with pytest.raises(AtSingularity) as info:
            sol.partial1_Rplus(10.0, 0.0)
        assert info.value.details["U"] == 0.0

    def test_all_fields_marks_singular_points(self, sol):
        f = sol.all_fields(np.array([10.0, 5.0]), np.array([0.0, 0.0]))
        assert np.isnan(f["partial1_Rplus"][0]) and np.isfinite(f["partial1_Rplus"][1])


class TestSharpEstimates:
    def test_default_region_certified(self, sol):
        report = verify_sharp_estimates(sol)
        assert report["passed"], report["checks"]
        assert report["U_rad"] == 0.99

    def test_wide_region_not_certified(self, sol):
        # beyond the plateau G' changes sign, so the estimates cannot hold
        assert not sharp_estimate_report(sol, 1.9)["passed"]

    def test_lmu_bracket(self, sol, data):
        rep = sharp_estimate_report(sol, 0.99)
        lo, hi = rep["L_mu_range"]
        assert -data.delta_star / data.c_over_n_min <= lo <= hi < 0
