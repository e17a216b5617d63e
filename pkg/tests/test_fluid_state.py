"""Plane-symmetric states: invariant maps, null frame, acoustical metric and simple-wave scalars."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from relshock.errors import DomainError
from relshock.fluid_state import (
    fluid_from_invariants,
    inner,
    invariants_from_fluid,
    metric_1d,
    null_frame,
    simple_wave_scalars,
)

invariant = st.floats(-1.0, 1.0)


def velocity_addition(v, c):
    """Lab-frame speed of a signal moving at c relative to a fluid moving at v."""
    return (v + c) / (1.0 + v * c)


class TestInvariantMaps:
    def test_constant_state_closed_form(self, eos):
        Rp = np.array([0.4, -0.2, 1.0])
        Rm = np.array([0.1, 0.3, -1.0])
        st_ = fluid_from_invariants(Rp, Rm, eos)
        a = 0.5 * (Rp - Rm)
        assert_allclose(st_.u0, np.cosh(a), rtol=1e-15)
        assert_allclose(st_.u1, np.sinh(a), rtol=1e-15)
        # F(H) = 2 ln H for c = 1/2
        assert_allclose(st_.H, np.exp(0.25 * (Rp + Rm)), rtol=1e-14)
        assert_allclose(st_.n_factor, np.cosh(a) ** 2 - 0.25 * np.sinh(a) ** 2, rtol=1e-14)

    def test_zero_invariants_give_reference_state(self, eos):
        st_ = fluid_from_invariants(0.0, 0.0, eos)
        assert float(st_.H) == 1.0 and float(st_.u1) == 0.0 and float(st_.n_factor) == 1.0

    @given(invariant, invariant)
    def test_round_trip_constant(self, Rp, Rm):
        from relshock.eos import default_eos

        e = default_eos()
        st_ = fluid_from_invariants(Rp, Rm, e)
        Rp2, Rm2 = invariants_from_fluid(st_.H, st_.u1, e)
        assert float(Rp2) == pytest.approx(Rp, abs=1e-12)
        assert float(Rm2) == pytest.approx(Rm, abs=1e-12)

    @given(invariant, invariant)
    def test_round_trip_polytropic(self, Rp, Rm):
        from relshock.eos import EquationOfState

        e = EquationOfState.polytropic(0.5, 0.3)
        st_ = fluid_from_invariants(Rp, Rm, e)
        Rp2, Rm2 = invariants_from_fluid(st_.H, st_.u1, e)
        assert float(Rp2) == pytest.approx(Rp, abs=1e-10)
        assert float(Rm2) == pytest.approx(Rm, abs=1e-10)

    def test_overflow_guard(self, eos):
        with pytest.raises(DomainError):
            fluid_from_invariants(np.array([60.0]), np.array([0.0]), eos)

    def test_non_finite_invariants(self, eos):
        with pytest.raises(DomainError):
            fluid_from_invariants(np.array([np.nan]), np.array([0.0]), eos)


class TestNullFrame:
    def test_speeds_are_relativistic_sums(self, eos):
        Rp = np.linspace(-1, 1, 9)
        Rm = -0.3 * Rp
        st_ = fluid_from_invariants(Rp, Rm, eos)
        fr = null_frame(st_)
        v = st_.u1 / st_.u0
        assert_allclose(fr.L1, velocity_addition(v, 0.5), rtol=1e-14)
        assert_allclose(fr.Lbar1, velocity_addition(v, -0.5), rtol=1e-14)
        assert_allclose(fr.X1, 0.5 * (fr.Lbar1 - fr.L1), rtol=1e-15)

    @given(invariant, invariant, st.floats(0.1, 3.0))
    def test_frame_vectors_are_null(self, Rp, Rm, mu):
        from relshock.eos import default_eos

        st_ = fluid_from_invariants(Rp, Rm, default_eos())
        h, h_inv = metric_1d(st_)
        fr = null_frame(st_, mu)
        scale = abs(float(inner(h, fr.L, fr.Lbar)))
        assert abs(float(inner(h, fr.L, fr.L))) <= 1e-12 * scale
        assert abs(float(inner(h, fr.Lbar, fr.Lbar))) <= 1e-12 * scale
        assert_allclose(fr.Xbreve[..., 1], mu * fr.X1, rtol=1e-15)

    def test_supersonic_flow_carries_both_families_downstream(self, eos):
        st_ = fluid_from_invariants(np.array([3.0]), np.array([-3.0]), eos)
        fr = null_frame(st_)
        assert float((st_.u1 / st_.u0)[0]) > 0.5
        assert 0.0 < float(fr.Lbar1[0]) < float(fr.L1[0]) < 1.0


class TestMetric:
    @given(invariant, invariant)
    def test_inverse_and_normalization(self, Rp, Rm):
        from relshock.eos import EquationOfState

        e = EquationOfState.polytropic(0.5, 0.3)
        st_ = fluid_from_invariants(Rp, Rm, e)
        h, h_inv = metric_1d(st_)
        assert_allclose(h @ h_inv, np.eye(2), atol=1e-12)
        assert float(h_inv[0, 0]) == pytest.approx(-1.0, abs=1e-12)
        assert float(inner(h, st_.u_upper, st_.u_upper)) == pytest.approx(-float(st_.n_factor), rel=1e-12)
        assert float(st_.u0**2 - st_.u1**2) == pytest.approx(1.0, abs=1e-12)


class TestSimpleWaveScalars:
    def test_reference_state(self, eos):
        sw = simple_wave_scalars(np.array([0.0]), eos)
        assert float(sw.g[0]) == pytest.approx(2.0, abs=1e-15)
        assert float(sw.L1[0]) == pytest.approx(0.5, abs=1e-15)
        assert float(sw.A_prime[0]) == pytest.approx(-0.375, abs=1e-15)

    @pytest.mark.parametrize("name,deriv,order", [("g", "g_R", 1), ("A_prime", "A_second", 1), ("g_R", "g_RR", 2), ("c_R", "c_RR", 2)])
    def test_derivatives_match_differences(self, polytropic_eos, name, deriv, order):
        R = np.linspace(-0.8, 0.8, 17)
        h = 1e-4
        plus = getattr(simple_wave_scalars(R + h, polytropic_eos, order), name)
        minus = getattr(simple_wave_scalars(R - h, polytropic_eos, order), name)
        exact = getattr(simple_wave_scalars(R, polytropic_eos, order), deriv)
        assert_allclose((plus - minus) / (2 * h), exact, atol=1e-7)

    def test_c_R_matches_differences(self, polytropic_eos):
        R = np.linspace(-0.8, 0.8, 17)
        h = 1e-5
        fd = (simple_wave_scalars(R + h, polytropic_eos).c - simple_wave_scalars(R - h, polytropic_eos).c) / (2 * h)
        assert_allclose(fd, simple_wave_scalars(R, polytropic_eos).c_R, atol=1e-9)

    def test_A_prime_is_minus_speed_derivative(self, polytropic_eos):
        R = np.linspace(-0.8, 0.8, 17)
        h = 1e-5
        fd = (simple_wave_scalars(R + h, polytropic_eos).L1 - simple_wave_scalars(R - h, polytropic_eos).L1) / (2 * h)
        assert_allclose(-fd, simple_wave_scalars(R, polytropic_eos).A_prime, atol=1e-9)
