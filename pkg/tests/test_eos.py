"""Equation of state: closed-form oracles for F and A, inverses, configuration errors."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from relshock.eos import EquationOfState, default_eos
from relshock.errors import ConfigError, DomainError, HyperbolicityError, OutOfRangeError


def F_constant(H, c):
    """dF/dH = 1/(H c) with F(1) = 0 for constant c."""
    return np.log(H) / c


def F_polytropic(H, c_bar, kappa):
    """dF/dH = 1/(c_bar H^(1+kappa)) with F(1) = 0."""
    return (1.0 - H ** (-kappa)) / (kappa * c_bar)


def A_constant(R, c):
    """Antiderivative of -(1 - c^2) / (2 (cosh(R/2) + c sinh(R/2))^2) vanishing at 0.

    With w = tanh(R/2) the integrand becomes -(1 - c^2) dw / (1 + c w)^2.
    """
    w = np.tanh(0.5 * R)
    return (1.0 - c * c) / c * (1.0 / (1.0 + c * w) - 1.0)


class TestConstantSpeed:
    def test_default_is_half_speed(self):
        e = default_eos()
        assert e.kind == "constant"
        assert_allclose(e.c(np.array([0.3, 1.0, 7.0])), 0.5)
        assert e.H_bar == 1.0

    def test_F_matches_logarithm(self, eos):
        H = np.geomspace(0.06, 19.0, 101)
        assert_allclose(eos.F(H), F_constant(H, 0.5), rtol=0, atol=1e-13)

    def test_F_inv_is_exact_exponential(self, eos):
        y = np.linspace(-3.0, 3.0, 61)
        assert_allclose(eos.F_inv(y), np.exp(0.5 * y), rtol=1e-15)

    def test_nondegeneracy_factor(self, eos):
        # 1 - c^2 + c H c' with c' = 0
        assert eos.nondegeneracy_factor() == pytest.approx(0.75, abs=1e-15)

    def test_A_matches_closed_form(self, eos):
        R = np.linspace(-1.5, 1.5, 121)
        assert_allclose(eos.antiderivative_A(R), A_constant(R, 0.5), rtol=0, atol=1e-13)

    def test_A_integrand_at_origin(self, eos):
        # -(1 - c^2)/2 at R = 0
        assert eos.A_integrand(np.array([0.0]))[0] == pytest.approx(-0.375, abs=1e-15)

    def test_A_inv_against_closed_form(self, eos):
        # invert 1.5/(1 + w/2) - 1.5 = y by hand
        y = np.linspace(-0.4, 0.4, 41)
        w = 2.0 * (1.5 / (y + 1.5) - 1.0)
        assert_allclose(eos.A_inv(y), 2.0 * np.arctanh(w), rtol=0, atol=1e-11)

    def test_F_inv_out_of_range(self, eos):
        lo, hi = eos.F_range()
        with pytest.raises(OutOfRangeError):
            eos.F_inv(np.array([hi + 1.0]))

    def test_enthalpy_outside_domain(self, eos):
        with pytest.raises(DomainError):
            eos.c(np.array([100.0]))
        with pytest.raises(DomainError):
            eos.F(np.array([-1.0]))

    def test_speed_outside_unit_interval(self):
        with pytest.raises(HyperbolicityError):
            EquationOfState.constant(1.5)


class TestPolytropic:
    def test_F_matches_closed_form(self, polytropic_eos):
        H = np.geomspace(0.26, 3.9, 81)
        assert_allclose(polytropic_eos.F(H), F_polytropic(H, 0.5, 0.3), rtol=0, atol=1e-12)

    def test_nondegeneracy_factor(self, polytropic_eos):
        # 1 - c^2 + c H c' = 1 - c^2 + kappa c^2 at H_bar
        assert polytropic_eos.nondegeneracy_factor() == pytest.approx(1 - 0.25 + 0.3 * 0.25, abs=1e-15)

    def test_almost_riemann_F_reduces_to_F_at_zero_entropy(self, polytropic_eos):
        H = np.geomspace(0.3, 3.5, 17)
        assert_allclose(polytropic_eos.almost_riemann_F(H, 0.0), F_polytropic(H, 0.5, 0.3), atol=1e-11)

    def test_almost_riemann_F_entropy_scaling(self):
        # c = c_bar H^kappa e^(sigma s) scales F by e^(-sigma s)
        e = EquationOfState.polytropic(0.5, 0.3, sigma=0.2)
        H = np.geomspace(0.3, 3.5, 9)
        s = 0.7
        assert_allclose(e.almost_riemann_F(H, s), np.exp(-0.2 * s) * F_polytropic(H, 0.5, 0.3), atol=1e-11)

    @given(st.floats(-1.2, 1.2))
    def test_F_round_trip(self, y):
        e = EquationOfState.polytropic(0.5, 0.3)
        assert float(e.F(e.F_inv(np.array([y])))[0]) == pytest.approx(y, abs=1e-10)

    @given(st.floats(-0.3, 0.3))
    def test_A_round_trip(self, y):
        e = EquationOfState.polytropic(0.5, 0.3)
        assert float(e.antiderivative_A(e.A_inv(np.array([y])))[0]) == pytest.approx(y, abs=1e-10)

    def test_A_derivative_matches_integrand(self, polytropic_eos):
        R = np.linspace(-1.0, 1.0, 21)
        h = 1e-4
        fd = (polytropic_eos.antiderivative_A(R + h) - polytropic_eos.antiderivative_A(R - h)) / (2 * h)
        assert_allclose(fd, polytropic_eos.A_integrand(R), atol=1e-8)


class TestTabulated:
    def test_spline_through_constant_table(self):
        H = np.geomspace(0.1, 10.0, 12)
        e = EquationOfState.tabulated(H, np.full(12, 0.4))
        assert_allclose(e.F(np.array([2.0])), np.log(2.0) / 0.4, atol=1e-12)

    def test_rejects_unsorted_nodes(self):
        with pytest.raises(ConfigError):
            EquationOfState.tabulated([1, 0.5, 2, 3], [0.5] * 4)

    def test_rejects_short_table(self):
        with pytest.raises(ConfigError):
            EquationOfState.tabulated([0.5, 1, 2], [0.5] * 3)


class TestFromMapping:
    def test_constant_kind(self):
        e = EquationOfState.from_mapping({"kind": "constant", "c_bar": "0.4"})
        assert float(e.c(np.array([1.0]))[0]) == 0.4

    def test_polytropic_kind_with_thermodynamics(self):
        e = EquationOfState.from_mapping({"kind": "polytropic", "c_bar": "0.5", "kappa": "0.3", "theta_bar": "1.5"})
        assert e.has_q
        assert e.params["kappa"] == 0.3

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            EquationOfState.from_mapping({"kind": "stiffened"})

    def test_non_numeric_value(self):
        with pytest.raises(ConfigError):
            EquationOfState.from_mapping({"kind": "constant", "c_bar": "half"})

    def test_file_without_section(self, tmp_path):
        path = tmp_path / "eos.ini"
        path.write_text("[other]\nx = 1\n")
        with pytest.raises(ConfigError):
            EquationOfState.from_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            EquationOfState.from_file(tmp_path / "absent.ini")
