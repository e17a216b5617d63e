"""Closed-form simple-wave solution in geometric coordinates ``(t, U)``.

In these coordinates ``R_plus(t, U) = R0(U)`` for all ``t`` and the inverse
foliation density is ``mu = g(U) (1 + t G(U))`` with ``g = n / c`` evaluated on
the data, so every quantity below is an explicit function of ``(t, U)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from ._numerics import FloatArray, central_derivative
from .errors import AtSingularity
from .fluid_state import simple_wave_scalars
from .seed_data import InitialData

SINGULARITY_TOL = 1e-13


@dataclass(frozen=True)
class DataScalars:
    """``g = n/c`` and its first two ``U`` derivatives together with ``G`` and its derivatives."""

    R: FloatArray
    dR: FloatArray
    g: FloatArray
    g_U: FloatArray
    g_UU: FloatArray
    G: FloatArray
    G_U: FloatArray
    G_UU: FloatArray


class GeometricSolution:
    """Evaluators of the exact solution on the data ``data``."""

    def __init__(self, data: InitialData) -> None:
        self.data = data
        self.eos = data.eos

    # ------------------------------------------------------------ data scalars

    def scalars(self, U: npt.ArrayLike) -> DataScalars:
        U = np.asarray(U, dtype=float)
        R, dR, d2R = self.data.R0_derivatives(U)
        sw = simple_wave_scalars(R, self.eos, order=2)
        g_U = sw.g_R * dR
        g_UU = sw.g_RR * dR**2 + sw.g_R * d2R
        return DataScalars(R, dR, sw.g, g_U, g_UU, self.data.G(U), self.data.G(U, 1), self.data.G(U, 2))

    def c_over_n(self, U: npt.ArrayLike) -> FloatArray:
        R = self.data.R0(np.asarray(U, dtype=float))
        return 1.0 / simple_wave_scalars(R, self.eos).g

    def n_over_c_derivative_fd(self, U: npt.ArrayLike, step: float = 1e-3) -> FloatArray:
        """Sixth-order finite-difference cross-check of ``d(n/c)/dU``."""
        return central_derivative(lambda u: 1.0 / self.c_over_n(u), U, step, order=6)

    # ------------------------------------------------------------ evaluators

    def R_plus(self, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        return self.data.R0(U)

    def mu(self, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        s = self.scalars(U)
        return s.g * (1.0 + t * s.G)

    def L_mu(self, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        s = self.scalars(U)
        return s.g * s.G

    def Xbreve_mu(self, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        s = self.scalars(U)
        return t * s.g * s.G_U + s.g_U * (1.0 + t * s.G)

    def XbreveXbreve_mu(self, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        s = self.scalars(U)
        return t * (s.g * s.G_UU + 2.0 * s.g_U * s.G_U) + s.g_UU * (1.0 + t * s.G)

    def partial1_Rplus(self, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
        """``-R0'(U) / (1 + t G(U))``; raises on the singular curve."""
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        _, dR, _ = self.data.R0_derivatives(U)
        denom = 1.0 + t * self.data.G(U)
        tol = SINGULARITY_TOL * np.maximum(1.0, t * self.data.delta_star)
        if np.any(np.abs(denom) < tol):
            i = int(np.argmin(np.abs(denom)))
            raise AtSingularity("1 + t G(U) vanishes", t=float(t.flat[i]), U=float(U.flat[i]))
        return -dR / denom

    def all_fields(self, t: npt.ArrayLike, U: npt.ArrayLike) -> dict[str, FloatArray]:
        """Every evaluator at once, sharing the data scalars; ``partial1_Rplus`` is NaN on the singular curve."""
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        s = self.scalars(U)
        one_plus = 1.0 + t * s.G
        singular = np.abs(one_plus) < SINGULARITY_TOL * np.maximum(1.0, t * self.data.delta_star)
        with np.errstate(divide="ignore", invalid="ignore"):
            d1 = np.where(singular, np.nan, -s.dR / np.where(singular, 1.0, one_plus))
        return {
            "t": t,
            "U": U,
            "R_plus": s.R,
            "mu": s.g * one_plus,
            "L_mu": s.g * s.G,
            "Xbreve_mu": t * s.g * s.G_U + s.g_U * one_plus,
            "XX_mu": t * (s.g * s.G_UU + 2.0 * s.g_U * s.G_U) + s.g_UU * one_plus,
            "partial1_Rplus": d1,
        }


def mu(sol: GeometricSolution, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
    return sol.mu(t, U)


def L_mu(sol: GeometricSolution, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
    return sol.L_mu(t, U)


def Xbreve_mu(sol: GeometricSolution, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
    return sol.Xbreve_mu(t, U)


def XbreveXbreve_mu(sol: GeometricSolution, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
    return sol.XbreveXbreve_mu(t, U)


def partial1_Rplus(sol: GeometricSolution, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
    return sol.partial1_Rplus(t, U)


# ---------------------------------------------------------------- sharp estimates


def sharp_estimate_report(sol: GeometricSolution, U_rad: float, n_t: int = 33) -> dict[str, Any]:
    """Grid check of the sign, size and Taylor structure of ``mu`` and ``G`` on ``|U| <= U_rad``.

    ``Lmu`` is certified in the form ``-delta/cmin <= Lmu <= -min|G|/cmax < 0``;
    the margin of the sharper upper bound ``-delta/cmax`` is reported but not
    required, because it is attained only at ``U = 0``.
    """
    data = sol.data
    T = data.T_shock
    delta = data.delta_star
    b = data.b_coeff
    cmin, cmax = data.c_over_n_min, data.c_over_n_max
    c0 = data.center
    grid = data.grid
    U = grid[np.abs(grid - c0) <= U_rad]
    V = U - c0
    report: dict[str, Any] = {"U_rad": U_rad, "center": c0}
    checks: dict[str, bool] = {}

    s = sol.scalars(U)
    checks["G_negative"] = bool(np.all(s.G < 0))
    checks["G_prime_sign"] = bool(np.all(s.G_U[V > 0] > 0) and np.all(s.G_U[V < 0] < 0))
    report["G_range"] = [float(np.min(s.G)), float(np.max(s.G))]

    Lmu = s.g * s.G
    report["L_mu_range"] = [float(np.min(Lmu)), float(np.max(Lmu))]
    report["L_mu_bounds"] = [-delta / cmin, -float(np.min(np.abs(s.G))) / cmax]
    report["L_mu_literal_upper_margin"] = float(-delta / cmax - np.max(Lmu))
    checks["L_mu_bracket"] = bool(np.min(Lmu) >= -delta / cmin * (1 + 1e-12) and np.max(Lmu) <= report["L_mu_bounds"][1] * (1 - 1e-12) and np.max(Lmu) < 0)

    one_plus = 1.0 + T * s.G
    xmu = T * s.g * s.G_U + s.g_U * one_plus
    sign = np.sign(xmu)
    change = np.flatnonzero(sign[:-1] * sign[1:] <= 0)
    zeros = 0.5 * (V[change] + V[change + 1])
    report["Xbreve_mu_zeros"] = (c0 + zeros).tolist()[:16]
    checks["Xbreve_mu_zero_location"] = bool(len(zeros) >= 1 and np.all(np.abs(zeros) <= U_rad / 4))
    band = np.abs(V) >= 0.5 * U_rad
    band_min = float(np.min(np.abs(xmu[band]))) if np.any(band) else float("inf")
    report["outer_band_min_abs_Xbreve_mu"] = band_min
    report["outer_band_bound"] = b * U_rad / 8
    checks["Xbreve_mu_outer_band"] = bool(band_min >= b * U_rad / 8)

    xxmu = T * (s.g * s.G_UU + 2.0 * s.g_U * s.G_U) + s.g_UU * one_plus
    report["XX_mu_range"] = [float(np.min(xxmu)), float(np.max(xxmu))]
    report["XX_mu_bounds"] = [0.5 / cmax * T * b, 2.0 / cmin * T * b]
    checks["XX_mu_bracket"] = bool(np.min(xxmu) >= report["XX_mu_bounds"][0] and np.max(xxmu) <= report["XX_mu_bounds"][1])

    outer = grid[np.abs(grid - c0) >= U_rad]
    if len(outer):
        # mu is affine in t, so its minimum over [0, T] is attained at an endpoint
        mu_outer = np.minimum(sol.mu(0.0, outer), sol.mu(T, outer))
        report["mu_min_outside"] = float(np.min(mu_outer))
    else:
        report["mu_min_outside"] = float("inf")
    checks["mu_positive_outside"] = bool(report["mu_min_outside"] > 0)

    ts = np.linspace(0.0, T, n_t)
    tt = ts[:, None]
    denom = 0.5 * b * V[None, :] ** 2 + delta * (T - tt)
    mu_grid = s.g[None, :] * (1.0 + tt * s.G[None, :])
    valid = denom > 0
    ratio = mu_grid[valid] / denom[valid]
    report["mu_taylor_bracket"] = [float(np.min(ratio)), float(np.max(ratio))]
    checks["mu_taylor_positive"] = bool(np.min(ratio) > 0 and np.isfinite(np.max(ratio)))

    nz = V != 0
    report["Lambda_brackets"] = {
        "G_plus_delta_over_U2": [float(np.min((s.G[nz] + delta) / V[nz] ** 2)), float(np.max((s.G[nz] + delta) / V[nz] ** 2))],
        "G_prime_over_U": [float(np.min(s.G_U[nz] / V[nz])), float(np.max(s.G_U[nz] / V[nz]))],
        "G_second": [float(np.min(s.G_UU)), float(np.max(s.G_UU))],
    }
    report["checks"] = checks
    report["passed"] = all(checks.values())
    return report


def verify_sharp_estimates(sol: GeometricSolution, n_t: int = 33) -> dict[str, Any]:
    """Report-only check of the sharp estimates on the certified region of ``sol.data``."""
    if sol.data.U_rad is None:
        from .seed_data import compute_U_rad

        sol = GeometricSolution(compute_U_rad(sol.data))
    return sharp_estimate_report(sol, sol.data.U_rad, n_t)
