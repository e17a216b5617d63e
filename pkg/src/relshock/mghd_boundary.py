"""Boundary of the classical development near the crease.

The boundary consists of the singular curve ``t = -1/G(U)`` for ``U`` at or
left of the crease, the crease point itself, and the Cauchy horizon for ``U``
right of the crease: the integral curve of ``dt/dU = mu/2`` issuing from the
crease.  Coordinates ``U`` are measured in absolute terms; the crease sits at
``data.center`` (0 for unshifted seeds).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.interpolate import CubicHermiteSpline

from ._numerics import FloatArray
from .errors import (
    CreaseDegeneracy,
    IntegrationFailure,
    MultipleCreasePoints,
    OutOfCertifiedRegion,
    PositiveG,
)
from .geo_solution import GeometricSolution

REGIONS = ("M_sing", "M_reg", "singular_boundary", "cauchy_horizon", "crease", "exterior")


def _require_U_rad(sol: GeometricSolution) -> float:
    if sol.data.U_rad is None:
        raise OutOfCertifiedRegion("initial data carry no certified half-width; run compute_U_rad first")
    return float(sol.data.U_rad)


# ---------------------------------------------------------------- singular curve


def singular_curve(sol: GeometricSolution, U: npt.ArrayLike) -> FloatArray:
    """``t_sing(U) = -1/G(U)``, the time at which ``mu`` vanishes on the line ``U``."""
    U = np.asarray(U, dtype=float)
    U_rad = _require_U_rad(sol)
    off = np.abs(U - sol.data.center) > U_rad * (1 + 1e-12)
    if np.any(off):
        raise OutOfCertifiedRegion("U lies outside the certified region", U=float(U[off].flat[0]), U_rad=U_rad)
    G = sol.data.G(U)
    if np.any(G >= 0):
        raise PositiveG("G(U) >= 0: mu never vanishes on this line", U=float(U[G >= 0].flat[0]))
    return -1.0 / G


def singular_curve_derivative(sol: GeometricSolution, U: npt.ArrayLike) -> FloatArray:
    """``d t_sing / dU = G'(U) / G(U)^2``."""
    U = np.asarray(U, dtype=float)
    singular_curve(sol, U)
    return sol.data.G(U, 1) / sol.data.G(U) ** 2


# ---------------------------------------------------------------- crease


@dataclass(frozen=True)
class CreasePoint:
    t: float
    U: float
    residual_mu: float
    residual_Xbreve_mu: float
    newton_iterations: int
    bracket: tuple[float, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "U": self.U,
            "residual_mu": self.residual_mu,
            "residual_Xbreve_mu": self.residual_Xbreve_mu,
            "newton_iterations": self.newton_iterations,
            "bracket": list(self.bracket),
        }


def crease(sol: GeometricSolution, n_grid: int = 4097, tol: float = 1e-10, max_iter: int = 50) -> CreasePoint:
    """Unique simultaneous zero of ``mu`` and ``Xbreve mu`` in the certified region.

    On the zero set of ``mu`` one has ``1 + tG = 0``, so ``Xbreve mu`` there
    reduces to ``-g G'/G``: cells bracketing a sign change of ``G'`` are the
    candidates.  The bracket is then refined by Newton's method on the pair
    ``(mu, Xbreve mu)`` with the analytic Jacobian.
    """
    U_rad = _require_U_rad(sol)
    c0 = sol.data.center
    U = np.linspace(c0 - U_rad, c0 + U_rad, n_grid)
    Gp = sol.data.G(U, 1)
    sign = np.sign(Gp)
    # exact zeros of G' on a node produce two adjacent flagged cells; merge them
    cells = np.flatnonzero(sign[:-1] * sign[1:] <= 0)
    groups: list[list[int]] = []
    for i in cells:
        if groups and i == groups[-1][-1] + 1:
            groups[-1].append(i)
        else:
            groups.append([int(i)])
    if len(groups) > 1:
        raise MultipleCreasePoints("more than one cell brackets a simultaneous zero", brackets=[[U[g[0]], U[g[-1] + 1]] for g in groups])
    if not groups:
        raise CreaseDegeneracy("no simultaneous zero of mu and Xbreve mu in the certified region")
    lo, hi = float(U[groups[0][0]]), float(U[groups[0][-1] + 1])

    u = 0.5 * (lo + hi)
    t = -1.0 / float(sol.data.G(np.array([u]))[0])
    for it in range(1, max_iter + 1):
        s = sol.scalars(np.array([u]))
        g, g_U, g_UU = s.g[0], s.g_U[0], s.g_UU[0]
        G, G_U, G_UU = s.G[0], s.G_U[0], s.G_UU[0]
        one_plus = 1.0 + t * G
        f1 = g * one_plus
        f2 = t * g * G_U + g_U * one_plus
        J = np.array([[g * G, f2], [g * G_U + g_U * G, t * (g * G_UU + 2.0 * g_U * G_U) + g_UU * one_plus]])
        dt, du = np.linalg.solve(J, [-f1, -f2])
        t += dt
        u += du
        if abs(dt) <= tol * max(1.0, abs(t)) and abs(du) <= tol:
            break
    else:
        raise IntegrationFailure("Newton iteration for the crease did not converge", t=t, U=u)
    res_mu = float(sol.mu(t, u))
    res_x = float(sol.Xbreve_mu(t, u))
    return CreasePoint(float(t), float(u), res_mu, res_x, it, (lo, hi))


# ---------------------------------------------------------------- Cauchy horizon


@dataclass(frozen=True)
class CauchyHorizon:
    """Tabulated horizon ``t_ch`` on ``[center, center + U_max]`` with cubic Hermite dense output."""

    U: FloatArray
    t: FloatArray
    slope: FloatArray
    mu: FloatArray
    substeps: int
    error_estimate: float
    T_shock: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "_offset", CubicHermiteSpline(self.U, self.t - self.T_shock, self.slope))

    def __call__(self, U: npt.ArrayLike) -> FloatArray:
        U = np.asarray(U, dtype=float)
        if np.any(U < self.U[0] - 1e-14) or np.any(U > self.U[-1] + 1e-14):
            raise OutOfCertifiedRegion("U outside the tabulated horizon", U_min=float(self.U[0]), U_max=float(self.U[-1]))
        return self.T_shock + self._offset(U)

    def offset(self, U: npt.ArrayLike) -> FloatArray:
        """``t_ch(U) - T_shock`` without cancellation."""
        return self._offset(np.asarray(U, dtype=float))

    def derivative(self, U: npt.ArrayLike) -> FloatArray:
        return self._offset.derivative()(np.asarray(U, dtype=float))


def _horizon_rk4(coefficients, nodes: FloatArray, m: int) -> FloatArray:
    """RK4 with ``m`` substeps per node interval for ``s' = a(U) + b(U) s``, ``s(nodes[0]) = 0``.

    The coefficients are evaluated once, vectorised, on every stage abscissa.
    """
    fine = np.linspace(nodes[0], nodes[-1], 2 * m * (len(nodes) - 1) + 1)
    a, b = coefficients(fine)
    h = 2.0 * (fine[1] - fine[0])
    s = 0.0
    out = np.empty(len(nodes))
    out[0] = 0.0
    for j in range(m * (len(nodes) - 1)):
        a0, a1, a2 = a[2 * j], a[2 * j + 1], a[2 * j + 2]
        b0, b1, b2 = b[2 * j], b[2 * j + 1], b[2 * j + 2]
        k1 = a0 + b0 * s
        k2 = a1 + b1 * (s + 0.5 * h * k1)
        k3 = a1 + b1 * (s + 0.5 * h * k2)
        k4 = a2 + b2 * (s + h * k3)
        s = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (j + 1) % m == 0:
            out[(j + 1) // m] = s
    return out


def cauchy_horizon(sol: GeometricSolution, U_max: float | None = None, n_nodes: int = 4096, rtol: float = 1e-12, max_halvings: int = 8) -> CauchyHorizon:
    """Integrate ``dt/dU = mu(t, U)/2`` from the crease.

    The unknown is the offset ``s = t - T_shock`` so the cubic onset of the
    horizon is resolved without cancellation.  The equation is affine in
    ``s``: ``s' = a + b s`` with ``a = g T (G + delta)/2`` and ``b = g G/2``.
    Substeps per node interval double until successive Richardson
    extrapolations agree to ``rtol`` relative to ``max |s|``.
    """
    U_rad = _require_U_rad(sol)
    U_max = U_rad if U_max is None else float(U_max)
    if U_max > U_rad * (1 + 1e-12) or U_max <= 0:
        raise OutOfCertifiedRegion("U_max must lie in (0, U_rad]", U_max=U_max, U_rad=U_rad)
    data = sol.data
    T = data.T_shock
    delta = data.delta_star
    nodes = data.center + np.linspace(0.0, U_max, n_nodes + 1)

    def coefficients(U: FloatArray) -> tuple[FloatArray, FloatArray]:
        g = sol.scalars(U).g
        G = data.G(U)
        return 0.5 * g * T * (G + delta), 0.5 * g * G

    m = 1
    coarse = _horizon_rk4(coefficients, nodes, m)
    previous = None
    for _ in range(max_halvings):
        fine = _horizon_rk4(coefficients, nodes, 2 * m)
        extrapolated = fine + (fine - coarse) / 15.0
        if previous is not None:
            err = float(np.max(np.abs(extrapolated - previous)) / max(np.max(np.abs(extrapolated)), 1e-300))
            if err <= rtol:
                break
        previous = extrapolated
        coarse = fine
        m *= 2
    else:
        raise IntegrationFailure("Cauchy horizon integration stalled", substeps=m, rtol=rtol)
    s = extrapolated
    t = T + s
    mu = sol.mu(t, nodes)
    return CauchyHorizon(nodes, t, 0.5 * mu, mu, 2 * m, err, T)


# ---------------------------------------------------------------- boundary bundle


@dataclass(frozen=True)
class MghdBoundary:
    sol: GeometricSolution
    crease: CreasePoint
    horizon: CauchyHorizon
    U_rad: float

    def t_sing(self, U: npt.ArrayLike) -> FloatArray:
        return singular_curve(self.sol, U)

    def t_ch(self, U: npt.ArrayLike) -> FloatArray:
        return self.horizon(U)

    def top(self, U: npt.ArrayLike) -> FloatArray:
        """Upper boundary of the closed region: singular curve left of the crease, horizon right of it."""
        U = np.asarray(U, dtype=float)
        c0 = self.sol.data.center
        out = np.empty_like(U)
        left = U <= c0
        if np.any(left):
            out[left] = singular_curve(self.sol, U[left])
        if np.any(~left):
            out[~left] = self.horizon(U[~left])
        return out

    def singular_table(self, n: int = 513) -> tuple[FloatArray, FloatArray]:
        c0 = self.sol.data.center
        U = np.linspace(c0 - self.U_rad, c0, n)
        return U, singular_curve(self.sol, U)

    def horizon_table(self) -> tuple[FloatArray, FloatArray, FloatArray]:
        return self.horizon.U, self.horizon.t, self.horizon.mu


def build_boundary(sol: GeometricSolution, n_nodes: int = 4096) -> MghdBoundary:
    U_rad = _require_U_rad(sol)
    return MghdBoundary(sol, crease(sol), cauchy_horizon(sol, U_rad, n_nodes), U_rad)


def classify(sol: GeometricSolution, boundary: MghdBoundary, t: npt.ArrayLike, U: npt.ArrayLike, tol: float = 1e-10) -> npt.NDArray[np.str_]:
    """Region tag of each point ``(t, U)``.

    Curve tags win within ``tol * max(1, t)``; the half-open membership of
    the boundary curves is a convention of the tag, not a numerical test.
    """
    t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
    c0 = sol.data.center
    V = U - c0
    U_rad = boundary.U_rad
    tags = np.full(t.shape, "exterior", dtype=object)
    scale = tol * np.maximum(1.0, np.abs(t))
    inside = (np.abs(V) <= U_rad * (1 + 1e-14)) & (t >= -scale)
    left = inside & (V <= 0)
    right = inside & (V > 0)
    if np.any(left):
        ts = singular_curve(sol, U[left])
        tl = t[left]
        tag = np.where(tl < ts - scale[left], "M_sing", np.where(np.abs(tl - ts) <= scale[left], "singular_boundary", "exterior"))
        tags[left] = tag
    if np.any(right):
        tc = boundary.t_ch(np.minimum(U[right], boundary.horizon.U[-1]))
        tr = t[right]
        tag = np.where(tr < tc - scale[right], "M_reg", np.where(np.abs(tr - tc) <= scale[right], "cauchy_horizon", "exterior"))
        tags[right] = tag
    at_crease = (np.abs(V - (boundary.crease.U - c0)) <= tol) & (np.abs(t - boundary.crease.t) <= scale)
    tags[at_crease] = "crease"
    return tags.astype(str)


# ---------------------------------------------------------------- tangent field


def Q_on_singular_curve(sol: GeometricSolution, U: npt.ArrayLike) -> FloatArray:
    """``Q = d/dt + (G^2/G') d/dU`` in geometric components ``(Q t, Q U)``.

    ``Q`` is tangent to the singular curve, since ``d t_sing/dU = G'/G^2``.
    """
    U = np.asarray(U, dtype=float)
    singular_curve(sol, U)
    Gp = sol.data.G(U, 1)
    if np.any(np.abs(Gp) <= 1e-14 * sol.data.delta_star):
        raise CreaseDegeneracy("G' vanishes: the tangent field degenerates at the crease")
    G = sol.data.G(U)
    return np.stack([np.ones_like(U), G**2 / Gp], axis=-1)


def singular_curve_expansion(sol: GeometricSolution, n: int = 256) -> dict[str, Any]:
    """Power fits of ``t_sing - T_shock`` and ``d t_sing/dU`` on the left branch."""
    from ._numerics import loglog_fit

    U_rad = _require_U_rad(sol)
    c0 = sol.data.center
    V = -np.geomspace(1e-3 * U_rad, 0.1 * U_rad, n)
    U = c0 + V
    G = sol.data.G(U)
    offset = -(G + sol.data.delta_star) / (G * sol.data.delta_star)
    fit_t = loglog_fit(V, offset, 1e-3 * U_rad, 0.1 * U_rad)
    fit_d = loglog_fit(V, singular_curve_derivative(sol, U), 1e-3 * U_rad, 0.1 * U_rad)
    return {"offset": fit_t, "derivative": fit_d}
