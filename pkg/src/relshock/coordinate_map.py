"""Change of variables from geometric coordinates ``(t, U)`` to rectangular ``(t, x1)``.

Every line ``U = const`` is a straight characteristic with slope ``L1(U)``
issuing from ``x1 = -U``, hence ``x1(t, U) = -U + t L1(U)`` and
``d x1 / dU = -(1 + t G(U))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.spatial import cKDTree

from ._numerics import FloatArray, loglog_fit
from .errors import NotInImage
from .fluid_state import simple_wave_scalars
from .geo_solution import GeometricSolution
from .mghd_boundary import MghdBoundary, singular_curve

TABLE_SIZE = 4097


class NearSingularWarning(RuntimeWarning):
    """The inverse was evaluated where the Jacobian determinant is almost zero."""


@dataclass
class CoordinateMap:
    """``Upsilon(t, U) = (t, x1)`` with Jacobian and a tabulated inverse.

    ``U_range`` bounds the geometric coordinate for ``t <= T_shock``; it
    defaults to the certified region and may be widened for comparisons with
    rectangular solvers before the shock time.  For ``t > T_shock`` the
    admissible set is the part of the certified region below the singular
    curve and the Cauchy horizon.
    """

    sol: GeometricSolution
    boundary: MghdBoundary | None = None
    U_range: tuple[float, float] | None = None
    _tables: dict[float, list[tuple[FloatArray, FloatArray]]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        data = self.sol.data
        if self.U_range is None:
            if data.U_rad is None:
                raise NotInImage("no certified region: supply U_range or certify the data")
            self.U_range = (data.center - data.U_rad, data.center + data.U_rad)

    # ------------------------------------------------------------ forward map

    def L1(self, U: npt.ArrayLike) -> FloatArray:
        R = self.sol.data.R0(np.asarray(U, dtype=float))
        return simple_wave_scalars(R, self.sol.eos).L1

    def x1(self, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        return -U + t * self.L1(U)

    def upsilon(self, t: npt.ArrayLike, U: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        return t, self.x1(t, U)

    def jacobian_det(self, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
        """``det d Upsilon = d x1 / dU = -(c/n) mu = -(1 + t G)``."""
        t, U = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(U, dtype=float))
        return -(1.0 + t * self.sol.data.G(U))

    # ------------------------------------------------------------ inverse

    def admissible_pieces(self, t: float) -> list[tuple[float, float]]:
        """Intervals of ``U`` where ``(t, U)`` lies in the closed development region."""
        data = self.sol.data
        lo, hi = self.U_range
        T = data.T_shock
        if t < 0:
            return []
        if t <= T:
            return [(lo, hi)]
        if data.U_rad is None or self.boundary is None:
            raise NotInImage("t beyond the shock time needs the boundary of the development", t=t)
        c0 = data.center
        U_rad = data.U_rad
        pieces = []
        left_edge = c0 - U_rad
        if t < float(singular_curve(self.sol, left_edge)):
            # 1 + t G(U) = 0 on the left branch; G is increasing toward the edge there
            U_a = _bisect(lambda u: 1.0 + t * float(data.G(np.array([u]))[0]), left_edge, c0)
            pieces.append((left_edge, U_a))
        right_edge = c0 + U_rad
        horizon = self.boundary.horizon
        if t < float(horizon(right_edge)):
            U_b = _bisect(lambda u: float(horizon(np.array([u]))[0]) - t, c0, right_edge)
            pieces.append((U_b, right_edge))
        return pieces

    def _table(self, t: float) -> list[tuple[FloatArray, FloatArray]]:
        hit = self._tables.get(t)
        if hit is None:
            hit = []
            for a, b in self.admissible_pieces(t):
                U = np.linspace(a, b, TABLE_SIZE)
                hit.append((U, self.x1(t, U)))
            if len(self._tables) > 4096:
                self._tables.clear()
            self._tables[t] = hit
        return hit

    def upsilon_inverse(self, t: npt.ArrayLike, x1: npt.ArrayLike, rtol: float = 1e-10, missing: str = "raise") -> FloatArray:
        """The unique ``U`` with ``x1(t, U) = x1`` inside the admissible region.

        Points without a preimage raise ``NotInImage``, or become NaN when
        ``missing="nan"``.
        """
        t, x1 = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x1, dtype=float))
        out = np.empty(t.shape)
        flat_t = t.ravel()
        flat_x = x1.ravel()
        flat_out = out.reshape(-1)
        for tv in np.unique(flat_t):
            idx = np.flatnonzero(flat_t == tv)
            flat_out[idx] = self._invert_slice(float(tv), flat_x[idx], rtol, missing == "raise")
        return out

    def _invert_slice(self, t: float, x: FloatArray, rtol: float, strict: bool) -> FloatArray:
        tables = self._table(t)
        result = np.full(x.shape, np.nan)
        for U_tab, x_tab in tables:
            # x_tab is decreasing in U
            xmin, xmax = x_tab[-1], x_tab[0]
            slack = rtol * (1.0 + np.abs(x))
            sel = np.isnan(result) & (x >= xmin - slack) & (x <= xmax + slack)
            if not np.any(sel):
                continue
            xs = np.clip(x[sel], xmin, xmax)
            k = np.searchsorted(-x_tab, -xs)
            k = np.clip(k, 1, len(U_tab) - 1)
            a = U_tab[k - 1].copy()
            b = U_tab[k].copy()
            u = a + (b - a) * (x_tab[k - 1] - xs) / np.where(x_tab[k - 1] != x_tab[k], x_tab[k - 1] - x_tab[k], 1.0)
            for _ in range(60):
                f = self.x1(t, u) - xs
                df = self.jacobian_det(t, u)
                # keep the bracket [a, b] with f(a) >= 0 >= f(b)
                a = np.where(f > 0, u, a)
                b = np.where(f <= 0, u, b)
                with np.errstate(divide="ignore", invalid="ignore"):
                    step = u - f / df
                bad = ~np.isfinite(step) | (step <= np.minimum(a, b)) | (step >= np.maximum(a, b))
                u_new = np.where(bad, 0.5 * (a + b), step)
                with np.errstate(divide="ignore", invalid="ignore"):
                    small_step = np.abs(f / df) <= 1e-14 * (1.0 + np.abs(u))
                done = small_step | (np.abs(f) <= 1e-16 * (1.0 + np.abs(xs)))
                u = np.where(done, u, u_new)
                if np.all(done):
                    break
            result[sel] = u
        missing = np.isnan(result)
        if strict and np.any(missing):
            raise NotInImage("point has no preimage in the admissible region", t=t, x1=float(x[missing][0]))
        found = result[~missing]
        jac = np.abs(self.jacobian_det(t, found))
        if np.any(jac < 1e-8):
            warnings.warn(f"inverse evaluated where |det| < 1e-8 at t={t}", NearSingularWarning, stacklevel=3)
        return result


def _bisect(f, a: float, b: float, iters: int = 200) -> float:
    """Root of ``f`` on ``[a, b]`` given ``f(a) >= 0 >= f(b)`` or the reverse; ``a`` if ``f(a) = 0``."""
    fa = f(a)
    if fa == 0.0:
        return a
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0 or b - a <= 4e-16 * max(1.0, abs(m)):
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def upsilon(cmap: CoordinateMap, t: npt.ArrayLike, U: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
    return cmap.upsilon(t, U)


def jacobian_det(cmap: CoordinateMap, t: npt.ArrayLike, U: npt.ArrayLike) -> FloatArray:
    return cmap.jacobian_det(t, U)


def upsilon_inverse(cmap: CoordinateMap, t: npt.ArrayLike, x1: npt.ArrayLike) -> FloatArray:
    return cmap.upsilon_inverse(t, x1)


# ---------------------------------------------------------------- injectivity audit


def top_boundary_x1_derivative(cmap: CoordinateMap, U: npt.ArrayLike) -> FloatArray:
    """``d/dU x1(top(U), U)``: ``t_sing' L1`` on the singular curve and ``-mu (c/n - L1/2)`` on the horizon."""
    assert cmap.boundary is not None
    U = np.asarray(U, dtype=float)
    c0 = cmap.sol.data.center
    out = np.empty_like(U)
    left = U <= c0
    L1 = cmap.L1(U)
    if np.any(left):
        G = cmap.sol.data.G(U[left])
        out[left] = cmap.sol.data.G(U[left], 1) / G**2 * L1[left]
    if np.any(~left):
        Ur = U[~left]
        t = cmap.boundary.t_ch(Ur)
        mu = cmap.sol.mu(t, Ur)
        out[~left] = -mu * (cmap.sol.c_over_n(Ur) - 0.5 * L1[~left])
    return out


def injectivity_audit(cmap: CoordinateMap, boundary: MghdBoundary | None = None, n: int = 200, n_slices: int = 64) -> dict[str, Any]:
    """Grid evidence that ``Upsilon`` is injective on the closed development region."""
    boundary = boundary or cmap.boundary
    assert boundary is not None
    if cmap.boundary is None:
        cmap.boundary = boundary
    data = cmap.sol.data
    c0 = data.center
    U_rad = boundary.U_rad
    T = data.T_shock
    report: dict[str, Any] = {}
    checks: dict[str, bool] = {}

    # (i) slices at fixed t
    t_top = max(float(singular_curve(cmap.sol, c0 - U_rad)), float(boundary.t_ch(c0 + U_rad)))
    slice_ok = True
    disjoint_ok = True
    worst = -np.inf
    for t in np.linspace(0.0, t_top, n_slices):
        images = []
        for a, b in cmap.admissible_pieces(float(t)):
            U = np.linspace(a, b, 513)
            x = cmap.x1(t, U)
            d = np.diff(x)
            worst = max(worst, float(np.max(d)))
            slice_ok &= bool(np.all(d < 0))
            images.append((x[-1], x[0]))
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                overlap = min(images[i][1], images[j][1]) - max(images[i][0], images[j][0])
                disjoint_ok &= bool(overlap < 0)
    checks["slices_strictly_decreasing"] = slice_ok
    checks["slice_images_disjoint"] = disjoint_ok
    report["max_slice_increment"] = worst

    # (ii) top boundary
    U_top = np.linspace(c0 - U_rad, c0 + U_rad, 2 * n + 1)
    x_top = cmap.x1(boundary.top(U_top), U_top)
    checks["top_boundary_decreasing"] = bool(np.all(np.diff(x_top) < 0))
    Vl = -np.geomspace(1e-3 * U_rad, 0.1 * U_rad, 128)
    Vr = np.geomspace(1e-3 * U_rad, 0.1 * U_rad, 128)
    fit_sing = loglog_fit(Vl, top_boundary_x1_derivative(cmap, c0 + Vl), 1e-3 * U_rad, 0.1 * U_rad)
    fit_ch = loglog_fit(Vr, top_boundary_x1_derivative(cmap, c0 + Vr), 1e-3 * U_rad, 0.1 * U_rad)
    report["dx1_dU_singular_fit"] = {"exponent": fit_sing.exponent, "coefficient": fit_sing.coefficient}
    report["dx1_dU_horizon_fit"] = {"exponent": fit_ch.exponent, "coefficient": fit_ch.coefficient}

    # (iii) collisions on an n x n grid of columns below the top boundary
    U_cols = np.linspace(c0 - U_rad, c0 + U_rad, n)
    frac = np.linspace(0.0, 1.0, n)
    tt = boundary.top(U_cols)[None, :] * frac[:, None]
    UU = np.broadcast_to(U_cols, tt.shape)
    xx = cmap.x1(tt, UU)
    pts = np.column_stack([tt.ravel(), xx.ravel()])
    diameter = float(np.hypot(np.ptp(pts[:, 0]), np.ptp(pts[:, 1])))
    pairs = cKDTree(pts).query_pairs(1e-9 * diameter)
    report["collision_pairs"] = len(pairs)
    report["collision_tolerance"] = 1e-9 * diameter
    checks["no_collisions"] = len(pairs) == 0
    report["T_shock"] = T
    report["checks"] = checks
    report["passed"] = all(checks.values())
    return report
