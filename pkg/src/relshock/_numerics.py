"""Shared numerical building blocks.

Fixed-step RK4 with step halving and Richardson acceptance, cumulative
quadrature tables, safeguarded Newton inversion of monotone functions,
central finite-difference stencils and log-log slope fits.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import IntegrationFailure, OutOfRangeError

FloatArray = npt.NDArray[np.float64]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def rk4_step(f: Callable[[float, FloatArray], FloatArray], t: float, y: FloatArray, dt: float) -> FloatArray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_fixed(f, t_nodes: FloatArray, y0: FloatArray, substeps: int) -> FloatArray:
    out = np.empty((len(t_nodes),) + np.shape(y0))
    y = np.array(y0, dtype=float)
    out[0] = y
    for i in range(len(t_nodes) - 1):
        t = t_nodes[i]
        dt = (t_nodes[i + 1] - t) / substeps
        for j in range(substeps):
            y = rk4_step(f, t + j * dt, y, dt)
        out[i + 1] = y
    return out


@dataclass(frozen=True)
class RK4Solution:
    """Node values of an RK4 solve accepted by the halving test."""

    t: FloatArray
    y: FloatArray
    substeps: int
    error_estimate: float


def rk4_halving(
    f: Callable[[float, FloatArray], FloatArray],
    t_nodes: FloatArray,
    y0: FloatArray,
    rtol: float = 1e-12,
    atol: float = 0.0,
    max_halvings: int = 14,
) -> RK4Solution:
    """Integrate ``y' = f(t, y)`` and report values on ``t_nodes``.

    Each node interval is split into ``m`` RK4 substeps; ``m`` doubles until
    two successive Richardson-extrapolated node tables agree to
    ``rtol * max(1, |y|) + atol``.
    """
    t_nodes = np.asarray(t_nodes, dtype=float)
    m = 1
    coarse = _rk4_fixed(f, t_nodes, y0, m)
    previous_extrapolated = None
    for _ in range(max_halvings):
        fine = _rk4_fixed(f, t_nodes, y0, 2 * m)
        extrapolated = fine + (fine - coarse) / 15.0
        if previous_extrapolated is not None:
            scale = np.maximum(1.0, np.abs(extrapolated))
            err = float(np.max(np.abs(extrapolated - previous_extrapolated) / scale))
            if err <= rtol + atol:
                return RK4Solution(t_nodes, extrapolated, 2 * m, err)
        previous_extrapolated = extrapolated
        coarse = fine
        m *= 2
    raise IntegrationFailure(
        "RK4 step halving did not reach the requested tolerance",
        substeps=m,
    )


def cumulative_quadrature(
    integrand: Callable[[FloatArray], FloatArray],
    nodes: FloatArray,
    rtol: float = 1e-12,
    max_halvings: int = 14,
) -> FloatArray:
    """Running integral of ``integrand`` from ``nodes[0]`` to every node.

    This is RK4 applied to ``y' = g(x)``, vectorised over all node intervals
    (each RK4 step is then Simpson's rule), with the same halving rule as
    :func:`rk4_halving`.
    """
    nodes = np.asarray(nodes, dtype=float)
    left = nodes[:-1]
    width = np.diff(nodes)

    def table(m: int) -> FloatArray:
        s = np.linspace(0.0, 1.0, 2 * m + 1)
        x = left[:, None] + width[:, None] * s[None, :]
        g = integrand(x)
        w = np.full(2 * m + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        panel = (g @ w) * width / (6.0 * m)
        return np.concatenate([[0.0], np.cumsum(panel)])

    m = 1
    coarse = table(m)
    previous = None
    for _ in range(max_halvings):
        fine = table(2 * m)
        extrapolated = fine + (fine - coarse) / 15.0
        if previous is not None:
            scale = np.maximum(1.0, np.abs(extrapolated))
            if np.max(np.abs(extrapolated - previous) / scale) <= rtol:
                return extrapolated
        previous = extrapolated
        coarse = fine
        m *= 2
    raise IntegrationFailure("cumulative quadrature did not converge", substeps=m)


def gauss_increment(integrand: Callable[[FloatArray], FloatArray], a: FloatArray, b: FloatArray) -> FloatArray:
    """Integral of ``integrand`` over ``[a, b]`` elementwise (10-point Gauss-Legendre)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[..., None] + half[..., None] * _GL_NODES
    return half * (integrand(x) @ _GL_WEIGHTS)


class QuadratureTable:
    """Dense table of ``Q(x) = integral_0^x g`` with Gauss-Legendre local refinement.

    The table nodes contain ``x = 0`` exactly, so ``Q(0) = 0`` holds bitwise.
    """

    def __init__(
        self,
        integrand: Callable[[FloatArray], FloatArray],
        x_min: float,
        x_max: float,
        panels_per_side: int = 2048,
        rtol: float = 1e-12,
    ) -> None:
        if not x_min < 0.0 < x_max:
            raise ValueError("quadrature table must straddle x = 0")
        self.integrand = integrand
        right = np.linspace(0.0, x_max, panels_per_side + 1)
        left = np.linspace(0.0, x_min, panels_per_side + 1)
        q_right = cumulative_quadrature(integrand, right, rtol)
        q_left = cumulative_quadrature(integrand, left, rtol)
        self.x = np.concatenate([left[:0:-1], right])
        self.q = np.concatenate([q_left[:0:-1], q_right])
        self.x_min = float(x_min)
        self.x_max = float(x_max)

    def __call__(self, x: npt.ArrayLike) -> FloatArray:
        x = np.asarray(x, dtype=float)
        if np.any(x < self.x_min) or np.any(x > self.x_max) or np.any(~np.isfinite(x)):
            raise OutOfRangeError(
                "argument outside the tabulated range",
                lower=self.x_min,
                upper=self.x_max,
            )
        k = np.clip(np.searchsorted(self.x, x) - 1, 0, len(self.x) - 2)
        # pick the closer of the two neighbouring nodes as base point
        closer = np.where(np.abs(self.x[k + 1] - x) < np.abs(x - self.x[k]), k + 1, k)
        base = self.x[closer]
        return self.q[closer] + gauss_increment(self.integrand, base, x)

    def inverse(
        self,
        y: npt.ArrayLike,
        derivative: Callable[[FloatArray], FloatArray] | None = None,
        rtol: float = 1e-12,
    ) -> FloatArray:
        """Solve ``Q(x) = y`` for a strictly monotone table."""
        d = self.integrand if derivative is None else derivative
        return monotone_inverse(self, d, y, self.x, self.q, rtol=rtol)


def monotone_inverse(
    func: Callable[[FloatArray], FloatArray],
    deriv: Callable[[FloatArray], FloatArray],
    y: npt.ArrayLike,
    x_nodes: FloatArray,
    y_nodes: FloatArray,
    rtol: float = 1e-12,
    max_iter: int = 80,
) -> FloatArray:
    """Vectorised bisection-safeguarded Newton solve of ``func(x) = y``.

    ``y_nodes = func(x_nodes)`` must be strictly monotone; it supplies the
    bracket and a linear-interpolation starting guess.
    """
    y = np.asarray(y, dtype=float)
    shape = y.shape
    y = y.ravel()
    increasing = y_nodes[-1] > y_nodes[0]
    ys = y_nodes if increasing else y_nodes[::-1]
    xs = x_nodes if increasing else x_nodes[::-1]
    if np.any(np.diff(ys) <= 0):
        raise OutOfRangeError("inverse requested for a non-monotone table")
    if np.any(y < ys[0]) or np.any(y > ys[-1]) or np.any(~np.isfinite(y)):
        raise OutOfRangeError(
            "value not bracketed by the tabulated range", lower=float(ys[0]), upper=float(ys[-1])
        )
    k = np.clip(np.searchsorted(ys, y) - 1, 0, len(ys) - 2)
    lo = xs[k].copy()
    hi = xs[k + 1].copy()
    f_lo = ys[k] - y
    span = ys[k + 1] - ys[k]
    x = lo + (hi - lo) * np.where(span > 0, (y - ys[k]) / span, 0.5)
    exact_lo = f_lo == 0
    x[exact_lo] = lo[exact_lo]
    active = ~exact_lo
    for _ in range(max_iter):
        if not np.any(active):
            break
        xa = x[active]
        r = func(xa) - y[active]
        done_now = r == 0
        # keep the sign-consistent bracket: sign(r) == sign(f_lo) replaces lo
        same_as_lo = np.sign(r) == np.sign(f_lo[active])
        lo_a = np.where(same_as_lo, xa, lo[active])
        hi_a = np.where(same_as_lo, hi[active], xa)
        f_lo[active] = np.where(same_as_lo, r, f_lo[active])
        lo[active] = lo_a
        hi[active] = hi_a
        dr = deriv(xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = r / dr
        newton = xa - step
        inside = np.isfinite(newton) & (newton > np.minimum(lo_a, hi_a)) & (newton < np.maximum(lo_a, hi_a))
        new = np.where(inside, newton, 0.5 * (lo_a + hi_a))
        converged = done_now | (np.abs(new - xa) <= rtol * np.maximum(1.0, np.abs(xa)) * 0.01)
        converged |= np.abs(hi_a - lo_a) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(xa))
        x[active] = np.where(done_now, xa, new)
        idx = np.flatnonzero(active)
        active[idx[converged]] = False
    return x.reshape(shape)


# ---------------------------------------------------------------- finite differences

CENTRAL_FIRST = {
    2: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    4: (np.array([-2, -1, 1, 2]), np.array([1, -8, 8, -1]) / 12.0),
    6: (np.array([-3, -2, -1, 1, 2, 3]), np.array([-1, 9, -45, 45, -9, 1]) / 60.0),
}

CENTRAL_SECOND = {
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
    4: (np.array([-2, -1, 0, 1, 2]), np.array([-1, 16, -30, 16, -1]) / 12.0),
    6: (np.array([-3, -2, -1, 0, 1, 2, 3]), np.array([2, -27, 270, -490, 270, -27, 2]) / 180.0),
}


def central_derivative(f: Callable[[FloatArray], FloatArray], x: npt.ArrayLike, step: float, order: int = 6, n: int = 1) -> FloatArray:
    """Central finite-difference derivative of a callable (``n`` = 1 or 2)."""
    offsets, weights = (CENTRAL_FIRST if n == 1 else CENTRAL_SECOND)[order]
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for o, w in zip(offsets, weights):
        total = total + w * f(x + o * step)
    return total / step**n


# ---------------------------------------------------------------- fits


@dataclass(frozen=True)
class PowerFit:
    exponent: float
    coefficient: float
    window_exponents: tuple[float, ...]


def loglog_fit(u: FloatArray, f: FloatArray, u_lo: float, u_hi: float) -> PowerFit:
    """Least-squares fit of ``log|f| = p log|u| + log C`` on ``[u_lo, u_hi]``.

    Also fits every half-decade window inside the range; all window slopes
    are returned so callers can bound the local exponent, not only the mean.
    """
    au = np.abs(np.asarray(u, dtype=float))
    af = np.asarray(f, dtype=float)
    mask = (au >= u_lo * (1 - 1e-12)) & (au <= u_hi * (1 + 1e-12)) & (af != 0)
    lu = np.log(au[mask])
    lf = np.log(np.abs(af[mask]))
    p, logc = np.polyfit(lu, lf, 1)
    sign = float(np.sign(np.median(af[mask])))
    windows = []
    edge = np.log(u_lo)
    top = np.log(u_hi)
    half_decade = 0.5 * np.log(10.0)
    while edge < top - 1e-9:
        sel = (lu >= edge - 1e-12) & (lu <= min(edge + half_decade, top) + 1e-12)
        if np.count_nonzero(sel) >= 3:
            windows.append(float(np.polyfit(lu[sel], lf[sel], 1)[0]))
        edge += half_decade
    return PowerFit(float(p), sign * float(np.exp(logc)), tuple(windows))


def observed_orders(errors: npt.ArrayLike, ratio: float = 2.0) -> FloatArray:
    """Observed convergence orders ``log(e_k / e_{k+1}) / log(ratio)``."""
    e = np.asarray(errors, dtype=float)
    return np.log(e[:-1] / e[1:]) / np.log(ratio)
