"""Brute-force evolution of the Riemann-invariant system in rectangular coordinates.

Solves ``d_t R_plus + L1 d_x R_plus = 0`` and ``d_t R_minus + Lbar1 d_x R_minus = 0``
on a uniform mesh with upwind differences chosen by the sign of the local
speed, advanced with Heun's method.  Nothing here uses the eikonal function
or the geometric coordinates; it serves as an independent check of them.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from ._numerics import FloatArray
from .eos import EquationOfState
from .errors import CflViolation, ConfigError, NonMonotoneLadder, NotInImage, ResolutionExhausted
from .seed_data import InitialData

SCHEMES = ("upwind", "minmod")
DEFAULT_THRESHOLDS = (2.5, 5.0, 10.0, 20.0)
DEFAULT_LADDER = (1024, 2048, 4096, 8192)


# ---------------------------------------------------------------- speeds


class _SoundSpeedOfF:
    """``c`` as a function of ``F = (R_plus + R_minus)/2``; a cubic spline table for non-constant EOS."""

    def __init__(self, eos: EquationOfState, lo: float, hi: float, n: int = 4097) -> None:
        self.constant = eos.kind == "constant"
        if self.constant:
            self.c_bar = float(eos.params["c_bar"])
        else:
            F_lo, F_hi = eos.F_range()
            lo, hi = max(lo, F_lo), min(hi, F_hi)
            y = np.linspace(lo, hi, n)
            self.spline = CubicSpline(y, eos.c_of_F(y))
            self.lo, self.hi = lo, hi

    def __call__(self, y: FloatArray) -> FloatArray:
        if self.constant:
            return np.full(y.shape, self.c_bar)
        return self.spline(np.clip(y, self.lo, self.hi))


def characteristic_speeds(R_plus: FloatArray, R_minus: FloatArray, c: FloatArray) -> tuple[FloatArray, FloatArray]:
    """``(L1, Lbar1)`` in terms of the Riemann invariants and the sound speed.

    With the rapidity ``a = (R_plus - R_minus)/2`` the speeds are the
    relativistic sums ``tanh(a +- artanh c)``.
    """
    a = 0.5 * (R_plus - R_minus)
    w = np.arctanh(c)
    return np.tanh(a + w), np.tanh(a - w)


# ---------------------------------------------------------------- spatial operator


def _minmod(a: FloatArray, b: FloatArray) -> FloatArray:
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _upwind_derivative(R: FloatArray, speed: FloatArray, dx: float, scheme: str) -> FloatArray:
    """Speed-sign-resolved one-sided difference with constant-state padding."""
    pad = np.pad(R, 2, mode="edge")
    back = (pad[2:-2] - pad[1:-3]) / dx
    fwd = (pad[3:-1] - pad[2:-2]) / dx
    if scheme == "minmod":
        d = np.diff(pad)  # d[j] = pad[j+1] - pad[j]
        sigma = _minmod(d[1:], d[:-1])  # limited slope at pad[1:-1]
        # sigma index k corresponds to pad index k + 1, i.e. interior i <-> k = i + 1
        s_i = sigma[1:-1]
        s_im1 = sigma[:-2]
        s_ip1 = sigma[2:]
        back = back + 0.5 * (s_i - s_im1) / dx
        fwd = fwd - 0.5 * (s_ip1 - s_i) / dx
    return np.where(speed > 0, back, fwd)


@dataclass
class RectangularOracleRun:
    """Mesh, final fields and monitored history of one oracle evolution."""

    x: FloatArray
    dx: float
    t: float
    R_plus: FloatArray
    R_minus: FloatArray
    cfl: float
    scheme: str
    steps: int
    history_t: FloatArray
    history_grad: FloatArray
    history_R_minus: FloatArray
    snapshots: dict[float, tuple[FloatArray, FloatArray]] = field(default_factory=dict)
    threshold_crossings: dict[float, float] = field(default_factory=dict)

    def summary(self) -> dict[str, Any]:
        return {
            "dx": self.dx,
            "t": self.t,
            "cells": len(self.x),
            "steps": self.steps,
            "cfl": self.cfl,
            "scheme": self.scheme,
            "max_grad_R_plus": float(self.history_grad[-1]),
            "sup_R_minus": float(self.history_R_minus[-1]),
            "threshold_crossings": {str(k): v for k, v in self.threshold_crossings.items()},
        }


def default_domain(data: InitialData, t_end: float, margin: float = 0.5) -> tuple[float, float]:
    """Mesh interval covering the data (``x = -U``) and its right-moving image up to ``t_end``."""
    U_lo, U_hi = data.support
    return -(U_hi + margin), -U_lo + t_end + margin


def max_gradient(R: FloatArray, dx: float) -> float:
    return float(np.max(np.abs(np.diff(R)))) / dx if len(R) > 1 else 0.0


def evolve(
    data: InitialData,
    dx: float,
    t_end: float,
    cfl: float = 0.45,
    scheme: str = "upwind",
    domain: tuple[float, float] | None = None,
    snapshot_times: Sequence[float] = (),
    thresholds: Sequence[float] = (),
    stop_after_thresholds: bool = False,
    monitor_resolution: bool = True,
    zero_data: bool = False,
) -> RectangularOracleRun:
    """Advance ``R_plus(0, x) = R0(-x)``, ``R_minus(0, x) = 0`` to ``t_end``.

    ``thresholds`` are absolute gradient levels; the first time each is
    exceeded by ``max |d_x R_plus|`` is recorded, interpolated linearly
    between steps.  With ``stop_after_thresholds`` the run ends once all are
    crossed.  ``ResolutionExhausted`` is raised when the monitored gradient
    exceeds ``1/(10 dx)`` while thresholds are still pending (or at all,
    when no thresholds are requested and ``monitor_resolution`` is set).
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if not 0.0 < cfl <= 0.9:
        raise CflViolation("Courant number must lie in (0, 0.9]", cfl=cfl)
    lo, hi = domain or default_domain(data, t_end)
    n = int(round((hi - lo) / dx)) + 1
    x = lo + dx * np.arange(n)
    R_plus = np.zeros(n) if zero_data else data.R0(-x)
    R_minus = np.zeros(n)
    R_max = float(np.max(np.abs(R_plus))) + 1.0
    c_of_F = _SoundSpeedOfF(data.eos, -R_max, R_max)

    def rhs(Rp: FloatArray, Rm: FloatArray) -> tuple[FloatArray, FloatArray, float]:
        c = c_of_F(0.5 * (Rp + Rm))
        L1, Lb1 = characteristic_speeds(Rp, Rm, c)
        dRp = _upwind_derivative(Rp, L1, dx, scheme)
        dRm = _upwind_derivative(Rm, Lb1, dx, scheme)
        return -L1 * dRp, -Lb1 * dRm, float(max(np.max(np.abs(L1)), np.max(np.abs(Lb1))))

    pending_snaps = sorted(float(s) for s in snapshot_times if 0.0 <= s <= t_end)
    snapshots: dict[float, tuple[FloatArray, FloatArray]] = {}
    while pending_snaps and pending_snaps[0] == 0.0:
        snapshots[pending_snaps.pop(0)] = (R_plus.copy(), R_minus.copy())
    pending_thr = sorted(float(k) for k in thresholds)
    crossings: dict[float, float] = {}

    t = 0.0
    steps = 0
    grad = max_gradient(R_plus, dx)
    hist_t = [0.0]
    hist_g = [grad]
    hist_m = [0.0]
    limit = 1.0 / (10.0 * dx)
    while t < t_end - 1e-14 * max(1.0, t_end):
        k1p, k1m, smax = rhs(R_plus, R_minus)
        dt = cfl * dx / max(smax, 1e-300)
        target = pending_snaps[0] if pending_snaps else t_end
        if t + dt > target:
            dt = target - t
        pp = R_plus + dt * k1p
        pm = R_minus + dt * k1m
        k2p, k2m, _ = rhs(pp, pm)
        R_plus = R_plus + 0.5 * dt * (k1p + k2p)
        R_minus = R_minus + 0.5 * dt * (k1m + k2m)
        t_prev, grad_prev = t, grad
        t = t + dt
        steps += 1
        if pending_snaps and abs(t - pending_snaps[0]) <= 1e-14 * max(1.0, t):
            t = pending_snaps[0]
            snapshots[pending_snaps.pop(0)] = (R_plus.copy(), R_minus.copy())
        grad = max_gradient(R_plus, dx)
        hist_t.append(t)
        hist_g.append(grad)
        hist_m.append(float(np.max(np.abs(R_minus))))
        while pending_thr and grad >= pending_thr[0]:
            level = pending_thr.pop(0)
            frac = (level - grad_prev) / (grad - grad_prev) if grad > grad_prev else 1.0
            crossings[level] = t_prev + frac * (t - t_prev)
        if grad > limit and (pending_thr or (monitor_resolution and not thresholds)):
            raise ResolutionExhausted(
                "monitored gradient exceeds 1/(10 dx)", t=t, gradient=grad, limit=limit, dx=dx, crossed={str(k): v for k, v in crossings.items()}
            )
        if stop_after_thresholds and thresholds and not pending_thr:
            break
    return RectangularOracleRun(
        x, dx, t, R_plus, R_minus, cfl, scheme, steps, np.array(hist_t), np.array(hist_g), np.array(hist_m), snapshots, crossings
    )


# ---------------------------------------------------------------- comparison


@dataclass(frozen=True)
class ComparisonResult:
    t: float
    linf: float
    l1: float
    excluded: int
    compared: int
    exterior_max_error: float

    def to_dict(self) -> dict[str, Any]:
        return dict(t=self.t, linf=self.linf, l1=self.l1, excluded=self.excluded, compared=self.compared, exterior_max_error=self.exterior_max_error)


def geometric_pushforward(data: InitialData, x: FloatArray, t: float, boundary=None) -> tuple[FloatArray, FloatArray]:
    """``R_plus`` of the closed-form solution on the mesh ``x`` at time ``t``, with a validity mask."""
    from .coordinate_map import CoordinateMap
    from .geo_solution import GeometricSolution

    sol = GeometricSolution(data)
    # x = -U + t L1 with |L1| < 1, so U lies within t of -x
    U_range = (float(-np.max(x) - t - 0.1), float(-np.min(x) + t + 0.1))
    cmap = CoordinateMap(sol, boundary, U_range if t <= data.T_shock else None)
    U = cmap.upsilon_inverse(np.full_like(x, t), x, missing="nan")
    ok = np.isfinite(U)
    R = np.zeros_like(x)
    R[ok] = data.R0(U[ok])
    return R, ok


def compare_with_geometric(run: RectangularOracleRun, data: InitialData, t: float | None = None, boundary=None) -> ComparisonResult:
    """``L_inf`` and ``L1`` differences between the oracle and the pushed-forward closed form."""
    if t is None:
        t = run.t
        R_num = run.R_plus
    elif abs(t - run.t) <= 1e-14 * max(1.0, t):
        R_num = run.R_plus
    elif t in run.snapshots:
        R_num = run.snapshots[t][0]
    else:
        raise NotInImage("no oracle snapshot at the requested time", t=t, available=sorted(run.snapshots))
    R_geo, ok = geometric_pushforward(data, run.x, t, boundary)
    err = np.abs(R_num - R_geo)
    exterior = ok & (R_geo == 0.0)
    return ComparisonResult(
        t=float(t),
        linf=float(np.max(err[ok])) if np.any(ok) else float("nan"),
        l1=float(np.sum(err[ok]) * run.dx),
        excluded=int(np.count_nonzero(~ok)),
        compared=int(np.count_nonzero(ok)),
        exterior_max_error=float(np.max(err[exterior])) if np.any(exterior) else 0.0,
    )


# ---------------------------------------------------------------- blowup time


@dataclass(frozen=True)
class BlowupEstimate:
    estimate: float
    uncertainty: float
    thresholds: tuple[float, ...]
    dx: tuple[float, ...]
    crossing_times: FloatArray  # [level, threshold]
    richardson: FloatArray  # extrapolated crossing time per threshold
    reference_gradient: float
    observed_orders: tuple[float | None, ...] = ()
    slope: float = float("nan")

    def to_dict(self) -> dict[str, Any]:
        return {
            "estimate": self.estimate,
            "uncertainty": self.uncertainty,
            "thresholds": list(self.thresholds),
            "dx": list(self.dx),
            "crossing_times": self.crossing_times.tolist(),
            "richardson": self.richardson.tolist(),
            "reference_gradient": self.reference_gradient,
            "observed_orders": list(self.observed_orders),
            "slope": self.slope,
        }


def reference_gradient(data: InitialData) -> float:
    """``max |d_x R_plus(0, .)| = max |R0'|`` from the exact data on the certification grid."""
    _, dR, _ = data.R0_derivatives(data.grid)
    return float(np.max(np.abs(dR)))


def _richardson_observed(values: FloatArray) -> tuple[float, float | None]:
    """Extrapolate the three finest values with their observed order.

    Returns ``(limit, order)``.  When the last two differences do not share
    a sign or do not shrink, the sequence is not yet in its asymptotic
    regime and the finest value is returned with ``order=None``.
    """
    v = np.asarray(values, dtype=float)
    d1 = v[-2] - v[-3]
    d2 = v[-1] - v[-2]
    if d1 == 0.0:
        return float(v[-1]), None
    r = d2 / d1
    if not 0.0 < r < 1.0:
        return float(v[-1]), None
    return float(v[-1] + d2 * r / (1.0 - r)), float(-np.log2(r))


def estimate_blowup_time(
    data: InitialData,
    ladder: Sequence[int] = DEFAULT_LADDER,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    cfl: float = 0.45,
    scheme: str = "minmod",
    t_max_factor: float = 1.2,
) -> BlowupEstimate:
    """Extrapolated time at which the oracle gradient becomes unbounded.

    For every mesh ``dx = |support| / N`` in ``ladder`` the first time
    ``max |d_x R_plus|`` exceeds ``K g0`` is recorded for each ``K``, with
    ``g0`` the exact initial maximum gradient.  Per ``K`` the three finest
    times are Richardson-extrapolated with their observed order when they
    converge monotonically.  Because the gradient grows like ``1 / (T - t)``
    near blowup, ``t_K = T - b / K + O(1 / K^2)``, and the extrapolated
    ``t_K`` are fitted linearly in ``1 / K``; the intercept is the estimate.
    The uncertainty adds the gap to a quadratic fit in ``1 / K`` and the
    largest Richardson correction.
    """
    if len(ladder) < 3:
        raise NonMonotoneLadder("need at least three refinement levels", levels=len(ladder))
    ladder = sorted(int(n) for n in ladder)
    if len(set(ladder)) != len(ladder):
        raise NonMonotoneLadder("refinement levels must be distinct", ladder=ladder)
    if len(thresholds) < 2:
        raise ConfigError("need at least two gradient thresholds", thresholds=list(thresholds))
    width = data.support[1] - data.support[0]
    g0 = reference_gradient(data)
    levels = [g0 * k for k in thresholds]
    t_end = t_max_factor * data.T_shock
    times = np.empty((len(ladder), len(thresholds)))
    dxs = []
    for i, n in enumerate(ladder):
        dx = width / n
        dxs.append(dx)
        run = evolve(data, dx, t_end, cfl=cfl, scheme=scheme, thresholds=levels, stop_after_thresholds=True)
        if len(run.threshold_crossings) < len(levels):
            raise ResolutionExhausted("not every threshold was crossed before t_end", dx=dx, t_end=t_end)
        times[i] = [run.threshold_crossings[lv] for lv in levels]
    extrapolated = []
    orders = []
    for j in range(len(thresholds)):
        limit, order = _richardson_observed(times[:, j])
        extrapolated.append(limit)
        orders.append(order)
    rich = np.array(extrapolated)
    inv_k = 1.0 / np.asarray(thresholds, dtype=float)
    slope, intercept = np.polyfit(inv_k, rich, 1)
    spread = 0.0
    if len(thresholds) >= 3:
        spread = abs(float(np.polyfit(inv_k, rich, 2)[-1]) - float(intercept))
    uncertainty = spread + float(np.max(np.abs(rich - times[-1])))
    return BlowupEstimate(
        float(intercept),
        uncertainty,
        tuple(float(k) for k in thresholds),
        tuple(dxs),
        times,
        rich,
        g0,
        tuple(orders),
        float(slope),
    )
