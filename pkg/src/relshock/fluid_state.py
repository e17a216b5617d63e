"""Riemann invariants, plane-symmetric fluid states and their acoustical geometry.

Components of two-vectors are ordered ``(t, x1)``; indices are lowered with
the Minkowski metric ``diag(-1, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ._numerics import FloatArray
from .eos import EquationOfState
from .errors import DegenerateFrameError, DomainError, HyperbolicityError

#: overflow guard for the hyperbolic functions of (R_plus - R_minus) / 2
R_GUARD = 50.0

MINKOWSKI_2D = np.diag([-1.0, 1.0])


@dataclass(frozen=True)
class FluidState1D:
    """Isentropic plane-symmetric state; every field broadcasts elementwise."""

    R_plus: FloatArray
    R_minus: FloatArray
    h: FloatArray
    H: FloatArray
    u0: FloatArray
    u1: FloatArray
    c: FloatArray
    n_factor: FloatArray

    @property
    def u_upper(self) -> FloatArray:
        return np.stack([self.u0, self.u1], axis=-1)

    @property
    def u_lower(self) -> FloatArray:
        return np.stack([-self.u0, self.u1], axis=-1)


@dataclass(frozen=True)
class NullFrame1D:
    """``L = (1, L1)``, ``Lbar = (1, Lbar1)``, ``X = (0, X1)`` and ``Xbreve = mu X``."""

    L: FloatArray
    Lbar: FloatArray
    X: FloatArray
    Xbreve: FloatArray

    @property
    def L1(self) -> FloatArray:
        return self.L[..., 1]

    @property
    def Lbar1(self) -> FloatArray:
        return self.Lbar[..., 1]

    @property
    def X1(self) -> FloatArray:
        return self.X[..., 1]


def _check_invariants(R_plus: FloatArray, R_minus: FloatArray) -> None:
    if np.any(~np.isfinite(R_plus)) or np.any(~np.isfinite(R_minus)):
        raise DomainError("Riemann invariants must be finite")
    if np.any(np.abs(R_plus) > R_GUARD) or np.any(np.abs(R_minus) > R_GUARD):
        raise DomainError("Riemann invariant beyond the overflow guard", guard=R_GUARD)


def invariants_from_fluid(H: npt.ArrayLike, u1: npt.ArrayLike, eos: EquationOfState) -> tuple[FloatArray, FloatArray]:
    """``R_pm = F(H) pm (1/2) ln((1 + u1/u0) / (1 - u1/u0))`` with ``u0 = sqrt(1 + u1^2)``."""
    H = np.asarray(H, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    u0 = np.sqrt(1.0 + u1 * u1)
    v = u1 / u0
    rapidity = 0.5 * np.log((1.0 + v) / (1.0 - v))
    f = eos.F(H)
    return f + rapidity, f - rapidity


def fluid_from_invariants(R_plus: npt.ArrayLike, R_minus: npt.ArrayLike, eos: EquationOfState) -> FluidState1D:
    """Reconstruct ``(H, u0, u1, c, n)`` from the Riemann invariants."""
    R_plus, R_minus = np.broadcast_arrays(np.asarray(R_plus, dtype=float), np.asarray(R_minus, dtype=float))
    _check_invariants(R_plus, R_minus)
    half_diff = 0.5 * (R_plus - R_minus)
    u0 = np.cosh(half_diff)
    u1 = np.sinh(half_diff)
    H = eos.F_inv(0.5 * (R_plus + R_minus))
    c = eos.c(H)
    if np.any(c <= 0) or np.any(c > 1):
        raise HyperbolicityError("state outside the regime of hyperbolicity")
    n = (u0 + u1 * c) * (u0 - u1 * c)
    return FluidState1D(R_plus, R_minus, np.log(H / eos.H_bar), H, u0, u1, c, n)


def null_frame(state: FluidState1D, mu: npt.ArrayLike = 1.0) -> NullFrame1D:
    """The h-null pair ``L``, ``Lbar`` with unit time component, plus ``X`` and ``mu X``."""
    a = 0.5 * (state.R_plus - state.R_minus)
    sh = np.sinh(a)
    ch = np.cosh(a)
    c = state.c
    if np.any(np.abs(np.tanh(a)) * c >= 1.0):
        raise DegenerateFrameError("|u1/u0| c >= 1: the Lbar direction degenerates")
    L1 = (sh + c * ch) / (ch + c * sh)
    Lbar1 = (sh - c * ch) / (ch - c * sh)
    one = np.ones_like(L1)
    zero = np.zeros_like(L1)
    X1 = 0.5 * (Lbar1 - L1)
    mu = np.asarray(mu, dtype=float)
    return NullFrame1D(
        L=np.stack([one, L1], axis=-1),
        Lbar=np.stack([one, Lbar1], axis=-1),
        X=np.stack([zero, X1], axis=-1),
        Xbreve=np.stack([zero, mu * X1], axis=-1),
    )


def metric_1d(state: FluidState1D) -> tuple[FloatArray, FloatArray]:
    """Acoustical metric restricted to the ``(t, x1)`` plane and its inverse."""
    c2 = state.c**2
    n = state.n_factor
    u_up = state.u_upper
    u_dn = state.u_lower
    h = n[..., None, None] * (
        MINKOWSKI_2D / c2[..., None, None] + (1.0 / c2 - 1.0)[..., None, None] * u_dn[..., :, None] * u_dn[..., None, :]
    )
    h_inv = (1.0 / n)[..., None, None] * (
        c2[..., None, None] * MINKOWSKI_2D + (c2 - 1.0)[..., None, None] * u_up[..., :, None] * u_up[..., None, :]
    )
    return h, h_inv


def inner(metric: FloatArray, a: FloatArray, b: FloatArray) -> FloatArray:
    """``metric(a, b)`` for batched vectors."""
    return np.einsum("...i,...ij,...j->...", a, metric, b)


def c_derivative_along_R_plus(state_R_plus: npt.ArrayLike, R_minus: npt.ArrayLike, eos: EquationOfState, step: float = 1e-4) -> FloatArray:
    """Sixth-order finite difference of ``c`` in ``R_plus`` at fixed ``R_minus``."""
    from ._numerics import central_derivative

    R_minus = np.asarray(R_minus, dtype=float)
    return central_derivative(lambda r: fluid_from_invariants(r, R_minus, eos).c, state_R_plus, step, order=6)


# ---------------------------------------------------------------- simple waves


@dataclass(frozen=True)
class SimpleWaveScalars:
    """Scalars on the simple-wave state ``(R_plus, R_minus) = (R, 0)`` and their ``R`` derivatives.

    ``g`` is ``n / c``; ``A_prime`` is the integrand of the antiderivative
    ``A`` and equals ``-dL1/dR``.  Derivative fields are ``None`` when not
    requested.
    """

    R: FloatArray
    H: FloatArray
    c: FloatArray
    u0: FloatArray
    u1: FloatArray
    n: FloatArray
    g: FloatArray
    L1: FloatArray
    A_prime: FloatArray
    c_R: FloatArray
    g_R: FloatArray | None = None
    A_second: FloatArray | None = None
    c_RR: FloatArray | None = None
    g_RR: FloatArray | None = None


def simple_wave_scalars(R: npt.ArrayLike, eos: EquationOfState, order: int = 0) -> SimpleWaveScalars:
    """Closed-form scalars along simple waves, differentiated analytically by the chain rule.

    With ``a = R/2`` and ``H = F^-1(R/2)`` one has ``dH/dR = H c / 2`` and
    ``dc/dR = c'(H) H c / 2``.
    """
    R = np.asarray(R, dtype=float)
    _check_invariants(R, np.zeros_like(R))
    a = 0.5 * R
    u0 = np.cosh(a)
    u1 = np.sinh(a)
    H = eos.F_inv(a)
    c = eos.c(H)
    dc = eos.dc_dH(H)
    c_R = 0.5 * dc * H * c
    P = u0 + c * u1
    M = u0 - c * u1
    n = P * M
    N = 1.0 - c * c + c * H * dc
    A_prime = -N / (2.0 * P * P)
    L1 = (u1 + c * u0) / P
    out = dict(R=R, H=H, c=c, u0=u0, u1=u1, n=n, g=n / c, L1=L1, A_prime=A_prime, c_R=c_R)
    if order >= 1:
        d2c = eos.d2c_dH2(H)
        dH = 0.5 * H * c
        P_R = 0.5 * u1 + c_R * u1 + 0.5 * c * u0
        M_R = 0.5 * u1 - c_R * u1 - 0.5 * c * u0
        n_R = P_R * M + P * M_R
        out["g_R"] = n_R / c - n * c_R / c**2
        N_R = -2.0 * c * c_R + c_R * H * dc + c * dH * dc + c * H * d2c * dH
        out["A_second"] = -N_R / (2.0 * P * P) + N * P_R / P**3
        if order >= 2:
            c_RR = dH * 0.5 * (d2c * H * c + dc * c + dc * H * dc)
            P_RR = 0.25 * u0 + c_RR * u1 + c_R * u0 + 0.25 * c * u1
            M_RR = 0.25 * u0 - c_RR * u1 - c_R * u0 - 0.25 * c * u1
            n_RR = P_RR * M + 2.0 * P_R * M_R + P * M_RR
            out["c_RR"] = c_RR
            out["g_RR"] = n_RR / c - 2.0 * n_R * c_R / c**2 - n * c_RR / c**2 + 2.0 * n * c_R**2 / c**3
    return SimpleWaveScalars(**out)
