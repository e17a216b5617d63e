"""Four-dimensional tensor kernels on sampled fluid fields.

Fields live on a small uniform ``(t, x1, x2, x3)`` patch.  Derivatives are
fourth-order central differences; cells whose stencil leaves the patch hold
NaN, and evaluating a kernel there raises ``StencilOutOfBounds``.  Indices
are raised and lowered with the Minkowski metric ``m = diag(-1, 1, 1, 1)``
and the Levi-Civita symbol is normalized by ``eps_0123 = 1`` (so
``eps^0123 = -1``).
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from ._numerics import CENTRAL_FIRST, FloatArray, observed_orders
from .eos import EquationOfState
from .errors import MissingThermoCallback, StencilOutOfBounds

MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])
STENCIL_ORDER = 4
HALO = 2  # cells lost per first derivative


def _levi_civita_upper() -> FloatArray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 == 0 else 1.0  # eps^0123 = -1
    return eps


EPSILON_UPPER = _levi_civita_upper()

StateFn = Callable[[FloatArray, FloatArray, FloatArray, FloatArray], tuple[FloatArray, FloatArray, FloatArray]]


def lower(v: FloatArray) -> FloatArray:
    """Lower (or raise) the leading index with ``m``."""
    out = np.array(v, dtype=float, copy=True)
    out[0] = -out[0]
    return out


@dataclass
class FluidField4D:
    """Sampled ``h``, ``u^alpha`` (upper, leading axis) and ``s`` on a uniform 4D patch."""

    origin: FloatArray
    spacing: float
    h: FloatArray
    u: FloatArray
    s: FloatArray
    eos: EquationOfState
    extras: dict[str, FloatArray] = field(default_factory=dict)

    @classmethod
    def sample(
        cls,
        state: StateFn,
        center: Sequence[float],
        spacing: float,
        eos: EquationOfState,
        half_width: int = 2 * HALO,
        normalize: bool = True,
    ) -> FluidField4D:
        """Evaluate ``state(t, x1, x2, x3) -> (h, u_spatial[3], s)`` on a ``(2 half_width + 1)^4`` patch.

        With ``normalize`` the time component is ``u^0 = sqrt(1 + |u_spatial|^2)``;
        otherwise ``state`` must return all four components.
        """
        center = np.asarray(center, dtype=float)
        offsets = spacing * np.arange(-half_width, half_width + 1)
        coords = np.meshgrid(*(c + offsets for c in center), indexing="ij")
        h, u_in, s = state(*coords)
        u_in = np.asarray(u_in, dtype=float)
        if normalize:
            u0 = np.sqrt(1.0 + np.sum(u_in**2, axis=0))
            u = np.concatenate([u0[None], u_in], axis=0)
        else:
            u = u_in
        shape = coords[0].shape
        return cls(
            origin=center - half_width * spacing,
            spacing=float(spacing),
            h=np.broadcast_to(np.asarray(h, dtype=float), shape).copy(),
            u=np.broadcast_to(u, (4, *shape)).copy(),
            s=np.broadcast_to(np.asarray(s, dtype=float), shape).copy(),
            eos=eos,
        )

    @property
    def shape(self) -> tuple[int, ...]:
        return self.h.shape

    @property
    def center_index(self) -> tuple[int, int, int, int]:
        return tuple(n // 2 for n in self.shape)  # type: ignore[return-value]

    def coords(self) -> list[FloatArray]:
        return np.meshgrid(*(self.origin[a] + self.spacing * np.arange(self.shape[a]) for a in range(4)), indexing="ij")

    def d(self, f: FloatArray) -> FloatArray:
        """Fourth-order central gradient ``∂_alpha f`` on the trailing four axes; NaN where the stencil leaves the patch."""
        f = np.asarray(f, dtype=float)
        offsets, weights = CENTRAL_FIRST[STENCIL_ORDER]
        lead = f.ndim - 4
        out = np.full((4, *f.shape), np.nan)
        for a in range(4):
            axis = lead + a
            n = f.shape[axis]
            inner = slice(HALO, n - HALO)
            acc = np.zeros(f.shape[:axis] + (n - 2 * HALO,) + f.shape[axis + 1 :])
            for o, w in zip(offsets, weights):
                acc = acc + w * np.take(f, np.arange(HALO + o, n - HALO + o), axis=axis)
            idx = [slice(None)] * f.ndim
            idx[axis] = inner
            out[(a, *idx)] = acc / self.spacing
        return out

    # ------------------------------------------------------------ pointwise scalars

    def c(self) -> FloatArray:
        return self.eos.c_of_h(self.h, self.s)

    def u_lower(self) -> FloatArray:
        return lower(self.u)

    def n_factor(self) -> FloatArray:
        c2 = self.c() ** 2
        return c2 + (1.0 - c2) * self.u[0] ** 2

    def enthalpy(self) -> FloatArray:
        return self.eos.H_bar * np.exp(self.h)


def at(arr: FloatArray, point: Sequence[int]) -> FloatArray:
    """Value of a field with trailing grid axes at ``point``; raises if the stencil did not fit."""
    val = np.asarray(arr)[(Ellipsis, *tuple(int(p) for p in point))]
    if np.any(np.isnan(val)):
        raise StencilOutOfBounds("finite-difference stencil leaves the sampled patch", point=[int(p) for p in point])
    return val


def _point(fld: FluidField4D, point: Sequence[int] | None) -> tuple[int, ...]:
    return fld.center_index if point is None else tuple(int(p) for p in point)


# ---------------------------------------------------------------- acoustical geometry


def metric_fields(fld: FluidField4D) -> tuple[FloatArray, FloatArray, FloatArray]:
    """``(h_ab, h^ab, n)`` on the whole patch with the tensor indices first."""
    c2 = fld.c() ** 2
    n = c2 + (1.0 - c2) * fld.u[0] ** 2
    ul = fld.u_lower()
    m = MINKOWSKI[:, :, None, None, None, None]
    h = n * (m / c2 + (1.0 / c2 - 1.0) * ul[:, None] * ul[None, :])
    h_inv = (c2 * m + (c2 - 1.0) * fld.u[:, None] * fld.u[None, :]) / n
    return h, h_inv, n


def acoustical_metric(fld: FluidField4D, point: Sequence[int] | None = None) -> tuple[FloatArray, FloatArray, float]:
    p = _point(fld, point)
    h, h_inv, n = metric_fields(fld)
    return at(h, p), at(h_inv, p), float(at(n, p))


def projection_Pi(fld: FluidField4D, point: Sequence[int] | None = None) -> FloatArray:
    """``Pi^ab = (m^-1)^ab + u^a u^b``."""
    u = at(fld.u, _point(fld, point))
    return MINKOWSKI + np.outer(u, u)


def B_and_N(fld: FluidField4D, point: Sequence[int] | None = None) -> tuple[FloatArray, FloatArray]:
    """``B = u / u^0`` and ``N^a = -(h^-1)^{a0}``."""
    p = _point(fld, point)
    u = at(fld.u, p)
    _, h_inv, _ = acoustical_metric(fld, p)
    return u / u[0], -h_inv[:, 0]


# ---------------------------------------------------------------- vorticity and entropy


def vort_field(fld: FluidField4D, xi_lower: FloatArray) -> FloatArray:
    """``vort^a(xi) = -eps^{abcd} u_b ∂_c xi_d`` on the patch (NaN in the halo)."""
    dxi = fld.d(xi_lower)  # [c, d, ...]
    return -np.einsum("abcd,b...,cd...->a...", EPSILON_UPPER, fld.u_lower(), dxi)


def vort(fld: FluidField4D, xi_lower: FloatArray, point: Sequence[int] | None = None) -> FloatArray:
    return at(vort_field(fld, xi_lower), _point(fld, point))


def vorticity_field(fld: FluidField4D) -> FloatArray:
    """``varpi^a = vort^a(H u)`` with ``H`` the enthalpy."""
    return vort_field(fld, fld.enthalpy() * fld.u_lower())


def vorticity(fld: FluidField4D, point: Sequence[int] | None = None) -> FloatArray:
    return at(vorticity_field(fld), _point(fld, point))


def entropy_gradient_field(fld: FluidField4D) -> FloatArray:
    """``S_a = ∂_a s`` (finite differences, or the exact gradient if supplied in ``extras['S']``)."""
    if "S" in fld.extras:
        return fld.extras["S"]
    return fld.d(fld.s)


def entropy_gradient(fld: FluidField4D, point: Sequence[int] | None = None) -> FloatArray:
    return at(entropy_gradient_field(fld), _point(fld, point))


def modified_variables(fld: FluidField4D, point: Sequence[int] | None = None) -> tuple[FloatArray, float]:
    """``(C^a, D)`` assembled term by term from finite-difference derivatives.

    ``theta_h`` is the EOS callback for the derivative of the temperature
    with respect to ``h`` at fixed ``s``.
    """
    thermo = fld.eos.thermo
    if thermo is None:
        raise MissingThermoCallback("modified variables need n, theta and theta_h callbacks", eos_kind=fld.eos.kind)
    p = _point(fld, point)
    h, s = fld.h, fld.s
    c2 = fld.c() ** 2
    n = thermo.n(h, s)
    theta = thermo.theta(h, s)
    theta_h = thermo.theta_h(h, s)
    ul = fld.u_lower()
    dh = fld.d(h)
    du = fld.d(fld.u)  # [k, a, ...] = ∂_k u^a
    S_low = entropy_gradient_field(fld)
    S_up = lower(S_low)
    w_up = vorticity_field(fld)
    w_low = lower(w_up)
    div_u = np.einsum("kk...->...", du)
    S_dh = np.einsum("k...,k...->...", S_up, dh)
    # ∂^a u_k = m^{aa} m_{kk} ∂_a u^k for the diagonal Minkowski metric
    signs = np.diag(MINKOWSKI)
    raised = du * (signs[:, None] * signs[None, :]).reshape(4, 4, *([1] * (du.ndim - 2)))
    C = (
        vort_field(fld, w_low)
        + np.einsum("abcd,b...,c...,d...->a...", EPSILON_UPPER, ul, dh, w_low) / c2
        + (theta - theta_h) * S_up * div_u
        + (theta - theta_h) * fld.u * S_dh
        + (theta_h - theta) * np.einsum("k...,ak...->a...", S_up, raised)
    )
    div_S = np.einsum("kk...->...", fld.d(S_up))
    D = div_S / n + S_dh / n - S_dh / (n * c2)
    return at(C, p), float(at(D, p))


# ---------------------------------------------------------------- null forms and wave operator


def null_form(
    fld: FluidField4D,
    kind: str,
    phi: FloatArray,
    psi: FloatArray,
    point: Sequence[int] | None = None,
    mu: int = 0,
    nu: int = 1,
) -> float:
    """``Qh = (h^-1)^{kl} ∂_k phi ∂_l psi`` or ``Q_{mu nu} = ∂_mu phi ∂_nu psi - ∂_nu phi ∂_mu psi``."""
    p = _point(fld, point)
    dphi = at(fld.d(phi), p)
    dpsi = at(fld.d(psi), p)
    if kind == "Qh":
        _, h_inv, _ = acoustical_metric(fld, p)
        return float(dphi @ h_inv @ dpsi)
    if kind == "Qmn":
        if not (0 <= mu < nu <= 3):
            raise ValueError("need 0 <= mu < nu <= 3")
        return float(dphi[mu] * dpsi[nu] - dphi[nu] * dpsi[mu])
    raise ValueError(f"unknown null form {kind!r}")


def covariant_wave_op(fld: FluidField4D, phi: FloatArray, point: Sequence[int] | None = None) -> float:
    """``|det h|^{-1/2} ∂_a(|det h|^{1/2} (h^-1)^{ab} ∂_b phi)`` by nested finite differences."""
    p = _point(fld, point)
    h, h_inv, _ = metric_fields(fld)
    sqrt_det = np.sqrt(np.abs(np.linalg.det(np.moveaxis(h, (0, 1), (-2, -1)))))
    flux = sqrt_det * np.einsum("ab...,b...->a...", h_inv, fld.d(phi))
    div = np.einsum("aa...->...", fld.d(flux))
    return float(at(div / sqrt_det, p))


def constraint_residual(fld: FluidField4D, form: str = "expanded") -> FloatArray:
    """Residual of the transport identity for ``m(u, u) + 1`` on the patch.

    ``form="direct"`` differentiates ``m(u, u) + 1`` itself; ``"expanded"``
    uses ``u^k ∂_k m(u, u) = 2 u_l u^k ∂_k u^l``, which carries the
    finite-difference error of the velocity derivatives even when the
    samples are exactly normalized.
    """
    norm = np.einsum("a...,a...->...", fld.u_lower(), fld.u) + 1.0
    u_dh = np.einsum("k...,k...->...", fld.u, fld.d(fld.h))
    if form == "direct":
        transport = np.einsum("k...,k...->...", fld.u, fld.d(norm))
    elif form == "expanded":
        du = fld.d(fld.u)
        transport = 2.0 * np.einsum("l...,k...,kl...->...", fld.u_lower(), fld.u, du)
    else:
        raise ValueError(f"unknown form {form!r}")
    return transport + norm * u_dh


def material_residuals(fld: FluidField4D) -> dict[str, FloatArray]:
    """Residuals of the first-order enthalpy, velocity and entropy equations."""
    c2 = fld.c() ** 2
    dh = fld.d(fld.h)
    du = fld.d(fld.u)
    S = fld.d(fld.s)
    q = fld.eos.q(fld.h, fld.s)
    u = fld.u
    Pi = MINKOWSKI[:, :, None, None, None, None] + u[:, None] * u[None, :]
    return {
        "enthalpy": np.einsum("k...,k...->...", u, dh) + c2 * np.einsum("kk...->...", du),
        "velocity": np.einsum("k...,ka...->a...", u, du) + np.einsum("ak...,k...->a...", Pi, dh) - q * lower(S),
        "entropy": np.einsum("k...,k...->...", u, S),
    }


# ---------------------------------------------------------------- manufactured fields


@dataclass(frozen=True)
class TrigField:
    """Smooth field ``A sum_j a_j sin(k_j . x + p_j)`` with exact gradient."""

    amplitudes: FloatArray
    wavevectors: FloatArray  # [j, 4]
    phases: FloatArray
    offset: float = 0.0

    @classmethod
    def random(cls, rng: np.random.Generator, amplitude: float = 0.2, modes: int = 3, k_max: float = 1.5, offset: float = 0.0) -> TrigField:
        return cls(amplitude * rng.uniform(-1.0, 1.0, modes), rng.uniform(-k_max, k_max, (modes, 4)), rng.uniform(0, 2 * np.pi, modes), offset)

    def __call__(self, *x: FloatArray) -> FloatArray:
        arg = sum(self.wavevectors[:, a, None] * np.ravel(x[a])[None, :] for a in range(4)) + self.phases[:, None]
        return (self.offset + self.amplitudes @ np.sin(arg)).reshape(np.shape(x[0]))

    def gradient(self, *x: FloatArray) -> FloatArray:
        arg = sum(self.wavevectors[:, a, None] * np.ravel(x[a])[None, :] for a in range(4)) + self.phases[:, None]
        cos = np.cos(arg) * self.amplitudes[:, None]
        return np.stack([(self.wavevectors[:, a] @ cos).reshape(np.shape(x[0])) for a in range(4)])


def manufactured_field(
    eos: EquationOfState,
    center: Sequence[float],
    spacing: float,
    seed: int = 0,
    amplitude: float = 0.2,
    isentropic: bool = False,
    half_width: int = 2 * HALO,
) -> FluidField4D:
    """Random smooth valid state with exactly normalized ``u``; ``extras['S']`` holds the exact entropy gradient."""
    rng = np.random.default_rng(seed)
    h_f = TrigField.random(rng, amplitude)
    u_f = [TrigField.random(rng, 2 * amplitude) for _ in range(3)]
    s_f = TrigField.random(rng, 0.0 if isentropic else amplitude)

    def state(t, x1, x2, x3):
        return h_f(t, x1, x2, x3), np.stack([f(t, x1, x2, x3) for f in u_f]), s_f(t, x1, x2, x3)

    fld = FluidField4D.sample(state, center, spacing, eos, half_width)
    fld.extras["S"] = s_f.gradient(*fld.coords())
    return fld


def random_state_samples(eos: EquationOfState, n: int, seed: int = 0, h_range: tuple[float, float] = (-0.5, 0.5), u_max: float = 1.0, s_range: tuple[float, float] = (0.0, 0.0)) -> FluidField4D:
    """``n`` independent random states stored as a degenerate ``(n, 1, 1, 1)`` patch for the algebraic identities."""
    rng = np.random.default_rng(seed)
    h = rng.uniform(*h_range, (n, 1, 1, 1))
    us = rng.uniform(-u_max, u_max, (3, n, 1, 1, 1))
    s = rng.uniform(*s_range, (n, 1, 1, 1)) if s_range[1] > s_range[0] else np.full((n, 1, 1, 1), s_range[0])
    u = np.concatenate([np.sqrt(1.0 + np.sum(us**2, axis=0))[None], us])
    return FluidField4D(np.zeros(4), 1.0, h, u, s, eos)


def algebraic_identities(fld: FluidField4D) -> dict[str, float]:
    """Maximum defects of the pointwise identities over every sample of ``fld``."""
    h, h_inv, n = metric_fields(fld)
    hm = np.moveaxis(h, (0, 1), (-2, -1))
    him = np.moveaxis(h_inv, (0, 1), (-2, -1))
    u = np.moveaxis(fld.u, 0, -1)
    ul = np.moveaxis(fld.u_lower(), 0, -1)
    n = n[..., None]
    Pi = MINKOWSKI + u[..., :, None] * u[..., None, :]
    N = -him[..., :, 0]
    B = u / u[..., :1]
    c2 = (fld.c() ** 2)[..., None]
    hB = np.einsum("...a,...ab->...b", B, hm)
    return {
        "h_times_h_inverse": float(np.max(np.abs(hm @ him - np.eye(4)))),
        "h_inverse_00": float(np.max(np.abs(him[..., 0, 0] + 1.0))),
        "n_at_least_one": float(np.max(np.maximum(0.0, 1.0 - n))),
        "Pi_annihilates_u": float(np.max(np.abs(np.einsum("...ab,...b->...a", Pi, ul)))),
        "Pi_idempotent": float(np.max(np.abs(np.einsum("...ab,bc,...cd->...ad", Pi, MINKOWSKI, Pi) - Pi))),
        "Pi_trace_minus_3": float(np.max(np.abs(np.einsum("...ab,ab->...", Pi, MINKOWSKI) - 3.0))),
        "h_u_u_plus_n": float(np.max(np.abs(np.einsum("...a,...ab,...b->...", u, hm, u) + n[..., 0]) / n[..., 0])),
        "h_N_N_plus_1": float(np.max(np.abs(np.einsum("...a,...ab,...b->...", N, hm, N) + 1.0))),
        "h_B_N_plus_1": float(np.max(np.abs(np.einsum("...a,...a->...", hB, N) + 1.0))),
        "u_orthogonal_vort_symbol": float(np.max(np.abs(np.einsum("abcd,...a,...b->...cd", EPSILON_UPPER, ul, ul)))),
        "c_in_range": float(np.max(np.maximum(0.0, c2 - 1.0))),
    }


# ---------------------------------------------------------------- embedded plane-symmetric solution


def embedded_simple_wave(cmap: Any, t0: float, x0: float, spacing: float, half_width: int = 2 * HALO) -> FluidField4D:
    """Plane-symmetric simple wave from the closed-form solution, sampled around ``(t0, x0)``.

    ``extras`` holds the eikonal function ``U`` and the Riemann invariant ``R_plus``.
    """
    from .fluid_state import fluid_from_invariants

    data = cmap.sol.data
    eos = data.eos
    offsets = spacing * np.arange(-half_width, half_width + 1)
    tt, xx = np.meshgrid(t0 + offsets, x0 + offsets, indexing="ij")
    U2 = cmap.upsilon_inverse(tt, xx)
    R2 = data.R0(U2)
    st = fluid_from_invariants(R2, np.zeros_like(R2), eos)
    size = 2 * half_width + 1
    shape = (size,) * 4

    def lift(a: FloatArray) -> FloatArray:
        return np.broadcast_to(a[:, :, None, None], shape).copy()

    zero = np.zeros(shape)
    u = np.stack([lift(st.u0), lift(st.u1), zero, zero])
    fld = FluidField4D(np.array([t0, x0, 0.0, 0.0]) - half_width * spacing, float(spacing), lift(st.h), u, zero.copy(), eos)
    fld.extras["U"] = lift(U2)
    fld.extras["R_plus"] = lift(R2)
    return fld


def null_pair_1d(fld: FluidField4D) -> tuple[FloatArray, FloatArray]:
    """``L = (1, L1, 0, 0)`` and ``Lbar = (1, Lbar1, 0, 0)`` from the plane-symmetric state."""
    c = fld.c()
    u0, u1 = fld.u[0], fld.u[1]
    zero = np.zeros_like(u0)
    one = np.ones_like(u0)
    L = np.stack([one, (u1 + c * u0) / (u0 + c * u1), zero, zero])
    Lbar = np.stack([one, (u1 - c * u0) / (u0 - c * u1), zero, zero])
    return L, Lbar


def eikonal_null_vector(fld: FluidField4D) -> FloatArray:
    """``L = Lgeo / Lgeo^0`` with ``Lgeo^a = -(h^-1)^{ab} ∂_b U``."""
    _, h_inv, _ = metric_fields(fld)
    Lgeo = -np.einsum("ab...,b...->a...", h_inv, fld.d(fld.extras["U"]))
    return Lgeo / Lgeo[0]


def eikonal_residual(fld: FluidField4D, point: Sequence[int] | None = None) -> float:
    U = fld.extras["U"]
    return null_form(fld, "Qh", U, U, point)


def wave_residual(fld: FluidField4D, point: Sequence[int] | None = None) -> float:
    """``Lbar(L R_plus)`` with nested finite differences."""
    L, Lbar = null_pair_1d(fld)
    LR = np.einsum("a...,a...->...", L, fld.d(fld.extras["R_plus"]))
    return float(at(np.einsum("a...,a...->...", Lbar, fld.d(LR)), _point(fld, point)))


# ---------------------------------------------------------------- convergence suite


DEFAULT_SPACINGS = (0.08, 0.04, 0.02, 0.01)


@dataclass(frozen=True)
class ConvergenceRow:
    name: str
    spacings: tuple[float, ...]
    residuals: tuple[float, ...]
    orders: tuple[float, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "spacings": list(self.spacings), "residuals": list(self.residuals), "orders": list(self.orders)}


def _row(name: str, spacings: Sequence[float], residual: Callable[[float], float]) -> ConvergenceRow:
    res = [abs(residual(d)) for d in spacings]
    ratio = spacings[0] / spacings[1]
    return ConvergenceRow(name, tuple(spacings), tuple(res), tuple(float(o) for o in observed_orders(res, ratio)))


def residual_convergence(
    cmap: Any,
    eos_3d: EquationOfState,
    spacings: Sequence[float] = DEFAULT_SPACINGS,
    seed: int = 0,
    t_fraction: float = 0.5,
) -> list[ConvergenceRow]:
    """Residuals of the differential identities under mesh refinement.

    ``vort_grad`` uses the exact gradient of a random scalar, ``vort_S`` the
    exact entropy gradient of a manufactured field; the eikonal, wave and
    constraint residuals are evaluated on the embedded simple wave at
    ``t = t_fraction T_shock``.
    """
    center = np.array([0.3, -0.2, 0.1, 0.4])
    rng = np.random.default_rng(seed)
    scalar = TrigField.random(rng, 0.5)
    data = cmap.sol.data
    t0 = t_fraction * data.T_shock
    x0 = float(cmap.x1(t0, data.center))

    def vort_grad(d: float) -> float:
        fld = manufactured_field(eos_3d, center, d, seed)
        return float(np.max(np.abs(vort(fld, scalar.gradient(*fld.coords())))))

    def vort_S(d: float) -> float:
        fld = manufactured_field(eos_3d, center, d, seed)
        return float(np.max(np.abs(vort(fld, fld.extras["S"]))))

    cache: dict[float, FluidField4D] = {}

    def wave_field(d: float) -> FluidField4D:
        if d not in cache:
            cache[d] = embedded_simple_wave(cmap, t0, x0, d)
        return cache[d]

    return [
        _row("vort_grad", spacings, vort_grad),
        _row("vort_S", spacings, vort_S),
        _row("eikonal", spacings, lambda d: eikonal_residual(wave_field(d))),
        _row("wave", spacings, lambda d: wave_residual(wave_field(d))),
        _row("constraint", spacings, lambda d: float(at(constraint_residual(wave_field(d)), wave_field(d).center_index))),
    ]
