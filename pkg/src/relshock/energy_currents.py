"""Energy currents for the equations of variation and their positivity.

The current ``J^alpha[Vdot, Vdot]`` is a quadratic form in the variation
``Vdot = (hdot, udot^0..3, sdot)`` with coefficients depending on the state
``V = (h, u^0..3, s)``.  Contracting with a one-form ``xi`` gives a scalar
quadratic form whose symmetric 6x6 matrix is extracted by polarization.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.linalg import eigh

from ._numerics import FloatArray
from .eos import EquationOfState, exponential_thermodynamics
from .errors import HyperbolicityError, MissingThermoCallback, NotTimelike, SearchExhausted

MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])


@dataclass(frozen=True)
class SolutionArray:
    """State ``(h, u^0, u^1, u^2, u^3, s)`` with ``m(u, u) = -1``."""

    h: float
    u: FloatArray
    s: float = 0.0

    @classmethod
    def from_spatial_velocity(cls, h: float, u_spatial: Sequence[float], s: float = 0.0) -> SolutionArray:
        us = np.asarray(u_spatial, dtype=float)
        return cls(float(h), np.concatenate([[np.sqrt(1.0 + us @ us)], us]), float(s))

    @property
    def u_lower(self) -> FloatArray:
        return MINKOWSKI @ self.u

    def normalization_defect(self) -> float:
        return float(self.u @ MINKOWSKI @ self.u + 1.0)


def state_scalars(V: SolutionArray, eos: EquationOfState, need_q: bool = True) -> tuple[float, float]:
    """``(c, q)`` at the state; raises outside the regime of hyperbolicity.

    ``q`` couples entropy variations to the rest; an EOS without a ``q``
    callback raises ``MissingThermoCallback`` when ``need_q`` is set.
    """
    c = float(eos.c_of_h(V.h, V.s))
    if not 0.0 < c <= 1.0:
        raise HyperbolicityError("state outside the regime of hyperbolicity", c=c)
    if need_q and not eos.has_q:
        raise MissingThermoCallback("entropy variations need the EOS coupling q(h, s)", eos_kind=eos.kind)
    return c, float(eos.q(V.h, V.s)) if eos.has_q else 0.0


def _current_terms(u: FloatArray, c2: float, q: float, f1: float, f2: float, Vdot: FloatArray) -> FloatArray:
    """Eight-term current for a batch of variations ``Vdot[..., 6]``; returns ``J[..., 4]``."""
    hd = Vdot[..., 0:1]
    ud = Vdot[..., 1:5]
    sd = Vdot[..., 5:6]
    ud_ud = np.einsum("...a,ab,...b->...", ud, MINKOWSKI, ud)[..., None]
    u_ud = (ud @ (MINKOWSKI @ u))[..., None]
    return (
        f1 * u * sd**2
        - 2.0 * c2 * q * ud * sd
        - 2.0 * q * u * sd * hd
        + u * hd**2
        + 2.0 * c2 * ud * hd
        + c2 * u * ud_ud
        + 2.0 * c2 * u * u_ud * hd
        + f2 * u * u_ud**2
    )


def energy_current(V: SolutionArray, f1: float, f2: float, Vdot: npt.ArrayLike, eos: EquationOfState) -> FloatArray:
    """All eight terms of the energy current, index positions as in ``J^alpha``.

    ``Vdot`` may carry leading batch axes.
    """
    Vdot = np.asarray(Vdot, dtype=float)
    c, q = state_scalars(V, eos, need_q=bool(np.any(Vdot[..., 5] != 0.0)))
    return _current_terms(V.u, c * c, q, f1, f2, Vdot)


def contracted_current(V: SolutionArray, xi: npt.ArrayLike, f1: float, f2: float, Vdot: npt.ArrayLike, eos: EquationOfState) -> FloatArray | float:
    out = energy_current(V, f1, f2, Vdot, eos) @ np.asarray(xi, dtype=float)
    return float(out) if np.ndim(out) == 0 else out


def _polarization_basis(dim: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    eye = np.eye(dim)
    ii, jj = np.tril_indices(dim, -1)
    return eye, eye[ii] + eye[jj], eye[ii] - eye[jj]


def _polarize(Q_diag: FloatArray, Q_plus: FloatArray, Q_minus: FloatArray, dim: int) -> FloatArray:
    M = np.diag(Q_diag)
    ii, jj = np.tril_indices(dim, -1)
    M[ii, jj] = M[jj, ii] = 0.25 * (Q_plus - Q_minus)
    return M


def bilinear_form(V: SolutionArray, xi: npt.ArrayLike, f1: float, f2: float, eos: EquationOfState, dim: int = 6) -> FloatArray:
    """Symmetric ``M`` with ``xi_alpha J^alpha[Vdot, Vdot] = Vdot^T M Vdot``, by polarization.

    ``M_ii = Q(e_i)`` and ``M_ij = (Q(e_i + e_j) - Q(e_i - e_j)) / 4``.  With
    ``dim=5`` the entropy variation is left out, which needs no ``q``.
    """
    xi = np.asarray(xi, dtype=float)
    c, q = state_scalars(V, eos, need_q=dim == 6)
    diag, plus, minus = (np.pad(b, ((0, 0), (0, 6 - dim))) for b in _polarization_basis(dim))
    Q = [_current_terms(V.u, c * c, q, f1, f2, b) @ xi for b in (diag, plus, minus)]
    return _polarize(*Q, dim)


def min_eigenvalue(V: SolutionArray, xi: npt.ArrayLike, f1: float, f2: float, eos: EquationOfState) -> float:
    return float(np.linalg.eigvalsh(bilinear_form(V, xi, f1, f2, eos))[0])


# ---------------------------------------------------------------- acoustical geometry


def acoustic_inverse_metric(V: SolutionArray, c: float) -> FloatArray:
    """``h^-1 = n^-1 (c^2 m^-1 + (c^2 - 1) u u)`` with ``n = c^2 + (1 - c^2)(u^0)^2``."""
    n = c * c + (1.0 - c * c) * V.u[0] ** 2
    return (c * c * MINKOWSKI + (c * c - 1.0) * np.outer(V.u, V.u)) / n


def check_timelike(V: SolutionArray, xi: npt.ArrayLike, eos: EquationOfState) -> float:
    """Return ``h^-1(xi, xi)``; raise unless it is negative, ``xi_0 > 0`` and ``xi_k u^k > 0``.

    The last condition fixes the half of the acoustical cone using ``u``,
    which is always acoustically timelike.  It is implied by ``xi_0 > 0``
    when the fluid moves slower than sound in the lab frame, and is needed
    on its own otherwise.
    """
    xi = np.asarray(xi, dtype=float)
    c, _ = state_scalars(V, eos, need_q=False)
    val = float(xi @ acoustic_inverse_metric(V, c) @ xi)
    if not (val < 0.0 and xi[0] > 0.0 and xi @ V.u > 0.0):
        raise NotTimelike(
            "xi is not a past-directed acoustically timelike one-form",
            h_inv_xi_xi=val,
            xi0=float(xi[0]),
            xi_parallel=float(xi @ V.u),
        )
    return val


def xi_parallel(V: SolutionArray, xi: npt.ArrayLike) -> float:
    return float(np.asarray(xi, dtype=float) @ V.u)


def _orthogonal_complement(u: FloatArray) -> FloatArray:
    """Three vectors spanning the Minkowski-orthogonal complement of ``u`` (rows)."""
    u_low = MINKOWSKI @ u
    # null space of the row vector u_low
    _, _, vt = np.linalg.svd(u_low[None, :])
    return vt[1:]


def reduced_form(V: SolutionArray, xi: npt.ArrayLike, eos: EquationOfState) -> tuple[FloatArray, FloatArray]:
    """Form and Gram matrix on variations with ``sdot = 0`` and ``u_k udot^k = 0`` (``f1 = f2 = 0``).

    Coordinates are ``(hdot, a_1, a_2, a_3)`` with ``udot = sum a_i e_i`` for
    a basis ``e_i`` of the orthogonal complement of ``u``; the Gram matrix
    represents ``hdot^2 + m(udot, udot)``.
    """
    E = _orthogonal_complement(V.u)
    P = np.zeros((6, 4))
    P[0, 0] = 1.0
    P[1:5, 1:] = E.T
    M = bilinear_form(V, xi, 0.0, 0.0, eos, dim=5)
    A = P[:5].T @ M @ P[:5]
    B = np.zeros((4, 4))
    B[0, 0] = 1.0
    B[1:, 1:] = E @ MINKOWSKI @ E.T
    return 0.5 * (A + A.T), B


def reduced_min_ratio(V: SolutionArray, xi: npt.ArrayLike, eos: EquationOfState) -> float:
    """Smallest ``C`` with ``xi.J >= C (hdot^2 + m(udot, udot))`` on the reduced variation set."""
    A, B = reduced_form(V, xi, eos)
    return float(eigh(A, B, eigvals_only=True)[0])


# ---------------------------------------------------------------- sampling and scans


def entropy_coupled_eos() -> EquationOfState:
    """Polytropic speed with entropy dependence and exponential thermodynamics, so ``q != 0``."""
    return EquationOfState.polytropic(0.5, 0.3, sigma=0.2, thermo=exponential_thermodynamics(1.0, 1.5, 0.4, 0.7))


@dataclass(frozen=True)
class StateBox:
    """Compact state set: ``h`` in an interval, ``|u^i|`` bounded, ``s`` in an interval."""

    h_range: tuple[float, float] = (-0.5, 0.5)
    u_max: float = 1.0
    s_range: tuple[float, float] = (0.0, 0.0)

    def sample(self, rng: np.random.Generator) -> SolutionArray:
        h = rng.uniform(*self.h_range)
        us = rng.uniform(-self.u_max, self.u_max, 3)
        s = rng.uniform(*self.s_range) if self.s_range[1] > self.s_range[0] else self.s_range[0]
        return SolutionArray.from_spatial_velocity(h, us, s)


def sample_timelike_xi(V: SolutionArray, eos: EquationOfState, rng: np.random.Generator, margin: float = 1e-3, max_tries: int = 10000) -> FloatArray:
    """Rejection sample of a one-form with ``xi_0 > 0``, ``xi_k u^k > 0`` and ``h^-1(xi, xi) < -margin``."""
    c, _ = state_scalars(V, eos, need_q=False)
    Hinv = acoustic_inverse_metric(V, c)
    for _ in range(max_tries):
        xi = np.concatenate([[rng.uniform(0.2, 2.0)], rng.uniform(-1.0, 1.0, 3)])
        if xi @ Hinv @ xi < -margin and xi @ V.u > 0.0:  # xi_0 > 0 by construction
            return xi
    raise NotTimelike("no timelike one-form found by rejection sampling", tries=max_tries)


def threshold_search(V: SolutionArray, xi: npt.ArrayLike, eos: EquationOfState, margin: float = 1e-6, start: float = 1.0, max_doublings: int = 60) -> tuple[float, float]:
    """Smallest ``f = f1 = f2`` in the doubling sequence from ``start`` with min eigenvalue ``> margin``."""
    check_timelike(V, xi, eos)
    f = start
    for _ in range(max_doublings + 1):
        lam = min_eigenvalue(V, xi, f, f, eos)
        if lam > margin:
            return f, lam
        f *= 2.0
    raise SearchExhausted("doubling search for f1 = f2 did not reach positivity", last_f=f, last_eigenvalue=lam)


def positivity_scan(
    eos: EquationOfState,
    n_samples: int = 1000,
    box: StateBox | None = None,
    f1: float | None = None,
    f2: float | None = None,
    xi: npt.ArrayLike | None = None,
    seed: int = 0,
    margin: float = 1e-6,
) -> dict[str, Any]:
    """Positivity evidence over random ``(state, xi)`` pairs.

    With ``f1``/``f2`` unset the doubling search is run per pair and the
    largest threshold is reported; otherwise the minimum eigenvalue at the
    given values is reported.  The reduced positivity ratio and the range of
    ``xi_k u^k`` are recorded for every pair.
    """
    box = box or StateBox()
    rng = np.random.default_rng(seed)
    thresholds = []
    min_eigs = []
    reduced = []
    parallel = []
    for _ in range(n_samples):
        V = box.sample(rng)
        w = np.asarray(xi, dtype=float) if xi is not None else sample_timelike_xi(V, eos, rng)
        check_timelike(V, w, eos)
        if f1 is None or f2 is None:
            f, lam = threshold_search(V, w, eos, margin)
            thresholds.append(f)
        else:
            lam = min_eigenvalue(V, w, f1, f2, eos)
        min_eigs.append(lam)
        reduced.append(reduced_min_ratio(V, w, eos))
        parallel.append(xi_parallel(V, w))
    out: dict[str, Any] = {
        "n_samples": n_samples,
        "min_eigenvalue": float(np.min(min_eigs)),
        "reduced_min_ratio": float(np.min(reduced)),
        "xi_parallel_range": [float(np.min(parallel)), float(np.max(parallel))],
        "box": {"h_range": list(box.h_range), "u_max": box.u_max, "s_range": list(box.s_range)},
    }
    if thresholds:
        out["threshold_max"] = float(np.max(thresholds))
        out["threshold_median"] = float(np.median(thresholds))
    else:
        out["f1"] = f1
        out["f2"] = f2
    out["positive"] = bool(out["min_eigenvalue"] > 0)
    out["reduced_positive"] = bool(out["reduced_min_ratio"] > 0)
    return out
