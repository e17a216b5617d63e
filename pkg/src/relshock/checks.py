"""Randomized identity suite shared by the command line and the tests.

Every entry is a maximum defect over random samples together with the
tolerance it is held to; ``passed`` is true when every defect is within its
tolerance.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .energy_currents import (
    SolutionArray,
    bilinear_form,
    contracted_current,
    energy_current,
    entropy_coupled_eos,
    sample_timelike_xi,
)
from .eos import EquationOfState, default_eos
from .fluid3d_kernels import algebraic_identities, random_state_samples
from .fluid_state import fluid_from_invariants, invariants_from_fluid, metric_1d, null_frame

EXACT_TOL = 1e-12
TABLE_TOL = 1e-10


def fluid_state_identities(eos: EquationOfState, n: int, seed: int = 0, r_max: float = 1.0) -> dict[str, float]:
    """Plane-symmetric state identities at ``n`` random Riemann-invariant pairs."""
    rng = np.random.default_rng(seed)
    Rp = rng.uniform(-r_max, r_max, n)
    Rm = rng.uniform(-r_max, r_max, n)
    st = fluid_from_invariants(Rp, Rm, eos)
    Rp2, Rm2 = invariants_from_fluid(st.H, st.u1, eos)
    h, h_inv = metric_1d(st)
    frame = null_frame(st)
    hL = np.einsum("...i,...ij,...j->...", frame.L, h, frame.L)
    hLb = np.einsum("...i,...ij,...j->...", frame.Lbar, h, frame.Lbar)
    huu = np.einsum("...i,...ij,...j->...", st.u_upper, h, st.u_upper)
    scale = np.einsum("...i,...ij,...j->...", frame.L, h, frame.Lbar)
    return {
        "riemann_round_trip": float(max(np.max(np.abs(Rp2 - Rp)), np.max(np.abs(Rm2 - Rm)))),
        "normalization": float(np.max(np.abs(st.u0**2 - st.u1**2 - 1.0))),
        "metric_times_inverse": float(np.max(np.abs(h @ h_inv - np.eye(2)))),
        "inverse_00": float(np.max(np.abs(h_inv[..., 0, 0] + 1.0))),
        "h_u_u_plus_n": float(np.max(np.abs(huu + st.n_factor) / st.n_factor)),
        "L_null": float(np.max(np.abs(hL / scale))),
        "Lbar_null": float(np.max(np.abs(hLb / scale))),
    }


def energy_current_identities(eos: EquationOfState, n: int, seed: int = 0) -> dict[str, float]:
    """Quadratic-form consistency of the energy current at ``n`` random states."""
    rng = np.random.default_rng(seed)
    worst_form = 0.0
    worst_homog = 0.0
    worst_zero = 0.0
    for _ in range(n):
        h = rng.uniform(-0.5, 0.5)
        V = SolutionArray.from_spatial_velocity(h, rng.uniform(-1, 1, 3), rng.uniform(-0.2, 0.2))
        xi = sample_timelike_xi(V, eos, rng)
        f1, f2 = rng.uniform(0.0, 4.0, 2)
        M = bilinear_form(V, xi, f1, f2, eos)
        Vdot = rng.normal(size=6)
        direct = contracted_current(V, xi, f1, f2, Vdot, eos)
        scale = max(1.0, abs(direct))
        worst_form = max(worst_form, abs(direct - Vdot @ M @ Vdot) / scale)
        lam = rng.uniform(-3, 3)
        J = energy_current(V, f1, f2, Vdot, eos)
        worst_homog = max(worst_homog, float(np.max(np.abs(energy_current(V, f1, f2, lam * Vdot, eos) - lam**2 * J))) / max(1.0, lam**2 * float(np.max(np.abs(J)))))
        worst_zero = max(worst_zero, float(np.max(np.abs(energy_current(V, f1, f2, np.zeros(6), eos)))))
    return {"form_matches_current": worst_form, "homogeneity": worst_homog, "zero_variation": worst_zero}


def identity_suite(n: int = 10_000, seed: int = 0, n_energy: int | None = None) -> dict[str, Any]:
    """Run every algebraic identity; ``n_energy`` defaults to ``n``."""
    constant = default_eos()
    coupled = entropy_coupled_eos()
    results: dict[str, dict[str, Any]] = {}

    def record(group: str, defects: dict[str, float], tol: float, tol_overrides: dict[str, float] | None = None) -> None:
        tol_overrides = tol_overrides or {}
        results[group] = {
            name: {"defect": value, "tolerance": tol_overrides.get(name, tol), "passed": bool(value <= tol_overrides.get(name, tol))}
            for name, value in defects.items()
        }

    record("fluid_state_constant_eos", fluid_state_identities(constant, n, seed), EXACT_TOL)
    # a non-constant EOS routes F^-1 through a tabulated inverse
    record("fluid_state_polytropic_eos", fluid_state_identities(coupled, n, seed + 1), EXACT_TOL, {"riemann_round_trip": TABLE_TOL})
    record("energy_current", energy_current_identities(coupled, n if n_energy is None else n_energy, seed + 2), EXACT_TOL)
    record("kernels", algebraic_identities(random_state_samples(coupled, n, seed + 3, s_range=(-0.2, 0.2))), EXACT_TOL)
    passed = all(entry["passed"] for group in results.values() for entry in group.values())
    return {"n_samples": n, "seed": seed, "groups": results, "passed": passed}
