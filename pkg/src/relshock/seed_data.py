"""Shock-forming seed profiles, their certification, and the induced initial data.

A seed profile ``phi(U)`` is a compactly supported function whose derivative
has a unique non-degenerate negative minimum at ``U = 0``.  The Riemann
invariant data are ``R0(U) = A^-1(phi(U))``, so that ``A[R0(U)] = phi(U)`` and
the source term of the ``mu`` transport equation is ``G = phi'``.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.special import expit

from ._numerics import FloatArray
from .eos import EquationOfState
from .errors import (
    ConfigError,
    DomainError,
    NonDegeneracyFailure,
    RelshockError,
    SearchExhausted,
    ViolatedMinimum,
    ViolatedSupport,
    ViolatedTail,
    ViolatedThirdDerivative,
)

MAX_DERIVATIVE = 4


# ---------------------------------------------------------------- plateau bump


_TRANSITION_CLIP = 2e-3


def transition(y: npt.ArrayLike, k: int = 0) -> FloatArray:
    """k-th derivative of the smooth step ``S`` (0 for y <= 0, 1 for y >= 1).

    ``S(y) = sigma(z(y))`` with the logistic ``sigma`` and
    ``z = 1/(1 - y) - 1/y``; this equals ``f(y) / (f(y) + f(1 - y))`` for
    ``f(y) = exp(-1/y)`` but never forms the underflowing exponentials.
    Derivatives use the logistic identities ``sigma' = s (1 - s)`` and the
    chain rule for composite functions up to order four.  Outside
    ``[clip, 1 - clip]`` the step is flat to below 1e-200.
    """
    if not 0 <= k <= MAX_DERIVATIVE:
        raise ValueError("derivative order must be between 0 and 4")
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    if k == 0:
        out[y >= 1.0 - _TRANSITION_CLIP] = 1.0
    inner = (y > _TRANSITION_CLIP) & (y < 1.0 - _TRANSITION_CLIP)
    if not np.any(inner):
        return out
    x = y[inner]
    s = expit(1.0 / (1.0 - x) - 1.0 / x)
    if k == 0:
        out[inner] = s
        return out
    # z^(j) = j! / (1 - y)^(j+1) - (-1)^j j! / y^(j+1)
    z = [None] + [math.factorial(j) * ((1.0 - x) ** -(j + 1) - (-1.0) ** j * x ** -(j + 1)) for j in range(1, 5)]
    s1 = s * (1.0 - s)
    s2 = s1 * (1.0 - 2.0 * s)
    s3 = s1 * (1.0 - 6.0 * s + 6.0 * s * s)
    s4 = s2 * (1.0 - 12.0 * s + 12.0 * s * s)
    if k == 1:
        val = s1 * z[1]
    elif k == 2:
        val = s2 * z[1] ** 2 + s1 * z[2]
    elif k == 3:
        val = s3 * z[1] ** 3 + 3.0 * s2 * z[1] * z[2] + s1 * z[3]
    else:
        val = s4 * z[1] ** 4 + 6.0 * s3 * z[1] ** 2 * z[2] + s2 * (3.0 * z[2] ** 2 + 4.0 * z[1] * z[3]) + s1 * z[4]
    out[inner] = val
    return out


def plateau_bump(U: npt.ArrayLike, U1: float, U2: float, k: int = 0) -> FloatArray:
    """C-infinity bump equal to 1 on ``[-1, 1]`` and 0 outside ``(-U1, U2)``."""
    U = np.asarray(U, dtype=float)
    out = np.zeros_like(U)
    if k == 0:
        out[np.abs(U) <= 1.0] = 1.0
    right = U > 1.0
    left = U < -1.0
    if np.any(right):
        scale = -1.0 / (U2 - 1.0)
        out[right] = transition((U2 - U[right]) / (U2 - 1.0), k) * scale**k
    if np.any(left):
        scale = 1.0 / (U1 - 1.0)
        out[left] = transition((U[left] + U1) / (U1 - 1.0), k) * scale**k
    return out


# ---------------------------------------------------------------- seed profiles


class SeedProfile:
    """Seed ``phi = amplitude * psi`` with derivative oracles up to order four."""

    def __init__(self, amplitude: float, support: tuple[float, float]) -> None:
        self.amplitude = float(amplitude)
        self.support = (float(support[0]), float(support[1]))
        #: location of the minimum of phi' (the crease coordinate)
        self.center = 0.0

    def shape(self, U: FloatArray, k: int) -> FloatArray:  # pragma: no cover - abstract
        raise NotImplementedError

    def phi(self, U: npt.ArrayLike, k: int = 0) -> FloatArray:
        if not 0 <= k <= MAX_DERIVATIVE:
            raise ValueError("derivative order must be between 0 and 4")
        return self.amplitude * self.shape(np.asarray(U, dtype=float), k)

    def with_amplitude(self, amplitude: float) -> SeedProfile:
        clone = dataclasses.replace(self) if dataclasses.is_dataclass(self) else _shallow_copy(self)
        clone.amplitude = float(amplitude)
        return clone

    def describe(self) -> dict[str, Any]:
        return {"kind": type(self).__name__, "amplitude": self.amplitude, "support": list(self.support)}


def _shallow_copy(obj):
    new = object.__new__(type(obj))
    new.__dict__.update(obj.__dict__)
    return new


class PlateauPolynomialSeed(SeedProfile):
    """``psi(U) = w(U) * sum_j a_j (U - shift)^j`` with the plateau bump ``w`` shifted as well.

    The default coefficients ``(0, -1, 0, 1/6)`` give ``psi'(0) = -1``,
    ``psi''(0) = 0`` and ``psi'''(0) = 1``.
    """

    def __init__(
        self,
        amplitude: float = 0.1,
        coefficients: Sequence[float] = (0.0, -1.0, 0.0, 1.0 / 6.0),
        U1: float = 2.0,
        U2: float = 2.0,
        shift: float = 0.0,
    ) -> None:
        super().__init__(amplitude, (-U1 + shift, U2 + shift))
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.U1 = float(U1)
        self.U2 = float(U2)
        self.shift = float(shift)
        self.center = self.shift

    def shape(self, U: FloatArray, k: int) -> FloatArray:
        z = U - self.shift
        poly = np.polynomial.Polynomial(self.coefficients)
        total = np.zeros_like(z)
        # Leibniz rule: (w p)^(k) = sum_j C(k, j) w^(j) p^(k-j)
        for j in range(k + 1):
            p_part = poly.deriv(k - j) if k > j else poly
            total = total + math.comb(k, j) * plateau_bump(z, self.U1, self.U2, j) * p_part(z)
        return total

    def describe(self) -> dict[str, Any]:
        d = super().describe()
        d.update(coefficients=self.coefficients.tolist(), U1=self.U1, U2=self.U2, shift=self.shift)
        return d


class PerturbedSeed(SeedProfile):
    """A base seed plus a smooth perturbation given with its derivative oracles."""

    def __init__(self, base: SeedProfile, perturbation: Callable[[FloatArray, int], FloatArray]) -> None:
        super().__init__(base.amplitude, base.support)
        self.center = base.center
        self.base = base
        self.perturbation = perturbation

    def phi(self, U: npt.ArrayLike, k: int = 0) -> FloatArray:
        base = self.base.with_amplitude(self.amplitude)
        return base.phi(U, k) + (self.amplitude / self.base.amplitude) * self.perturbation(np.asarray(U, dtype=float), k)


def default_seed(amplitude: float = 0.1) -> PlateauPolynomialSeed:
    return PlateauPolynomialSeed(amplitude)


# ---------------------------------------------------------------- certification


def certification_grid(
    support: tuple[float, float], n_uniform: int = 4096, n_cluster: int = 1024, cluster: float = 0.1, center: float = 0.0
) -> FloatArray:
    """Uniform grid on the support plus points clustered quadratically toward ``center``."""
    uni = np.linspace(support[0], support[1], n_uniform)
    s = np.linspace(0.0, 1.0, n_cluster // 2 + 1)[1:]
    clustered = cluster * s**2
    return np.unique(np.concatenate([uni, center + clustered, center - clustered, [center]]))


@dataclass(frozen=True)
class SeedConstants:
    delta_star: float
    b_coeff: float
    p_coeff: float


def validate_seed(profile: SeedProfile, grid: FloatArray | None = None, rel_tol: float = 1e-10) -> SeedConstants:
    """Certify the admissibility conditions of a seed on a dense grid.

    Conditions are stated relative to ``profile.center`` (0 for unshifted
    seeds).  Raises the first violated condition (support, minimum, third
    derivative, tail) with the witnessing location and the margin by which
    it fails.
    """
    c0 = profile.center
    lo, hi = profile.support
    if not (c0 - lo > 1.0 and hi - c0 > 1.0):
        raise ViolatedSupport(
            "support must contain the unit interval around the minimum with room on both sides",
            location=lo if c0 - lo <= 1.0 else hi,
            margin=min(c0 - lo, hi - c0) - 1.0,
        )
    outside = np.concatenate([np.linspace(lo - 1.0, lo, 257)[:-1], np.linspace(hi, hi + 1.0, 257)[1:]])
    for k in range(MAX_DERIVATIVE + 1):
        vals = profile.phi(outside, k)
        bad = np.flatnonzero(vals != 0.0)
        if len(bad):
            i = bad[np.argmax(np.abs(vals[bad]))]
            raise ViolatedSupport(f"derivative {k} of the seed is nonzero outside its support", location=outside[i], margin=float(abs(vals[i])), order=k)

    if grid is None:
        grid = certification_grid(profile.support, center=c0)
    at_center = np.array([c0])
    d1 = profile.phi(grid, 1)
    d1_0 = float(profile.phi(at_center, 1)[0])
    d2_0 = float(profile.phi(at_center, 2)[0])
    if not d1_0 < 0.0:
        raise ViolatedMinimum("phi' must be negative at the minimum", location=c0, margin=d1_0)
    delta = -d1_0
    if abs(d2_0) > rel_tol * delta:
        raise ViolatedMinimum("phi'' must vanish at the minimum", location=c0, margin=d2_0)
    below = np.flatnonzero((d1 < d1_0 - rel_tol * delta) & (grid != c0))
    if len(below):
        i = below[np.argmin(d1[below])]
        raise ViolatedMinimum("phi' attains a smaller value away from the minimum", location=grid[i], margin=float(d1[i] - d1_0))

    b = float(profile.phi(at_center, 3)[0])
    if not b > 0.0:
        raise ViolatedThirdDerivative("phi''' must be positive at the minimum", location=c0, margin=b)
    core = grid[np.abs(grid - c0) <= 1.0]
    d3 = profile.phi(core, 3)
    low = d3 - 0.5 * b
    high = 2.0 * b - d3
    if np.min(low) < -rel_tol * b:
        i = int(np.argmin(low))
        raise ViolatedThirdDerivative("phi''' drops below b/2 near the minimum", location=core[i], margin=float(low[i]))
    if np.min(high) < -rel_tol * b:
        i = int(np.argmin(high))
        raise ViolatedThirdDerivative("phi''' exceeds 2b near the minimum", location=core[i], margin=float(high[i]))

    tail = np.abs(grid - c0) >= 1.0
    ratio = -d1[tail] / delta
    p = float(max(0.0, np.max(ratio))) if np.any(tail) else 0.0
    if p >= 1.0:
        i = int(np.argmax(ratio))
        raise ViolatedTail("phi' is not bounded below by -p delta with p < 1 away from the minimum", location=grid[tail][i], margin=1.0 - p)
    return SeedConstants(delta, b, p)


# ---------------------------------------------------------------- initial data


@dataclass(frozen=True)
class DataConfig:
    r_max: float = 1.0
    c_margin: float = 1e-3
    nondegeneracy_margin: float = 0.5
    max_halvings: int = 40
    n_uniform: int = 4096
    n_cluster: int = 1024
    U_rad_min: float = 0.01
    U_rad_max: float = 0.99
    U_rad_bisections: int = 30


@dataclass(frozen=True)
class InitialData:
    """Validated simple-wave data ``R0 = A^-1 o phi`` and its derived constants."""

    profile: SeedProfile
    eos: EquationOfState
    amplitude: float
    delta_star: float
    b_coeff: float
    p_coeff: float
    T_shock: float
    c_over_n_min: float
    c_over_n_max: float
    grid: FloatArray
    taylor_brackets: dict[str, tuple[float, float]]
    halvings: int
    config: DataConfig = field(default_factory=DataConfig)
    U_rad: float | None = None
    U_rad_report: dict[str, Any] | None = None

    @property
    def support(self) -> tuple[float, float]:
        return self.profile.support

    @property
    def center(self) -> float:
        return self.profile.center

    def phi(self, U: npt.ArrayLike, k: int = 0) -> FloatArray:
        return self.profile.phi(U, k)

    def G(self, U: npt.ArrayLike, k: int = 0) -> FloatArray:
        """``G = d/dU A[R0(U)] = phi'(U)`` and its ``k``-th derivative."""
        return self.profile.phi(U, k + 1)

    def R0(self, U: npt.ArrayLike) -> FloatArray:
        return self.eos.A_inv(self.profile.phi(U))

    def R0_derivatives(self, U: npt.ArrayLike) -> tuple[FloatArray, FloatArray, FloatArray]:
        """``(R0, R0', R0'')`` from implicit differentiation of ``A[R0] = phi``."""
        from .fluid_state import simple_wave_scalars

        U = np.asarray(U, dtype=float)
        R = self.R0(U)
        sw = simple_wave_scalars(R, self.eos, order=1)
        d1 = self.profile.phi(U, 1) / sw.A_prime
        d2 = (self.profile.phi(U, 2) - sw.A_second * d1**2) / sw.A_prime
        return R, d1, d2

    def summary(self) -> dict[str, Any]:
        return {
            "amplitude": self.amplitude,
            "halvings": self.halvings,
            "delta_star": self.delta_star,
            "b_coeff": self.b_coeff,
            "p_coeff": self.p_coeff,
            "T_shock": self.T_shock,
            "c_over_n_min": self.c_over_n_min,
            "c_over_n_max": self.c_over_n_max,
            "U_rad": self.U_rad,
            "support": list(self.support),
            "center": self.center,
            "taylor_brackets": {k: list(v) for k, v in self.taylor_brackets.items()},
            "U_rad_report": self.U_rad_report,
            "profile": self.profile.describe(),
            "eos": {"kind": self.eos.kind, "H_bar": self.eos.H_bar, **self.eos.params},
        }


def _admissible_amplitude(profile: SeedProfile, eos: EquationOfState, grid: FloatArray, cfg: DataConfig) -> tuple[bool, str]:
    from .fluid_state import simple_wave_scalars

    phi = profile.phi(grid)
    lo, hi = eos.A_range_values()
    if np.min(phi) < lo or np.max(phi) > hi:
        return False, "seed leaves the invertible range of A"
    try:
        R = eos.A_inv(phi)
        if np.max(np.abs(R)) > cfg.r_max:
            return False, "|R0| exceeds r_max"
        sw = simple_wave_scalars(R, eos)
    except (DomainError, RelshockError) as exc:
        return False, str(exc)
    if np.min(sw.c) < cfg.c_margin or np.max(sw.c) > 1.0 - cfg.c_margin and np.max(sw.c) < 1.0:
        return False, "sound speed too close to the edge of (0, 1)"
    a0 = abs(float(eos.A_integrand(np.array([0.0]))[0]))
    if np.min(np.abs(sw.A_prime)) < cfg.nondegeneracy_margin * a0:
        return False, "dA/dR along the data drops below the non-degeneracy margin"
    return True, ""


def build_initial_data(profile: SeedProfile, eos: EquationOfState, config: DataConfig | None = None) -> InitialData:
    """Shrink the amplitude geometrically until the data are admissible, then derive constants."""
    cfg = config or DataConfig()
    factor = eos.nondegeneracy_factor()
    if abs(factor) < 1e-12:
        raise NonDegeneracyFailure("equation of state is degenerate: 1 - c^2 + c H c' = 0 at H_bar", factor=factor)
    grid = certification_grid(profile.support, cfg.n_uniform, cfg.n_cluster, center=profile.center)
    amplitude = profile.amplitude
    reason = ""
    for halvings in range(cfg.max_halvings + 1):
        candidate = profile.with_amplitude(amplitude)
        ok, reason = _admissible_amplitude(candidate, eos, grid, cfg)
        if ok:
            break
        amplitude *= 0.5
    else:
        raise NonDegeneracyFailure("no amplitude in the halving search keeps the data admissible", last_reason=reason, halvings=cfg.max_halvings)

    constants = validate_seed(candidate, grid)
    G = candidate.phi(grid, 1)
    delta_star = float(np.max(np.maximum(-G, 0.0)))
    R = eos.A_inv(candidate.phi(grid))
    from .fluid_state import simple_wave_scalars

    sw = simple_wave_scalars(R, eos)
    c_over_n = 1.0 / sw.g
    # outside the support the state is the constant reference state
    c_bar = float(eos.c(eos.H_bar))
    c_over_n_all = np.concatenate([c_over_n, [c_bar]])

    core = (np.abs(grid - profile.center) <= 1.0) & (grid != profile.center)
    Uc = grid[core]
    dU = Uc - profile.center
    # Taylor remainders in integral form, free of the cancellation in
    # (phi'(U) + delta) / U^2 near the minimum (phi''(center) = 0 is certified)
    nodes, weights = np.polynomial.legendre.leggauss(16)
    s = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    d3_along = candidate.phi(profile.center + dU[:, None] * s[None, :], 3)
    lam1 = d3_along @ (w * (1.0 - s))
    lam2 = d3_along @ w
    lam3 = candidate.phi(Uc, 3)
    brackets = {
        "Lambda1": (float(np.min(lam1)), float(np.max(lam1))),
        "Lambda2": (float(np.min(lam2)), float(np.max(lam2))),
        "Lambda3": (float(np.min(lam3)), float(np.max(lam3))),
    }
    return InitialData(
        profile=candidate,
        eos=eos,
        amplitude=amplitude,
        delta_star=delta_star,
        b_coeff=constants.b_coeff,
        p_coeff=constants.p_coeff,
        T_shock=1.0 / delta_star,
        c_over_n_min=float(np.min(c_over_n_all)),
        c_over_n_max=float(np.max(c_over_n_all)),
        grid=grid,
        taylor_brackets=brackets,
        halvings=halvings,
        config=cfg,
    )


# ---------------------------------------------------------------- interesting region


def _check_U_rad(data: InitialData, U_rad: float) -> tuple[bool, dict[str, Any]]:
    from .geo_solution import GeometricSolution, sharp_estimate_report

    report = sharp_estimate_report(GeometricSolution(data), U_rad)
    return report["passed"], report


def compute_U_rad(data: InitialData, eos: EquationOfState | None = None) -> InitialData:
    """Largest certified half-width of the interesting region, found by bisection.

    Returns a copy of ``data`` with ``U_rad`` and the bracketing report set.
    """
    cfg = data.config
    ok, report = _check_U_rad(data, cfg.U_rad_max)
    if ok:
        return dataclasses.replace(data, U_rad=cfg.U_rad_max, U_rad_report=report)
    ok_lo, report_lo = _check_U_rad(data, cfg.U_rad_min)
    if not ok_lo:
        raise SearchExhausted("no half-width above U_rad_min satisfies the sharp estimates", U_rad_min=cfg.U_rad_min, checks=report_lo["checks"])
    lo, hi = cfg.U_rad_min, cfg.U_rad_max
    best = report_lo
    for _ in range(cfg.U_rad_bisections):
        mid = 0.5 * (lo + hi)
        ok, rep = _check_U_rad(data, mid)
        if ok:
            lo, best = mid, rep
        else:
            hi = mid
    return dataclasses.replace(data, U_rad=lo, U_rad_report=best)


def prepare_initial_data(profile: SeedProfile | None = None, eos: EquationOfState | None = None, config: DataConfig | None = None) -> InitialData:
    """Build and certify initial data in one call (defaults: plateau cubic seed, c = 1/2)."""
    from .eos import default_eos

    data = build_initial_data(profile or default_seed(), eos or default_eos(), config)
    return compute_U_rad(data)


def seed_from_mapping(cfg: dict[str, str]) -> SeedProfile:
    """Seed profile from the ``[seed]`` section of a scenario file."""
    kind = cfg.get("kind", "plateau-polynomial").strip()
    if kind not in ("plateau-polynomial", "plateau-cubic"):
        raise ConfigError(f"unknown seed kind {kind!r}", kind=kind)
    try:
        amplitude = float(cfg.get("amplitude", cfg.get("eps0", "0.1")))
        U1 = float(cfg.get("U1", "2.0"))
        U2 = float(cfg.get("U2", "2.0"))
        shift = float(cfg.get("shift", "0.0"))
        coeffs = [float(v) for v in cfg.get("coefficients", "0 -1 0 0.16666666666666666").replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError("seed parameters must be numbers", detail=str(exc)) from exc
    if amplitude <= 0:
        raise ConfigError("seed amplitude must be positive", amplitude=amplitude)
    return PlateauPolynomialSeed(amplitude, coeffs, U1, U2, shift)
