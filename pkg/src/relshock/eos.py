"""Barotropic equation of state and the scalar functions built from it.

The sound speed ``c(H, s)`` is the only thermodynamic input the plane
symmetric pipeline needs.  From it we build

* ``F(H)``, the solution of ``dF/dH = 1 / (H c)`` with ``F(H_bar) = 0``;
* the antiderivative ``A[R]`` of the characteristic-speed nonlinearity along
  simple waves (``R_minus = 0``), whose derivative drives ``mu``;
* dense monotone tables for ``F``, ``F^-1``, ``A`` and ``A^-1``.

Both integrals are tabulated once per EOS with RK4 step halving and are then
evaluated anywhere by a short Gauss-Legendre increment from the nearest node.
"""

from __future__ import annotations

import configparser
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.interpolate import CubicSpline

from ._numerics import FloatArray, QuadratureTable, monotone_inverse, rk4_halving
from .errors import ConfigError, DomainError, HyperbolicityError, OutOfRangeError

SpeedFn = Callable[[FloatArray, FloatArray], FloatArray]

TOL_ROOT = 1e-12


@dataclass(frozen=True)
class Thermodynamics:
    """Optional thermodynamic callbacks, all functions of ``(h, s)``.

    ``theta_h`` is the derivative of ``theta`` with respect to the
    logarithmic enthalpy ``h`` at fixed entropy.
    """

    n: Callable[[FloatArray, FloatArray], FloatArray]
    theta: Callable[[FloatArray, FloatArray], FloatArray]
    theta_h: Callable[[FloatArray, FloatArray], FloatArray]


def exponential_thermodynamics(n_bar: float, n_exponent: float, theta_bar: float, theta_exponent: float) -> Thermodynamics:
    """``n = n_bar e^{n_exponent h}``, ``theta = theta_bar e^{theta_exponent h}``."""
    return Thermodynamics(
        n=lambda h, s: n_bar * np.exp(n_exponent * np.asarray(h, dtype=float)),
        theta=lambda h, s: theta_bar * np.exp(theta_exponent * np.asarray(h, dtype=float)),
        theta_h=lambda h, s: theta_exponent * theta_bar * np.exp(theta_exponent * np.asarray(h, dtype=float)),
    )


class EquationOfState:
    """Sound-speed law ``c(H, s)`` on ``[H_min, H_max]`` with reference ``H_bar``.

    Tables are built lazily on first use and never change afterwards, so a
    constructed instance can be shared freely between workers.
    """

    def __init__(
        self,
        c: SpeedFn,
        dc_dH: SpeedFn,
        H_bar: float,
        H_min: float,
        H_max: float,
        *,
        d2c_dH2: SpeedFn | None = None,
        q: Callable[[FloatArray, FloatArray], FloatArray] | None = None,
        thermo: Thermodynamics | None = None,
        kind: str = "custom",
        params: Mapping[str, Any] | None = None,
        A_range: float = 4.0,
        table_panels: int = 2048,
    ) -> None:
        if not (0.0 < H_min < H_bar < H_max):
            raise ConfigError("EOS domain must satisfy 0 < H_min < H_bar < H_max", H_min=H_min, H_bar=H_bar, H_max=H_max)
        self._c = c
        self._dc_dH = dc_dH
        self._d2c_dH2 = d2c_dH2
        self.H_bar = float(H_bar)
        self.H_min = float(H_min)
        self.H_max = float(H_max)
        self.thermo = thermo
        if q is None and thermo is not None:
            H_bar_ = self.H_bar

            def q(h, s):
                return thermo.theta(h, s) / (H_bar_ * np.exp(h))

        self._q = q
        self.kind = kind
        self.params = dict(params or {})
        self.A_range = float(A_range)
        self.table_panels = int(table_panels)
        sample = np.geomspace(self.H_min, self.H_max, 257)
        cs = self._c(sample, np.zeros_like(sample))
        if np.any(~np.isfinite(cs)) or np.any(cs <= 0.0) or np.any(cs > 1.0):
            raise HyperbolicityError("sound speed leaves (0, 1] on the declared domain", c_min=float(np.min(cs)), c_max=float(np.max(cs)))

    # ------------------------------------------------------------ constructors

    @classmethod
    def constant(
        cls,
        c_bar: float = 0.5,
        H_bar: float = 1.0,
        H_min: float | None = None,
        H_max: float | None = None,
        **kwargs: Any,
    ) -> EquationOfState:
        """Constant sound speed ``c = c_bar``; every derived scalar is analytic."""
        if not 0.0 < c_bar <= 1.0:
            raise HyperbolicityError("constant sound speed must lie in (0, 1]", c_bar=c_bar)
        H_min = H_bar / 20.0 if H_min is None else H_min
        H_max = H_bar * 20.0 if H_max is None else H_max
        return cls(
            c=lambda H, s=0.0: np.full(np.broadcast(np.asarray(H), np.asarray(s)).shape, float(c_bar)),
            dc_dH=lambda H, s=0.0: np.zeros(np.broadcast(np.asarray(H), np.asarray(s)).shape),
            d2c_dH2=lambda H, s=0.0: np.zeros(np.broadcast(np.asarray(H), np.asarray(s)).shape),
            H_bar=H_bar,
            H_min=H_min,
            H_max=H_max,
            kind="constant",
            params={"c_bar": c_bar},
            **kwargs,
        )

    @classmethod
    def polytropic(
        cls,
        c_bar: float,
        kappa: float,
        H_bar: float = 1.0,
        H_min: float | None = None,
        H_max: float | None = None,
        sigma: float = 0.0,
        **kwargs: Any,
    ) -> EquationOfState:
        """Power-law speed ``c = c_bar (H / H_bar)^kappa exp(sigma s)``."""
        H_min = H_bar / 4.0 if H_min is None else H_min
        H_max = H_bar * 4.0 if H_max is None else H_max

        def c(H, s=0.0):
            return c_bar * (np.asarray(H, dtype=float) / H_bar) ** kappa * np.exp(sigma * np.asarray(s, dtype=float))

        def dc(H, s=0.0):
            return kappa * c(H, s) / np.asarray(H, dtype=float)

        def d2c(H, s=0.0):
            return kappa * (kappa - 1.0) * c(H, s) / np.asarray(H, dtype=float) ** 2

        return cls(
            c=c,
            dc_dH=dc,
            d2c_dH2=d2c,
            H_bar=H_bar,
            H_min=H_min,
            H_max=H_max,
            kind="polytropic",
            params={"c_bar": c_bar, "kappa": kappa, "sigma": sigma},
            **kwargs,
        )

    @classmethod
    def tabulated(
        cls,
        H_values: npt.ArrayLike,
        c_values: npt.ArrayLike,
        H_bar: float = 1.0,
        **kwargs: Any,
    ) -> EquationOfState:
        """Entropy-independent speed given by a not-a-knot cubic spline in ``H``."""
        H_values = np.asarray(H_values, dtype=float)
        c_values = np.asarray(c_values, dtype=float)
        if H_values.ndim != 1 or H_values.shape != c_values.shape or len(H_values) < 4:
            raise ConfigError("tabulated EOS needs matching H and c lists with at least 4 entries")
        if np.any(np.diff(H_values) <= 0):
            raise ConfigError("tabulated H values must be strictly increasing")
        spline = CubicSpline(H_values, c_values)
        d1 = spline.derivative(1)
        d2 = spline.derivative(2)

        def wrap(fn):
            return lambda H, s=0.0: np.broadcast_to(fn(np.asarray(H, dtype=float)), np.broadcast(np.asarray(H), np.asarray(s)).shape).astype(float)

        return cls(
            c=wrap(spline),
            dc_dH=wrap(d1),
            d2c_dH2=wrap(d2),
            H_bar=H_bar,
            H_min=float(H_values[0]),
            H_max=float(H_values[-1]),
            kind="tabulated",
            params={"H": H_values.tolist(), "c": c_values.tolist()},
            **kwargs,
        )

    @classmethod
    def from_mapping(cls, cfg: Mapping[str, str]) -> EquationOfState:
        """Build from a flat key/value mapping (the ``[eos]`` section of a scenario)."""
        def num(key: str, default: float | None = None) -> float | None:
            if key not in cfg:
                return default
            try:
                return float(cfg[key])
            except ValueError as exc:
                raise ConfigError(f"EOS key {key!r} is not a number", key=key, value=str(cfg[key])) from exc

        def numbers(key: str) -> list[float]:
            if key not in cfg:
                raise ConfigError(f"EOS key {key!r} is required for this kind", key=key)
            try:
                return [float(v) for v in str(cfg[key]).replace(",", " ").split()]
            except ValueError as exc:
                raise ConfigError(f"EOS key {key!r} must be a list of numbers", key=key) from exc

        kind = str(cfg.get("kind", "constant")).strip()
        common: dict[str, Any] = {}
        if "A_range" in cfg:
            common["A_range"] = num("A_range")
        thermo = None
        if "theta_bar" in cfg or "n_bar" in cfg:
            thermo = exponential_thermodynamics(
                num("n_bar", 1.0), num("n_exponent", 1.0), num("theta_bar", 1.0), num("theta_exponent", 1.0)
            )
        common["thermo"] = thermo
        if "q" in cfg:
            q0 = num("q")
            common["q"] = lambda h, s: np.full(np.broadcast(np.asarray(h), np.asarray(s)).shape, q0)
        H_bar = num("H_bar", 1.0)
        if kind == "constant":
            return cls.constant(num("c_bar", 0.5), H_bar, num("H_min"), num("H_max"), **common)
        if kind in ("polytropic", "polytropic-like"):
            return cls.polytropic(
                num("c_bar", 0.5), num("kappa", 0.0), H_bar, num("H_min"), num("H_max"), sigma=num("sigma", 0.0), **common
            )
        if kind == "tabulated":
            return cls.tabulated(numbers("H"), numbers("c"), H_bar, **common)
        raise ConfigError(f"unknown EOS kind {kind!r}", kind=kind)

    @classmethod
    def from_file(cls, path: str | Path, section: str = "eos") -> EquationOfState:
        parser = configparser.ConfigParser()
        parser.optionxform = str
        if not parser.read(path):
            raise ConfigError("EOS file not found", path=str(path))
        if section not in parser:
            raise ConfigError(f"EOS file lacks a [{section}] section", path=str(path))
        return cls.from_mapping(dict(parser[section]))

    # ------------------------------------------------------------ pointwise data

    def c(self, H: npt.ArrayLike, s: npt.ArrayLike = 0.0) -> FloatArray:
        H = np.asarray(H, dtype=float)
        self._check_H(H)
        return np.asarray(self._c(H, np.asarray(s, dtype=float)), dtype=float)

    def dc_dH(self, H: npt.ArrayLike, s: npt.ArrayLike = 0.0) -> FloatArray:
        H = np.asarray(H, dtype=float)
        self._check_H(H)
        return np.asarray(self._dc_dH(H, np.asarray(s, dtype=float)), dtype=float)

    def d2c_dH2(self, H: npt.ArrayLike, s: npt.ArrayLike = 0.0) -> FloatArray:
        H = np.asarray(H, dtype=float)
        self._check_H(H)
        if self._d2c_dH2 is not None:
            return np.asarray(self._d2c_dH2(H, np.asarray(s, dtype=float)), dtype=float)
        step = 1e-4 * H
        return (self._dc_dH(H + step, s) - self._dc_dH(H - step, s)) / (2 * step)

    def c_of_h(self, h: npt.ArrayLike, s: npt.ArrayLike = 0.0) -> FloatArray:
        return self.c(self.H_bar * np.exp(np.asarray(h, dtype=float)), s)

    def q(self, h: npt.ArrayLike, s: npt.ArrayLike = 0.0) -> FloatArray:
        if self._q is None:
            return np.zeros(np.broadcast(np.asarray(h), np.asarray(s)).shape)
        return np.asarray(self._q(np.asarray(h, dtype=float), np.asarray(s, dtype=float)), dtype=float)

    @property
    def has_q(self) -> bool:
        return self._q is not None

    def _check_H(self, H: FloatArray) -> None:
        if np.any(~(H > 0)):
            raise DomainError("enthalpy must be positive")
        lo = self.H_min * (1 - 1e-12)
        hi = self.H_max * (1 + 1e-12)
        if np.any(H < lo) or np.any(H > hi):
            raise DomainError(
                "enthalpy outside the EOS domain",
                H_min=self.H_min,
                H_max=self.H_max,
                H_lo=float(np.min(H)),
                H_hi=float(np.max(H)),
            )

    # ------------------------------------------------------------ F and F^-1

    def _inv_c_of_h(self, x: FloatArray) -> FloatArray:
        return 1.0 / self.c(self.H_bar * np.exp(x))

    @cached_property
    def _F_table(self) -> QuadratureTable:
        return QuadratureTable(
            self._inv_c_of_h,
            math.log(self.H_min / self.H_bar),
            math.log(self.H_max / self.H_bar),
            panels_per_side=self.table_panels,
        )

    def F(self, H: npt.ArrayLike) -> FloatArray:
        H = np.asarray(H, dtype=float)
        self._check_H(H)
        x = np.clip(np.log(H / self.H_bar), self._F_table.x_min, self._F_table.x_max)
        return self._F_table(x)

    def F_range(self) -> tuple[float, float]:
        return float(self._F_table.q[0]), float(self._F_table.q[-1])

    def F_inv(self, y: npt.ArrayLike) -> FloatArray:
        y = np.asarray(y, dtype=float)
        if self.kind == "constant":
            lo, hi = self.F_range()
            if np.any(y < lo) or np.any(y > hi) or np.any(~np.isfinite(y)):
                raise OutOfRangeError("value not bracketed by the range of F", lower=lo, upper=hi)
            return self.H_bar * np.exp(self.params["c_bar"] * y)
        x = self._F_table.inverse(y, rtol=TOL_ROOT)
        return self.H_bar * np.exp(x)

    def c_of_F(self, y: npt.ArrayLike) -> FloatArray:
        """Sound speed at the enthalpy ``F^-1(y)``."""
        y = np.asarray(y, dtype=float)
        if self.kind == "constant":
            return np.full(y.shape, float(self.params["c_bar"]))
        return self.c(self.F_inv(y))

    def almost_riemann_F(self, H: npt.ArrayLike, s: npt.ArrayLike = 0.0) -> FloatArray:
        """``F(H, s)`` with ``dF/dH = 1 / (H c(H, s))`` at fixed ``s`` and ``F(H_bar, s) = 0``."""
        H, s = np.broadcast_arrays(np.asarray(H, dtype=float), np.asarray(s, dtype=float))
        self._check_H(H)
        x_end = np.log(H / self.H_bar)
        flat_x = x_end.ravel()
        flat_s = s.ravel()

        # substitute x = tau * x_end, tau in [0, 1]: dF/dtau = x_end / c
        def rhs(tau, _y):
            return flat_x / self.c(self.H_bar * np.exp(tau * flat_x), flat_s)

        sol = rk4_halving(rhs, np.array([0.0, 1.0]), np.zeros_like(flat_x), rtol=1e-13)
        return sol.y[-1].reshape(H.shape)

    # ------------------------------------------------------------ non-degeneracy and A

    def nondegeneracy_factor(self) -> float:
        """``1 - c^2 + c H dc/dH`` at ``(H_bar, s = 0)``.

        This is ``2 dL1/dR_plus`` at the constant state, the genuine
        nonlinearity coefficient of the ``L`` family.
        """
        c = float(self.c(self.H_bar))
        dc = float(self.dc_dH(self.H_bar))
        return 1.0 - c * c + c * self.H_bar * dc

    def A_integrand(self, R: npt.ArrayLike) -> FloatArray:
        """``-(1 - c^2 + c H c') / (2 (u0 + c u1)^2)`` on the simple-wave state ``(R, 0)``."""
        from .fluid_state import simple_wave_scalars

        sw = simple_wave_scalars(np.asarray(R, dtype=float), self, order=0)
        return sw.A_prime

    def A_integrand_derivative(self, R: npt.ArrayLike) -> FloatArray:
        from .fluid_state import simple_wave_scalars

        return simple_wave_scalars(np.asarray(R, dtype=float), self, order=1).A_second

    @cached_property
    def _A_bounds(self) -> tuple[float, float]:
        f_lo, f_hi = self.F_range()
        lo = max(2.0 * f_lo * (1 - 1e-9), -self.A_range, -50.0)
        hi = min(2.0 * f_hi * (1 - 1e-9), self.A_range, 50.0)
        return lo, hi

    @cached_property
    def _A_table(self) -> QuadratureTable:
        lo, hi = self._A_bounds
        return QuadratureTable(self.A_integrand, lo, hi, panels_per_side=self.table_panels)

    @cached_property
    def _A_monotone_window(self) -> tuple[int, int]:
        """Index window of the A table around 0 on which the integrand keeps its sign."""
        table = self._A_table
        a = self.A_integrand(table.x)
        i0 = int(np.searchsorted(table.x, 0.0))
        sign0 = np.sign(a[i0])
        if sign0 == 0:
            return i0, i0
        bad = np.sign(a) != sign0
        left = np.flatnonzero(bad[:i0])
        right = np.flatnonzero(bad[i0:])
        lo = left[-1] + 1 if len(left) else 0
        hi = i0 + right[0] - 1 if len(right) else len(a) - 1
        return int(lo), int(hi)

    def antiderivative_A(self, R_plus: npt.ArrayLike) -> FloatArray:
        return self._A_table(np.asarray(R_plus, dtype=float))

    def A_range_values(self) -> tuple[float, float]:
        lo, hi = self._A_monotone_window
        q = self._A_table.q
        return float(min(q[lo], q[hi])), float(max(q[lo], q[hi]))

    def A_inv(self, y: npt.ArrayLike) -> FloatArray:
        lo, hi = self._A_monotone_window
        if hi <= lo:
            raise OutOfRangeError("A is not monotone near the origin (degenerate EOS)")
        table = self._A_table
        return monotone_inverse(
            table,
            self.A_integrand,
            y,
            table.x[lo : hi + 1],
            table.q[lo : hi + 1],
            rtol=TOL_ROOT,
        )


# ---------------------------------------------------------------- functional API

def F(eos: EquationOfState, H: npt.ArrayLike) -> FloatArray:
    return eos.F(H)


def F_inv(eos: EquationOfState, y: npt.ArrayLike) -> FloatArray:
    return eos.F_inv(y)


def nondegeneracy_factor(eos: EquationOfState) -> float:
    return eos.nondegeneracy_factor()


def antiderivative_A(eos: EquationOfState, R_plus: npt.ArrayLike) -> FloatArray:
    return eos.antiderivative_A(R_plus)


def A_inv(eos: EquationOfState, y: npt.ArrayLike) -> FloatArray:
    return eos.A_inv(y)


def almost_riemann_F(eos: EquationOfState, H: npt.ArrayLike, s: npt.ArrayLike = 0.0) -> FloatArray:
    return eos.almost_riemann_F(H, s)


def default_eos() -> EquationOfState:
    """Constant ``c = 1/2`` with ``H_bar = 1``."""
    return EquationOfState.constant(0.5, 1.0)
