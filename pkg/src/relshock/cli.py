"""Command line: scenario files in, deterministic CSV, JSON and SVG out.

A scenario is an INI file with optional sections ``[eos]``, ``[seed]``,
``[data]``, ``[geometry]``, ``[oracle]``, ``[energy]``, ``[kernels]`` and
``[output]``.  Missing sections fall back to the default scenario.  The
``RELSHOCK_SCENARIO`` environment variable names a scenario used when
``--scenario`` is not given.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, RelshockError

ENV_SCENARIO = "RELSHOCK_SCENARIO"
SECTIONS = ("eos", "seed", "data", "geometry", "oracle", "energy", "kernels", "output")


# ---------------------------------------------------------------- scenario


@dataclass
class Scenario:
    """Parsed scenario; every section is a plain string mapping until used."""

    sections: dict[str, dict[str, str]]
    source: str | None = None

    @classmethod
    def load(cls, path: str | Path | None) -> Scenario:
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        parser.optionxform = str  # keep key case
        source = None
        if path is not None:
            p = Path(path)
            if not p.is_file():
                raise ConfigError("scenario file not found", path=str(p))
            try:
                parser.read(p)
            except configparser.Error as exc:
                raise ConfigError("scenario file is not valid INI", path=str(p), detail=str(exc)) from exc
            source = str(p)
        unknown = [s for s in parser.sections() if s not in SECTIONS]
        if unknown:
            raise ConfigError("unknown scenario sections", sections=unknown, allowed=list(SECTIONS))
        return cls({s: dict(parser[s]) if parser.has_section(s) else {} for s in SECTIONS}, source)

    def get(self, section: str, key: str, default: Any, kind: type = float) -> Any:
        raw = self.sections[section].get(key)
        if raw is None:
            return default
        try:
            if kind is bool:
                return raw.strip().lower() in ("1", "true", "yes", "on")
            return kind(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} must be {kind.__name__}", section=section, key=key, value=raw) from exc

    def get_list(self, section: str, key: str, default: Sequence[float], kind: type = float) -> list[Any]:
        raw = self.sections[section].get(key)
        if raw is None:
            return list(default)
        try:
            return [kind(v) for v in raw.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} must be a list of {kind.__name__}", section=section, key=key, value=raw) from exc

    # ------------------------------------------------------------ builders

    def eos(self):
        from .eos import EquationOfState, default_eos

        return EquationOfState.from_mapping(self.sections["eos"]) if self.sections["eos"] else default_eos()

    def data_config(self):
        from .seed_data import DataConfig

        kwargs = {}
        for f in fields(DataConfig):
            if f.name in self.sections["data"]:
                kwargs[f.name] = self.get("data", f.name, None, int if isinstance(f.default, int) else float)
        unknown = set(self.sections["data"]) - {f.name for f in fields(DataConfig)}
        if unknown:
            raise ConfigError("unknown [data] keys", keys=sorted(unknown))
        return DataConfig(**kwargs)

    def initial_data(self):
        from .seed_data import default_seed, prepare_initial_data, seed_from_mapping

        profile = seed_from_mapping(self.sections["seed"]) if self.sections["seed"] else default_seed()
        return prepare_initial_data(profile, self.eos(), self.data_config())

    def validate(self) -> None:
        """Parse every section before any computation starts."""
        from .seed_data import seed_from_mapping

        self.eos()
        if self.sections["seed"]:
            seed_from_mapping(self.sections["seed"])
        self.data_config()
        self.get("geometry", "n_nodes", 4096, int)
        self.get_list("oracle", "ladder", (1024, 2048, 4096, 8192), int)
        self.get_list("oracle", "thresholds", (2.5, 5.0, 10.0, 20.0))
        self.get("oracle", "cfl", 0.45)
        self.get("energy", "n_samples", 1000, int)
        self.get_list("kernels", "spacings", (0.08, 0.04, 0.02, 0.01))


# ---------------------------------------------------------------- writers


def _fmt(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, header: Sequence[str], columns: Iterable[Sequence[Any]]) -> None:
    cols = [np.asarray(c).ravel() for c in columns]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else str(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    if hasattr(obj, "__dataclass_fields__"):
        return _jsonable({f: getattr(obj, f) for f in obj.__dataclass_fields__})
    return obj


def write_json(path: Path, payload: Any) -> None:
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- SVG


class SvgPlot:
    """Minimal line plot emitter with linear axes."""

    def __init__(self, title: str, xlabel: str, ylabel: str, xlim: tuple[float, float], ylim: tuple[float, float], width: int = 640, height: int = 480) -> None:
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.xlim, self.ylim = xlim, ylim
        self.width, self.height = width, height
        self.margin = 60
        self.items: list[str] = []

    def _px(self, x: float, y: float) -> tuple[float, float]:
        m = self.margin
        X = m + (x - self.xlim[0]) / (self.xlim[1] - self.xlim[0]) * (self.width - 2 * m)
        Y = self.height - m - (y - self.ylim[0]) / (self.ylim[1] - self.ylim[0]) * (self.height - 2 * m)
        return X, Y

    def line(self, x: Sequence[float], y: Sequence[float], color: str = "black", width: float = 1.5, dash: str | None = None) -> None:
        pts = " ".join("{:.2f},{:.2f}".format(*self._px(a, b)) for a, b in zip(x, y) if np.isfinite(a) and np.isfinite(b))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{extra} points="{pts}"/>')

    def point(self, x: float, y: float, color: str = "red", r: float = 4.0, label: str | None = None) -> None:
        X, Y = self._px(x, y)
        self.items.append(f'<circle cx="{X:.2f}" cy="{Y:.2f}" r="{r}" fill="{color}"/>')
        if label:
            self.items.append(f'<text x="{X + 6:.2f}" y="{Y - 6:.2f}" font-size="12">{label}</text>')

    def legend(self, entries: Sequence[tuple[str, str]]) -> None:
        for i, (color, text) in enumerate(entries):
            y = self.margin + 16 * i
            x = self.width - self.margin - 150
            self.items.append(f'<line x1="{x}" y1="{y}" x2="{x + 20}" y2="{y}" stroke="{color}" stroke-width="2"/>')
            self.items.append(f'<text x="{x + 26}" y="{y + 4}" font-size="12">{text}</text>')

    def render(self) -> str:
        m = self.margin
        w, h = self.width, self.height
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
            f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
            f'<rect x="{m}" y="{m}" width="{w - 2 * m}" height="{h - 2 * m}" fill="none" stroke="black"/>',
            f'<text x="{w / 2:.1f}" y="{m / 2:.1f}" font-size="16" text-anchor="middle">{self.title}</text>',
            f'<text x="{w / 2:.1f}" y="{h - 15}" font-size="14" text-anchor="middle">{self.xlabel}</text>',
            f'<text x="15" y="{h / 2:.1f}" font-size="14" text-anchor="middle" transform="rotate(-90 15 {h / 2:.1f})">{self.ylabel}</text>',
        ]
        for k in range(5):
            xv = self.xlim[0] + k / 4 * (self.xlim[1] - self.xlim[0])
            yv = self.ylim[0] + k / 4 * (self.ylim[1] - self.ylim[0])
            X, _ = self._px(xv, self.ylim[0])
            _, Y = self._px(self.xlim[0], yv)
            parts.append(f'<text x="{X:.1f}" y="{h - m + 16}" font-size="11" text-anchor="middle">{xv:.3g}</text>')
            parts.append(f'<text x="{m - 6}" y="{Y + 4:.1f}" font-size="11" text-anchor="end">{yv:.3g}</text>')
        parts.extend(self.items)
        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    def save(self, path: Path) -> None:
        path.write_text(self.render())


# ---------------------------------------------------------------- subcommands


def _geometry(scn: Scenario):
    from .geo_solution import GeometricSolution
    from .mghd_boundary import build_boundary

    data = scn.initial_data()
    sol = GeometricSolution(data)
    boundary = build_boundary(sol, scn.get("geometry", "n_nodes", 4096, int))
    return data, sol, boundary


def cmd_seed(scn: Scenario, out: Path, args: argparse.Namespace) -> dict[str, Any]:
    data = scn.initial_data()
    U = np.linspace(*data.support, 1025)
    _, dR, _ = data.R0_derivatives(U)
    write_csv(out / "seed.csv", ["U", "phi", "G", "R0", "dR0"], [U, data.phi(U), data.G(U), data.R0(U), dR])
    summary = data.summary()
    write_json(out / "seed.json", summary)
    return summary


def cmd_solve_geo(scn: Scenario, out: Path, args: argparse.Namespace) -> dict[str, Any]:
    from .geo_solution import GeometricSolution, verify_sharp_estimates

    data = scn.initial_data()
    sol = GeometricSolution(data)
    n_t = scn.get("geometry", "n_t", 33, int)
    n_U = scn.get("geometry", "n_U", 129, int)
    t = np.linspace(0.0, data.T_shock, n_t)
    U = data.center + np.linspace(-data.U_rad, data.U_rad, n_U)
    tt, UU = np.meshgrid(t, U, indexing="ij")
    f = sol.all_fields(tt, UU)
    keys = ["t", "U", "R_plus", "mu", "L_mu", "Xbreve_mu", "XX_mu", "partial1_Rplus"]
    write_csv(out / "geo.csv", keys, [f[k] for k in keys])
    report = verify_sharp_estimates(sol)
    write_json(out / "geo.json", {"T_shock": data.T_shock, "U_rad": data.U_rad, "sharp_estimates": report})
    return report


def cmd_boundary(scn: Scenario, out: Path, args: argparse.Namespace) -> dict[str, Any]:
    from ._numerics import loglog_fit

    data, sol, boundary = _geometry(scn)
    c0, U_rad, T = data.center, boundary.U_rad, data.T_shock
    U = c0 + np.linspace(-U_rad, U_rad, 1025)
    top = boundary.top(U)
    write_csv(out / "boundary.csv", ["U", "t_top", "mu_top"], [U, top, sol.mu(top, U)])
    Vl = -np.geomspace(1e-3 * U_rad, 0.1 * U_rad, 128)
    Vr = np.geomspace(1e-3 * U_rad, 0.1 * U_rad, 128)
    fits = {
        "t_sing_minus_T": loglog_fit(Vl, boundary.t_sing(c0 + Vl) - T, 1e-3 * U_rad, 0.1 * U_rad),
        "t_ch_minus_T": loglog_fit(Vr, boundary.t_ch(c0 + Vr) - T, 1e-3 * U_rad, 0.1 * U_rad),
        "mu_on_horizon": loglog_fit(Vr, sol.mu(boundary.t_ch(c0 + Vr), c0 + Vr), 1e-3 * U_rad, 0.1 * U_rad),
    }
    payload = {"crease": boundary.crease, "T_shock": T, "U_rad": U_rad, "center": c0, "fits": fits}
    write_json(out / "boundary.json", payload)
    return payload


def cmd_map(scn: Scenario, out: Path, args: argparse.Namespace) -> dict[str, Any]:
    from .coordinate_map import CoordinateMap, injectivity_audit

    data, sol, boundary = _geometry(scn)
    cmap = CoordinateMap(sol, boundary)
    n = scn.get("geometry", "audit_n", 200, int)
    U = data.center + np.linspace(-boundary.U_rad, boundary.U_rad, 65)
    frac = np.linspace(0.0, 1.0, 33)
    tt = boundary.top(U)[None, :] * frac[:, None]
    UU = np.broadcast_to(U, tt.shape)
    write_csv(out / "map.csv", ["t", "U", "x1", "jacobian_det"], [tt, UU, cmap.x1(tt, UU), cmap.jacobian_det(tt, UU)])
    audit = injectivity_audit(cmap, boundary, n=n)
    write_json(out / "map.json", audit)
    return audit


def cmd_oracle(scn: Scenario, out: Path, args: argparse.Namespace) -> dict[str, Any]:
    from .oracle_solver import estimate_blowup_time, evolve

    data = scn.initial_data()
    scheme = scn.get("oracle", "scheme", "minmod", str)
    cfl = scn.get("oracle", "cfl", 0.45)
    if args.blowup:
        est = estimate_blowup_time(
            data,
            scn.get_list("oracle", "ladder", (1024, 2048, 4096, 8192), int),
            scn.get_list("oracle", "thresholds", (2.5, 5.0, 10.0, 20.0)),
            cfl=cfl,
            scheme=scheme,
        )
        payload = {"T_shock": data.T_shock, "blowup": est, "relative_error": abs(est.estimate - data.T_shock) / data.T_shock}
        write_json(out / "blowup.json", payload)
        return payload
    n = scn.get("oracle", "n", 1024, int)
    t_end = scn.get("oracle", "t_fraction", 0.5) * data.T_shock
    width = data.support[1] - data.support[0]
    run = evolve(data, width / n, t_end, cfl=cfl, scheme=scheme)
    write_csv(out / "oracle.csv", ["x", "R_plus", "R_minus"], [run.x, run.R_plus, run.R_minus])
    payload = run.summary()
    write_json(out / "oracle.json", payload)
    return payload


def cmd_compare(scn: Scenario, out: Path, args: argparse.Namespace) -> dict[str, Any]:
    from ._numerics import observed_orders
    from .oracle_solver import compare_with_geometric, evolve

    data = scn.initial_data()
    ladder = scn.get_list("oracle", "compare_ladder", (256, 512, 1024, 2048), int)
    t_end = scn.get("oracle", "t_fraction", 0.5) * data.T_shock
    width = data.support[1] - data.support[0]
    rows = []
    for n in ladder:
        run = evolve(data, width / n, t_end, cfl=scn.get("oracle", "cfl", 0.45), scheme="upwind")
        rows.append(compare_with_geometric(run, data))
    l1 = [r.l1 for r in rows]
    payload = {"t": t_end, "ladder": ladder, "results": rows, "l1_ratios": [a / b for a, b in zip(l1[:-1], l1[1:])], "observed_orders": observed_orders(l1)}
    write_csv(out / "compare.csv", ["N", "l1", "linf"], [ladder, l1, [r.linf for r in rows]])
    write_json(out / "compare.json", payload)
    return payload


def _energy_chunk(args: tuple[dict[str, str], int, int, dict[str, Any]]) -> dict[str, Any]:
    eos_cfg, n, seed, box_kwargs = args
    from .energy_currents import StateBox, entropy_coupled_eos, positivity_scan
    from .eos import EquationOfState

    eos = EquationOfState.from_mapping(eos_cfg) if eos_cfg else None
    if eos is None or not eos.has_q:
        # entropy variations need q; fall back to an entropy-coupled law
        eos = entropy_coupled_eos()
    out = positivity_scan(eos, n, StateBox(**box_kwargs), seed=seed)
    out["eos_kind"] = eos.kind
    return out


def _merge_scans(parts: Sequence[dict[str, Any]]) -> dict[str, Any]:
    merged = {
        "n_samples": sum(p["n_samples"] for p in parts),
        "min_eigenvalue": min(p["min_eigenvalue"] for p in parts),
        "reduced_min_ratio": min(p["reduced_min_ratio"] for p in parts),
        "xi_parallel_range": [min(p["xi_parallel_range"][0] for p in parts), max(p["xi_parallel_range"][1] for p in parts)],
        "threshold_max": max(p["threshold_max"] for p in parts),
        "box": parts[0]["box"],
        "eos_kind": parts[0]["eos_kind"],
    }
    merged["positive"] = merged["min_eigenvalue"] > 0
    merged["reduced_positive"] = merged["reduced_min_ratio"] > 0
    merged["passed"] = merged["positive"] and merged["reduced_positive"]
    return merged


def check_energy_current(scn: Scenario, workers: int) -> dict[str, Any]:
    """Positivity scan in fixed chunks of 250 pairs so results do not depend on ``workers``."""
    n = scn.get("energy", "n_samples", 1000, int)
    seed = scn.get("energy", "seed", 0, int)
    box = {
        "h_range": tuple(scn.get_list("energy", "h_range", (-0.5, 0.5))),
        "u_max": scn.get("energy", "u_max", 1.0),
        "s_range": tuple(scn.get_list("energy", "s_range", (-0.2, 0.2))),
    }
    eos_cfg = scn.sections["eos"]
    chunk = 250
    jobs = [(eos_cfg, min(chunk, n - i), seed + k, box) for k, i in enumerate(range(0, n, chunk))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_energy_chunk, jobs))
    else:
        parts = [_energy_chunk(j) for j in jobs]
    return _merge_scans(parts)


def cmd_check(scn: Scenario, out: Path, args: argparse.Namespace) -> dict[str, Any]:
    what = args.what
    if what == "identities":
        from .checks import identity_suite

        payload = identity_suite(scn.get("energy", "identity_samples", 10_000, int))
    elif what == "energy-current":
        payload = check_energy_current(scn, args.workers)
    elif what == "kernels":
        from .coordinate_map import CoordinateMap
        from .energy_currents import entropy_coupled_eos
        from .fluid3d_kernels import residual_convergence

        _, sol, boundary = _geometry(scn)
        rows = residual_convergence(CoordinateMap(sol, boundary), entropy_coupled_eos(), scn.get_list("kernels", "spacings", (0.08, 0.04, 0.02, 0.01)))
        min_order = scn.get("kernels", "min_order", 3.5)
        payload = {"rows": rows, "min_order": min_order, "passed": all(min(r.orders) >= min_order for r in rows)}
    elif what == "sharp-estimates":
        from .geo_solution import GeometricSolution, verify_sharp_estimates

        payload = verify_sharp_estimates(GeometricSolution(scn.initial_data()))
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError("unknown check", what=what)
    write_json(out / f"check_{what.replace('-', '_')}.json", payload)
    return payload


def cmd_plot(scn: Scenario, out: Path, args: argparse.Namespace) -> dict[str, Any]:
    from .coordinate_map import CoordinateMap

    data, sol, boundary = _geometry(scn)
    c0, U_rad, T = data.center, boundary.U_rad, data.T_shock

    U = np.linspace(*data.support, 801)
    phi = data.phi(U)
    p = SvgPlot("seed profile", "U", "value", (float(U[0]), float(U[-1])), (float(min(phi.min(), data.R0(U).min())) * 1.1, float(max(phi.max(), data.R0(U).max())) * 1.1 + 1e-12))
    p.line(U, phi, "black")
    p.line(U, data.R0(U), "steelblue", dash="6,3")
    p.legend([("black", "phi"), ("steelblue", "R0")])
    p.save(out / "seed_profile.svg")

    Ul = c0 + np.linspace(-U_rad, 0.0, 201)
    Ur = c0 + np.linspace(0.0, U_rad, 201)
    t_hi = float(max(boundary.t_sing(Ul[0]), boundary.t_ch(Ur[-1])))
    g = SvgPlot("development region in geometric coordinates", "U", "t", (c0 - U_rad, c0 + U_rad), (0.0, t_hi * 1.05))
    g.line(Ul, boundary.t_sing(Ul), "firebrick", 2.0)
    g.line(Ur, boundary.t_ch(Ur), "navy", 2.0)
    g.line([c0 - U_rad, c0 + U_rad], [T, T], "gray", 1.0, "4,4")
    g.point(boundary.crease.U, boundary.crease.t, "black", label="crease")
    g.legend([("firebrick", "singular boundary"), ("navy", "Cauchy horizon"), ("gray", "t = T")])
    g.save(out / "geometric_region.svg")

    cmap = CoordinateMap(sol, boundary)
    Ut = c0 + np.linspace(-U_rad, U_rad, 401)
    tt = boundary.top(Ut)
    xt = cmap.x1(tt, Ut)
    xb = cmap.x1(0.0, Ut)
    c = SvgPlot("image in Cartesian coordinates", "x1", "t", (float(min(xt.min(), xb.min())), float(max(xt.max(), xb.max()))), (0.0, t_hi * 1.05))
    for Uc in c0 + np.linspace(-U_rad, U_rad, 21):
        ts = np.linspace(0.0, float(boundary.top(Uc)), 50)
        c.line(cmap.x1(ts, Uc), ts, "lightgray", 1.0)
    c.line(xt, tt, "firebrick", 2.0)
    c.point(float(cmap.x1(boundary.crease.t, boundary.crease.U)), boundary.crease.t, "black", label="crease")
    c.legend([("lightgray", "characteristics"), ("firebrick", "upper boundary")])
    c.save(out / "cartesian_region.svg")
    payload = {"files": ["seed_profile.svg", "geometric_region.svg", "cartesian_region.svg"]}
    write_json(out / "plot.json", payload)
    return payload


COMMANDS = {
    "seed": cmd_seed,
    "solve-geo": cmd_solve_geo,
    "boundary": cmd_boundary,
    "map": cmd_map,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "check": cmd_check,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relshock", description="Simple-wave shock formation toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", default=None, help=f"scenario INI file (default: ${ENV_SCENARIO} or built-in)")
    common.add_argument("--out", default="relshock_out", help="output directory")
    common.add_argument("--workers", type=int, default=1, help="worker processes for parallel scans")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "oracle":
            sp.add_argument("--blowup", action="store_true", help="run the mesh ladder and extrapolate the blowup time")
        if name == "check":
            sp.add_argument("what", choices=["identities", "energy-current", "kernels", "sharp-estimates"])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    try:
        scn = Scenario.load(args.scenario or os.environ.get(ENV_SCENARIO))
        scn.validate()
        out.mkdir(parents=True, exist_ok=True)
        payload = COMMANDS[args.command](scn, out, args)
    except RelshockError as exc:
        err = exc.to_dict()
        try:
            out.mkdir(parents=True, exist_ok=True)
            write_json(out / "error.json", err)
        except OSError:
            pass
        print(json.dumps(_jsonable(err), sort_keys=True), file=sys.stderr)
        return exc.exit_code
    passed = payload.get("passed", True) if isinstance(payload, dict) else True
    print(json.dumps({"command": args.command, "out": str(out), "passed": bool(passed)}, sort_keys=True))
    return 0 if passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
